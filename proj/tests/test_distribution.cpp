#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "nofinetune/distribution.hpp"
#include "nofinetune/error.hpp"
#include "test_support.hpp"

namespace nft {
namespace {

using testing::bell_graph;
using testing::observed;

Alphabet bin(const std::string& name) { return numbered_alphabet(name, 2); }

/// PR box table built directly: a xor b = x*y, settings uniform.
JointDistribution pr_table() {
  std::vector<Alphabet> al{bin("A"), bin("B"), bin("X"), bin("Y")};
  std::vector<Rational> w;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) w.push_back(((a ^ b) == (x & y)) ? Rational(1, 8) : Rational(0));
  return JointDistribution(al, w);
}

bool contains(const std::vector<CIStatement>& v, const CIStatement& ci) {
  return std::find(v.begin(), v.end(), ci) != v.end();
}

TEST(JointDistribution, ValidatesTable) {
  EXPECT_THROW(JointDistribution({bin("A")}, {Rational(1, 2)}), InvalidDistributionError);
  EXPECT_THROW(JointDistribution({bin("A")}, {Rational(1, 2), Rational(1, 3)}),
               InvalidDistributionError);
  EXPECT_THROW(JointDistribution({bin("A")}, {Rational(3, 2), Rational(-1, 2)}),
               InvalidDistributionError);
  EXPECT_THROW(make_alphabet("A", {"0", "0"}), InvalidDistributionError);
  EXPECT_THROW(make_alphabet("A", {}), InvalidDistributionError);
  // Float mode accepts a sum within epsilon.
  EXPECT_NO_THROW(JointDistribution({bin("A")}, {from_double(0.5), from_double(0.5 + 1e-12)},
                                    Mode::floating));
}

TEST(Marginalize, UniformPairToSingle) {
  const auto p = JointDistribution::uniform({bin("A"), bin("B")});
  EXPECT_EQ(marginalize(p, {"A"}), JointDistribution::uniform({bin("A")}));
}

TEST(Marginalize, AllVariablesIsIdentity) {
  const auto p = pr_table();
  EXPECT_EQ(marginalize(p, p.variables()), p);
  EXPECT_THROW(marginalize(p, {"Q"}), UnknownVariableError);
}

TEST(Marginalize, BellModelMatchesTermwiseSum) {
  // Latent with three values and non-uniform kernels; the observable
  // marginal is checked against sum_l P(x)P(y)P(l)P(a|x,l)P(b|y,l).
  const Dag g = bell_graph();
  const auto kernels = random_kernels(g, {bin("X"), bin("Y"), bin("A"), bin("B"),
                                          numbered_alphabet("L", 3)},
                                      11, 7);
  const auto joint = markov_factorize(g, kernels);
  const auto obs = marginalize(joint, {"A", "B", "X", "Y"});
  auto kernel = [&](const std::string& n) {
    return *std::find_if(kernels.begin(), kernels.end(),
                         [&](const Kernel& k) { return k.child.variable == n; });
  };
  const auto kx = kernel("X"), ky = kernel("Y"), kl = kernel("L"), ka = kernel("A"),
             kb = kernel("B");
  // Parent order inside kernels follows node index: A has (X, L), B has (Y, L).
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b)
      for (std::size_t x = 0; x < 2; ++x)
        for (std::size_t y = 0; y < 2; ++y) {
          Rational expected = 0;
          for (std::size_t l = 0; l < 3; ++l) {
            expected += kx.rows[0][x] * ky.rows[0][y] * kl.rows[0][l] *
                        ka.rows[x * 3 + l][a] * kb.rows[y * 3 + l][b];
          }
          EXPECT_EQ(obs.weight(Assignment{a, b, x, y}), expected);
        }
}

TEST(Condition, ProductGivesMarginal) {
  const auto p = JointDistribution::uniform({bin("A"), bin("X")});
  EXPECT_EQ(condition(p, {{"X", "0"}}), JointDistribution::uniform({bin("A")}));
}

TEST(Condition, ZeroProbabilityEvent) {
  const auto p = JointDistribution::point_mass({bin("A"), bin("X")}, {0, 0});
  EXPECT_THROW(condition(p, {{"X", "1"}}), ZeroProbabilityEvent);
  EXPECT_THROW(condition(p, {{"X", "7"}}), UnknownVariableError);
}

TEST(Condition, PrBoxCornerIsAnticorrelated) {
  const auto c = condition(pr_table(), {{"X", "1"}, {"Y", "1"}});
  EXPECT_EQ(c.weight(NamedAssignment{{"A", "0"}, {"B", "1"}}) +
                c.weight(NamedAssignment{{"A", "1"}, {"B", "0"}}),
            Rational(1));
}

TEST(Condition, CommutesWithMarginalization) {
  const Dag g = bell_graph();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto p = random_compatible(
        g, {bin("X"), bin("Y"), bin("A"), bin("B"), numbered_alphabet("L", 3)}, seed, 5);
    const NamedAssignment on{{"X", "1"}, {"L", "2"}};
    const auto lhs = marginalize(condition(p, on), {"A", "B"});
    const auto rhs = condition(marginalize(p, {"A", "B", "X", "L"}), on);
    EXPECT_EQ(lhs, rhs);
  }
}

TEST(ConditionalIndependence, ProductAndCorrelation) {
  const auto product = JointDistribution::uniform({bin("A"), bin("B")});
  EXPECT_TRUE(is_conditionally_independent(product, make_ci({"A"}, {"B"})));
  const JointDistribution copy({bin("A"), bin("B")},
                               {Rational(1, 2), Rational(0), Rational(0), Rational(1, 2)});
  EXPECT_FALSE(is_conditionally_independent(copy, make_ci({"A"}, {"B"})));
}

TEST(ConditionalIndependence, PrBoxNoSignalling) {
  const auto p = pr_table();
  EXPECT_TRUE(is_conditionally_independent(p, make_ci({"A"}, {"Y"}, {"X"})));
  EXPECT_TRUE(is_conditionally_independent(p, make_ci({"B"}, {"X"}, {"Y"})));
  EXPECT_FALSE(is_conditionally_independent(p, make_ci({"A"}, {"B"}, {"X", "Y"})));
}

TEST(ConditionalIndependence, VacuousOnZeroWeightConditioning) {
  // Z = 1 never happens; under Z = 0, A and B are independent.
  std::vector<Rational> w(8, 0);
  JointDistribution shape = JointDistribution::uniform({bin("Z"), bin("A"), bin("B")});
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b) w[shape.encode({0, a, b})] = Rational(1, 4);
  const JointDistribution p({bin("Z"), bin("A"), bin("B")}, w);
  EXPECT_TRUE(is_conditionally_independent(p, make_ci({"A"}, {"B"}, {"Z"})));
}

TEST(ConditionalIndependence, SymmetricInSets) {
  const Dag g = bell_graph();
  const auto p = random_compatible(
      g, {bin("X"), bin("Y"), bin("A"), bin("B"), numbered_alphabet("L", 2)}, 3, 9);
  for (const auto& ci : canonical_triples(p.variables())) {
    const CIStatement flipped{ci.s2, ci.s1, ci.z};
    EXPECT_EQ(is_conditionally_independent(p, ci), is_conditionally_independent(p, flipped));
  }
}

TEST(ConditionalIndependence, FloatModeTolerance) {
  const double e = std::ldexp(1.0, -40);
  const JointDistribution p({bin("A"), bin("B")},
                            {from_double(0.25 + e), from_double(0.25 - e), from_double(0.25),
                             from_double(0.25)},
                            Mode::floating);
  EXPECT_TRUE(is_conditionally_independent(p, make_ci({"A"}, {"B"})));
  EXPECT_FALSE(is_conditionally_independent(p.with_mode(Mode::exact), make_ci({"A"}, {"B"})));
}

TEST(CiScan, UniformProduct) {
  const auto p = JointDistribution::uniform({bin("A"), bin("B"), bin("X")});
  const auto scan = ci_scan(p, {"A", "B", "X"});
  EXPECT_EQ(scan.size(), canonical_triples({"A", "B", "X"}, true).size());
  EXPECT_TRUE(contains(scan, make_ci({"A"}, {"B"})));
  EXPECT_TRUE(contains(scan, make_ci({"A"}, {"B"}, {"X"})));
  EXPECT_TRUE(contains(scan, make_ci({"A"}, {"X"})));
}

TEST(CiScan, PrBox) {
  const auto scan = ci_scan(pr_table(), {"A", "B", "X", "Y"});
  EXPECT_TRUE(contains(scan, make_ci({"A"}, {"Y"}, {"X"})));
  EXPECT_TRUE(contains(scan, make_ci({"B"}, {"X"}, {"Y"})));
  EXPECT_TRUE(contains(scan, make_ci({"X"}, {"Y"})));
  EXPECT_TRUE(contains(scan, make_ci({"A"}, {"X"})));
  EXPECT_FALSE(contains(scan, make_ci({"A"}, {"B"}, {"X", "Y"})));
}

TEST(CiScan, PointMassSatisfiesEverything) {
  const auto p = JointDistribution::point_mass({bin("A"), bin("B"), bin("X")}, {1, 0, 1});
  EXPECT_EQ(ci_scan(p, {"A", "B", "X"}), canonical_triples({"A", "B", "X"}, true));
  EXPECT_EQ(ci_scan(p, {"A", "B", "X"}, true), canonical_triples({"A", "B", "X"}));
}

TEST(MarkovFactorize, EdgelessUniform) {
  const Dag g = build_dag({observed("A"), observed("B")}, {});
  const auto p = markov_factorize(g, {uniform_kernel(bin("A")), uniform_kernel(bin("B"))});
  EXPECT_EQ(p, JointDistribution::uniform({bin("A"), bin("B")}));
}

TEST(MarkovFactorize, CopyKernel) {
  const Dag g = build_dag({observed("X"), observed("A")}, {{"X", "A"}});
  const auto p = markov_factorize(
      g, {uniform_kernel(bin("X")),
          deterministic_kernel(bin("A"), {bin("X")}, [](const Assignment& pa) { return pa[0]; })});
  EXPECT_EQ(p, JointDistribution({bin("X"), bin("A")},
                                 {Rational(1, 2), Rational(0), Rational(0), Rational(1, 2)}));
}

TEST(MarkovFactorize, RejectsMismatchedKernels) {
  const Dag g = build_dag({observed("X"), observed("A")}, {{"X", "A"}});
  EXPECT_THROW(markov_factorize(g, {uniform_kernel(bin("X")), uniform_kernel(bin("A"))}),
               KernelMismatchError);
  EXPECT_THROW(markov_factorize(g, {uniform_kernel(bin("X"))}), KernelMismatchError);
  Kernel bad = uniform_kernel(bin("A"), {bin("X")});
  bad.rows[0][0] = Rational(1, 3);
  EXPECT_THROW(markov_factorize(g, {uniform_kernel(bin("X")), bad}), KernelMismatchError);
}

TEST(IsCompatible, Examples) {
  const Dag complete = build_dag({observed("A"), observed("B")}, {{"A", "B"}});
  const Dag edgeless = build_dag({observed("A"), observed("B")}, {});
  const JointDistribution copy({bin("A"), bin("B")},
                               {Rational(1, 2), Rational(0), Rational(0), Rational(1, 2)});
  EXPECT_TRUE(is_compatible(copy, complete));
  EXPECT_FALSE(is_compatible(copy, edgeless));
  const auto p = random_compatible(bell_graph(), {bin("X"), bin("Y"), bin("A"), bin("B"), bin("L")},
                                   5, 4);
  EXPECT_TRUE(is_compatible(p, bell_graph()));
}

TEST(RandomCompatible, DeterministicPerSeed) {
  const std::vector<Alphabet> al{bin("X"), bin("Y"), bin("A"), bin("B"), numbered_alphabet("L", 4)};
  EXPECT_EQ(random_compatible(bell_graph(), al, 42, 8), random_compatible(bell_graph(), al, 42, 8));
  EXPECT_NE(random_compatible(bell_graph(), al, 42, 8), random_compatible(bell_graph(), al, 43, 8));
}

TEST(RandomCompatible, CompatibleAndSoundOnFourNodeDags) {
  // Soundness of d-separation: every d-separation is a CI of every
  // Markov-factorized distribution.
  std::size_t graphs = 0;
  testing::for_each_dag(4, [&](const Dag& g) {
    if (++graphs % 9) return;
    std::vector<Alphabet> al;
    for (const auto& n : g.nodes()) al.push_back(bin(n.name));
    const auto p = random_compatible(g, al, graphs, 6);
    EXPECT_TRUE(is_compatible(p, g));
    const auto scan = ci_scan(p, p.variables(), true);
    for (const auto& ci : all_d_separations(g, p.variables())) {
      EXPECT_TRUE(is_conditionally_independent(p, ci)) << to_string(ci);
    }
    (void)scan;
  });
}

}  // namespace
}  // namespace nft
