#include <gtest/gtest.h>

#include <random>

#include "nofinetune/error.hpp"
#include "nofinetune/polytope.hpp"
#include "nofinetune/scenario.hpp"
#include "test_support.hpp"

namespace nft {
namespace {

using testing::latent;
using testing::observed;

TEST(ValidateScenario, Chsh) {
  const auto s = chsh_scenario();
  EXPECT_EQ(s.measurements.size(), 4u);
  EXPECT_EQ(s.contexts.size(), 4u);
  EXPECT_TRUE(s.is_context("y1", "x0"));
  EXPECT_FALSE(s.is_context("x0", "x1"));
}

TEST(ValidateScenario, KcbsFiveCycle) {
  const auto s = kcbs_scenario();
  EXPECT_EQ(s.contexts.size(), 5u);
  for (int k = 0; k < 5; ++k) {
    EXPECT_TRUE(s.is_context("m" + std::to_string(k), "m" + std::to_string((k + 1) % 5)));
    EXPECT_FALSE(s.is_context("m" + std::to_string(k), "m" + std::to_string((k + 2) % 5)));
  }
}

TEST(ValidateScenario, RejectsBadContexts) {
  EXPECT_THROW(validate_scenario({"m0", "m1", "m2"}, {"0", "1"}, {{"m0", "m1", "m2"}}),
               NonBinaryContextError);
  EXPECT_THROW(validate_scenario({"m0"}, {"0", "1"}, {{"m0"}}), NonBinaryContextError);
  EXPECT_THROW(validate_scenario({"m0", "m1"}, {"0", "1"}, {{"m0", "m0"}}), NonBinaryContextError);
  EXPECT_NO_THROW(validate_scenario({"m0", "m1"}, {"0", "1"}, {{"m0", "m0"}}, true));
  EXPECT_THROW(validate_scenario({"m0", "m1"}, {"0", "1"}, {{"m0", "q"}}), UnknownMeasurementError);
  EXPECT_THROW(validate_scenario({"m0", "m0"}, {"0", "1"}, {}), InvalidScenarioError);
}

TEST(BellPartition, ChshSplitsIntoSides) {
  const auto part = is_bell_scenario(chsh_scenario(), 2);
  ASSERT_TRUE(part.has_value());
  EXPECT_EQ(part->parts, (std::vector<std::vector<std::string>>{{"x0", "x1"}, {"y0", "y1"}}));
}

TEST(BellPartition, KcbsHasNoTwoPartition) {
  EXPECT_FALSE(is_bell_scenario(kcbs_scenario(), 2).has_value());
  // Oracle: all 2^5 assignments of measurements to two parts.
  const auto s = kcbs_scenario();
  int valid = 0;
  for (int mask = 0; mask < 32; ++mask) {
    bool ok = true;
    for (const auto& [a, b] : s.contexts) {
      const auto i = s.measurement_index(a), j = s.measurement_index(b);
      if (((mask >> i) & 1) == ((mask >> j) & 1)) ok = false;
    }
    valid += ok;
  }
  EXPECT_EQ(valid, 0);
  EXPECT_TRUE(is_bell_scenario(s, 3).has_value());
}

TEST(BellPartition, SingleContext) {
  const auto s = validate_scenario({"m0", "m1"}, {"0", "1"}, {{"m0", "m1"}});
  const auto part = is_bell_scenario(s, 2);
  ASSERT_TRUE(part.has_value());
  EXPECT_EQ(part->parts, (std::vector<std::vector<std::string>>{{"m0"}, {"m1"}}));
}

TEST(Phenomenon, SupportConstraint) {
  const auto s = chsh_scenario();
  EXPECT_THROW(build_phenomenon(s, {{"x0", "x1", Rational(1)}},
                                [](auto, auto, auto, auto) { return Rational(1, 4); }),
               SupportError);
}

TEST(NoDisturbance, PrBoxHolds) { EXPECT_TRUE(no_disturbance(pr_box()).holds); }

TEST(NoDisturbance, SignallingBoxFails) {
  // B copies the bit of X.
  const auto p = build_phenomenon(
      chsh_scenario(),
      {{"x0", "y0", Rational(1, 4)}, {"x0", "y1", Rational(1, 4)},
       {"x1", "y0", Rational(1, 4)}, {"x1", "y1", Rational(1, 4)}},
      [](std::size_t a, std::size_t b, std::size_t x, std::size_t) {
        return (b == x % 2) ? Rational(1, 2) * (a < 2 ? 1 : 0) : Rational(0);
      });
  const auto report = no_disturbance(p);
  EXPECT_FALSE(report.holds);
  ASSERT_FALSE(report.violations.empty());
  for (const auto& v : report.violations) {
    EXPECT_EQ(v.variable, "B");
    EXPECT_EQ(v.deviation, Rational(1, 2));
  }
}

TEST(NoDisturbance, ProductPhenomenonHolds) {
  // P(a|x)P(b|y) with skewed local kernels and correlated settings.
  const auto p = build_phenomenon(
      chsh_scenario(),
      {{"x0", "y0", Rational(1, 2)}, {"x1", "y1", Rational(1, 3)}, {"x0", "y1", Rational(1, 6)}},
      [](std::size_t a, std::size_t b, std::size_t x, std::size_t y) {
        const Rational pa = x == 0 ? Rational(1, 3) : Rational(3, 4);
        const Rational pb = y == 2 ? Rational(2, 5) : Rational(1, 7);
        return Rational((a ? pa : 1 - pa) * (b ? pb : 1 - pb));
      });
  EXPECT_TRUE(no_disturbance(p).holds);
}

TEST(NoDisturbance, CoincidesWithNoSignallingCIsOnBellScenarios) {
  // Random phenomena on CHSH settings: ND holds iff (A|Y|X) and (B|X|Y).
  const auto s = chsh_scenario();
  ASSERT_TRUE(is_bell_scenario(s, 2).has_value());
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::vector<Rational>> cond(16);
    for (auto& c : cond) {
      int total = 0;
      std::vector<int> w(4);
      for (auto& x : w) total += (x = 1 + static_cast<int>(rng() % 3));
      if (seed % 2) w = {1, 1, 1, 1}, total = 4;  // half the draws are no-signalling
      for (int x : w) c.push_back(Rational(x, total));
    }
    const auto p = build_phenomenon(
        s, {{"x0", "y0", Rational(1, 4)}, {"x0", "y1", Rational(1, 4)},
            {"x1", "y0", Rational(1, 4)}, {"x1", "y1", Rational(1, 4)}},
        [&](std::size_t a, std::size_t b, std::size_t x, std::size_t y) {
          return cond[x * 4 + y][a * 2 + b];
        });
    const bool cis = is_conditionally_independent(p.dist(), make_ci({"A"}, {"Y"}, {"X"})) &&
                     is_conditionally_independent(p.dist(), make_ci({"B"}, {"X"}, {"Y"}));
    EXPECT_EQ(no_disturbance(p).holds, cis) << "seed " << seed;
  }
}

Dag model_graph() {
  return build_dag({observed("X"), observed("Y"), observed("A"), observed("B"), latent("L")},
                   {{"X", "A"}, {"Y", "B"}, {"L", "A"}, {"L", "B"}});
}

std::vector<Kernel> uniform_kernels(const Dag& g) {
  std::vector<Kernel> ks;
  auto al = [](const std::string& n) {
    if (n == "X") return make_alphabet("X", {"x0", "x1"});
    if (n == "Y") return make_alphabet("Y", {"y0", "y1"});
    return numbered_alphabet(n, 2);
  };
  for (std::size_t v = 0; v < g.size(); ++v) {
    std::vector<Alphabet> parents;
    for (const auto& name : g.names_of(g.parents(v))) parents.push_back(al(name));
    ks.push_back(uniform_kernel(al(g.node(v).name), parents));
  }
  return ks;
}

TEST(PhenomenonFromModel, UniformBellModelIsUniformBox) {
  const Dag g = model_graph();
  const auto model = make_causal_model(g, markov_factorize(g, uniform_kernels(g)));
  EXPECT_EQ(model.latents, std::vector<std::string>{"L"});
  const auto p = phenomenon_from_model(model, chsh_scenario());
  EXPECT_EQ(p, uniform_box());
}

TEST(PhenomenonFromModel, RejectsWeightOffContexts) {
  // X ranges over {x0, y0}; (y0, y0) is not a context.
  const Dag g = model_graph();
  auto ks = uniform_kernels(g);
  for (auto& k : ks) {
    if (k.child.variable == "X") k.child = make_alphabet("X", {"x0", "y0"});
    for (auto& pa : k.parents)
      if (pa.variable == "X") pa = make_alphabet("X", {"x0", "y0"});
  }
  const auto model = make_causal_model(g, markov_factorize(g, ks));
  EXPECT_THROW(phenomenon_from_model(model, chsh_scenario()), SupportError);
}

TEST(CausalModel, RejectsIncompatibleJoint) {
  const Dag g = build_dag({observed("A"), observed("B"), observed("X"), observed("Y")}, {});
  std::vector<Alphabet> al{numbered_alphabet("A", 2), numbered_alphabet("B", 2),
                           numbered_alphabet("X", 2), numbered_alphabet("Y", 2)};
  const auto corr = JointDistribution::point_mass(al, {0, 0, 0, 0});
  EXPECT_NO_THROW(make_causal_model(g, corr));  // a point mass is a product
  std::vector<Rational> w(16, 0);
  w[0] = Rational(1, 2);
  w[15] = Rational(1, 2);
  EXPECT_THROW(make_causal_model(g, JointDistribution(al, w)), ModelMismatchError);
}

}  // namespace
}  // namespace nft
