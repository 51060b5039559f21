#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nofinetune/ci_statement.hpp"
#include "nofinetune/dag.hpp"
#include "nofinetune/rational.hpp"

namespace nft {

/// Exact mode never rounds; float mode holds data that was supplied as
/// floating point and compares with tolerance epsilon.
enum class Mode { exact, floating };

inline constexpr double kDefaultEpsilon = 1e-9;

/// Finite ordered value set of one variable.
struct Alphabet {
  std::string variable;
  std::vector<std::string> values;

  std::size_t size() const { return values.size(); }
  /// Throws UnknownVariableError if the label is not in the alphabet.
  std::size_t index_of(std::string_view value) const;

  friend bool operator==(const Alphabet&, const Alphabet&) = default;
};

/// Validates (at least one value, unique labels).
Alphabet make_alphabet(std::string variable, std::vector<std::string> values);

/// Alphabet with values "0".."n-1".
Alphabet numbered_alphabet(std::string variable, std::size_t n);

/// Full assignment, one value index per variable, in table variable order.
using Assignment = std::vector<std::size_t>;

/// Partial assignment by names: variable -> value label.
using NamedAssignment = std::map<std::string, std::string>;

/// Dense probability table over a mixed-radix encoding of full assignments;
/// the last variable varies fastest.
class JointDistribution {
 public:
  JointDistribution() = default;

  /// Throws InvalidDistributionError on size mismatch, negative weights or
  /// weights not summing to one (exactly, or within epsilon in float mode).
  JointDistribution(std::vector<Alphabet> alphabets, std::vector<Rational> weights,
                    Mode mode = Mode::exact, double epsilon = kDefaultEpsilon);

  /// Point mass on one full assignment.
  static JointDistribution point_mass(std::vector<Alphabet> alphabets,
                                      const Assignment& at);
  static JointDistribution uniform(std::vector<Alphabet> alphabets);

  const std::vector<Alphabet>& alphabets() const { return alphabets_; }
  std::vector<std::string> variables() const;
  bool has_variable(std::string_view name) const;
  /// Throws UnknownVariableError.
  std::size_t variable_index(std::string_view name) const;
  const Alphabet& alphabet(std::string_view name) const {
    return alphabets_[variable_index(name)];
  }

  std::size_t table_size() const { return weights_.size(); }
  const std::vector<Rational>& weights() const { return weights_; }
  const Rational& weight(std::size_t index) const { return weights_[index]; }
  const Rational& weight(const Assignment& a) const { return weights_[encode(a)]; }
  /// Weight of a named full assignment.
  const Rational& weight(const NamedAssignment& a) const;

  std::size_t encode(const Assignment& a) const;
  Assignment decode(std::size_t index) const;

  Mode mode() const { return mode_; }
  double epsilon() const { return epsilon_; }
  /// Same table, different comparison mode.
  JointDistribution with_mode(Mode mode, double epsilon = kDefaultEpsilon) const;

  /// Weights compared exactly in exact mode and within epsilon otherwise.
  bool approx_equal(const JointDistribution& other) const;
  /// |a - b| <= epsilon in float mode; a == b in exact mode.
  bool close(const Rational& a, const Rational& b) const;

  friend bool operator==(const JointDistribution& a, const JointDistribution& b) {
    return a.alphabets_ == b.alphabets_ && a.weights_ == b.weights_ && a.mode_ == b.mode_;
  }

 private:
  std::vector<Alphabet> alphabets_;
  std::vector<std::size_t> strides_;
  std::vector<Rational> weights_;
  Mode mode_ = Mode::exact;
  double epsilon_ = kDefaultEpsilon;
};

/// Sums out everything not in `keep`; the result lists variables in the
/// order given by `keep`. Throws UnknownVariableError.
JointDistribution marginalize(const JointDistribution& p,
                              const std::vector<std::string>& keep);

/// Conditions on a partial assignment and renormalizes; the conditioned
/// variables are dropped. Throws UnknownVariableError or ZeroProbabilityEvent.
JointDistribution condition(const JointDistribution& p, const NamedAssignment& on);

/// Vacuous on zero-probability conditioning events.
bool is_conditionally_independent(const JointDistribution& p, const CIStatement& ci);

/// True when, for every conditioning assignment with positive weight, s1 or s2
/// is a point mass. Such independences hold for any dependence structure.
bool holds_by_determinism(const JointDistribution& p, const CIStatement& ci);

/// Canonical list of the CI statements over `over` that hold in p. By default
/// s1 and s2 are singletons; `full_subsets` scans all disjoint subsets.
std::vector<CIStatement> ci_scan(const JointDistribution& p,
                                 const std::vector<std::string>& over,
                                 bool full_subsets = false);

/// Conditional table P(child | parents). Rows follow the mixed-radix order of
/// the parent assignment (last parent fastest).
struct Kernel {
  Alphabet child;
  std::vector<Alphabet> parents;
  std::vector<std::vector<Rational>> rows;
};

/// Throws KernelMismatchError if the table shape is wrong or a row is not a
/// probability distribution.
void validate_kernel(const Kernel& k);

Kernel uniform_kernel(Alphabet child, std::vector<Alphabet> parents = {});

/// Point-mass rows: `rule` maps a parent assignment to a child value index.
template <typename Rule>
Kernel deterministic_kernel(Alphabet child, std::vector<Alphabet> parents, Rule rule) {
  Kernel k{std::move(child), std::move(parents), {}};
  std::size_t rows = 1;
  for (const auto& a : k.parents) rows *= a.size();
  Assignment pa(k.parents.size(), 0);
  for (std::size_t r = 0; r < rows; ++r) {
    std::size_t rem = r;
    for (std::size_t i = k.parents.size(); i-- > 0;) {
      pa[i] = rem % k.parents[i].size();
      rem /= k.parents[i].size();
    }
    std::vector<Rational> row(k.child.size(), 0);
    row.at(static_cast<std::size_t>(rule(pa))) = 1;
    k.rows.push_back(std::move(row));
  }
  return k;
}

/// Product of the kernels, variables in graph node order. Throws
/// KernelMismatchError unless there is exactly one kernel per node whose
/// parent set equals the node's parents in g.
JointDistribution markov_factorize(const Dag& g, const std::vector<Kernel>& kernels);

/// Local Markov condition: X _||_ Nd(X)\Pa(X) | Pa(X) for every node.
/// The variables of p must be exactly the nodes of g.
bool is_compatible(const JointDistribution& p, const Dag& g);

/// Kernels with entries drawn as integers in [1, grid] and row-normalized,
/// from a seeded generator; returns their Markov factorization. `alphabets`
/// must cover every node of g.
JointDistribution random_compatible(const Dag& g, const std::vector<Alphabet>& alphabets,
                                    std::uint64_t seed, std::uint32_t grid);

/// The kernels random_compatible draws.
std::vector<Kernel> random_kernels(const Dag& g, const std::vector<Alphabet>& alphabets,
                                   std::uint64_t seed, std::uint32_t grid);

}  // namespace nft
