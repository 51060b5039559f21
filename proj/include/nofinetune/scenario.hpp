#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nofinetune/dag.hpp"
#include "nofinetune/distribution.hpp"

namespace nft {

/// Measurements, a common outcome alphabet, and a compatibility structure of
/// two-element contexts.
struct MeasurementScenario {
  std::vector<std::string> measurements;
  std::vector<std::string> outcomes;
  /// Each context lists its members in measurement order; no duplicates.
  std::vector<std::pair<std::string, std::string>> contexts;
  /// Admit self-contexts {m, m}.
  bool allow_repeats = false;

  /// Order-insensitive.
  bool is_context(const std::string& a, const std::string& b) const;
  /// Throws UnknownMeasurementError.
  std::size_t measurement_index(const std::string& m) const;

  friend bool operator==(const MeasurementScenario&, const MeasurementScenario&) = default;
};

/// Throws InvalidScenarioError (empty or duplicated measurements/outcomes),
/// UnknownMeasurementError, or NonBinaryContextError (context size other than
/// two; a repeated member counts as size one unless allow_repeats is set).
MeasurementScenario validate_scenario(std::vector<std::string> measurements,
                                      std::vector<std::string> outcomes,
                                      const std::vector<std::vector<std::string>>& contexts,
                                      bool allow_repeats = false);

/// Observed variable names of a phenomenon.
inline constexpr const char* kOutcomeA = "A";
inline constexpr const char* kOutcomeB = "B";
inline constexpr const char* kSettingX = "X";
inline constexpr const char* kSettingY = "Y";

/// Observable statistics P(A, B, X, Y) of a scenario. Variables are stored in
/// the order A, B, X, Y; X and Y range over the measurements and A, B over the
/// outcomes. Settings carry weight only on contexts.
class Phenomenon {
 public:
  /// Reorders `dist` to A, B, X, Y. Throws UnknownVariableError when the
  /// variables are not exactly A, B, X, Y, ModelMismatchError when the
  /// alphabets disagree with the scenario, and SupportError on weight outside
  /// the contexts.
  Phenomenon(MeasurementScenario scenario, JointDistribution dist);

  const MeasurementScenario& scenario() const { return scenario_; }
  const JointDistribution& dist() const { return dist_; }

  /// P(X = x, Y = y).
  Rational setting_weight(std::size_t x, std::size_t y) const;
  /// P(a, b | x, y), or nullopt when the setting pair has zero weight.
  std::optional<Rational> conditional(std::size_t a, std::size_t b, std::size_t x,
                                      std::size_t y) const;
  /// Setting pairs (x, y) with positive weight, in table order.
  std::vector<std::pair<std::size_t, std::size_t>> used_settings() const;

  friend bool operator==(const Phenomenon&, const Phenomenon&) = default;

 private:
  MeasurementScenario scenario_;
  JointDistribution dist_;
};

/// Builds a phenomenon from setting weights and conditionals. `settings`
/// lists (x, y, weight); `cond(a, b, x, y)` takes value indices and returns
/// P(a, b | x, y).
Phenomenon build_phenomenon(
    const MeasurementScenario& s,
    const std::vector<std::tuple<std::string, std::string, Rational>>& settings,
    const std::function<Rational(std::size_t, std::size_t, std::size_t, std::size_t)>& cond,
    Mode mode = Mode::exact, double epsilon = kDefaultEpsilon);

/// Disjoint parts covering the measurements; each context has at most one
/// member per part.
struct BellPartition {
  std::vector<std::vector<std::string>> parts;

  friend bool operator==(const BellPartition&, const BellPartition&) = default;
};

/// Exhaustive k-colouring of the compatibility graph. Returns the first
/// colouring in measurement order (earliest part preferred), or nullopt.
/// Parts may be empty when fewer than k are needed.
std::optional<BellPartition> is_bell_scenario(const MeasurementScenario& s, std::size_t k);

struct DisturbanceViolation {
  std::string variable;  // "A" or "B"
  std::string x;
  std::string y;
  Rational deviation;    // max over outcomes of |P(o|x,y) - P(o|own setting)|
};

struct NoDisturbanceReport {
  bool holds = true;
  std::vector<DisturbanceViolation> violations;
};

/// Checks P(A|XY) = P(A|X) and P(B|XY) = P(B|Y) wherever defined.
NoDisturbanceReport no_disturbance(const Phenomenon& p);

/// A causal graph over A, B, X, Y plus latent nodes, with a compatible joint.
struct CausalModel {
  std::vector<std::string> latents;
  Dag graph;
  JointDistribution joint;
};

/// Validates: observed nodes are exactly A, B, X, Y; all other nodes are
/// latent; the joint's variables are the graph's nodes; the joint is
/// Markov-compatible with the graph. Throws ModelMismatchError.
CausalModel make_causal_model(Dag graph, JointDistribution joint);

/// Sums out the latents and embeds the observable marginal in the scenario's
/// alphabets (model value labels must appear in the scenario). Throws
/// ModelMismatchError for unknown labels and SupportError for weight outside
/// the contexts.
Phenomenon phenomenon_from_model(const CausalModel& gamma, const MeasurementScenario& s);

}  // namespace nft
