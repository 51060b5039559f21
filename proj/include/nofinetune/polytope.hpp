#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nofinetune/rational.hpp"
#include "nofinetune/scenario.hpp"

namespace nft {

/// Bipartite pairs: independent response functions f (slot A, driven by X)
/// and g (slot B, driven by Y). Global assignment: one function s used for
/// both slots.
enum class VertexKind { bipartite_pairs, global_assignment };

std::string to_string(VertexKind kind);
/// Accepts "pairs"/"bipartite-pairs" and "global"/"global-assignment".
VertexKind parse_vertex_kind(const std::string& text);

inline constexpr std::size_t kUnassigned = static_cast<std::size_t>(-1);

/// Deterministic strategy. Entries are outcome indices per measurement index,
/// kUnassigned outside the response function's domain.
struct Vertex {
  std::vector<std::size_t> slot_a;
  std::vector<std::size_t> slot_b;
};

struct VertexSet {
  VertexKind kind = VertexKind::bipartite_pairs;
  MeasurementScenario scenario;
  /// Measurement indices each response function is defined on (equal for
  /// global assignments).
  std::vector<std::size_t> domain_a;
  std::vector<std::size_t> domain_b;
  std::vector<Vertex> vertices;

  bool covers(std::size_t x, std::size_t y) const;
  /// "x0=0,x1=1|y0=0,y1=0" for pairs, "m0=0,m1=1,..." for global.
  std::string label(std::size_t v) const;
};

inline constexpr std::size_t kDefaultVertexLimit = 1'000'000;

/// Complete enumeration in lexicographic order (first domain measurement most
/// significant; slot A before slot B). Empty domain arguments mean "all
/// measurements". Throws ExplosionError above `limit`.
VertexSet build_vertices(const MeasurementScenario& s, VertexKind kind,
                         const std::vector<std::string>& domain_a = {},
                         const std::vector<std::string>& domain_b = {},
                         std::size_t limit = kDefaultVertexLimit);

/// Domains restricted to the measurements the phenomenon actually uses in
/// each slot (their union for global assignments).
VertexSet build_vertices(const Phenomenon& p, VertexKind kind,
                         std::size_t limit = kDefaultVertexLimit);

struct InequalityTerm {
  std::string a;
  std::string b;
  std::string x;
  std::string y;
  Rational coefficient;

  friend bool operator==(const InequalityTerm&, const InequalityTerm&) = default;
};

/// sum coefficient * P(a, b | x, y) <= bound.
struct Inequality {
  std::vector<InequalityTerm> terms;
  Rational bound;

  friend bool operator==(const Inequality&, const Inequality&) = default;
};

struct InequalityValue {
  Rational value;
  bool violated = false;
};

/// Throws UndefinedConditional if a term's setting pair has zero weight and
/// SupportError if it is not a context.
InequalityValue evaluate_inequality(const Phenomenon& p, const Inequality& i);

/// Maximum of the functional over the vertices.
Rational classical_bound(const Inequality& i, const VertexSet& v);

struct Witness {
  /// Bound is the maximum over all vertices.
  Inequality functional;
  Rational value;
  Rational margin() const { return value - functional.bound; }
};

struct MembershipResult {
  bool inside = false;
  /// (vertex index, mixture weight), lexicographic vertex order, zeros omitted.
  std::vector<std::pair<std::size_t, Rational>> weights;
  std::optional<Witness> witness;
  /// Minimal L1 distance from the phenomenon's conditionals to the cone of
  /// vertex mixtures; zero when inside in exact mode.
  Rational residual;
};

/// Exact feasibility of P(ab|xy) = sum_l w_l [vertex l outputs (a,b) on (x,y)]
/// over the setting pairs with positive weight. Outside points come with a
/// witness maximizing value - bound over functionals with coefficients in
/// [-1, 1]. In float mode a residual within epsilon counts as inside.
MembershipResult is_factorisable(const Phenomenon& p, const VertexSet& v);

/// Recomputes the certificate from scratch: weights must be nonnegative, sum
/// to one and reproduce every defined conditional (within epsilon in float
/// mode); a witness must strictly exceed every vertex value.
bool check_certificate(const Phenomenon& p, const VertexSet& v, const MembershipResult& r);

// Canonical examples. Settings are uniform over the listed setting pairs.

MeasurementScenario chsh_scenario();
/// a xor b = x.y with uniform marginals.
Phenomenon pr_box();
Phenomenon uniform_box();
/// Correlators +-1/sqrt(2); float mode.
Phenomenon tsirelson_box(double epsilon = kDefaultEpsilon);
/// E00 + E01 + E10 - E11 <= 2 written over P(ab|xy).
Inequality chsh_functional();

MeasurementScenario kcbs_scenario();
/// P(A != B | m_i, m_{i+1 mod 5}) = 1 with uniform outcome marginals.
Phenomenon kcbs_anticorrelated();
/// Number of anticorrelated contexts, bound 4.
Inequality kcbs_functional();

}  // namespace nft
