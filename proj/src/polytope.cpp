#include "nofinetune/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "nofinetune/error.hpp"
#include "nofinetune/lp.hpp"

namespace nft {

std::string to_string(VertexKind kind) {
  return kind == VertexKind::bipartite_pairs ? "bipartite-pairs" : "global-assignment";
}

VertexKind parse_vertex_kind(const std::string& text) {
  if (text == "pairs" || text == "bipartite-pairs") return VertexKind::bipartite_pairs;
  if (text == "global" || text == "global-assignment") return VertexKind::global_assignment;
  throw ParseError("unknown vertex kind '" + text + "'");
}

bool VertexSet::covers(std::size_t x, std::size_t y) const {
  return std::find(domain_a.begin(), domain_a.end(), x) != domain_a.end() &&
         std::find(domain_b.begin(), domain_b.end(), y) != domain_b.end();
}

std::string VertexSet::label(std::size_t v) const {
  const auto& vx = vertices.at(v);
  auto part = [&](const std::vector<std::size_t>& dom, const std::vector<std::size_t>& f) {
    std::string out;
    for (std::size_t k = 0; k < dom.size(); ++k) {
      if (k) out += ",";
      out += scenario.measurements[dom[k]] + "=" + scenario.outcomes[f[dom[k]]];
    }
    return out;
  };
  if (kind == VertexKind::global_assignment) return part(domain_a, vx.slot_a);
  return part(domain_a, vx.slot_a) + "|" + part(domain_b, vx.slot_b);
}

namespace {

std::vector<std::size_t> domain_indices(const MeasurementScenario& s,
                                        const std::vector<std::string>& names) {
  std::vector<std::size_t> out;
  if (names.empty()) {
    for (std::size_t i = 0; i < s.measurements.size(); ++i) out.push_back(i);
    return out;
  }
  for (const auto& n : names) out.push_back(s.measurement_index(n));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// All functions dom -> outcomes, first domain element most significant.
std::vector<std::vector<std::size_t>> functions(std::size_t measurements,
                                                const std::vector<std::size_t>& dom,
                                                std::size_t outcomes) {
  std::size_t total = 1;
  for (std::size_t k = 0; k < dom.size(); ++k) total *= outcomes;
  std::vector<std::vector<std::size_t>> out;
  out.reserve(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::vector<std::size_t> f(measurements, kUnassigned);
    std::size_t rem = idx;
    for (std::size_t k = dom.size(); k-- > 0;) {
      f[dom[k]] = rem % outcomes;
      rem /= outcomes;
    }
    out.push_back(std::move(f));
  }
  return out;
}

/// outcomes^exponent, saturating above limit.
bool exceeds(std::size_t outcomes, std::size_t exponent, std::size_t limit) {
  double count = std::pow(static_cast<double>(outcomes), static_cast<double>(exponent));
  return count > static_cast<double>(limit);
}

}  // namespace

VertexSet build_vertices(const MeasurementScenario& s, VertexKind kind,
                         const std::vector<std::string>& domain_a,
                         const std::vector<std::string>& domain_b, std::size_t limit) {
  VertexSet v;
  v.kind = kind;
  v.scenario = s;
  const std::size_t m = s.measurements.size();
  const std::size_t o = s.outcomes.size();
  if (kind == VertexKind::global_assignment) {
    std::vector<std::string> both = domain_a;
    both.insert(both.end(), domain_b.begin(), domain_b.end());
    v.domain_a = v.domain_b = domain_indices(s, both);
    if (exceeds(o, v.domain_a.size(), limit)) {
      throw ExplosionError("global-assignment vertex count exceeds the enumeration limit");
    }
    for (auto& f : functions(m, v.domain_a, o)) v.vertices.push_back({f, f});
    return v;
  }
  v.domain_a = domain_indices(s, domain_a);
  v.domain_b = domain_indices(s, domain_b);
  if (exceeds(o, v.domain_a.size() + v.domain_b.size(), limit)) {
    throw ExplosionError("bipartite-pairs vertex count exceeds the enumeration limit");
  }
  const auto fs = functions(m, v.domain_a, o);
  const auto gs = functions(m, v.domain_b, o);
  for (const auto& f : fs)
    for (const auto& g : gs) v.vertices.push_back({f, g});
  return v;
}

VertexSet build_vertices(const Phenomenon& p, VertexKind kind, std::size_t limit) {
  std::set<std::size_t> xs, ys;
  for (auto [x, y] : p.used_settings()) {
    xs.insert(x);
    ys.insert(y);
  }
  const auto& ms = p.scenario().measurements;
  std::vector<std::string> da, db;
  for (auto x : xs) da.push_back(ms[x]);
  for (auto y : ys) db.push_back(ms[y]);
  if (da.empty()) throw UndefinedConditional("phenomenon has no setting pair with positive weight");
  return build_vertices(p.scenario(), kind, da, db, limit);
}

// ---------------------------------------------------------------------------

namespace {

struct ResolvedTerm {
  std::size_t a, b, x, y;
  Rational coefficient;
};

std::vector<ResolvedTerm> resolve(const MeasurementScenario& s, const Inequality& i) {
  std::vector<ResolvedTerm> out;
  auto outcome = [&](const std::string& label) {
    auto it = std::find(s.outcomes.begin(), s.outcomes.end(), label);
    if (it == s.outcomes.end()) throw UnknownVariableError("unknown outcome '" + label + "'");
    return static_cast<std::size_t>(it - s.outcomes.begin());
  };
  for (const auto& t : i.terms) {
    const std::size_t x = s.measurement_index(t.x);
    const std::size_t y = s.measurement_index(t.y);
    if (!s.is_context(t.x, t.y) || (x == y && !s.allow_repeats)) {
      throw SupportError("inequality term on non-context (" + t.x + ", " + t.y + ")");
    }
    out.push_back({outcome(t.a), outcome(t.b), x, y, t.coefficient});
  }
  return out;
}

}  // namespace

InequalityValue evaluate_inequality(const Phenomenon& p, const Inequality& i) {
  InequalityValue out;
  out.value = 0;
  for (const auto& t : resolve(p.scenario(), i)) {
    const auto c = p.conditional(t.a, t.b, t.x, t.y);
    if (!c) {
      throw UndefinedConditional("P(ab|" + p.scenario().measurements[t.x] + "," +
                                 p.scenario().measurements[t.y] + ") is undefined");
    }
    out.value += t.coefficient * *c;
  }
  if (p.dist().mode() == Mode::exact) {
    out.violated = out.value > i.bound;
  } else {
    out.violated = out.value > i.bound + from_double(p.dist().epsilon());
  }
  return out;
}

Rational classical_bound(const Inequality& i, const VertexSet& v) {
  const auto terms = resolve(v.scenario, i);
  for (const auto& t : terms) {
    if (!v.covers(t.x, t.y)) {
      throw UnknownMeasurementError("vertex set does not cover setting pair (" +
                                    v.scenario.measurements[t.x] + ", " +
                                    v.scenario.measurements[t.y] + ")");
    }
  }
  std::optional<Rational> best;
  for (const auto& vx : v.vertices) {
    Rational value = 0;
    for (const auto& t : terms) {
      if (vx.slot_a[t.x] == t.a && vx.slot_b[t.y] == t.b) value += t.coefficient;
    }
    if (!best || value > *best) best = value;
  }
  return best.value_or(Rational(0));
}

namespace {

/// Rows of the membership system: one per (used setting pair, a, b).
struct Entry {
  std::size_t x, y, a, b;
  Rational prob;
};

std::vector<Entry> membership_entries(const Phenomenon& p, const VertexSet& v) {
  if (!(p.scenario() == v.scenario)) {
    throw ModelMismatchError("vertex set was built for a different scenario");
  }
  std::vector<Entry> out;
  const std::size_t o = p.scenario().outcomes.size();
  for (auto [x, y] : p.used_settings()) {
    if (!v.covers(x, y)) {
      throw UnknownMeasurementError("vertex set does not cover setting pair (" +
                                    p.scenario().measurements[x] + ", " +
                                    p.scenario().measurements[y] + ")");
    }
    for (std::size_t a = 0; a < o; ++a)
      for (std::size_t b = 0; b < o; ++b) out.push_back({x, y, a, b, *p.conditional(a, b, x, y)});
  }
  return out;
}

bool hits(const Vertex& vx, const Entry& e) {
  return vx.slot_a[e.x] == e.a && vx.slot_b[e.y] == e.b;
}

/// max c.p - beta  s.t.  c.D_l - beta <= 0 for every vertex l, -1 <= c_e <= 1.
/// Standard form with c_e = u_e - 1, u_e + s_e = 2, beta = bp - bm and a slack
/// per vertex.
Witness separating_witness(const std::vector<Entry>& entries, const VertexSet& v,
                           const MeasurementScenario& s) {
  const std::size_t ne = entries.size();
  const std::size_t nv = v.vertices.size();
  const std::size_t u0 = 0, s0 = ne, bp = 2 * ne, bm = bp + 1, t0 = bm + 1;
  const std::size_t cols = t0 + nv;
  lp::Problem prob;
  prob.c.assign(cols, 0);
  for (std::size_t e = 0; e < ne; ++e) prob.c[u0 + e] = entries[e].prob;
  prob.c[bp] = -1;
  prob.c[bm] = 1;
  for (std::size_t e = 0; e < ne; ++e) {
    std::vector<Rational> row(cols, 0);
    row[u0 + e] = 1;
    row[s0 + e] = 1;
    prob.a.push_back(std::move(row));
    prob.b.push_back(2);
  }
  for (std::size_t l = 0; l < nv; ++l) {
    std::vector<Rational> row(cols, 0);
    Rational hits_count = 0;
    for (std::size_t e = 0; e < ne; ++e) {
      if (hits(v.vertices[l], entries[e])) {
        row[u0 + e] = 1;
        hits_count += 1;
      }
    }
    row[bp] = -1;
    row[bm] = 1;
    row[t0 + l] = 1;
    prob.a.push_back(std::move(row));
    prob.b.push_back(hits_count);
  }
  const auto sol = lp::solve(prob);
  if (sol.status != lp::Status::optimal) {
    throw std::logic_error("separation LP did not reach an optimum");
  }
  Witness w;
  w.value = 0;
  for (std::size_t e = 0; e < ne; ++e) {
    const Rational c = sol.x[u0 + e] - 1;
    if (sgn(c) == 0) continue;
    const auto& en = entries[e];
    w.functional.terms.push_back({s.outcomes[en.a], s.outcomes[en.b], s.measurements[en.x],
                                  s.measurements[en.y], c});
    w.value += c * en.prob;
  }
  w.functional.bound = classical_bound(w.functional, v);
  return w;
}

}  // namespace

MembershipResult is_factorisable(const Phenomenon& p, const VertexSet& v) {
  const auto entries = membership_entries(p, v);
  const std::size_t nv = v.vertices.size();
  std::vector<std::vector<Rational>> a;
  std::vector<Rational> b;
  for (const auto& e : entries) {
    std::vector<Rational> row(nv, 0);
    for (std::size_t l = 0; l < nv; ++l) {
      if (hits(v.vertices[l], e)) row[l] = 1;
    }
    a.push_back(std::move(row));
    b.push_back(e.prob);
  }
  a.emplace_back(nv, Rational(1));
  b.emplace_back(1);

  const auto sol = lp::feasibility(a, b);
  MembershipResult out;
  out.residual = sol.infeasibility;
  const bool exact = p.dist().mode() == Mode::exact;
  out.inside = exact ? sgn(sol.infeasibility) == 0
                     : sol.infeasibility <= from_double(p.dist().epsilon());
  if (out.inside) {
    for (std::size_t l = 0; l < nv; ++l) {
      if (sgn(sol.x[l]) != 0) out.weights.emplace_back(l, sol.x[l]);
    }
    return out;
  }
  out.witness = separating_witness(entries, v, p.scenario());
  return out;
}

bool check_certificate(const Phenomenon& p, const VertexSet& v, const MembershipResult& r) {
  const auto entries = membership_entries(p, v);
  const bool exact = p.dist().mode() == Mode::exact;
  const Rational eps = from_double(p.dist().epsilon());
  auto close = [&](const Rational& x, const Rational& y) {
    return exact ? x == y : nft::abs(x - y) <= eps;
  };
  if (r.inside) {
    if (r.witness) return false;
    Rational total = 0;
    for (const auto& [l, w] : r.weights) {
      if (l >= v.vertices.size() || w < 0) return false;
      total += w;
    }
    if (!close(total, Rational(1))) return false;
    for (const auto& e : entries) {
      Rational mix = 0;
      for (const auto& [l, w] : r.weights) {
        if (hits(v.vertices[l], e)) mix += w;
      }
      if (!close(mix, e.prob)) return false;
    }
    return true;
  }
  if (!r.witness || !r.weights.empty()) return false;
  const auto value = evaluate_inequality(p, r.witness->functional).value;
  if (value != r.witness->value) return false;
  for (const auto& vx : v.vertices) {
    Rational at_vertex = 0;
    for (const auto& t : r.witness->functional.terms) {
      const auto x = v.scenario.measurement_index(t.x);
      const auto y = v.scenario.measurement_index(t.y);
      const auto& outs = v.scenario.outcomes;
      const auto a = static_cast<std::size_t>(std::find(outs.begin(), outs.end(), t.a) - outs.begin());
      const auto b = static_cast<std::size_t>(std::find(outs.begin(), outs.end(), t.b) - outs.begin());
      if (vx.slot_a[x] == a && vx.slot_b[y] == b) at_vertex += t.coefficient;
    }
    if (at_vertex > r.witness->functional.bound || at_vertex >= value) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Canonical examples

MeasurementScenario chsh_scenario() {
  return validate_scenario({"x0", "x1", "y0", "y1"}, {"0", "1"},
                           {{"x0", "y0"}, {"x0", "y1"}, {"x1", "y0"}, {"x1", "y1"}});
}

namespace {

std::vector<std::tuple<std::string, std::string, Rational>> chsh_settings() {
  return {{"x0", "y0", Rational(1, 4)},
          {"x0", "y1", Rational(1, 4)},
          {"x1", "y0", Rational(1, 4)},
          {"x1", "y1", Rational(1, 4)}};
}

/// Bit value of a CHSH setting: x1 and y1 are 1.
std::size_t setting_bit(std::size_t measurement_index) { return measurement_index % 2; }

}  // namespace

Phenomenon pr_box() {
  return build_phenomenon(chsh_scenario(), chsh_settings(),
                          [](std::size_t a, std::size_t b, std::size_t x, std::size_t y) {
                            const bool ok = (a ^ b) == (setting_bit(x) & setting_bit(y));
                            return ok ? Rational(1, 2) : Rational(0);
                          });
}

Phenomenon uniform_box() {
  return build_phenomenon(chsh_scenario(), chsh_settings(),
                          [](std::size_t, std::size_t, std::size_t, std::size_t) {
                            return Rational(1, 4);
                          });
}

Phenomenon tsirelson_box(double epsilon) {
  const double r = 1.0 / std::sqrt(2.0);
  return build_phenomenon(
      chsh_scenario(), chsh_settings(),
      [r](std::size_t a, std::size_t b, std::size_t x, std::size_t y) {
        const double sign = (setting_bit(x) & setting_bit(y)) ? -1.0 : 1.0;
        const double parity = (a ^ b) ? -1.0 : 1.0;
        return from_double((1.0 + sign * parity * r) / 4.0);
      },
      Mode::floating, epsilon);
}

Inequality chsh_functional() {
  Inequality i;
  for (std::size_t xb = 0; xb < 2; ++xb)
    for (std::size_t yb = 0; yb < 2; ++yb)
      for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b) {
          const int sign = ((xb & yb) ? -1 : 1) * ((a ^ b) ? -1 : 1);
          i.terms.push_back({std::to_string(a), std::to_string(b), "x" + std::to_string(xb),
                             "y" + std::to_string(yb), Rational(sign)});
        }
  i.bound = 2;
  return i;
}

MeasurementScenario kcbs_scenario() {
  std::vector<std::string> ms;
  std::vector<std::vector<std::string>> contexts;
  for (int k = 0; k < 5; ++k) ms.push_back("m" + std::to_string(k));
  for (int k = 0; k < 5; ++k) contexts.push_back({ms[k], ms[(k + 1) % 5]});
  return validate_scenario(ms, {"0", "1"}, contexts);
}

Phenomenon kcbs_anticorrelated() {
  std::vector<std::tuple<std::string, std::string, Rational>> settings;
  for (int k = 0; k < 5; ++k) {
    settings.emplace_back("m" + std::to_string(k), "m" + std::to_string((k + 1) % 5),
                          Rational(1, 5));
  }
  return build_phenomenon(kcbs_scenario(), settings,
                          [](std::size_t a, std::size_t b, std::size_t, std::size_t) {
                            return a != b ? Rational(1, 2) : Rational(0);
                          });
}

Inequality kcbs_functional() {
  Inequality i;
  for (int k = 0; k < 5; ++k) {
    const auto x = "m" + std::to_string(k), y = "m" + std::to_string((k + 1) % 5);
    i.terms.push_back({"0", "1", x, y, Rational(1)});
    i.terms.push_back({"1", "0", x, y, Rational(1)});
  }
  i.bound = 4;
  return i;
}

}  // namespace nft
