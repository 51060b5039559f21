#include "nofinetune/scenario.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "nofinetune/error.hpp"

namespace nft {

bool MeasurementScenario::is_context(const std::string& a, const std::string& b) const {
  return std::any_of(contexts.begin(), contexts.end(), [&](const auto& c) {
    return (c.first == a && c.second == b) || (c.first == b && c.second == a);
  });
}

std::size_t MeasurementScenario::measurement_index(const std::string& m) const {
  auto it = std::find(measurements.begin(), measurements.end(), m);
  if (it == measurements.end()) throw UnknownMeasurementError("unknown measurement '" + m + "'");
  return static_cast<std::size_t>(it - measurements.begin());
}

MeasurementScenario validate_scenario(std::vector<std::string> measurements,
                                      std::vector<std::string> outcomes,
                                      const std::vector<std::vector<std::string>>& contexts,
                                      bool allow_repeats) {
  auto unique = [](const std::vector<std::string>& v) {
    return std::set<std::string>(v.begin(), v.end()).size() == v.size();
  };
  if (measurements.empty() || !unique(measurements)) {
    throw InvalidScenarioError("measurements must be nonempty and distinct");
  }
  if (outcomes.empty() || !unique(outcomes)) {
    throw InvalidScenarioError("outcomes must be nonempty and distinct");
  }
  MeasurementScenario s{std::move(measurements), std::move(outcomes), {}, allow_repeats};
  for (const auto& c : contexts) {
    for (const auto& m : c) s.measurement_index(m);
    const bool self_context = c.size() == 2 && c[0] == c[1];
    if (c.size() != 2 || (self_context && !allow_repeats)) {
      throw NonBinaryContextError("context of size " +
                                  std::to_string(std::set<std::string>(c.begin(), c.end()).size()) +
                                  "; only pairs are supported");
    }
    auto pair = s.measurement_index(c[0]) <= s.measurement_index(c[1])
                    ? std::make_pair(c[0], c[1])
                    : std::make_pair(c[1], c[0]);
    if (std::find(s.contexts.begin(), s.contexts.end(), pair) == s.contexts.end()) {
      s.contexts.push_back(std::move(pair));
    }
  }
  return s;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<Alphabet> phenomenon_alphabets(const MeasurementScenario& s) {
  return {Alphabet{kOutcomeA, s.outcomes}, Alphabet{kOutcomeB, s.outcomes},
          Alphabet{kSettingX, s.measurements}, Alphabet{kSettingY, s.measurements}};
}

}  // namespace

Phenomenon::Phenomenon(MeasurementScenario scenario, JointDistribution dist)
    : scenario_(std::move(scenario)) {
  const std::vector<std::string> order{kOutcomeA, kOutcomeB, kSettingX, kSettingY};
  if (dist.alphabets().size() != 4) {
    throw UnknownVariableError("phenomenon needs exactly the variables A, B, X, Y");
  }
  dist_ = marginalize(dist, order);
  if (dist_.alphabets() != phenomenon_alphabets(scenario_)) {
    throw ModelMismatchError("phenomenon alphabets disagree with the scenario");
  }
  const std::size_t m = scenario_.measurements.size();
  for (std::size_t x = 0; x < m; ++x) {
    for (std::size_t y = 0; y < m; ++y) {
      if (sgn(setting_weight(x, y)) == 0) continue;
      const auto& mx = scenario_.measurements[x];
      const auto& my = scenario_.measurements[y];
      const bool allowed =
          (x == y) ? scenario_.allow_repeats && scenario_.is_context(mx, my)
                   : scenario_.is_context(mx, my);
      if (!allowed) {
        throw SupportError("positive weight on setting pair (" + mx + ", " + my +
                           ") outside the compatibility structure");
      }
    }
  }
}

Rational Phenomenon::setting_weight(std::size_t x, std::size_t y) const {
  const std::size_t o = scenario_.outcomes.size();
  Rational w = 0;
  for (std::size_t a = 0; a < o; ++a)
    for (std::size_t b = 0; b < o; ++b) w += dist_.weight(Assignment{a, b, x, y});
  return w;
}

std::optional<Rational> Phenomenon::conditional(std::size_t a, std::size_t b, std::size_t x,
                                                std::size_t y) const {
  const Rational w = setting_weight(x, y);
  if (sgn(w) == 0) return std::nullopt;
  return Rational(dist_.weight(Assignment{a, b, x, y}) / w);
}

std::vector<std::pair<std::size_t, std::size_t>> Phenomenon::used_settings() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const std::size_t m = scenario_.measurements.size();
  for (std::size_t x = 0; x < m; ++x)
    for (std::size_t y = 0; y < m; ++y)
      if (sgn(setting_weight(x, y)) != 0) out.emplace_back(x, y);
  return out;
}

Phenomenon build_phenomenon(
    const MeasurementScenario& s,
    const std::vector<std::tuple<std::string, std::string, Rational>>& settings,
    const std::function<Rational(std::size_t, std::size_t, std::size_t, std::size_t)>& cond,
    Mode mode, double epsilon) {
  const auto alphabets = phenomenon_alphabets(s);
  const std::size_t o = s.outcomes.size();
  const std::size_t m = s.measurements.size();
  std::vector<Rational> w(o * o * m * m, 0);
  for (const auto& [mx, my, weight] : settings) {
    const std::size_t x = s.measurement_index(mx);
    const std::size_t y = s.measurement_index(my);
    for (std::size_t a = 0; a < o; ++a)
      for (std::size_t b = 0; b < o; ++b)
        w[((a * o + b) * m + x) * m + y] += weight * cond(a, b, x, y);
  }
  return Phenomenon(s, JointDistribution(alphabets, std::move(w), mode, epsilon));
}

// ---------------------------------------------------------------------------

std::optional<BellPartition> is_bell_scenario(const MeasurementScenario& s, std::size_t k) {
  if (k < 2) throw std::invalid_argument("a Bell partition needs k >= 2");
  const std::size_t n = s.measurements.size();
  std::vector<std::vector<bool>> adjacent(n, std::vector<bool>(n, false));
  for (const auto& [a, b] : s.contexts) {
    const auto i = s.measurement_index(a), j = s.measurement_index(b);
    if (i == j) return std::nullopt;  // a self-context puts two members in one part
    adjacent[i][j] = adjacent[j][i] = true;
  }
  std::vector<std::size_t> colour(n, 0);
  // Depth-first search over colourings; returns at the first complete one.
  std::function<bool(std::size_t)> assign = [&](std::size_t v) {
    if (v == n) return true;
    for (std::size_t c = 0; c < k; ++c) {
      bool ok = true;
      for (std::size_t u = 0; u < v && ok; ++u) ok = !(adjacent[u][v] && colour[u] == c);
      if (!ok) continue;
      colour[v] = c;
      if (assign(v + 1)) return true;
    }
    return false;
  };
  if (!assign(0)) return std::nullopt;
  BellPartition out;
  out.parts.resize(k);
  for (std::size_t v = 0; v < n; ++v) out.parts[colour[v]].push_back(s.measurements[v]);
  return out;
}

NoDisturbanceReport no_disturbance(const Phenomenon& p) {
  NoDisturbanceReport report;
  const auto& s = p.scenario();
  const auto& d = p.dist();
  const std::size_t o = s.outcomes.size();
  const std::size_t m = s.measurements.size();
  const Rational eps = from_double(d.epsilon());

  // own = 0 checks A against X, own = 1 checks B against Y.
  for (int own = 0; own < 2; ++own) {
    for (std::size_t self = 0; self < m; ++self) {
      std::vector<Rational> local(o, 0);
      Rational total = 0;
      for (std::size_t other = 0; other < m; ++other) {
        const std::size_t x = own == 0 ? self : other;
        const std::size_t y = own == 0 ? other : self;
        for (std::size_t a = 0; a < o; ++a)
          for (std::size_t b = 0; b < o; ++b) {
            const Rational& w = d.weight(Assignment{a, b, x, y});
            local[own == 0 ? a : b] += w;
            total += w;
          }
      }
      if (sgn(total) == 0) continue;
      for (auto& l : local) l /= total;
      for (std::size_t other = 0; other < m; ++other) {
        const std::size_t x = own == 0 ? self : other;
        const std::size_t y = own == 0 ? other : self;
        const Rational pxy = p.setting_weight(x, y);
        if (sgn(pxy) == 0) continue;
        Rational worst = 0;
        for (std::size_t v = 0; v < o; ++v) {
          Rational cond = 0;
          for (std::size_t u = 0; u < o; ++u) {
            cond += own == 0 ? d.weight(Assignment{v, u, x, y}) : d.weight(Assignment{u, v, x, y});
          }
          cond /= pxy;
          worst = std::max(worst, Rational(nft::abs(cond - local[v])));
        }
        const bool violated = d.mode() == Mode::exact ? sgn(worst) != 0 : worst > eps;
        if (violated) {
          report.holds = false;
          report.violations.push_back({own == 0 ? kOutcomeA : kOutcomeB, s.measurements[x],
                                       s.measurements[y], worst});
        }
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------

CausalModel make_causal_model(Dag graph, JointDistribution joint) {
  std::set<std::string> observed;
  std::vector<std::string> latents;
  for (const auto& n : graph.nodes()) {
    if (n.kind == NodeKind::observed) {
      observed.insert(n.name);
    } else {
      latents.push_back(n.name);
    }
  }
  if (observed != std::set<std::string>{kOutcomeA, kOutcomeB, kSettingX, kSettingY}) {
    throw ModelMismatchError("causal model must observe exactly A, B, X, Y");
  }
  if (joint.alphabets().size() != graph.size()) {
    throw ModelMismatchError("joint variables differ from graph nodes");
  }
  for (const auto& n : graph.nodes()) {
    if (!joint.has_variable(n.name)) {
      throw ModelMismatchError("joint lacks node '" + n.name + "'");
    }
  }
  if (!is_compatible(joint, graph)) {
    throw ModelMismatchError("joint is not Markov-compatible with the graph");
  }
  return CausalModel{std::move(latents), std::move(graph), std::move(joint)};
}

Phenomenon phenomenon_from_model(const CausalModel& gamma, const MeasurementScenario& s) {
  for (const char* v : {kOutcomeA, kOutcomeB, kSettingX, kSettingY}) {
    if (!gamma.joint.has_variable(v)) {
      throw ModelMismatchError(std::string("model joint lacks '") + v + "'");
    }
  }
  const auto obs = marginalize(gamma.joint, {kOutcomeA, kOutcomeB, kSettingX, kSettingY});
  const auto target = phenomenon_alphabets(s);
  // Position of each model label inside the scenario alphabet.
  std::vector<std::vector<std::size_t>> embed(4);
  for (std::size_t i = 0; i < 4; ++i) {
    for (const auto& label : obs.alphabets()[i].values) {
      auto it = std::find(target[i].values.begin(), target[i].values.end(), label);
      if (it == target[i].values.end()) {
        throw ModelMismatchError("model value '" + label + "' of " + target[i].variable +
                                 " is not in the scenario");
      }
      embed[i].push_back(static_cast<std::size_t>(it - target[i].values.begin()));
    }
  }
  std::size_t size = 1;
  for (const auto& a : target) size *= a.size();
  std::vector<Rational> w(size, 0);
  const JointDistribution shape(target, std::vector<Rational>(size, Rational(1, size)));
  for (std::size_t idx = 0; idx < obs.table_size(); ++idx) {
    if (sgn(obs.weight(idx)) == 0) continue;
    auto a = obs.decode(idx);
    for (std::size_t i = 0; i < 4; ++i) a[i] = embed[i][a[i]];
    w[shape.encode(a)] += obs.weight(idx);
  }
  return Phenomenon(s, JointDistribution(target, std::move(w), obs.mode(), obs.epsilon()));
}

}  // namespace nft
