#include "nofinetune/io.hpp"

#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "nofinetune/error.hpp"

namespace nft::io {

namespace {

// nlohmann type/key errors surface as ParseError.
template <typename F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

const Json& need(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing key \"") + key + "\"");
  return j.at(key);
}

std::vector<std::string> strings(const Json& j) { return j.get<std::vector<std::string>>(); }

Json string_array(const std::vector<std::string>& v) { return Json(v); }

std::string kind_name(NodeKind k) { return k == NodeKind::latent ? "latent" : "observed"; }

}  // namespace

Json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void write_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << j.dump(2) << '\n';
}

Json rational_to_json(const Rational& q, Mode mode) {
  if (mode == Mode::floating) return q.get_d();
  return to_string(q);
}

Rational rational_from_json(const Json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (j.is_number()) return from_double(j.get<double>());
  throw ParseError("expected a rational, got " + j.dump());
}

Json to_json(const Dag& g) {
  Json nodes = Json::array();
  for (const auto& n : g.nodes()) nodes.push_back({{"name", n.name}, {"kind", kind_name(n.kind)}});
  Json edges = Json::array();
  for (const auto& [from, to] : g.edges()) edges.push_back({from, to});
  return {{"nodes", nodes}, {"edges", edges}};
}

Dag dag_from_json(const Json& j) {
  return guarded("graph", [&] {
    std::vector<NodeId> nodes;
    for (const auto& n : need(j, "nodes")) {
      NodeKind kind = NodeKind::observed;
      if (n.contains("kind")) {
        const auto k = n.at("kind").get<std::string>();
        if (k == "latent")
          kind = NodeKind::latent;
        else if (k != "observed")
          throw ParseError("unknown node kind " + k);
      }
      nodes.push_back({need(n, "name").get<std::string>(), kind});
    }
    std::vector<Edge> edges;
    for (const auto& e : need(j, "edges")) {
      if (!e.is_array() || e.size() != 2) throw ParseError("edge must be [from, to]");
      edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
    }
    return build_dag(std::move(nodes), edges);
  });
}

Json to_json(const JointDistribution& p) {
  Json j;
  j["mode"] = p.mode() == Mode::exact ? "exact" : "float";
  if (p.mode() == Mode::floating) j["epsilon"] = p.epsilon();
  Json vars = Json::array();
  for (const auto& a : p.alphabets()) vars.push_back({{"name", a.variable}, {"values", a.values}});
  j["variables"] = vars;
  Json table = Json::array();
  for (std::size_t i = 0; i < p.table_size(); ++i) {
    if (sgn(p.weight(i)) == 0) continue;
    const auto a = p.decode(i);
    Json assignment = Json::object();
    for (std::size_t v = 0; v < a.size(); ++v)
      assignment[p.alphabets()[v].variable] = p.alphabets()[v].values[a[v]];
    table.push_back({{"assignment", assignment}, {"weight", rational_to_json(p.weight(i), p.mode())}});
  }
  j["table"] = table;
  return j;
}

JointDistribution distribution_from_json(const Json& j) {
  return guarded("distribution", [&] {
    Mode mode = Mode::exact;
    double eps = kDefaultEpsilon;
    if (j.contains("mode")) {
      const auto m = j.at("mode").get<std::string>();
      if (m == "float")
        mode = Mode::floating;
      else if (m != "exact")
        throw ParseError("unknown mode " + m);
    }
    if (j.contains("epsilon")) eps = j.at("epsilon").get<double>();
    if (!(eps > 0)) throw ParseError("epsilon must be positive");
    std::vector<Alphabet> alphabets;
    for (const auto& v : need(j, "variables"))
      alphabets.push_back(make_alphabet(need(v, "name").get<std::string>(), strings(need(v, "values"))));
    std::size_t size = 1;
    for (const auto& a : alphabets) size *= a.size();
    std::vector<Rational> weights(size, 0);
    std::vector<bool> seen(size, false);
    for (const auto& row : need(j, "table")) {
      const auto& asg = need(row, "assignment");
      if (asg.size() != alphabets.size()) throw ParseError("assignment must cover every variable");
      Assignment a;
      for (const auto& alph : alphabets) a.push_back(alph.index_of(need(asg, alph.variable.c_str()).get<std::string>()));
      std::size_t idx = 0;
      for (std::size_t v = 0; v < a.size(); ++v) idx = idx * alphabets[v].size() + a[v];
      if (seen[idx]) throw ParseError("duplicate assignment in table");
      seen[idx] = true;
      weights[idx] = rational_from_json(need(row, "weight"));
    }
    return JointDistribution(std::move(alphabets), std::move(weights), mode, eps);
  });
}

Json to_json(const MeasurementScenario& s) {
  Json contexts = Json::array();
  for (const auto& [a, b] : s.contexts) contexts.push_back({a, b});
  Json j{{"measurements", s.measurements}, {"outcomes", s.outcomes}, {"contexts", contexts}};
  if (s.allow_repeats) j["allow_repeats"] = true;
  return j;
}

MeasurementScenario scenario_from_json(const Json& j) {
  return guarded("scenario", [&] {
    std::vector<std::vector<std::string>> contexts;
    for (const auto& c : need(j, "contexts")) contexts.push_back(strings(c));
    return validate_scenario(strings(need(j, "measurements")), strings(need(j, "outcomes")),
                             contexts, j.value("allow_repeats", false));
  });
}

Json to_json(const Phenomenon& p) {
  return {{"scenario", to_json(p.scenario())}, {"distribution", to_json(p.dist())}};
}

Phenomenon phenomenon_from_json(const Json& j) {
  return guarded("phenomenon", [&] {
    return Phenomenon(scenario_from_json(need(j, "scenario")),
                      distribution_from_json(need(j, "distribution")));
  });
}

Json to_json(const CausalModel& m) {
  return {{"graph", to_json(m.graph)}, {"distribution", to_json(m.joint)}};
}

CausalModel model_from_json(const Json& j) {
  return guarded("model", [&] {
    return make_causal_model(dag_from_json(need(j, "graph")),
                             distribution_from_json(need(j, "distribution")));
  });
}

Json to_json(const Inequality& i) {
  Json terms = Json::array();
  for (const auto& t : i.terms)
    terms.push_back({{"a", t.a}, {"b", t.b}, {"x", t.x}, {"y", t.y},
                     {"coefficient", rational_to_json(t.coefficient)}});
  return {{"terms", terms}, {"bound", rational_to_json(i.bound)}};
}

Inequality inequality_from_json(const Json& j) {
  return guarded("inequality", [&] {
    Inequality i;
    for (const auto& t : need(j, "terms"))
      i.terms.push_back({need(t, "a").get<std::string>(), need(t, "b").get<std::string>(),
                         need(t, "x").get<std::string>(), need(t, "y").get<std::string>(),
                         rational_from_json(need(t, "coefficient"))});
    i.bound = rational_from_json(need(j, "bound"));
    return i;
  });
}

Json to_json(const CIStatement& ci) {
  return {{"s1", string_array(ci.s1)}, {"s2", string_array(ci.s2)}, {"z", string_array(ci.z)}};
}

CIStatement ci_from_json(const Json& j) {
  return guarded("ci statement", [&] {
    return make_ci(strings(need(j, "s1")), strings(need(j, "s2")), j.contains("z") ? strings(j.at("z")) : std::vector<std::string>{});
  });
}

Json to_json(const std::vector<CIStatement>& cis) {
  Json out = Json::array();
  for (const auto& ci : cis) out.push_back(to_json(ci));
  return out;
}

Json to_json(const FaithfulnessReport& r) {
  return {{"faithful", r.faithful},
          {"fine_tuned", to_json(r.fine_tuned_cis)},
          {"support_induced", to_json(r.support_induced)}};
}

Json to_json(const NoDisturbanceReport& r) {
  Json v = Json::array();
  for (const auto& d : r.violations)
    v.push_back({{"variable", d.variable}, {"x", d.x}, {"y", d.y},
                 {"deviation", rational_to_json(d.deviation)}});
  return {{"holds", r.holds}, {"violations", v}};
}

Json to_json(const MembershipResult& r, const VertexSet& v, Mode mode) {
  Json j{{"inside", r.inside}, {"vertex_kind", to_string(v.kind)},
         {"vertex_count", v.vertices.size()}, {"residual", rational_to_json(r.residual, mode)}};
  Json weights = Json::array();
  for (const auto& [idx, w] : r.weights)
    weights.push_back({{"vertex", v.label(idx)}, {"weight", rational_to_json(w, mode)}});
  j["weights"] = weights;
  if (r.witness) {
    Json w = to_json(r.witness->functional);
    w["value"] = rational_to_json(r.witness->value, mode);
    w["margin"] = rational_to_json(r.witness->margin(), mode);
    j["witness"] = w;
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

Json to_json(const InequalityValue& v, Mode mode) {
  return {{"value", rational_to_json(v.value, mode)}, {"violated", v.violated}};
}

Json to_json(const VerifierConfig& c) {
  return {{"seed", c.numeric.seed},
          {"trials", c.numeric.trials},
          {"latent_card", c.numeric.latent_card},
          {"grid", c.numeric.grid},
          {"numeric", c.numeric_enabled},
          {"space",
           {{"pair_latents", c.space.pair_latents},
            {"higher_latents", c.space.higher_latents},
            {"bell_only", c.space.bell_only}}}};
}

VerifierConfig verifier_config_from_json(const Json& j) {
  return guarded("config", [&] {
    if (!j.is_object()) throw ParseError("config must be an object");
    static const std::set<std::string> known{"seed", "trials", "latent_card", "grid", "numeric",
                                             "space", "jobs", "mode", "epsilon", "vertex_kind",
                                             "output"};
    for (const auto& [k, v] : j.items())
      if (!known.count(k)) throw ParseError("unknown config key " + k);
    VerifierConfig c;
    c.numeric.seed = j.value("seed", c.numeric.seed);
    c.numeric.trials = j.value("trials", c.numeric.trials);
    c.numeric.latent_card = j.value("latent_card", c.numeric.latent_card);
    c.numeric.grid = j.value("grid", c.numeric.grid);
    c.numeric_enabled = j.value("numeric", c.numeric_enabled);
    c.jobs = j.value("jobs", c.jobs);
    if (j.contains("space")) {
      const auto& s = j.at("space");
      c.space.pair_latents = s.value("pair_latents", true);
      c.space.higher_latents = s.value("higher_latents", true);
      c.space.bell_only = s.value("bell_only", false);
    }
    if (c.numeric.seed == 0 || c.numeric.trials == 0 || c.numeric.latent_card == 0 ||
        c.numeric.grid == 0)
      throw ParseError("seed, trials, latent_card and grid must be positive");
    if (j.contains("vertex_kind") && parse_vertex_kind(j.at("vertex_kind")) != VertexKind::bipartite_pairs)
      throw ParseError("theorem verification uses pair vertices");
    return c;
  });
}

Json to_json(const VerificationReport& r) {
  Json j;
  j["config"] = to_json(r.config);
  j["raw_combinations"] = r.raw_combinations;
  j["acyclic_edge_patterns"] = r.acyclic_edge_patterns;
  j["total_candidates"] = r.total_candidates;
  Json steps = Json::object();
  for (const auto& [s, n] : r.excluded_per_step) steps[to_string(s)] = n;
  j["excluded_per_step"] = steps;
  j["excluded_total"] = r.excluded_total();
  j["failing_dseparations"] = {{"A_Y_given_X_only", r.fails_a_y},
                               {"B_X_given_Y_only", r.fails_b_x},
                               {"both", r.fails_both}};
  j["survivor_count"] = r.survivors.size();
  Json classes = Json::object();
  for (const auto& [c, n] : r.survivors_per_class) classes[to_string(c)] = n;
  j["survivors_per_class"] = classes;
  Json survivors = Json::array();
  for (const auto& s : r.survivors) {
    Json edges = Json::array();
    for (const auto& [from, to] : s.dag.edges()) edges.push_back({from, to});
    survivors.push_back({{"index", s.candidate.index()},
                         {"edges", edges},
                         {"proof_class", to_string(s.proof_class)},
                         {"numeric_trials", s.numeric_trials},
                         {"inside", s.inside},
                         {"nd_failures", s.nd_failures},
                         {"all_factorisable", s.all_factorisable}});
  }
  j["survivors"] = survivors;
  j["theorem_holds"] = r.theorem_holds;
  return j;
}

std::string report_table(const VerificationReport& r) {
  std::ostringstream out;
  auto row = [&](const std::string& k, auto v) { out << std::left << std::setw(28) << k << v << '\n'; };
  row("raw combinations", r.raw_combinations);
  row("acyclic edge patterns", r.acyclic_edge_patterns);
  row("candidates", r.total_candidates);
  out << "\nexcluded (first matching step)\n";
  for (const auto& [s, n] : r.excluded_per_step) row("  " + to_string(s), n);
  row("  total", r.excluded_total());
  out << "\nsurvivors by proof class\n";
  for (const auto& [c, n] : r.survivors_per_class) row("  " + to_string(c), n);
  row("  total", r.survivors.size());
  std::size_t trials = 0, inside = 0, nd = 0;
  for (const auto& s : r.survivors) {
    trials += s.numeric_trials;
    inside += s.inside;
    nd += s.nd_failures;
  }
  out << "\nnumeric cross-check\n";
  row("  trials", trials);
  row("  factorisable", inside);
  row("  no-disturbance failures", nd);
  out << '\n';
  row("theorem holds", r.theorem_holds ? "yes" : "no");
  return out.str();
}

}  // namespace nft::io
