// Command-line front end. Every command prints JSON by default and a short
// table with --format table.
//
// Exit codes: 0 ok, 1 unexpected failure, 2 unreadable or invalid input,
// 3 overlapping d-separation sets, 4 precondition violation.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nofinetune/error.hpp"
#include "nofinetune/faithfulness.hpp"
#include "nofinetune/io.hpp"
#include "nofinetune/polytope.hpp"
#include "nofinetune/theorem_verifier.hpp"

namespace {

using nft::io::Json;

enum Exit { kOk = 0, kFailure = 1, kParse = 2, kDisjoint = 3, kPrecondition = 4 };

struct Globals {
  std::string format = "json";
  std::string mode = "exact";
  double epsilon = nft::kDefaultEpsilon;
};

int exit_code(const nft::Error& e) {
  if (dynamic_cast<const nft::DisjointnessError*>(&e)) return kDisjoint;
  if (dynamic_cast<const nft::ParseError*>(&e) || dynamic_cast<const nft::CycleError*>(&e) ||
      dynamic_cast<const nft::DuplicateNodeError*>(&e) ||
      dynamic_cast<const nft::DuplicateEdgeError*>(&e) ||
      dynamic_cast<const nft::InvalidDistributionError*>(&e) ||
      dynamic_cast<const nft::InvalidScenarioError*>(&e) ||
      dynamic_cast<const nft::NonBinaryContextError*>(&e) ||
      dynamic_cast<const nft::UnknownMeasurementError*>(&e))
    return kParse;
  return kPrecondition;
}

bool table(const Globals& g) { return g.format == "table"; }

void emit(const Json& j) { std::cout << j.dump(2) << '\n'; }

nft::Phenomenon load_phenomenon(const std::string& path, const Globals& g) {
  auto p = nft::io::phenomenon_from_json(nft::io::read_file(path));
  if (g.mode == "float")
    return nft::Phenomenon(p.scenario(), p.dist().with_mode(nft::Mode::floating, g.epsilon));
  return p;
}

nft::MeasurementScenario load_scenario(const std::string& path) {
  const auto j = nft::io::read_file(path);
  // A phenomenon file carries its scenario.
  return nft::io::scenario_from_json(j.contains("scenario") ? j.at("scenario") : j);
}

std::string yes_no(bool b) { return b ? "true" : "false"; }

int run_dsep(const std::string& file, const std::vector<std::string>& s1,
             const std::vector<std::string>& s2, const std::vector<std::string>& z) {
  const auto dag = nft::io::dag_from_json(nft::io::read_file(file));
  const bool sep = nft::d_separated(dag, s1, s2, z);
  // The bare verdict is valid JSON as well.
  std::cout << yes_no(sep) << '\n';
  return kOk;
}

int run_ci_scan(const Globals& g, const std::string& file, std::vector<std::string> over, bool full) {
  const auto j = nft::io::read_file(file);
  auto dist = nft::io::distribution_from_json(j.contains("distribution") ? j.at("distribution") : j);
  if (g.mode == "float") dist = dist.with_mode(nft::Mode::floating, g.epsilon);
  if (over.empty()) over = dist.variables();
  const auto cis = nft::ci_scan(dist, over, full);
  if (table(g)) {
    for (const auto& ci : cis) std::cout << nft::to_string(ci) << '\n';
    std::cout << cis.size() << " independences\n";
  } else {
    emit(Json{{"variables", over}, {"full_subsets", full}, {"independences", nft::io::to_json(cis)}});
  }
  return kOk;
}

int run_nd_check(const Globals& g, const std::string& file) {
  const auto r = nft::no_disturbance(load_phenomenon(file, g));
  if (table(g)) {
    std::cout << "no-disturbance: " << (r.holds ? "holds" : "violated") << '\n';
    for (const auto& v : r.violations)
      std::cout << "  " << v.variable << " at (" << v.x << ", " << v.y
                << ") deviates by " << nft::to_string(v.deviation) << '\n';
  } else {
    emit(nft::io::to_json(r));
  }
  return kOk;
}

int run_polytope_test(const Globals& g, const std::string& file, const std::string& vertices,
                      const std::string& inequality) {
  const auto p = load_phenomenon(file, g);
  const auto v = nft::build_vertices(p, nft::parse_vertex_kind(vertices));
  const auto r = nft::is_factorisable(p, v);
  Json j = nft::io::to_json(r, v, p.dist().mode());
  j["certificate_checked"] = nft::check_certificate(p, v, r);
  if (!inequality.empty()) {
    const auto ineq = nft::io::inequality_from_json(nft::io::read_file(inequality));
    j["inequality"] = nft::io::to_json(nft::evaluate_inequality(p, ineq), p.dist().mode());
  }
  if (table(g)) {
    std::cout << (r.inside ? "inside" : "outside") << " the " << nft::to_string(v.kind)
              << " polytope (" << v.vertices.size() << " vertices)\n";
    for (const auto& [idx, w] : r.weights)
      std::cout << "  " << v.label(idx) << "  " << nft::to_string(w) << '\n';
    if (r.witness)
      std::cout << "  witness value " << r.witness->value.get_d() << " > bound "
                << nft::to_string(r.witness->functional.bound) << '\n';
  } else {
    emit(j);
  }
  return kOk;
}

int run_classical_bound(const Globals& g, const std::string& ineq_file,
                        const std::string& scenario_file, const std::string& vertices,
                        const std::string& phenomenon_file) {
  const auto ineq = nft::io::inequality_from_json(nft::io::read_file(ineq_file));
  const auto v = nft::build_vertices(load_scenario(scenario_file), nft::parse_vertex_kind(vertices));
  const auto bound = nft::classical_bound(ineq, v);
  Json j{{"vertex_kind", nft::to_string(v.kind)},
         {"vertex_count", v.vertices.size()},
         {"classical_bound", nft::io::rational_to_json(bound)},
         {"stated_bound", nft::io::rational_to_json(ineq.bound)}};
  if (!phenomenon_file.empty()) {
    const auto p = load_phenomenon(phenomenon_file, g);
    j["phenomenon"] = nft::io::to_json(nft::evaluate_inequality(p, ineq), p.dist().mode());
  }
  if (table(g))
    std::cout << "classical bound " << nft::to_string(bound) << " over " << v.vertices.size()
              << " " << nft::to_string(v.kind) << " vertices\n";
  else
    emit(j);
  return kOk;
}

int run_faithful_check(const Globals& g, const std::string& model_file, const std::string& file) {
  const auto m = nft::io::model_from_json(nft::io::read_file(model_file));
  const auto r = nft::is_faithful(m, load_phenomenon(file, g));
  if (table(g)) {
    std::cout << "faithful: " << yes_no(r.faithful) << '\n';
    for (const auto& ci : r.fine_tuned_cis) std::cout << "  fine-tuned " << nft::to_string(ci) << '\n';
    for (const auto& ci : r.support_induced)
      std::cout << "  support-induced " << nft::to_string(ci) << '\n';
  } else {
    emit(nft::io::to_json(r));
  }
  return kOk;
}

int run_verify(const Globals& g, const std::string& config_file, std::size_t jobs,
               const std::string& out_file) {
  nft::VerifierConfig c = config_file.empty()
                              ? nft::VerifierConfig{}
                              : nft::io::verifier_config_from_json(nft::io::read_file(config_file));
  if (const char* env = std::getenv("NOFINETUNE_SEED")) {
    try {
      c.numeric.seed = std::stoull(env);
    } catch (const std::exception&) {
      throw nft::ParseError(std::string("NOFINETUNE_SEED is not an integer: ") + env);
    }
    if (c.numeric.seed == 0) throw nft::ParseError("NOFINETUNE_SEED must be positive");
  }
  if (jobs > 0) c.jobs = jobs;
  const auto r = nft::verify_theorem1(c);
  const auto j = nft::io::to_json(r);
  if (!out_file.empty()) nft::io::write_file(out_file, j);
  if (table(g))
    std::cout << nft::io::report_table(r);
  else
    emit(j);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Causal-structure checks for Bell and contextuality scenarios"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--format", g.format, "Output format")
      ->check(CLI::IsMember({"json", "table"}))
      ->capture_default_str();
  app.add_option("--mode", g.mode, "Comparison mode for loaded tables")
      ->check(CLI::IsMember({"exact", "float"}))
      ->capture_default_str();
  app.add_option("--epsilon", g.epsilon, "Tolerance in float mode")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  std::string file, second, vertices = "pairs", extra;
  std::vector<std::string> s1, s2, z, over;
  bool full = false;
  std::size_t jobs = 0;

  auto* dsep = app.add_subcommand("dsep", "Decide (S1 _||_ S2 | Z)_d in a graph");
  dsep->add_option("graph", file, "Graph JSON")->required();
  dsep->add_option("--s1", s1)->required()->delimiter(',');
  dsep->add_option("--s2", s2)->required()->delimiter(',');
  dsep->add_option("--z", z)->delimiter(',');

  auto* scan = app.add_subcommand("ci-scan", "List the conditional independences of a table");
  scan->add_option("file", file, "Distribution or phenomenon JSON")->required();
  scan->add_option("--over", over, "Variables to scan (default: all)")->delimiter(',');
  scan->add_flag("--full", full, "Scan all disjoint subsets, not just singletons");

  auto* nd = app.add_subcommand("nd-check", "Check no-disturbance of a phenomenon");
  nd->add_option("phenomenon", file)->required();

  auto* poly = app.add_subcommand("polytope-test", "Exact polytope membership");
  poly->add_option("phenomenon", file)->required();
  poly->add_option("--vertices", vertices)->check(CLI::IsMember({"pairs", "global"}))->capture_default_str();
  poly->add_option("--inequality", extra, "Also evaluate this inequality");

  auto* bound = app.add_subcommand("classical-bound", "Maximum of an inequality over the vertices");
  bound->add_option("inequality", file)->required();
  bound->add_option("scenario", second, "Scenario or phenomenon JSON")->required();
  bound->add_option("--vertices", vertices)->check(CLI::IsMember({"pairs", "global"}))->capture_default_str();
  bound->add_option("--phenomenon", extra, "Also evaluate on this phenomenon");

  auto* faithful = app.add_subcommand("faithful-check", "Compare CIs against d-separations");
  faithful->add_option("model", file)->required();
  faithful->add_option("phenomenon", second)->required();

  auto* verify = app.add_subcommand("verify-theorem1", "Exhaustive causal-structure check");
  verify->add_option("--config", file, "Config JSON");
  verify->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  verify->add_option("--output", second, "Also write the JSON report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kParse;
  }

  try {
    if (*dsep) return run_dsep(file, s1, s2, z);
    if (*scan) return run_ci_scan(g, file, over, full);
    if (*nd) return run_nd_check(g, file);
    if (*poly) return run_polytope_test(g, file, vertices, extra);
    if (*bound) return run_classical_bound(g, file, second, vertices, extra);
    if (*faithful) return run_faithful_check(g, file, second);
    if (*verify) return run_verify(g, file, jobs, second);
  } catch (const nft::Error& e) {
    const int code = exit_code(e);
    std::cerr << (code == kParse ? "invalid input: " : code == kDisjoint ? "error: " : "precondition violated: ")
              << e.what() << '\n';
    return code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}
