#include "nofinetune/theorem_verifier.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "nofinetune/error.hpp"
#include "nofinetune/faithfulness.hpp"
#include "nofinetune/polytope.hpp"
#include "nofinetune/scenario.hpp"

namespace nft {

const std::array<std::vector<std::string>, kLatentSlots> kLatentChildren{{
    {"A", "B"}, {"A", "X"}, {"A", "Y"}, {"B", "X"}, {"B", "Y"}, {"X", "Y"},
    {"A", "B", "X"}, {"A", "B", "Y"}, {"A", "X", "Y"}, {"B", "X", "Y"},
    {"A", "B", "X", "Y"}}};

namespace {

constexpr std::size_t kA = 0, kB = 1, kX = 2, kY = 3;

std::size_t observed_index(const std::string& n) {
  return n == "A" ? kA : n == "B" ? kB : n == "X" ? kX : kY;
}

std::string latent_name(std::size_t slot) {
  std::string s = "L_";
  for (const auto& c : kLatentChildren[slot]) s += c;
  return s;
}

std::array<NodeMask, 4> observed_parents(std::uint32_t edge_code) {
  std::array<NodeMask, 4> pa{};
  const Candidate c{edge_code, 0};
  for (std::size_t p = 0; p < kPairs.size(); ++p) {
    const std::size_t u = observed_index(kPairs[p][0]), v = observed_index(kPairs[p][1]);
    switch (c.link(p)) {
      case PairLink::forward: pa[v] |= bit(u); break;
      case PairLink::backward: pa[u] |= bit(v); break;
      case PairLink::none: break;
    }
  }
  return pa;
}

// Queries on candidate graphs by node name.
struct View {
  const Dag& g;
  bool edge(const char* from, const char* to) const {
    return g.has_edge(g.index_of(from), g.index_of(to));
  }
  bool latent(const char* name) const { return g.find(name).has_value(); }
  bool linked(const char* u, const char* v) const {
    std::string l = std::string("L_") + u + v;
    return edge(u, v) || edge(v, u) || latent(l.c_str());
  }
  bool dsep(std::vector<std::string> s1, std::vector<std::string> s2,
            std::vector<std::string> z) const {
    return d_separated(g, s1, s2, z);
  }
};

}  // namespace

PairLink Candidate::link(std::size_t pair) const {
  std::uint32_t code = edge_code;
  for (std::size_t i = pair + 1; i < kPairs.size(); ++i) code /= 3;
  return static_cast<PairLink>(code % 3);
}

bool in_space(const CandidateSpace& space, const Candidate& c) {
  if (!space.pair_latents && (c.latent_code & 0x3f)) return false;
  if (!space.higher_latents && (c.latent_code >> 6)) return false;
  if (space.bell_only) {
    if (c.link(5) != PairLink::none) return false;
    for (std::size_t s = 0; s < kLatentSlots; ++s) {
      const auto& ch = kLatentChildren[s];
      const bool xy = std::count(ch.begin(), ch.end(), "X") && std::count(ch.begin(), ch.end(), "Y");
      if (xy && (c.latent_code >> s & 1)) return false;
    }
  }
  return true;
}

bool edge_pattern_acyclic(std::uint32_t edge_code) {
  auto pa = observed_parents(edge_code);
  NodeMask done = 0;
  for (std::size_t round = 0; round < 4; ++round)
    for (std::size_t v = 0; v < 4; ++v)
      if (!(done & bit(v)) && (pa[v] & ~done) == 0) done |= bit(v);
  return done == 0xf;
}

Dag candidate_dag(const Candidate& c) {
  std::vector<NodeId> nodes{{"A", NodeKind::observed},
                            {"B", NodeKind::observed},
                            {"X", NodeKind::observed},
                            {"Y", NodeKind::observed}};
  const auto op = observed_parents(c.edge_code);
  std::vector<NodeMask> parents(op.begin(), op.end());
  for (std::size_t s = 0; s < kLatentSlots; ++s) {
    if (!(c.latent_code >> s & 1)) continue;
    const std::size_t l = nodes.size();
    nodes.push_back({latent_name(s), NodeKind::latent});
    parents.push_back(0);
    for (const auto& child : kLatentChildren[s]) parents[observed_index(child)] |= bit(l);
  }
  return Dag(std::move(nodes), std::move(parents));
}

void enumerate_candidates(const CandidateSpace& space,
                          const std::function<void(const Candidate&, const Dag&)>& visit) {
  for (const auto& c : candidate_list(space)) visit(c, candidate_dag(c));
}

std::vector<Candidate> candidate_list(const CandidateSpace& space) {
  std::vector<Candidate> out;
  for (std::uint32_t e = 0; e < kEdgePatterns; ++e) {
    if (!edge_pattern_acyclic(e)) continue;
    for (std::uint32_t l = 0; l < kLatentPatterns; ++l) {
      const Candidate c{e, l};
      if (in_space(space, c)) out.push_back(c);
    }
  }
  return out;
}

bool filter_by_nd(const Dag& g) { return satisfies_required_nd(g); }

std::string to_string(ExclusionStep s) {
  switch (s) {
    case ExclusionStep::step1: return "step1";
    case ExclusionStep::step2a: return "step2a";
    case ExclusionStep::step2b: return "step2b";
    case ExclusionStep::step3: return "step3";
    case ExclusionStep::step4: return "step4";
    case ExclusionStep::unattributed: return "unattributed";
  }
  return "?";
}

ExclusionStep attribute_exclusion(const Dag& g) {
  const View v{g};
  // Step 1: direct links or common causes between A and Y or B and X,
  // including every latent over three or four observables.
  if (v.linked("A", "Y") || v.linked("B", "X")) return ExclusionStep::step1;
  for (std::size_t s = 6; s < kLatentSlots; ++s)
    if (v.latent(latent_name(s).c_str())) return ExclusionStep::step1;
  // Step 2a: A -> B opens a path to X or Y (and the mirror for B -> A).
  if (v.edge("A", "B") && (v.linked("A", "X") || v.edge("B", "Y"))) return ExclusionStep::step2a;
  if (v.edge("B", "A") && (v.linked("B", "Y") || v.edge("A", "X"))) return ExclusionStep::step2a;
  // Step 2b: A -> B with a B-Y common cause meeting an X-Y link at Y.
  if (v.edge("A", "B") && v.latent("L_BY") && (v.edge("X", "Y") || v.latent("L_XY")))
    return ExclusionStep::step2b;
  if (v.edge("B", "A") && v.latent("L_AX") && (v.edge("Y", "X") || v.latent("L_XY")))
    return ExclusionStep::step2b;
  // Step 3: retrocausal outcome-to-setting edges.
  if (v.edge("A", "X") || v.edge("B", "Y")) return ExclusionStep::step3;
  // Step 4: a common cause activated by conditioning on a collider.
  if (v.latent("L_AX") && (v.latent("L_XY") || v.edge("Y", "X"))) return ExclusionStep::step4;
  if (v.latent("L_BY") && (v.latent("L_XY") || v.edge("X", "Y"))) return ExclusionStep::step4;
  return ExclusionStep::unattributed;
}

std::string to_string(ProofClass c) {
  switch (c) {
    case ProofClass::step2c: return "step2c";
    case ProofClass::step3: return "step3";
    case ProofClass::step5_i: return "step5-i";
    case ProofClass::step5_ii: return "step5-ii";
    case ProofClass::step5_iii: return "step5-iii";
    case ProofClass::other: return "other";
  }
  return "?";
}

ProofClass classify_survivor(const Dag& g) {
  const View v{g};
  if (v.edge("A", "B"))
    return v.dsep({"A", "B"}, {"X"}, {"Y"}) && v.dsep({"A"}, {"Y"}, {}) ? ProofClass::step2c
                                                                       : ProofClass::other;
  if (v.edge("B", "A"))
    return v.dsep({"A", "B"}, {"Y"}, {"X"}) && v.dsep({"B"}, {"X"}, {}) ? ProofClass::step2c
                                                                       : ProofClass::other;
  if (v.edge("A", "X") || v.edge("B", "Y")) {
    const bool left = v.dsep({"B"}, {"A", "X"}, {"Y"}) && v.dsep({"A"}, {"Y"}, {"X"});
    const bool right = v.dsep({"A"}, {"B", "Y"}, {"X"}) && v.dsep({"B"}, {"X"}, {"Y"});
    return left || right ? ProofClass::step3 : ProofClass::other;
  }
  // Lambda: latents whose children are exactly A and B.
  std::vector<std::string> lambda;
  for (std::size_t i = 4; i < g.size(); ++i)
    if (g.children(i) == (bit(kA) | bit(kB))) lambda.push_back(g.node(i).name);
  auto with = [&](std::string s) {
    auto z = lambda;
    z.push_back(std::move(s));
    return z;
  };
  if (!v.dsep({"A"}, {"B", "Y"}, with("X")) || !v.dsep({"B"}, {"A", "X"}, with("Y")))
    return ProofClass::other;
  if (v.latent("L_AX")) return ProofClass::step5_i;
  if (v.latent("L_BY")) return ProofClass::step5_ii;
  return ProofClass::step5_iii;
}

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

SurvivorRecord verify_survivor_numeric(const Dag& g, const NumericConfig& config) {
  if (config.trials == 0) throw Error("trials must be positive");
  std::vector<Alphabet> alphabets;
  std::vector<std::string> latents;
  for (const auto& n : g.nodes()) {
    if (n.name == "X")
      alphabets.push_back(make_alphabet("X", {"x0", "x1"}));
    else if (n.name == "Y")
      alphabets.push_back(make_alphabet("Y", {"y0", "y1"}));
    else if (n.kind == NodeKind::latent) {
      alphabets.push_back(numbered_alphabet(n.name, config.latent_card));
      latents.push_back(n.name);
    } else
      alphabets.push_back(numbered_alphabet(n.name, 2));
  }
  const auto scenario = chsh_scenario();
  SurvivorRecord r;
  r.dag = g;
  r.numeric_trials = config.trials;
  for (std::size_t t = 0; t < config.trials; ++t) {
    CausalModel gamma{latents, g,
                      random_compatible(g, alphabets, mix_seed(config.seed + t), config.grid)};
    const auto p = phenomenon_from_model(gamma, scenario);
    if (!no_disturbance(p).holds) ++r.nd_failures;
    if (is_factorisable(p, build_vertices(p, VertexKind::bipartite_pairs)).inside) ++r.inside;
  }
  r.all_factorisable = r.inside == r.numeric_trials;
  return r;
}

std::uint64_t VerificationReport::excluded_total() const {
  std::uint64_t n = 0;
  for (const auto& [step, count] : excluded_per_step) n += count;
  return n;
}

namespace {

struct Outcome {
  bool survived = false;
  ExclusionStep step = ExclusionStep::unattributed;
  std::uint8_t fails = 0;  // bit 0: A/Y, bit 1: B/X
  ProofClass proof_class = ProofClass::other;
};

template <typename F>
void parallel_for(std::size_t n, std::size_t jobs, std::size_t chunk, F&& body) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t begin = next.fetch_add(chunk);
      if (begin >= n) return;
      for (std::size_t i = begin; i < std::min(n, begin + chunk); ++i) body(i);
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t j = 1; j < std::max<std::size_t>(jobs, 1); ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

}  // namespace

VerificationReport verify_theorem1(const VerifierConfig& config) {
  VerificationReport report;
  report.config = config;
  report.raw_combinations = std::uint64_t{kEdgePatterns} * kLatentPatterns;
  for (std::uint32_t e = 0; e < kEdgePatterns; ++e) report.acyclic_edge_patterns += edge_pattern_acyclic(e);

  const auto candidates = candidate_list(config.space);
  report.total_candidates = candidates.size();
  std::vector<Outcome> outcomes(candidates.size());
  const auto required = required_nd_dseps();
  parallel_for(candidates.size(), config.jobs, 4096, [&](std::size_t i) {
    const Dag g = candidate_dag(candidates[i]);
    Outcome& o = outcomes[i];
    o.fails = static_cast<std::uint8_t>((d_separated(g, required[0]) ? 0 : 1) |
                                        (d_separated(g, required[1]) ? 0 : 2));
    o.survived = o.fails == 0;
    if (o.survived)
      o.proof_class = classify_survivor(g);
    else
      o.step = attribute_exclusion(g);
  });

  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const Outcome& o = outcomes[i];
    if (o.survived) {
      SurvivorRecord r;
      r.candidate = candidates[i];
      r.dag = candidate_dag(candidates[i]);
      r.proof_class = o.proof_class;
      report.survivors.push_back(std::move(r));
      ++report.survivors_per_class[o.proof_class];
      continue;
    }
    ++report.excluded_per_step[o.step];
    if (o.fails == 1) ++report.fails_a_y;
    if (o.fails == 2) ++report.fails_b_x;
    if (o.fails == 3) ++report.fails_both;
  }
  for (auto s : {ExclusionStep::step1, ExclusionStep::step2a, ExclusionStep::step2b,
                 ExclusionStep::step3, ExclusionStep::step4, ExclusionStep::unattributed})
    report.excluded_per_step.try_emplace(s, 0);
  for (auto c : {ProofClass::step2c, ProofClass::step3, ProofClass::step5_i, ProofClass::step5_ii,
                 ProofClass::step5_iii, ProofClass::other})
    report.survivors_per_class.try_emplace(c, 0);

  if (config.numeric_enabled) {
    parallel_for(report.survivors.size(), config.jobs, 1, [&](std::size_t i) {
      auto& r = report.survivors[i];
      NumericConfig nc = config.numeric;
      nc.seed = mix_seed(config.numeric.seed ^ mix_seed(r.candidate.index()));
      const auto numeric = verify_survivor_numeric(r.dag, nc);
      r.numeric_trials = numeric.numeric_trials;
      r.inside = numeric.inside;
      r.nd_failures = numeric.nd_failures;
      r.all_factorisable = numeric.all_factorisable;
    });
  }

  report.theorem_holds = report.survivors_per_class[ProofClass::other] == 0;
  for (const auto& r : report.survivors)
    if (config.numeric_enabled && (!r.all_factorisable || r.nd_failures)) report.theorem_holds = false;
  return report;
}

}  // namespace nft
