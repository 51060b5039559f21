#include "nofinetune/faithfulness.hpp"

#include "nofinetune/error.hpp"

namespace nft {

FaithfulnessReport is_faithful(const CausalModel& gamma, const Phenomenon& p) {
  Phenomenon implied = [&] {
    try {
      return phenomenon_from_model(gamma, p.scenario());
    } catch (const SupportError& e) {
      throw ModelMismatchError(std::string("model does not reproduce phenomenon: ") + e.what());
    }
  }();
  const auto& want = p.dist();
  if (!want.with_mode(want.mode(), want.epsilon())
           .approx_equal(implied.dist().with_mode(want.mode(), want.epsilon())))
    throw ModelMismatchError("model marginal differs from phenomenon");

  FaithfulnessReport r;
  const std::vector<std::string> observed{kOutcomeA, kOutcomeB, kSettingX, kSettingY};
  for (const auto& ci : ci_scan(want, observed, true)) {
    if (d_separated(gamma.graph, ci)) continue;
    if (holds_by_determinism(want, ci))
      r.support_induced.push_back(ci);
    else
      r.fine_tuned_cis.push_back(ci);
  }
  r.faithful = r.fine_tuned_cis.empty();
  return r;
}

CausalModel one_bit_signalling_pr_model() {
  const std::vector<NodeId> nodes{
      {"X", NodeKind::observed}, {"Y", NodeKind::observed}, {"L", NodeKind::latent},
      {"A", NodeKind::observed}, {"B", NodeKind::observed}};
  const std::vector<Edge> edges{{"L", "A"}, {"L", "B"}, {"X", "A"}, {"X", "B"}, {"Y", "B"}};
  Dag g = build_dag(nodes, edges);

  const auto x = make_alphabet("X", {"x0", "x1"});
  const auto y = make_alphabet("Y", {"y0", "y1"});
  const auto l = numbered_alphabet("L", 2);
  const auto a = numbered_alphabet("A", 2);
  const auto b = numbered_alphabet("B", 2);

  std::vector<Kernel> kernels;
  kernels.push_back(uniform_kernel(x));
  kernels.push_back(uniform_kernel(y));
  kernels.push_back(uniform_kernel(l));
  // Parents in node order: A <- X, L; B <- X, Y, L.
  kernels.push_back(deterministic_kernel(a, {x, l}, [](const Assignment& pa) { return pa[1]; }));
  kernels.push_back(deterministic_kernel(
      b, {x, y, l}, [](const Assignment& pa) { return pa[2] ^ (pa[0] & pa[1]); }));
  auto joint = markov_factorize(g, kernels);
  return make_causal_model(std::move(g), std::move(joint));
}

std::vector<CIStatement> required_nd_dseps() {
  return {make_ci({kOutcomeA}, {kSettingY}, {kSettingX}),
          make_ci({kOutcomeB}, {kSettingX}, {kSettingY})};
}

bool satisfies_required_nd(const Dag& g) {
  for (const auto& ci : required_nd_dseps())
    if (!d_separated(g, ci)) return false;
  return true;
}

}  // namespace nft
