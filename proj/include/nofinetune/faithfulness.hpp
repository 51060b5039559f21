#pragma once

#include <vector>

#include "nofinetune/ci_statement.hpp"
#include "nofinetune/scenario.hpp"

namespace nft {

struct FaithfulnessReport {
  bool faithful = true;
  /// CIs of the phenomenon with no matching d-separation.
  std::vector<CIStatement> fine_tuned_cis;
  /// Unmatched CIs that hold only because a variable is pinned down by the
  /// conditioning set (zero-weight settings or deterministic outcomes). They
  /// are reported but do not count against faithfulness.
  std::vector<CIStatement> support_induced;
};

/// Full-subset CI scan of p over A, B, X, Y, each CI checked for a
/// d-separation in gamma's graph. Throws ModelMismatchError unless gamma's
/// observable marginal reproduces p.
FaithfulnessReport is_faithful(const CausalModel& gamma, const Phenomenon& p);

/// X -> A, X -> B, Y -> B, L -> A, L -> B with L a uniform bit, A = L and
/// B = L xor (x.y). Settings are independent uniform bits labelled x0/x1 and
/// y0/y1; outcomes are "0"/"1".
CausalModel one_bit_signalling_pr_model();

/// (A _||_ Y | X) and (B _||_ X | Y).
std::vector<CIStatement> required_nd_dseps();

bool satisfies_required_nd(const Dag& g);

}  // namespace nft
