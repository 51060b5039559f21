#pragma once

#include <vector>

#include "nofinetune/rational.hpp"

namespace nft::lp {

/// maximize c.x subject to a x = b, x >= 0. Dense, exact.
struct Problem {
  std::vector<std::vector<Rational>> a;
  std::vector<Rational> b;
  std::vector<Rational> c;
};

enum class Status { optimal, infeasible, unbounded };

struct Solution {
  Status status = Status::infeasible;
  /// Primal point (optimal, or the phase-one point otherwise).
  std::vector<Rational> x;
  Rational objective;
  /// Minimum of sum |a x - b| over x >= 0 (zero iff feasible).
  Rational infeasibility;
  /// When infeasible: y with y.a_j <= 0 for every column and y.b > 0.
  std::vector<Rational> farkas;
};

/// Two-phase primal simplex with Bland's rule; terminates on every input.
Solution solve(const Problem& problem);

/// Phase one only: feasibility of a x = b, x >= 0.
Solution feasibility(const std::vector<std::vector<Rational>>& a, const std::vector<Rational>& b);

}  // namespace nft::lp
