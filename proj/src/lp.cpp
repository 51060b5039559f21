#include "nofinetune/lp.hpp"

#include <stdexcept>

namespace nft::lp {

namespace {

class Tableau {
 public:
  Tableau(const std::vector<std::vector<Rational>>& a, const std::vector<Rational>& b)
      : rows_(a.size()), cols_(a.empty() ? 0 : a[0].size()) {
    if (b.size() != rows_) throw std::invalid_argument("lp: b has wrong length");
    sign_.assign(rows_, 1);
    t_.assign(rows_, std::vector<Rational>(cols_ + rows_ + 1, 0));
    basis_.resize(rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
      if (a[i].size() != cols_) throw std::invalid_argument("lp: ragged constraint matrix");
      sign_[i] = b[i] < 0 ? -1 : 1;
      for (std::size_t j = 0; j < cols_; ++j) t_[i][j] = sign_[i] < 0 ? Rational(-a[i][j]) : a[i][j];
      t_[i][cols_ + i] = 1;
      t_[i][rhs()] = sign_[i] < 0 ? Rational(-b[i]) : b[i];
      basis_[i] = cols_ + i;
    }
    active_.assign(rows_, true);
  }

  std::size_t rhs() const { return cols_ + rows_; }
  bool is_artificial(std::size_t j) const { return j >= cols_ && j < rhs(); }

  /// Sets the reduced-cost row for minimizing cost.x over the current basis.
  void price(const std::vector<Rational>& cost) {
    obj_.assign(rhs() + 1, 0);
    for (std::size_t j = 0; j <= rhs(); ++j) obj_[j] = j < rhs() ? cost[j] : Rational(0);
    for (std::size_t i = 0; i < rows_; ++i) {
      if (!active_[i]) continue;
      const Rational& cb = cost[basis_[i]];
      if (sgn(cb) == 0) continue;
      for (std::size_t j = 0; j <= rhs(); ++j) {
        if (sgn(t_[i][j]) != 0) obj_[j] -= cb * t_[i][j];
      }
    }
  }

  /// Minimizes the priced objective over columns allowed by `enterable`.
  /// Returns false if unbounded.
  template <typename Allowed>
  bool optimize(Allowed enterable) {
    while (true) {
      std::size_t enter = rhs();
      for (std::size_t j = 0; j < rhs(); ++j) {
        if (enterable(j) && obj_[j] < 0) {
          enter = j;
          break;
        }
      }
      if (enter == rhs()) return true;
      std::size_t leave = rows_;
      Rational best;
      for (std::size_t i = 0; i < rows_; ++i) {
        if (!active_[i] || sgn(t_[i][enter]) <= 0) continue;
        Rational ratio = t_[i][rhs()] / t_[i][enter];
        if (leave == rows_ || ratio < best || (ratio == best && basis_[i] < basis_[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave == rows_) return false;
      pivot(leave, enter);
    }
  }

  void pivot(std::size_t r, std::size_t c) {
    const Rational p = t_[r][c];
    for (auto& v : t_[r]) {
      if (sgn(v) != 0) v /= p;
    }
    auto eliminate = [&](std::vector<Rational>& row) {
      if (sgn(row[c]) == 0) return;
      const Rational f = row[c];
      for (std::size_t j = 0; j <= rhs(); ++j) {
        if (sgn(t_[r][j]) != 0) row[j] -= f * t_[r][j];
      }
    };
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i != r && active_[i]) eliminate(t_[i]);
    }
    eliminate(obj_);
    basis_[r] = c;
  }

  /// After a feasible phase one: pivot zero-level artificials out of the
  /// basis, or drop their rows when they are redundant.
  void expel_artificials() {
    for (std::size_t i = 0; i < rows_; ++i) {
      if (!active_[i] || !is_artificial(basis_[i])) continue;
      std::size_t col = cols_;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (sgn(t_[i][j]) != 0) {
          col = j;
          break;
        }
      }
      if (col == cols_) {
        active_[i] = false;
      } else {
        pivot(i, col);
      }
    }
  }

  std::vector<Rational> primal() const {
    std::vector<Rational> x(cols_, 0);
    for (std::size_t i = 0; i < rows_; ++i) {
      if (active_[i] && basis_[i] < cols_) x[basis_[i]] = t_[i][rhs()];
    }
    return x;
  }

  Rational objective_value() const { return -obj_[rhs()]; }

  /// Duals of the phase-one problem mapped back to the caller's row signs.
  std::vector<Rational> phase_one_duals() const {
    std::vector<Rational> y(rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
      y[i] = Rational(1) - obj_[cols_ + i];
      if (sign_[i] < 0) y[i] = -y[i];
    }
    return y;
  }

  std::size_t cols() const { return cols_; }
  std::size_t rows() const { return rows_; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<int> sign_;
  std::vector<std::vector<Rational>> t_;
  std::vector<Rational> obj_;
  std::vector<std::size_t> basis_;
  std::vector<bool> active_;
};

/// Runs phase one; fills status/infeasibility/farkas/x. Returns true if feasible.
bool phase_one(Tableau& t, Solution& out) {
  std::vector<Rational> cost(t.rhs(), 0);
  for (std::size_t j = t.cols(); j < t.rhs(); ++j) cost[j] = 1;
  t.price(cost);
  t.optimize([](std::size_t) { return true; });
  out.infeasibility = t.objective_value();
  out.x = t.primal();
  if (sgn(out.infeasibility) > 0) {
    out.status = Status::infeasible;
    out.farkas = t.phase_one_duals();
    return false;
  }
  out.status = Status::optimal;
  return true;
}

}  // namespace

Solution feasibility(const std::vector<std::vector<Rational>>& a, const std::vector<Rational>& b) {
  Tableau t(a, b);
  Solution out;
  phase_one(t, out);
  out.objective = 0;
  return out;
}

Solution solve(const Problem& problem) {
  Tableau t(problem.a, problem.b);
  Solution out;
  if (!phase_one(t, out)) return out;
  if (problem.c.size() != t.cols()) throw std::invalid_argument("lp: c has wrong length");
  t.expel_artificials();
  std::vector<Rational> cost(t.rhs(), 0);
  for (std::size_t j = 0; j < t.cols(); ++j) cost[j] = -problem.c[j];
  t.price(cost);
  const std::size_t n = t.cols();
  if (!t.optimize([n](std::size_t j) { return j < n; })) {
    out.status = Status::unbounded;
    out.x = t.primal();
    return out;
  }
  out.status = Status::optimal;
  out.x = t.primal();
  out.objective = 0;
  for (std::size_t j = 0; j < n; ++j) out.objective += problem.c[j] * out.x[j];
  return out;
}

}  // namespace nft::lp
