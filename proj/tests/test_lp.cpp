#include <gtest/gtest.h>

#include <optional>
#include <random>

#include "nofinetune/lp.hpp"

namespace nft {
namespace {

using Matrix = std::vector<std::vector<Rational>>;

/// Solves the square system m w = rhs exactly; nullopt if singular.
std::optional<std::vector<Rational>> solve_square(Matrix m, std::vector<Rational> rhs) {
  const std::size_t n = m.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && sgn(m[piv][c]) == 0) ++piv;
    if (piv == n) return std::nullopt;
    std::swap(m[piv], m[c]);
    std::swap(rhs[piv], rhs[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || sgn(m[r][c]) == 0) continue;
      const Rational f = m[r][c] / m[c][c];
      for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
      rhs[r] -= f * rhs[c];
    }
  }
  for (std::size_t r = 0; r < n; ++r) rhs[r] /= m[r][r];
  return rhs;
}

/// Oracle: best objective over all basic feasible solutions (rows assumed
/// linearly independent). nullopt if no basis is feasible.
std::optional<Rational> brute_force_optimum(const lp::Problem& p) {
  const std::size_t m = p.a.size(), n = p.c.size();
  std::optional<Rational> best;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != m) continue;
    std::vector<std::size_t> cols;
    for (std::size_t j = 0; j < n; ++j)
      if (mask & (1u << j)) cols.push_back(j);
    Matrix sq(m, std::vector<Rational>(m));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t k = 0; k < m; ++k) sq[i][k] = p.a[i][cols[k]];
    auto sol = solve_square(sq, p.b);
    if (!sol) continue;
    bool feasible = true;
    Rational obj = 0;
    for (std::size_t k = 0; k < m; ++k) {
      if ((*sol)[k] < 0) feasible = false;
      obj += p.c[cols[k]] * (*sol)[k];
    }
    if (feasible && (!best || obj > *best)) best = obj;
  }
  return best;
}

TEST(Simplex, SmallKnownProblem) {
  // max x + y  s.t.  x + 2y + s1 = 4, 3x + y + s2 = 6.
  lp::Problem p{{{1, 2, 1, 0}, {3, 1, 0, 1}}, {4, 6}, {1, 1, 0, 0}};
  const auto sol = lp::solve(p);
  ASSERT_EQ(sol.status, lp::Status::optimal);
  EXPECT_EQ(sol.objective, Rational(14, 5));
  EXPECT_EQ(sol.x[0], Rational(8, 5));
  EXPECT_EQ(sol.x[1], Rational(6, 5));
}

TEST(Simplex, InfeasibleWithFarkasCertificate) {
  // x + y = 1 and x + y = 2 cannot both hold.
  const Matrix a{{1, 1}, {1, 1}};
  const std::vector<Rational> b{1, 2};
  const auto sol = lp::feasibility(a, b);
  ASSERT_EQ(sol.status, lp::Status::infeasible);
  EXPECT_EQ(sol.infeasibility, Rational(1));
  for (std::size_t j = 0; j < 2; ++j) {
    EXPECT_LE(sol.farkas[0] * a[0][j] + sol.farkas[1] * a[1][j], 0);
  }
  EXPECT_GT(sol.farkas[0] * b[0] + sol.farkas[1] * b[1], 0);
}

TEST(Simplex, NegativeRightHandSide) {
  const auto sol = lp::feasibility({{-1, 1}}, {-3});
  ASSERT_EQ(sol.status, lp::Status::optimal);
  EXPECT_EQ(-sol.x[0] + sol.x[1], Rational(-3));
}

TEST(Simplex, Unbounded) {
  lp::Problem p{{{1, -1}}, {0}, {1, 0}};
  EXPECT_EQ(lp::solve(p).status, lp::Status::unbounded);
}

TEST(Simplex, RedundantRows) {
  lp::Problem p{{{1, 1, 0}, {2, 2, 0}, {0, 1, 1}}, {1, 2, 1}, {0, 1, 0}};
  const auto sol = lp::solve(p);
  ASSERT_EQ(sol.status, lp::Status::optimal);
  EXPECT_EQ(sol.objective, Rational(1));
}

TEST(Simplex, AgreesWithBasisEnumerationOnRandomProblems) {
  std::mt19937_64 rng(2024);
  int compared = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t m = 2 + rng() % 2, n = 4 + rng() % 3;
    lp::Problem p;
    p.a.assign(m, std::vector<Rational>(n));
    for (auto& row : p.a)
      for (auto& v : row) v = static_cast<long>(rng() % 7) - 2;
    for (std::size_t i = 0; i < m; ++i) p.b.push_back(static_cast<long>(rng() % 9) - 2);
    for (std::size_t j = 0; j < n; ++j) p.c.push_back(static_cast<long>(rng() % 7) - 3);
    // Bounded region: add sum x <= 10 via an extra slack column.
    for (auto& row : p.a) row.push_back(0);
    p.a.emplace_back(n + 1, Rational(1));
    p.b.push_back(10);
    p.c.push_back(0);
    const auto sol = lp::solve(p);
    const auto oracle = brute_force_optimum(p);
    if (sol.status == lp::Status::optimal) {
      ASSERT_TRUE(oracle.has_value());
      EXPECT_EQ(sol.objective, *oracle);
      // Primal feasibility, recomputed.
      for (std::size_t i = 0; i < p.a.size(); ++i) {
        Rational lhs = 0;
        for (std::size_t j = 0; j < p.c.size(); ++j) lhs += p.a[i][j] * sol.x[j];
        EXPECT_EQ(lhs, p.b[i]);
      }
      ++compared;
    } else {
      ASSERT_EQ(sol.status, lp::Status::infeasible);
      // Infeasible systems may still have dependent rows; the Farkas vector
      // is the certificate either way.
      Rational yb = 0;
      for (std::size_t i = 0; i < p.b.size(); ++i) yb += sol.farkas[i] * p.b[i];
      EXPECT_GT(yb, 0);
      for (std::size_t j = 0; j < p.c.size(); ++j) {
        Rational ya = 0;
        for (std::size_t i = 0; i < p.a.size(); ++i) ya += sol.farkas[i] * p.a[i][j];
        EXPECT_LE(ya, 0);
      }
      EXPECT_FALSE(oracle.has_value());
    }
  }
  EXPECT_GT(compared, 50);
}

}  // namespace
}  // namespace nft
