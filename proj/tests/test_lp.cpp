#include <doctest.h>

#include <random>

#include "mmseq/errors.hpp"
#include "mmseq/lp.hpp"
#include "oracles.hpp"

using namespace mmseq;

namespace
{
LpProblem one_var(double c, std::vector<std::pair<double, double>> rows)
{
  LpProblem p;
  p.objective = Eigen::VectorXd::Constant(1, c);
  p.a_ub.resize(static_cast<Eigen::Index>(rows.size()), 1);
  p.b_ub.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
  {
    p.a_ub(static_cast<Eigen::Index>(i), 0) = rows[i].first;
    p.b_ub(static_cast<Eigen::Index>(i)) = rows[i].second;
  }
  p.a_eq.resize(0, 1);
  p.b_eq.resize(0);
  return p;
}

double max_violation(const LpProblem& p, const Eigen::VectorXd& x)
{
  double worst = 0.0;
  if (p.a_ub.rows() > 0)
  {
    worst = std::max(worst, (p.a_ub * x - p.b_ub).maxCoeff());
  }
  if (p.a_eq.rows() > 0)
  {
    worst = std::max(worst, (p.a_eq * x - p.b_eq).cwiseAbs().maxCoeff());
  }
  return worst;
}

// Random LP with a box |x_i| <= 3 so it is bounded; half of the instances also
// get an equality row.
LpProblem random_lp(std::mt19937_64& rng, int n, int m, bool with_eq)
{
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  LpProblem p;
  p.objective = Eigen::VectorXd::NullaryExpr(n, [&] { return u(rng); });
  p.a_ub.resize(m + 2 * n, n);
  p.b_ub.resize(m + 2 * n);
  for (int i = 0; i < m; ++i)
  {
    for (int j = 0; j < n; ++j)
    {
      p.a_ub(i, j) = u(rng);
    }
    p.b_ub(i) = u(rng) + 0.5;
  }
  for (int j = 0; j < n; ++j)
  {
    p.a_ub.row(m + 2 * j).setZero();
    p.a_ub(m + 2 * j, j) = 1.0;
    p.b_ub(m + 2 * j) = 3.0;
    p.a_ub.row(m + 2 * j + 1).setZero();
    p.a_ub(m + 2 * j + 1, j) = -1.0;
    p.b_ub(m + 2 * j + 1) = 3.0;
  }
  p.a_eq.resize(with_eq ? 1 : 0, n);
  p.b_eq.resize(with_eq ? 1 : 0);
  if (with_eq)
  {
    for (int j = 0; j < n; ++j)
    {
      p.a_eq(0, j) = u(rng);
    }
    p.b_eq(0) = 0.3 * u(rng);
  }
  return p;
}
}  // namespace

TEST_CASE("single variable maximum at the bound")
{
  const LpSolution s = solve_lp(one_var(-1.0, {{1.0, 5.0}, {-1.0, 0.0}}));
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.x(0) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(s.objective == doctest::Approx(-5.0).epsilon(1e-12));
}

TEST_CASE("contradictory bounds are infeasible")
{
  CHECK(solve_lp(one_var(1.0, {{1.0, 0.0}, {-1.0, -1.0}})).status == LpStatus::Infeasible);
}

TEST_CASE("missing bound is unbounded")
{
  CHECK(solve_lp(one_var(-1.0, {{-1.0, 0.0}})).status == LpStatus::Unbounded);
}

TEST_CASE("equality rows are honored")
{
  // min x + y s.t. x - y = 1, x >= 0, y >= 0 -> (1, 0).
  LpProblem p;
  p.objective = Eigen::Vector2d(1.0, 1.0);
  p.a_ub = -Eigen::Matrix2d::Identity();
  p.b_ub = Eigen::Vector2d::Zero();
  p.a_eq.resize(1, 2);
  p.a_eq << 1.0, -1.0;
  p.b_eq = Eigen::VectorXd::Constant(1, 1.0);
  const LpSolution s = solve_lp(p);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.x(0) == doctest::Approx(1.0));
  CHECK(std::abs(s.x(1)) < 1e-12);
}

TEST_CASE("inconsistent dimensions are rejected")
{
  LpProblem p = one_var(1.0, {{1.0, 1.0}});
  p.b_ub.resize(2);
  CHECK_THROWS_AS(solve_lp(p), InputError);
}

TEST_CASE("random LPs match vertex enumeration")
{
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> vars(1, 5);
  std::uniform_int_distribution<int> rows(0, 6);
  int optimal = 0;
  int infeasible = 0;
  for (int trial = 0; trial < 150; ++trial)
  {
    const int n = vars(rng);
    const LpProblem p = random_lp(rng, n, rows(rng), trial % 2 == 1);
    bool feasible = false;
    const double best = oracle::brute_lp_min(p.objective, p.a_ub, p.b_ub, p.a_eq, p.b_eq, feasible);
    const LpSolution s = solve_lp(p);
    if (!feasible)
    {
      CHECK(s.status == LpStatus::Infeasible);
      ++infeasible;
      continue;
    }
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(max_violation(p, s.x) <= 1e-8);
    CHECK(std::abs(s.objective - best) <= 1e-8);
    CHECK(std::abs(p.objective.dot(s.x) - s.objective) <= 1e-8);
    ++optimal;
  }
  CHECK(optimal > 100);
}

TEST_CASE("degenerate vertices do not cycle")
{
  // Many constraints through the optimum (0, 0).
  LpProblem p;
  p.objective = Eigen::Vector2d(1.0, 1.0);
  const int m = 12;
  p.a_ub.resize(m, 2);
  p.b_ub = Eigen::VectorXd::Zero(m);
  for (int i = 0; i < m; ++i)
  {
    const double a = 0.1 + 1.3 * i / (m - 1);
    p.a_ub(i, 0) = -std::cos(a);
    p.a_ub(i, 1) = -std::sin(a);
  }
  p.a_eq.resize(0, 2);
  p.b_eq.resize(0);
  const LpSolution s = solve_lp(p);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(std::abs(s.objective) < 1e-12);
}
