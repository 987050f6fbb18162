#include "mmseq/lp.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "mmseq/errors.hpp"

namespace mmseq
{
namespace
{
constexpr double kPivotEps = 1e-11;
constexpr double kFeasibilityEps = 1e-9;

class Tableau
{
public:
  Tableau(Eigen::Index rows, Eigen::Index cols) : t_(decltype(t_)::Zero(rows + 1, cols + 1)), basis_(rows, -1) {}

  Eigen::Index rows() const { return t_.rows() - 1; }
  Eigen::Index cols() const { return t_.cols() - 1; }
  double& at(Eigen::Index r, Eigen::Index c) { return t_(r, c); }
  double& rhs(Eigen::Index r) { return t_(r, cols()); }
  double& cost(Eigen::Index c) { return t_(rows(), c); }
  double& objective_value() { return t_(rows(), cols()); }
  std::vector<Eigen::Index>& basis() { return basis_; }

  void pivot(Eigen::Index row, Eigen::Index col)
  {
    t_.row(row) /= t_(row, col);
    for (Eigen::Index r = 0; r < t_.rows(); ++r)
    {
      if (r != row)
      {
        const double f = t_(r, col);
        if (f != 0.0)
        {
          t_.row(r) -= f * t_.row(row);
        }
      }
    }
    basis_[row] = col;
  }

  // Bland's rule over columns [0, eligible). Returns false if unbounded.
  bool optimize(Eigen::Index eligible)
  {
    for (;;)
    {
      Eigen::Index enter = -1;
      for (Eigen::Index c = 0; c < eligible; ++c)
      {
        if (cost(c) < -kPivotEps)
        {
          enter = c;
          break;
        }
      }
      if (enter < 0)
      {
        return true;
      }
      Eigen::Index leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (Eigen::Index r = 0; r < rows(); ++r)
      {
        const double a = at(r, enter);
        if (a > kPivotEps)
        {
          const double ratio = rhs(r) / a;
          if (ratio < best_ratio - 1e-12 ||
              (leave >= 0 && std::abs(ratio - best_ratio) <= 1e-12 && basis_[r] < basis_[leave]))
          {
            best_ratio = ratio;
            leave = r;
          }
        }
      }
      if (leave < 0)
      {
        return false;
      }
      pivot(leave, enter);
    }
  }

private:
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> t_;
  std::vector<Eigen::Index> basis_;
};
}  // namespace

LpSolution solve_lp(const LpProblem& p)
{
  const Eigen::Index n = p.num_vars();
  const Eigen::Index m_ub = p.a_ub.rows();
  const Eigen::Index m_eq = p.a_eq.rows();
  if ((m_ub > 0 && p.a_ub.cols() != n) || p.b_ub.size() != m_ub || (m_eq > 0 && p.a_eq.cols() != n) ||
      p.b_eq.size() != m_eq)
  {
    throw InputError("solve_lp: inconsistent problem dimensions");
  }
  const Eigen::Index m = m_ub + m_eq;

  // Columns: [u (n) | v (n) | slack (m_ub) | artificial (n_art)], x = u - v.
  std::vector<bool> needs_art(static_cast<std::size_t>(m), false);
  Eigen::Index n_art = 0;
  for (Eigen::Index i = 0; i < m; ++i)
  {
    const bool art = i >= m_ub || p.b_ub(i) < 0.0;
    needs_art[static_cast<std::size_t>(i)] = art;
    n_art += art ? 1 : 0;
  }
  const Eigen::Index art0 = 2 * n + m_ub;
  Tableau t(m, art0 + n_art);

  Eigen::Index next_art = art0;
  for (Eigen::Index i = 0; i < m; ++i)
  {
    const bool is_ub = i < m_ub;
    Eigen::VectorXd row = is_ub ? Eigen::VectorXd(p.a_ub.row(i)) : Eigen::VectorXd(p.a_eq.row(i - m_ub));
    double b = is_ub ? p.b_ub(i) : p.b_eq(i - m_ub);
    const double sign = b < 0.0 ? -1.0 : 1.0;
    for (Eigen::Index j = 0; j < n; ++j)
    {
      t.at(i, j) = sign * row(j);
      t.at(i, n + j) = -sign * row(j);
    }
    if (is_ub)
    {
      t.at(i, 2 * n + i) = sign;
    }
    t.rhs(i) = sign * b;
    if (needs_art[static_cast<std::size_t>(i)])
    {
      t.at(i, next_art) = 1.0;
      t.basis()[static_cast<std::size_t>(i)] = next_art++;
    }
    else
    {
      t.basis()[static_cast<std::size_t>(i)] = 2 * n + i;
    }
  }

  LpSolution sol;
  if (n_art > 0)
  {
    for (Eigen::Index i = 0; i < m; ++i)
    {
      if (needs_art[static_cast<std::size_t>(i)])
      {
        for (Eigen::Index c = 0; c < art0; ++c)
        {
          t.cost(c) -= t.at(i, c);
        }
        t.objective_value() -= t.rhs(i);
      }
    }
    t.optimize(art0 + n_art);
    if (-t.objective_value() > kFeasibilityEps * (1.0 + p.b_ub.lpNorm<Eigen::Infinity>() +
                                                  p.b_eq.lpNorm<Eigen::Infinity>()))
    {
      sol.status = LpStatus::Infeasible;
      return sol;
    }
    // Drive zero-level artificials out of the basis where possible; the rest
    // sit on redundant rows and never move again.
    for (Eigen::Index i = 0; i < m; ++i)
    {
      if (t.basis()[static_cast<std::size_t>(i)] >= art0)
      {
        for (Eigen::Index c = 0; c < art0; ++c)
        {
          if (std::abs(t.at(i, c)) > 1e-9)
          {
            t.pivot(i, c);
            break;
          }
        }
      }
    }
  }

  for (Eigen::Index c = 0; c <= t.cols(); ++c)
  {
    t.cost(c) = 0.0;
  }
  for (Eigen::Index j = 0; j < n; ++j)
  {
    t.cost(j) = p.objective(j);
    t.cost(n + j) = -p.objective(j);
  }
  for (Eigen::Index i = 0; i < m; ++i)
  {
    const Eigen::Index b = t.basis()[static_cast<std::size_t>(i)];
    const double cb = b < n ? p.objective(b) : (b < 2 * n ? -p.objective(b - n) : 0.0);
    if (cb != 0.0)
    {
      for (Eigen::Index c = 0; c <= t.cols(); ++c)
      {
        t.cost(c) -= cb * t.at(i, c);
      }
    }
  }
  if (!t.optimize(art0))
  {
    sol.status = LpStatus::Unbounded;
    return sol;
  }

  sol.status = LpStatus::Optimal;
  sol.x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < m; ++i)
  {
    const Eigen::Index b = t.basis()[static_cast<std::size_t>(i)];
    if (b < n)
    {
      sol.x(b) += t.rhs(i);
    }
    else if (b < 2 * n)
    {
      sol.x(b - n) -= t.rhs(i);
    }
  }
  sol.objective = p.objective.dot(sol.x);
  return sol;
}
}  // namespace mmseq
