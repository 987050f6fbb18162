#pragma once

#include <Eigen/Core>

namespace mmseq
{
/// minimize c.x  subject to  A_ub x <= b_ub,  A_eq x = b_eq,  x free.
struct LpProblem
{
  Eigen::VectorXd objective;
  Eigen::MatrixXd a_ub;
  Eigen::VectorXd b_ub;
  Eigen::MatrixXd a_eq;
  Eigen::VectorXd b_eq;

  Eigen::Index num_vars() const { return objective.size(); }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution
{
  LpStatus status = LpStatus::Infeasible;
  Eigen::VectorXd x;
  double objective = 0.0;
};

/// Dense two-phase tableau simplex with Bland's anti-cycling rule. Free
/// variables are split into positive and negative parts. Infeasibility and
/// unboundedness are reported through the status. Throws InputError on
/// inconsistent dimensions.
LpSolution solve_lp(const LpProblem& problem);
}  // namespace mmseq
