#include "mmseq/ballfit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "mmseq/errors.hpp"
#include "mmseq/lp.hpp"

namespace mmseq
{
namespace
{
// Variables: [bottom.xyz, top.xyz]; every inequality row reads
// coeffs . centers + radius <= bound.
struct Row
{
  Eigen::Matrix<double, 6, 1> coeffs;
  double bound;
};

std::vector<Row> containment_rows(const ConvexPolytope& hull)
{
  std::vector<Row> rows;
  for (int end = 0; end < 2; ++end)
  {
    for (const auto& h : hull.halfspaces)
    {
      Row r{Eigen::Matrix<double, 6, 1>::Zero(), h.offset};
      r.coeffs.segment<3>(3 * end) = h.normal.vec();
      rows.push_back(r);
    }
  }
  return rows;
}

std::vector<Row> collision_rows(const CollisionPlanes& planes)
{
  std::vector<Row> rows;
  for (int end = 0; end < 2; ++end)
  {
    if (planes.x_offset)
    {
      Row r{Eigen::Matrix<double, 6, 1>::Zero(), *planes.x_offset};
      r.coeffs(3 * end + 0) = -1.0;
      rows.push_back(r);
    }
    if (planes.z_offset)
    {
      Row r{Eigen::Matrix<double, 6, 1>::Zero(), *planes.z_offset};
      r.coeffs(3 * end + 2) = -1.0;
      rows.push_back(r);
    }
  }
  return rows;
}

void set_height_equalities(LpProblem& p, Eigen::Index n, double z_min, double z_max)
{
  p.a_eq = Eigen::MatrixXd::Zero(2, n);
  p.b_eq.resize(2);
  p.a_eq(0, 2) = 1.0;
  p.a_eq(1, 5) = 1.0;
  p.b_eq << z_min, z_max;
}

// maximize radius: variables [centers(6), r].
LpSolution max_radius(const std::vector<Row>& rows, double z_min, double z_max)
{
  LpProblem p;
  p.objective = Eigen::VectorXd::Zero(7);
  p.objective(6) = -1.0;
  const auto m = static_cast<Eigen::Index>(rows.size());
  p.a_ub = Eigen::MatrixXd::Zero(m + 1, 7);
  p.b_ub.resize(m + 1);
  for (Eigen::Index i = 0; i < m; ++i)
  {
    p.a_ub.row(i).head<6>() = rows[static_cast<std::size_t>(i)].coeffs.transpose();
    p.a_ub(i, 6) = 1.0;
    p.b_ub(i) = rows[static_cast<std::size_t>(i)].bound;
  }
  p.a_ub(m, 6) = -1.0;
  p.b_ub(m) = 0.0;
  set_height_equalities(p, 7, z_min, z_max);
  return solve_lp(p);
}

// With the radius fixed, pushes the centers deeper into the rows flagged in
// `active` by maximizing a common margin s: variables [centers(6), s].
LpSolution max_margin(const std::vector<Row>& rows, const std::vector<bool>& active, double radius,
                      double z_min, double z_max)
{
  LpProblem p;
  p.objective = Eigen::VectorXd::Zero(7);
  p.objective(6) = -1.0;
  const auto m = static_cast<Eigen::Index>(rows.size());
  p.a_ub = Eigen::MatrixXd::Zero(m, 7);
  p.b_ub.resize(m);
  for (Eigen::Index i = 0; i < m; ++i)
  {
    const auto k = static_cast<std::size_t>(i);
    p.a_ub.row(i).head<6>() = rows[k].coeffs.transpose();
    p.a_ub(i, 6) = active[k] ? 1.0 : 0.0;
    p.b_ub(i) = rows[k].bound - radius;
  }
  set_height_equalities(p, 7, z_min, z_max);
  return solve_lp(p);
}

// Largest slack row k can reach with the radius fixed.
double max_slack(const std::vector<Row>& rows, std::size_t k, double radius, double z_min, double z_max)
{
  LpProblem p;
  p.objective = rows[k].coeffs;
  const auto m = static_cast<Eigen::Index>(rows.size());
  p.a_ub = Eigen::MatrixXd::Zero(m, 6);
  p.b_ub.resize(m);
  for (Eigen::Index i = 0; i < m; ++i)
  {
    p.a_ub.row(i) = rows[static_cast<std::size_t>(i)].coeffs.transpose();
    p.b_ub(i) = rows[static_cast<std::size_t>(i)].bound - radius;
  }
  set_height_equalities(p, 6, z_min, z_max);
  const LpSolution s = solve_lp(p);
  if (s.status != LpStatus::Optimal)
  {
    return 0.0;
  }
  return rows[k].bound - radius - s.objective;
}

BallSegment to_segment(const Eigen::VectorXd& centers, double radius)
{
  return BallSegment{centers.head<3>(), centers.segment<3>(3), 2.0 * radius};
}
}  // namespace

BallSegment fit_ball_segment(const ConvexPolytope& hull, double z_min, double z_max,
                             const CollisionPlanes& planes)
{
  if (!(z_min <= z_max))
  {
    throw InputError("fit_ball_segment: z_min must not exceed z_max");
  }
  if (hull.halfspaces.empty())
  {
    throw InputError("fit_ball_segment: hull has no half-spaces");
  }
  std::vector<Row> rows = containment_rows(hull);
  const std::vector<Row> collision = collision_rows(planes);
  rows.insert(rows.end(), collision.begin(), collision.end());

  const LpSolution primary = max_radius(rows, z_min, z_max);
  if (primary.status == LpStatus::Unbounded)
  {
    throw InputError("fit_ball_segment: hull is unbounded");
  }
  if (primary.status == LpStatus::Infeasible)
  {
    if (max_radius(containment_rows(hull), z_min, z_max).status == LpStatus::Infeasible)
    {
      throw InfeasibleError("ball fit infeasible: height equalities z in [" + std::to_string(z_min) + ", " +
                            std::to_string(z_max) + "] fall outside the convex reachable hull");
    }
    throw InfeasibleError("ball fit infeasible: collision planes exclude every ball inside the hull");
  }
  const double radius = primary.x(6);
  if (!(radius > 1e-12))
  {
    throw InfeasibleError("ball fit infeasible: no positive clearance at the requested heights "
                          "(hull containment and collision planes leave zero diameter)");
  }

  // Deterministic tie-break among optimal centers.
  std::vector<bool> active(rows.size(), true);
  Eigen::VectorXd best = primary.x.head<6>();
  for (;;)
  {
    if (std::none_of(active.begin(), active.end(), [](bool a) { return a; }))
    {
      break;
    }
    const LpSolution margin = max_margin(rows, active, radius, z_min, z_max);
    if (margin.status != LpStatus::Optimal)
    {
      break;
    }
    best = margin.x.head<6>();
    if (margin.x(6) > 1e-9)
    {
      break;
    }
    bool removed = false;
    for (std::size_t k = 0; k < rows.size(); ++k)
    {
      if (!active[k])
      {
        continue;
      }
      const double slack = rows[k].bound - radius - rows[k].coeffs.dot(best);
      if (slack <= 1e-9 && max_slack(rows, k, radius, z_min, z_max) <= 1e-9)
      {
        active[k] = false;
        removed = true;
      }
    }
    if (!removed)
    {
      break;
    }
  }
  return to_segment(best, radius);
}

double segment_containment_violation(const ConvexPolytope& hull, const BallSegment& seg, int samples)
{
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i)
  {
    const double t = samples > 1 ? static_cast<double>(i) / (samples - 1) : 0.0;
    worst = std::max(worst, hull.max_violation(seg.at(t)) + seg.radius());
  }
  return worst;
}
}  // namespace mmseq
