#include <doctest.h>

#include <random>

#include "mmseq/ballfit.hpp"
#include "mmseq/errors.hpp"
#include "test_util.hpp"

using namespace mmseq;

namespace
{
ConvexPolytope box_hull(const Vec3& lo, const Vec3& hi)
{
  ConvexPolytope p;
  for (int a = 0; a < 3; ++a)
  {
    Vec3 n = Vec3::Zero();
    n[a] = 1.0;
    p.halfspaces.push_back(Halfspace{UnitVec3::normalized(n), hi[a]});
    p.halfspaces.push_back(Halfspace{UnitVec3::normalized(-n), -lo[a]});
  }
  return p;
}

// Largest clearance of a center at height z, by grid search over x, y on the
// given step. Clearance is min over half-spaces of offset - n.c.
double grid_clearance(const ConvexPolytope& hull, double z, double lo, double hi, double step)
{
  double best = -1e300;
  for (double x = lo; x <= hi + 1e-12; x += step)
  {
    for (double y = lo; y <= hi + 1e-12; y += step)
    {
      best = std::max(best, -hull.max_violation(Vec3(x, y, z)));
    }
  }
  return best;
}

// Random bounded polytope: a box cut by a few random planes that keep the
// point `inside` strictly inside.
ConvexPolytope random_hull(std::mt19937_64& rng, const Vec3& inside)
{
  ConvexPolytope p = box_hull(Vec3(-2.0, -2.0, -2.0), Vec3(2.0, 2.0, 2.0));
  std::uniform_real_distribution<double> slack(0.4, 1.5);
  for (int i = 0; i < 6; ++i)
  {
    const UnitVec3 n = UnitVec3::normalized(testutil::random_point(rng, -1.0, 1.0));
    p.halfspaces.push_back(Halfspace{n, n.vec().dot(inside) + slack(rng)});
  }
  return p;
}
}  // namespace

TEST_CASE("box with heights 3 and 7")
{
  const ConvexPolytope hull = box_hull(Vec3::Zero(), Vec3(10.0, 10.0, 10.0));
  const BallSegment seg = fit_ball_segment(hull, 3.0, 7.0);
  // Grid-search oracle on 0.05 steps: d is twice the smaller of the two best
  // center clearances.
  const double oracle_d = 2.0 * std::min(grid_clearance(hull, 3.0, 0.0, 10.0, 0.05),
                                         grid_clearance(hull, 7.0, 0.0, 10.0, 0.05));
  CHECK(oracle_d == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(seg.diameter == doctest::Approx(oracle_d).epsilon(1e-9));
  CHECK((seg.bottom - Vec3(5.0, 5.0, 3.0)).norm() < 1e-6);
  CHECK((seg.top - Vec3(5.0, 5.0, 7.0)).norm() < 1e-6);
  CHECK(segment_containment_violation(hull, seg) <= 1e-8);
}

TEST_CASE("equal heights give a single ball")
{
  const ConvexPolytope hull = box_hull(Vec3::Zero(), Vec3(10.0, 10.0, 10.0));
  const BallSegment seg = fit_ball_segment(hull, 5.0, 5.0);
  const double oracle_d = 2.0 * grid_clearance(hull, 5.0, 0.0, 10.0, 0.05);
  CHECK(oracle_d == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(seg.diameter == doctest::Approx(oracle_d).epsilon(1e-9));
  CHECK((seg.bottom - seg.top).norm() < 1e-9);
}

TEST_CASE("closed form on boxes")
{
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial)
  {
    const Vec3 lo = testutil::random_point(rng, -1.0, 0.0);
    const Vec3 hi = lo + Vec3(0.5, 0.5, 0.5) + testutil::random_point(rng, 0.0, 2.0);
    double z0 = lo.z() + (hi.z() - lo.z()) * u(rng);
    double z1 = lo.z() + (hi.z() - lo.z()) * u(rng);
    if (z0 > z1)
    {
      std::swap(z0, z1);
    }
    const double expected = std::min({hi.x() - lo.x(), hi.y() - lo.y(), 2.0 * (z0 - lo.z()), 2.0 * (hi.z() - z1)});
    if (expected <= 1e-6)
    {
      continue;
    }
    const BallSegment seg = fit_ball_segment(box_hull(lo, hi), z0, z1);
    CHECK(seg.diameter == doctest::Approx(expected).epsilon(1e-6));
    CHECK(seg.bottom.z() == doctest::Approx(z0));
    CHECK(seg.top.z() == doctest::Approx(z1));
  }
}

TEST_CASE("collision planes bound the diameter")
{
  const ConvexPolytope hull = box_hull(Vec3::Zero(), Vec3(10.0, 10.0, 10.0));
  CollisionPlanes planes;
  // -c.x + r <= -3 means c.x >= 3 + r; together with c.x + r <= 10 this
  // allows at most r = 3.5.
  planes.x_offset = -3.0;
  const BallSegment seg = fit_ball_segment(hull, 5.0, 5.0, planes);
  CHECK(seg.diameter == doctest::Approx(7.0).epsilon(1e-9));
  CHECK(-seg.bottom.x() + seg.radius() <= -3.0 + 1e-9);
  planes.z_offset = -4.0;  // c.z >= 4 + r at c.z = 5 -> r <= 1
  CHECK(fit_ball_segment(hull, 5.0, 5.0, planes).diameter == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("infeasible inputs")
{
  const ConvexPolytope hull = box_hull(Vec3::Zero(), Vec3(10.0, 10.0, 10.0));
  CHECK_THROWS_AS(fit_ball_segment(hull, -1.0, 5.0), InfeasibleError);
  CHECK_THROWS_AS(fit_ball_segment(hull, 5.0, 11.0), InfeasibleError);
  CHECK_THROWS_AS(fit_ball_segment(hull, 0.0, 10.0), InfeasibleError);
  CollisionPlanes planes;
  planes.x_offset = -20.0;
  CHECK_THROWS_AS(fit_ball_segment(hull, 5.0, 5.0, planes), InfeasibleError);
}

TEST_CASE("invalid inputs")
{
  const ConvexPolytope hull = box_hull(Vec3::Zero(), Vec3(10.0, 10.0, 10.0));
  CHECK_THROWS_AS(fit_ball_segment(hull, 6.0, 5.0), InputError);
  ConvexPolytope open;
  open.halfspaces.push_back(Halfspace{UnitVec3::normalized(Vec3::UnitX()), 1.0});
  CHECK_THROWS_AS(fit_ball_segment(open, 0.0, 0.5), InputError);
}

TEST_CASE("random hulls: containment and monotonicity")
{
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  std::uniform_real_distribution<double> grow(0.0, 0.5);
  int fitted = 0;
  for (int trial = 0; trial < 40; ++trial)
  {
    const Vec3 inside(u(rng), u(rng), 0.0);
    const ConvexPolytope hull = random_hull(rng, inside);
    const double z0 = -0.2 + u(rng) * 0.5;
    const double z1 = z0 + 0.3;
    BallSegment seg;
    try
    {
      seg = fit_ball_segment(hull, z0, z1);
    }
    catch (const InfeasibleError&)
    {
      continue;
    }
    ++fitted;
    CHECK(seg.diameter > 0.0);
    CHECK(segment_containment_violation(hull, seg) <= 1e-8);
    CHECK(seg.bottom.z() == doctest::Approx(z0));
    CHECK(seg.top.z() == doctest::Approx(z1));

    ConvexPolytope bigger = hull;
    std::uniform_int_distribution<std::size_t> pick(0, hull.halfspaces.size() - 1);
    bigger.halfspaces[pick(rng)].offset += grow(rng);
    CHECK(fit_ball_segment(bigger, z0, z1).diameter >= seg.diameter - 1e-9);
  }
  CHECK(fitted >= 20);
}
