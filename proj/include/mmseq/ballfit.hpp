#pragma once

#include <optional>

#include "mmseq/geometry.hpp"
#include "mmseq/macs.hpp"

namespace mmseq
{
/// Balls of diameter `diameter` centered anywhere on the segment
/// [bottom, top], in the manipulator base frame.
struct BallSegment
{
  Vec3 bottom = Vec3::Zero();
  Vec3 top = Vec3::Zero();
  double diameter = 0.0;

  double radius() const { return 0.5 * diameter; }
  Vec3 at(double t) const { return bottom + t * (top - bottom); }
};

/// Collision planes as signed offsets: a center c with radius r must satisfy
/// -c.x + r <= x_offset and -c.z + r <= z_offset. An unset offset disables
/// the plane.
struct CollisionPlanes
{
  std::optional<double> x_offset;
  std::optional<double> z_offset;
};

/// Largest-diameter ball segment inside the hull with its end centers pinned
/// to heights z_min and z_max. Containment uses n.c + d/2 <= offset for every
/// unit-normal half-space and both end centers; by convexity every ball on
/// the segment then fits. Among equally large segments the centers are pushed
/// as deep as possible into the constraints that are not tight at every
/// optimum, which makes the result unique on symmetric inputs.
///
/// Throws InfeasibleError naming the binding constraint group, and
/// InputError for z_min > z_max or an unbounded hull.
BallSegment fit_ball_segment(const ConvexPolytope& hull, double z_min, double z_max,
                             const CollisionPlanes& planes = {});

/// max over `samples` evenly spaced segment centers and every half-space of
/// n.c + d/2 - offset. Non-positive means the whole segment fits.
double segment_containment_violation(const ConvexPolytope& hull, const BallSegment& seg, int samples = 11);
}  // namespace mmseq
