#include "mmseq/baseplacement.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mmseq/errors.hpp"

namespace mmseq
{
namespace
{
Vec3 mean_direction(std::span<const UnitVec3> directions)
{
  Vec3 sum = Vec3::Zero();
  for (const auto& d : directions)
  {
    sum += d.vec();
  }
  return sum / static_cast<double>(directions.size());
}
}  // namespace

ClusterFrame cluster_frame(const Vec3& center, std::span<const UnitVec3> directions)
{
  if (directions.empty())
  {
    throw InputError("cluster_frame: cluster has no targets");
  }
  const Vec3 mean = mean_direction(directions);
  const Vec3 horizontal(mean.x(), mean.y(), 0.0);
  if (horizontal.norm() < 1e-6)
  {
    throw InputError("cluster_frame: mean approach direction is vertical; widen theta or re-orient the targets");
  }
  const Vec3 x_axis = horizontal.normalized();
  const Vec3 z_axis = Vec3::UnitZ();
  Mat3 r;
  r.col(0) = x_axis;
  r.col(1) = z_axis.cross(x_axis);
  r.col(2) = z_axis;
  return ClusterFrame{RigidTransform(r, center)};
}

RigidTransform BasePose::world_from_base() const
{
  return transform_compose(RigidTransform::from_translation(Vec3(x, y, 0.0)), RigidTransform::rotation_z(yaw));
}

Vec3 match_ball(double cz, const BallSegment& seg)
{
  const double lo = seg.bottom.z();
  const double hi = seg.top.z();
  if (cz < lo - 1e-9 || cz > hi + 1e-9)
  {
    throw InfeasibleError("match_ball: cluster height " + std::to_string(cz) + " is not covered by the ball segment [" +
                          std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  if (hi == lo)
  {
    return seg.bottom;
  }
  const double t = std::clamp((cz - lo) / (hi - lo), 0.0, 1.0);
  return seg.at(t);
}

BasePose base_transform(const ClusterFrame& frame, const Vec3& b)
{
  const RigidTransform world_from_base =
      transform_compose(frame.world_from_cluster, RigidTransform::from_translation(-b));
  const Vec3& t = world_from_base.translation();
  if (std::abs(t.z()) > 1e-6)
  {
    throw InvariantError("base_transform: base origin at height " + std::to_string(t.z()) +
                         ", matched ball and cluster center differ in z");
  }
  const Mat3& r = world_from_base.rotation();
  return BasePose{t.x(), t.y(), std::atan2(r(1, 0), r(0, 0))};
}

bool ReachabilityReport::all_in_ball() const
{
  return std::all_of(targets.begin(), targets.end(), [](const TargetCheck& c) { return c.in_ball; });
}

bool ReachabilityReport::all_marked() const
{
  return std::all_of(targets.begin(), targets.end(), [](const TargetCheck& c) { return c.voxel_marked; });
}

bool ReachabilityReport::all_directions_ok() const
{
  return std::all_of(targets.begin(), targets.end(), [](const TargetCheck& c) { return c.direction_ok; });
}

ReachabilityReport validate_reachability(std::span<const std::size_t> members, std::span<const TaskPoint> targets,
                                         const BasePose& pose, const Vec3& b, double d, const FkrDatabase& db)
{
  ReachabilityReport report;
  if (members.empty())
  {
    return report;
  }
  const RigidTransform base_from_world = transform_invert(pose.world_from_base());
  std::vector<UnitVec3> dirs;
  dirs.reserve(members.size());
  for (const auto i : members)
  {
    dirs.push_back(targets[i].direction);
  }
  const Vec3 mean = mean_direction(dirs);
  for (const auto i : members)
  {
    TargetCheck c;
    c.target = i;
    const Vec3 p = base_from_world.apply(targets[i].position);
    c.ball_distance = (p - b).norm();
    c.in_ball = c.ball_distance <= 0.5 * d + 1e-9;
    Index3 idx;
    c.voxel_marked = db.grid.locate(p, idx) && db.grid.get(idx);
    c.direction_angle = angle_between(targets[i].direction.vec(), mean);
    c.direction_ok = c.direction_angle <= db.theta + 1e-9;
    report.targets.push_back(c);
  }
  return report;
}
}  // namespace mmseq
