#pragma once

#include <span>
#include <vector>

#include "mmseq/ballfit.hpp"
#include "mmseq/fkr.hpp"
#include "mmseq/geometry.hpp"
#include "mmseq/kinematics.hpp"

namespace mmseq
{
/// World pose of a cluster: origin at the cluster center, x-axis along the
/// horizontal projection of the mean approach direction, z-axis world up.
struct ClusterFrame
{
  RigidTransform world_from_cluster;
};

/// Throws InputError if `directions` is empty or their mean is within 1e-6 of
/// vertical, since no yaw follows from a vertical approach.
ClusterFrame cluster_frame(const Vec3& center, std::span<const UnitVec3> directions);

/// Planar base pose; the base origin sits on the floor (z = 0).
struct BasePose
{
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;  // radians about world z

  RigidTransform world_from_base() const;
};

/// Point of the segment at height cz. A flat segment returns its bottom.
/// Throws InfeasibleError if cz is outside [bottom.z, top.z] by more than 1e-9.
Vec3 match_ball(double cz, const BallSegment& seg);

/// Base pose that puts the base-frame point b onto the cluster origin:
/// world_from_base = world_from_cluster * translation(b)^-1. Throws
/// InvariantError if the resulting base origin is off the floor by more than
/// 1e-6, which means b and the cluster center were matched at different heights.
BasePose base_transform(const ClusterFrame& frame, const Vec3& b);

struct TargetCheck
{
  std::size_t target = 0;
  double ball_distance = 0.0;  // base frame, from the matched ball center
  bool in_ball = false;
  bool voxel_marked = false;
  double direction_angle = 0.0;  // radians, from the cluster mean direction
  bool direction_ok = false;
};

struct ReachabilityReport
{
  std::vector<TargetCheck> targets;

  bool all_in_ball() const;
  bool all_marked() const;
  bool all_directions_ok() const;
};

/// Report-only check of one cluster. `members` index into `targets`, `b` is the
/// matched base-frame ball center and `d` the ball diameter; containment allows
/// d/2 + 1e-9 and directions allow db.theta + 1e-9 from the cluster mean.
ReachabilityReport validate_reachability(std::span<const std::size_t> members, std::span<const TaskPoint> targets,
                                         const BasePose& pose, const Vec3& b, double d, const FkrDatabase& db);
}  // namespace mmseq
