#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace mmseq
{
/// Position in meters.
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kRotationTolerance = 1e-9;

/// Direction vector with unit Euclidean norm (within 1e-9).
class UnitVec3
{
public:
  UnitVec3() : v_(Vec3::UnitX()) {}

  /// Throws InvariantError unless |v| == 1 within 1e-9.
  explicit UnitVec3(const Vec3& v);

  /// Normalizes v; throws InvariantError on a zero or non-finite vector.
  static UnitVec3 normalized(const Vec3& v);

  const Vec3& vec() const { return v_; }
  double x() const { return v_.x(); }
  double y() const { return v_.y(); }
  double z() const { return v_.z(); }

  bool operator==(const UnitVec3& other) const { return v_ == other.v_; }

private:
  Vec3 v_;
};

/// Rigid body transform in SE(3). The rotation is kept as a matrix and
/// validated on construction.
class RigidTransform
{
public:
  RigidTransform() : rotation_(Mat3::Identity()), translation_(Vec3::Zero()) {}

  /// Throws InvariantError if rotation is not orthonormal with det +1.
  RigidTransform(const Mat3& rotation, const Vec3& translation);

  static RigidTransform identity() { return RigidTransform(); }
  static RigidTransform from_translation(const Vec3& t);
  static RigidTransform rotation_z(double angle);

  const Mat3& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }

  Vec3 apply(const Vec3& point) const
  {
    return rotation_ * point + translation_;
  }
  Vec3 apply_direction(const Vec3& dir) const { return rotation_ * dir; }

  Eigen::Matrix4d homogeneous() const;

private:
  Mat3 rotation_;
  Vec3 translation_;
};

void check_rotation(const Mat3& r);

/// a * b: applies b first, then a.
RigidTransform transform_compose(const RigidTransform& a,
                                 const RigidTransform& b);
RigidTransform transform_invert(const RigidTransform& t);

/// Max absolute entry difference between the two homogeneous matrices.
double transform_distance(const RigidTransform& a, const RigidTransform& b);

/// Angle between two directions, radians in [0, pi].
double angle_between(const Vec3& a, const Vec3& b);

struct Ball
{
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
};

/// Smallest ball containing every point. Randomized incremental construction
/// with move-to-front over support sets of at most four points. The shuffle is
/// seeded from a fixed constant, so the result is deterministic.
/// Throws InputError on an empty input.
Ball min_enclosing_ball(std::span<const Vec3> points);

/// Largest pairwise distance in the set (O(n^2)).
double max_pairwise_distance(std::span<const Vec3> points);
}  // namespace mmseq
