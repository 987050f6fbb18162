#include "mmseq/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <list>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "mmseq/errors.hpp"

namespace mmseq
{
UnitVec3::UnitVec3(const Vec3& v) : v_(v)
{
  if (!v.allFinite() || std::abs(v.norm() - 1.0) > 1e-9)
  {
    throw InvariantError("UnitVec3: vector is not unit length");
  }
}

UnitVec3 UnitVec3::normalized(const Vec3& v)
{
  const double n = v.norm();
  if (!v.allFinite() || n < 1e-12)
  {
    throw InvariantError("UnitVec3: cannot normalize a zero vector");
  }
  return UnitVec3(v / n);
}

void check_rotation(const Mat3& r)
{
  if (!r.allFinite())
  {
    throw InvariantError("rotation has non-finite entries");
  }
  const double ortho = (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (ortho > kRotationTolerance || std::abs(r.determinant() - 1.0) > kRotationTolerance)
  {
    throw InvariantError("rotation is not orthonormal with determinant +1");
  }
}

RigidTransform::RigidTransform(const Mat3& rotation, const Vec3& translation)
    : rotation_(rotation), translation_(translation)
{
  check_rotation(rotation_);
  if (!translation_.allFinite())
  {
    throw InvariantError("translation has non-finite entries");
  }
}

RigidTransform RigidTransform::from_translation(const Vec3& t)
{
  return RigidTransform(Mat3::Identity(), t);
}

RigidTransform RigidTransform::rotation_z(double angle)
{
  return RigidTransform(Eigen::AngleAxisd(angle, Vec3::UnitZ()).toRotationMatrix(),
                        Vec3::Zero());
}

Eigen::Matrix4d RigidTransform::homogeneous() const
{
  Eigen::Matrix4d h = Eigen::Matrix4d::Identity();
  h.topLeftCorner<3, 3>() = rotation_;
  h.topRightCorner<3, 1>() = translation_;
  return h;
}

RigidTransform transform_compose(const RigidTransform& a, const RigidTransform& b)
{
  return RigidTransform(a.rotation() * b.rotation(),
                        a.rotation() * b.translation() + a.translation());
}

RigidTransform transform_invert(const RigidTransform& t)
{
  const Mat3 rt = t.rotation().transpose();
  return RigidTransform(rt, -(rt * t.translation()));
}

double transform_distance(const RigidTransform& a, const RigidTransform& b)
{
  return (a.homogeneous() - b.homogeneous()).cwiseAbs().maxCoeff();
}

double angle_between(const Vec3& a, const Vec3& b)
{
  // atan2 form stays accurate for nearly parallel vectors.
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

namespace
{
// Ball whose boundary passes through every support point, centered in their
// affine hull. Degenerate (co-circular) support sets resolve through the
// minimum-norm least-squares solution.
Ball ball_through(const std::array<Vec3, 4>& support, int count)
{
  if (count == 0)
  {
    return Ball{Vec3::Zero(), -1.0};
  }
  const Vec3& p0 = support[0];
  if (count == 1)
  {
    return Ball{p0, 0.0};
  }
  const int k = count - 1;
  Eigen::MatrixXd gram(k, k);
  Eigen::VectorXd rhs(k);
  for (int i = 0; i < k; ++i)
  {
    const Vec3 vi = support[i + 1] - p0;
    rhs(i) = vi.squaredNorm();
    for (int j = 0; j < k; ++j)
    {
      gram(i, j) = 2.0 * vi.dot(support[j + 1] - p0);
    }
  }
  const Eigen::VectorXd lambda = gram.completeOrthogonalDecomposition().solve(rhs);
  Vec3 center = p0;
  for (int i = 0; i < k; ++i)
  {
    center += lambda(i) * (support[i + 1] - p0);
  }
  double radius = 0.0;
  for (int i = 0; i < count; ++i)
  {
    radius = std::max(radius, (support[i] - center).norm());
  }
  return Ball{center, radius};
}

bool outside(const Ball& ball, const Vec3& p)
{
  if (ball.radius < 0.0)
  {
    return true;
  }
  return (p - ball.center).norm() > ball.radius * (1.0 + 1e-12) + 1e-13;
}

using PointList = std::list<Vec3>;

Ball move_to_front(PointList& points, PointList::iterator end,
                   std::array<Vec3, 4>& support, int count)
{
  Ball ball = ball_through(support, count);
  if (count == 4)
  {
    return ball;
  }
  for (auto it = points.begin(); it != end;)
  {
    auto current = it++;
    if (outside(ball, *current))
    {
      support[count] = *current;
      ball = move_to_front(points, current, support, count + 1);
      points.splice(points.begin(), points, current);
    }
  }
  return ball;
}
}  // namespace

Ball min_enclosing_ball(std::span<const Vec3> points)
{
  if (points.empty())
  {
    throw InputError("min_enclosing_ball: empty point set");
  }
  std::vector<Vec3> shuffled(points.begin(), points.end());
  for (const auto& p : shuffled)
  {
    if (!p.allFinite())
    {
      throw InputError("min_enclosing_ball: non-finite point");
    }
  }
  std::mt19937_64 rng(0x6d6562u);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  PointList list(shuffled.begin(), shuffled.end());
  std::array<Vec3, 4> support;
  Ball ball = move_to_front(list, list.end(), support, 0);
  // Absorb rounding so containment holds for every input point.
  double radius = 0.0;
  for (const auto& p : points)
  {
    radius = std::max(radius, (p - ball.center).norm());
  }
  ball.radius = radius;
  return ball;
}

double max_pairwise_distance(std::span<const Vec3> points)
{
  double best = 0.0;
  for (size_t i = 0; i < points.size(); ++i)
  {
    for (size_t j = i + 1; j < points.size(); ++j)
    {
      best = std::max(best, (points[i] - points[j]).norm());
    }
  }
  return best;
}
}  // namespace mmseq
