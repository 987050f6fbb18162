#pragma once

#include <array>
#include <numbers>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "mmseq/geometry.hpp"

namespace mmseq
{
inline constexpr int kNumJoints = 6;

using JointConfig = std::array<double, kNumJoints>;

/// One revolute joint in standard Denavit-Hartenberg form:
/// Rz(q + theta_offset) * Tz(d) * Tx(a) * Rx(alpha).
struct JointParams
{
  double a = 0.0;
  double alpha = 0.0;
  double d = 0.0;
  double theta_offset = 0.0;
  double lower = -std::numbers::pi;
  double upper = std::numbers::pi;
};

class KinematicChain
{
public:
  /// Throws InputError unless lower < upper for every joint.
  KinematicChain(std::string name, std::array<JointParams, kNumJoints> joints);

  const std::string& name() const { return name_; }
  const std::array<JointParams, kNumJoints>& joints() const { return joints_; }
  const JointParams& joint(int i) const { return joints_[i]; }

  bool within_limits(const JointConfig& q, double tolerance = 0.0) const;

  /// Point on the first joint axis at the height of the first link offset.
  Vec3 shoulder() const { return Vec3(0.0, 0.0, joints_[0].d); }

  /// Upper bound on the distance from shoulder() to any reachable tool point.
  double reach_bound() const;

private:
  std::string name_;
  std::array<JointParams, kNumJoints> joints_;
};

/// Generic 6R arm with a spherical wrist used by tests and as the CLI default.
KinematicChain bundled_test_chain();

/// Chain JSON: {"name": str, "joints": [{"a","alpha","d","theta_offset",
/// "lower","upper"} x 6]} with lengths in meters and angles in radians.
KinematicChain load_chain(const std::filesystem::path& path);
KinematicChain parse_chain_json(const std::string& text);
std::string chain_to_json(const KinematicChain& chain);

/// End-effector pose in the manipulator base frame. The tool axis is the
/// z-axis of the returned rotation. Throws InputError when q is out of limits.
RigidTransform forward_kinematics(const KinematicChain& chain, const JointConfig& q);

struct TaskPoint
{
  Vec3 position = Vec3::Zero();
  UnitVec3 direction;
};

struct IkParams
{
  int roll_samples = 8;
  int restarts = 4;
  std::uint64_t seed = 1;
  double pos_tol = 1e-4;
  double ang_tol = 1e-3;
  double dedup_tol = 1e-2;
  int max_iterations = 150;
  double damping = 0.05;
};

/// Numeric IK by damped least squares. The tool roll about the approach axis
/// is free and discretized into roll_samples values; each roll gets
/// `restarts` random starts. Seeds depend only on (seed, roll, restart), so
/// more restarts only ever add attempts. Solutions are deduplicated and
/// sorted lexicographically. An unreachable target yields an empty list.
std::vector<JointConfig> ik_solutions(const KinematicChain& chain,
                                      const TaskPoint& target,
                                      const IkParams& params);

/// True iff ik_solutions() would be nonempty; stops at the first success.
bool ik_reachable(const KinematicChain& chain, const TaskPoint& target,
                  const IkParams& params);

/// Boolean reachability oracle consumed by the fkr builder.
class ReachabilityBackend
{
public:
  virtual ~ReachabilityBackend() = default;
  virtual bool reachable(const TaskPoint& target, std::uint64_t seed) const = 0;
  virtual std::string identifier() const = 0;
};

class ChainBackend final : public ReachabilityBackend
{
public:
  ChainBackend(KinematicChain chain, IkParams params)
      : chain_(std::move(chain)), params_(params)
  {
  }

  bool reachable(const TaskPoint& target, std::uint64_t seed) const override;
  std::string identifier() const override { return chain_.name(); }

  const KinematicChain& chain() const { return chain_; }
  const IkParams& params() const { return params_; }

private:
  KinematicChain chain_;
  IkParams params_;
};

/// Reachable iff r_min <= |p - shoulder| <= r_max; direction is ignored.
class SphereModelBackend final : public ReachabilityBackend
{
public:
  SphereModelBackend(const Vec3& shoulder, double r_min, double r_max);

  bool reachable(const TaskPoint& target, std::uint64_t seed) const override;
  std::string identifier() const override;

  const Vec3& shoulder() const { return shoulder_; }
  double r_min() const { return r_min_; }
  double r_max() const { return r_max_; }

private:
  Vec3 shoulder_;
  double r_min_;
  double r_max_;
};

/// SplitMix64 mixing step; used to derive per-item seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);
}  // namespace mmseq
