#include "mmseq/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <Eigen/Dense>
#include <json.hpp>

#include "mmseq/errors.hpp"

namespace mmseq
{
namespace
{
using Mat4 = Eigen::Matrix4d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec6 = Eigen::Matrix<double, 6, 1>;

Mat4 dh_matrix(const JointParams& j, double q)
{
  const double theta = q + j.theta_offset;
  const double ct = std::cos(theta);
  const double st = std::sin(theta);
  const double ca = std::cos(j.alpha);
  const double sa = std::sin(j.alpha);
  Mat4 m;
  m << ct, -st * ca, st * sa, j.a * ct,
       st, ct * ca, -ct * sa, j.a * st,
       0.0, sa, ca, j.d,
       0.0, 0.0, 0.0, 1.0;
  return m;
}

struct Frames
{
  // frames[i] is the pose of the frame whose z-axis is joint i's axis.
  std::array<Mat4, kNumJoints + 1> frames;
};

Frames chain_frames(const KinematicChain& chain, const JointConfig& q)
{
  Frames f;
  f.frames[0] = Mat4::Identity();
  for (int i = 0; i < kNumJoints; ++i)
  {
    f.frames[i + 1] = f.frames[i] * dh_matrix(chain.joint(i), q[i]);
  }
  return f;
}

double uniform01(std::mt19937_64& rng)
{
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Mat3 target_rotation(const UnitVec3& direction, double roll)
{
  const Vec3 z = direction.vec();
  const Vec3 helper = std::abs(z.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
  const Vec3 x0 = z.cross(helper).normalized();
  const Vec3 x = std::cos(roll) * x0 + std::sin(roll) * z.cross(x0);
  Mat3 r;
  r.col(0) = x;
  r.col(1) = z.cross(x);
  r.col(2) = z;
  return r;
}

// One damped least-squares descent from q. Returns true and fills q on
// success.
bool solve_from(const KinematicChain& chain, const Mat3& target_rot,
                const Vec3& target_pos, const IkParams& params, JointConfig& q)
{
  double checkpoint_error = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < params.max_iterations; ++iter)
  {
    const Frames f = chain_frames(chain, q);
    const Mat4& tip = f.frames[kNumJoints];
    const Vec3 pe = tip.topRightCorner<3, 1>();
    const Mat3 re = tip.topLeftCorner<3, 3>();

    Vec6 err;
    err.head<3>() = target_pos - pe;
    err.tail<3>() = 0.5 * (re.col(0).cross(target_rot.col(0)) +
                           re.col(1).cross(target_rot.col(1)) +
                           re.col(2).cross(target_rot.col(2)));
    const double pos_err = err.head<3>().norm();
    const double rot_err = err.tail<3>().norm();
    if (pos_err < 0.1 * params.pos_tol && rot_err < 0.1 * params.ang_tol)
    {
      break;
    }
    if (iter % 25 == 0)
    {
      const double total = pos_err + rot_err;
      if (iter > 0 && total > 0.9 * checkpoint_error)
      {
        break;
      }
      checkpoint_error = total;
    }

    Mat6 jac;
    for (int i = 0; i < kNumJoints; ++i)
    {
      const Vec3 axis = f.frames[i].block<3, 1>(0, 2);
      const Vec3 origin = f.frames[i].topRightCorner<3, 1>();
      jac.block<3, 1>(0, i) = axis.cross(pe - origin);
      jac.block<3, 1>(3, i) = axis;
    }
    // Damping shrinks with the error so the final steps are Gauss-Newton.
    const double lambda = params.damping * std::min(1.0, 10.0 * (pos_err + rot_err));
    const Mat6 jjt = jac * jac.transpose() + lambda * lambda * Mat6::Identity();
    Vec6 dq = jac.transpose() * jjt.ldlt().solve(err);
    const double step = dq.cwiseAbs().maxCoeff();
    if (step > 0.3)
    {
      dq *= 0.3 / step;
    }
    for (int i = 0; i < kNumJoints; ++i)
    {
      const auto& j = chain.joint(i);
      q[i] = std::clamp(q[i] + dq(i), j.lower, j.upper);
    }
  }

  const RigidTransform tip = forward_kinematics(chain, q);
  const double pos_err = (tip.translation() - target_pos).norm();
  const double axis_err = angle_between(tip.rotation().col(2), target_rot.col(2));
  return pos_err <= params.pos_tol && axis_err <= params.ang_tol;
}

JointConfig random_config(const KinematicChain& chain, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  JointConfig q;
  for (int i = 0; i < kNumJoints; ++i)
  {
    const auto& j = chain.joint(i);
    q[i] = j.lower + (j.upper - j.lower) * uniform01(rng);
  }
  return q;
}

bool trivially_unreachable(const KinematicChain& chain, const TaskPoint& target)
{
  return (target.position - chain.shoulder()).norm() > chain.reach_bound();
}

void check_params(const IkParams& params)
{
  if (params.roll_samples < 1 || params.restarts < 1)
  {
    throw InputError("ik: roll_samples and restarts must be >= 1");
  }
}

template <typename OnSolution>
void for_each_attempt(const KinematicChain& chain, const TaskPoint& target,
                      const IkParams& params, OnSolution&& on_solution)
{
  for (int roll = 0; roll < params.roll_samples; ++roll)
  {
    const double angle = 2.0 * std::numbers::pi * roll / params.roll_samples;
    const Mat3 rot = target_rotation(target.direction, angle);
    const std::uint64_t roll_seed = mix_seed(params.seed, static_cast<std::uint64_t>(roll));
    for (int restart = 0; restart < params.restarts; ++restart)
    {
      JointConfig q = random_config(chain, mix_seed(roll_seed, static_cast<std::uint64_t>(restart)));
      if (solve_from(chain, rot, target.position, params, q))
      {
        if (!on_solution(q))
        {
          return;
        }
      }
    }
  }
}
}  // namespace

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b)
{
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

KinematicChain::KinematicChain(std::string name, std::array<JointParams, kNumJoints> joints)
    : name_(std::move(name)), joints_(joints)
{
  for (int i = 0; i < kNumJoints; ++i)
  {
    const auto& j = joints_[i];
    if (!(j.lower < j.upper))
    {
      throw InputError("joint " + std::to_string(i) + ": lower limit must be below upper");
    }
    if (!std::isfinite(j.a) || !std::isfinite(j.alpha) || !std::isfinite(j.d) ||
        !std::isfinite(j.theta_offset))
    {
      throw InputError("joint " + std::to_string(i) + ": non-finite parameter");
    }
  }
}

bool KinematicChain::within_limits(const JointConfig& q, double tolerance) const
{
  for (int i = 0; i < kNumJoints; ++i)
  {
    if (!(q[i] >= joints_[i].lower - tolerance && q[i] <= joints_[i].upper + tolerance))
    {
      return false;
    }
  }
  return true;
}

double KinematicChain::reach_bound() const
{
  // Joint 1 rotates the first link about the vertical axis through shoulder(),
  // so only its horizontal offset moves; every later link contributes at most
  // its full length.
  double bound = std::abs(joints_[0].a);
  for (int i = 1; i < kNumJoints; ++i)
  {
    bound += std::hypot(joints_[i].a, joints_[i].d);
  }
  return bound;
}

KinematicChain bundled_test_chain()
{
  constexpr double pi = std::numbers::pi;
  constexpr double deg = pi / 180.0;
  std::array<JointParams, kNumJoints> j{};
  j[0] = {0.05, -pi / 2, 0.60, 0.0, -170 * deg, 170 * deg};
  j[1] = {0.40, 0.0, 0.0, -pi / 2, -120 * deg, 120 * deg};
  j[2] = {0.03, -pi / 2, 0.0, 0.0, -120 * deg, 150 * deg};
  j[3] = {0.0, pi / 2, 0.40, 0.0, -170 * deg, 170 * deg};
  j[4] = {0.0, -pi / 2, 0.0, 0.0, -120 * deg, 120 * deg};
  j[5] = {0.0, 0.0, 0.10, 0.0, -175 * deg, 175 * deg};
  return KinematicChain("generic-6r", j);
}

KinematicChain parse_chain_json(const std::string& text)
{
  nlohmann::json doc;
  try
  {
    doc = nlohmann::json::parse(text);
  }
  catch (const nlohmann::json::parse_error& e)
  {
    throw InputError(std::string("chain file: ") + e.what());
  }
  try
  {
    const auto& joints = doc.at("joints");
    if (!joints.is_array() || joints.size() != kNumJoints)
    {
      throw InputError("chain file: 'joints' must be an array of 6 objects");
    }
    std::array<JointParams, kNumJoints> params{};
    for (int i = 0; i < kNumJoints; ++i)
    {
      const auto& js = joints[i];
      params[i].a = js.at("a").get<double>();
      params[i].alpha = js.at("alpha").get<double>();
      params[i].d = js.at("d").get<double>();
      params[i].theta_offset = js.value("theta_offset", 0.0);
      params[i].lower = js.at("lower").get<double>();
      params[i].upper = js.at("upper").get<double>();
    }
    return KinematicChain(doc.value("name", std::string("chain")), params);
  }
  catch (const nlohmann::json::exception& e)
  {
    throw InputError(std::string("chain file: ") + e.what());
  }
}

KinematicChain load_chain(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw InputError("cannot open chain file " + path.string());
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_chain_json(ss.str());
}

std::string chain_to_json(const KinematicChain& chain)
{
  nlohmann::json doc;
  doc["name"] = chain.name();
  doc["joints"] = nlohmann::json::array();
  for (const auto& j : chain.joints())
  {
    doc["joints"].push_back({{"a", j.a},
                             {"alpha", j.alpha},
                             {"d", j.d},
                             {"theta_offset", j.theta_offset},
                             {"lower", j.lower},
                             {"upper", j.upper}});
  }
  return doc.dump(2);
}

RigidTransform forward_kinematics(const KinematicChain& chain, const JointConfig& q)
{
  if (!chain.within_limits(q))
  {
    throw InputError("forward_kinematics: configuration outside joint limits");
  }
  const Mat4 tip = chain_frames(chain, q).frames[kNumJoints];
  // Re-orthonormalize to strip accumulated rounding before validation.
  Eigen::JacobiSVD<Mat3> svd(tip.topLeftCorner<3, 3>(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  return RigidTransform(svd.matrixU() * svd.matrixV().transpose(), tip.topRightCorner<3, 1>());
}

std::vector<JointConfig> ik_solutions(const KinematicChain& chain, const TaskPoint& target,
                                      const IkParams& params)
{
  check_params(params);
  std::vector<JointConfig> raw;
  if (trivially_unreachable(chain, target))
  {
    return raw;
  }
  for_each_attempt(chain, target, params, [&](const JointConfig& q) {
    raw.push_back(q);
    return true;
  });
  std::sort(raw.begin(), raw.end());
  std::vector<JointConfig> kept;
  for (const auto& q : raw)
  {
    const bool duplicate = std::any_of(kept.begin(), kept.end(), [&](const JointConfig& k) {
      double diff = 0.0;
      for (int i = 0; i < kNumJoints; ++i)
      {
        diff = std::max(diff, std::abs(q[i] - k[i]));
      }
      return diff <= params.dedup_tol;
    });
    if (!duplicate)
    {
      kept.push_back(q);
    }
  }
  return kept;
}

bool ik_reachable(const KinematicChain& chain, const TaskPoint& target, const IkParams& params)
{
  check_params(params);
  if (trivially_unreachable(chain, target))
  {
    return false;
  }
  bool found = false;
  for_each_attempt(chain, target, params, [&](const JointConfig&) {
    found = true;
    return false;
  });
  return found;
}

bool ChainBackend::reachable(const TaskPoint& target, std::uint64_t seed) const
{
  IkParams p = params_;
  p.seed = seed;
  return ik_reachable(chain_, target, p);
}

SphereModelBackend::SphereModelBackend(const Vec3& shoulder, double r_min, double r_max)
    : shoulder_(shoulder), r_min_(r_min), r_max_(r_max)
{
  if (!(r_min >= 0.0 && r_min <= r_max))
  {
    throw InputError("sphere model: require 0 <= r_min <= r_max");
  }
}

bool SphereModelBackend::reachable(const TaskPoint& target, std::uint64_t) const
{
  const double r = (target.position - shoulder_).norm();
  return r >= r_min_ && r <= r_max_;
}

std::string SphereModelBackend::identifier() const
{
  std::ostringstream os;
  os.precision(17);
  os << "sphere(" << shoulder_.x() << "," << shoulder_.y() << "," << shoulder_.z() << ";"
     << r_min_ << "," << r_max_ << ")";
  return os.str();
}
}  // namespace mmseq
