#include "mmseq/targets.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "mmseq/errors.hpp"

namespace mmseq
{
namespace
{
// Tilts `normal` (horizontal) by `tilt` radians about a random axis
// perpendicular to it.
Vec3 tilted(const Vec3& normal, double tilt, double spin)
{
  const Vec3 side = Vec3::UnitZ().cross(normal).normalized();
  const Vec3 up = normal.cross(side);
  const Vec3 off = std::cos(spin) * side + std::sin(spin) * up;
  return (std::cos(tilt) * normal + std::sin(tilt) * off).normalized();
}
}  // namespace

TargetKind parse_target_kind(const std::string& name)
{
  if (name == "curved-wall")
  {
    return TargetKind::CurvedWall;
  }
  if (name == "grid")
  {
    return TargetKind::Grid;
  }
  if (name == "random-shell")
  {
    return TargetKind::RandomShell;
  }
  throw InputError("unknown target kind '" + name + "' (expected curved-wall, grid or random-shell)");
}

std::vector<TaskPoint> generate_targets(const TargetGenParams& p)
{
  if (p.n == 0)
  {
    throw InputError("gen-targets: n must be at least 1");
  }
  if (!(p.theta_spread >= 0.0) || p.theta_spread > p.theta)
  {
    throw InputError("gen-targets: theta_spread must lie in [0, theta]");
  }
  if (!(p.z_min <= p.z_max) || !(p.radius > 0.0) || !(p.arc >= 0.0) || !(p.depth >= 0.0))
  {
    throw InputError("gen-targets: invalid geometry parameters");
  }

  std::mt19937_64 rng(p.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw_direction = [&](const Vec3& normal) {
    const double tilt = p.theta_spread * unit(rng);
    const double spin = 2.0 * std::numbers::pi * unit(rng);
    return UnitVec3::normalized(tilted(normal, tilt, spin));
  };

  std::vector<TaskPoint> out;
  out.reserve(p.n);
  if (p.kind == TargetKind::Grid)
  {
    // Rows along z, columns along y, centered on the x axis.
    const double width = p.radius * p.arc;
    const double height = p.z_max - p.z_min;
    std::size_t rows = 1;
    if (height > 0.0 && width > 0.0)
    {
      rows = static_cast<std::size_t>(std::max(1.0, std::round(std::sqrt(p.n * height / width))));
    }
    rows = std::min(rows, p.n);
    const std::size_t cols = (p.n + rows - 1) / rows;
    for (std::size_t i = 0; i < p.n; ++i)
    {
      const std::size_t r = i / cols;
      const std::size_t c = i % cols;
      const double y = cols > 1 ? -0.5 * width + width * c / (cols - 1) : 0.0;
      const double z = rows > 1 ? p.z_min + height * r / (rows - 1) : 0.5 * (p.z_min + p.z_max);
      out.push_back(TaskPoint{Vec3(p.radius, y, z), draw_direction(Vec3::UnitX())});
    }
    return out;
  }

  for (std::size_t i = 0; i < p.n; ++i)
  {
    const double phi = p.arc * (unit(rng) - 0.5);
    const double z = p.z_min + (p.z_max - p.z_min) * unit(rng);
    const double r = p.kind == TargetKind::RandomShell ? p.radius + p.depth * unit(rng) : p.radius;
    const Vec3 normal(std::cos(phi), std::sin(phi), 0.0);
    out.push_back(TaskPoint{Vec3(r * normal.x(), r * normal.y(), z), draw_direction(normal)});
  }
  return out;
}
}  // namespace mmseq
