#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mmseq/kinematics.hpp"

namespace mmseq
{
enum class TargetKind
{
  CurvedWall,   // arc of a vertical cylinder around the depot
  Grid,         // regular grid on the plane x = radius
  RandomShell,  // random points between radius and radius + depth, same arc
};

TargetKind parse_target_kind(const std::string& name);

/// Directions are approach directions: they point away from the cylinder axis
/// (into the surface), each tilted from the local horizontal normal by an
/// angle drawn uniformly from [0, theta_spread].
struct TargetGenParams
{
  TargetKind kind = TargetKind::CurvedWall;
  std::size_t n = 183;
  std::uint64_t seed = 1;
  double theta_spread = 0.0;  // radians
  double theta = 0.0;         // radians, bound for theta_spread
  double radius = 3.0;        // meters, cylinder radius or grid plane offset
  double arc = 2.0;           // radians, angular extent of the wall
  double depth = 0.3;         // meters, shell thickness
  double z_min = 0.9;
  double z_max = 1.2;
};

/// Deterministic for fixed params. Throws InputError for n == 0,
/// theta_spread > theta, or an empty height band.
std::vector<TaskPoint> generate_targets(const TargetGenParams& params);
}  // namespace mmseq
