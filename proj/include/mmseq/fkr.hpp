#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mmseq/geometry.hpp"
#include "mmseq/kinematics.hpp"

namespace mmseq
{
using Index3 = std::array<int, 3>;

struct AxisBox
{
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();
};

/// Dense boolean voxel grid. Voxel (i, j, k) has center
/// origin + (index + 0.5) * resolution; linear index i + nx * (j + ny * k).
class VoxelGrid
{
public:
  VoxelGrid() = default;
  VoxelGrid(const Vec3& origin, double resolution, const Index3& dims);

  const Vec3& origin() const { return origin_; }
  double resolution() const { return resolution_; }
  const Index3& dims() const { return dims_; }
  std::size_t size() const { return static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2]; }

  std::size_t linear_index(const Index3& idx) const
  {
    return static_cast<std::size_t>(idx[0]) +
           static_cast<std::size_t>(dims_[0]) *
               (static_cast<std::size_t>(idx[1]) + static_cast<std::size_t>(dims_[1]) * idx[2]);
  }
  Index3 index_of(std::size_t linear) const;
  bool contains_index(const Index3& idx) const;

  Vec3 center(const Index3& idx) const;
  /// Voxel containing a metric point, if inside the grid.
  bool locate(const Vec3& p, Index3& idx) const;

  bool get(std::size_t linear) const { return (bits_[linear >> 6] >> (linear & 63)) & 1ULL; }
  void set(std::size_t linear, bool value);
  bool get(const Index3& idx) const { return get(linear_index(idx)); }

  std::size_t count() const;
  std::vector<Index3> marked() const;

  const std::vector<std::uint64_t>& words() const { return bits_; }

  bool operator==(const VoxelGrid& other) const = default;

private:
  Vec3 origin_ = Vec3::Zero();
  double resolution_ = 1.0;
  Index3 dims_{0, 0, 0};
  std::vector<std::uint64_t> bits_;
};

/// Focused reachability database: voxels reachable from every direction in
/// r_ext.
struct FkrDatabase
{
  static constexpr std::uint32_t kFormatVersion = 1;

  VoxelGrid grid;
  std::vector<UnitVec3> r_ext;
  double theta = 0.0;
  std::string chain_id;
  std::uint32_t version = kFormatVersion;

  bool operator==(const FkrDatabase& other) const = default;
};

/// Square pyramid of half-angle theta around +x:
/// [c,0,s], [c,0,-s], [c,s,0], [c,-s,0] with duplicates removed (theta = 0
/// collapses to [1,0,0]). Throws InputError unless 0 <= theta < pi/2.
std::vector<UnitVec3> bounding_directions(double theta);

/// Top-front quarter of the chain's workspace: x >= 0 and z >= shoulder height,
/// clipped to the chain's reach bound.
AxisBox default_region(const KinematicChain& chain);

struct FkrBuildOptions
{
  double resolution = 0.04;
  double theta = 0.0;
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0 = hardware concurrency
};

/// Marks every voxel whose center is reachable (per backend) from every
/// direction of r_ext. The IK seed of a voxel depends only on its linear index
/// and options.seed, so the result does not depend on thread scheduling.
/// Throws InputError for an empty r_ext, non-positive resolution or a
/// zero-volume region.
FkrDatabase build_fkr(const ReachabilityBackend& backend, const AxisBox& region,
                      const std::vector<UnitVec3>& r_ext, const FkrBuildOptions& options);

/// Binary layout (little-endian): 8-byte magic "MMSQFKR\0", u32 version,
/// u32 chain-id length + bytes, f64 theta, u32 direction count + 3 f64 each,
/// 3 f64 origin, f64 resolution, 3 u32 dims, then ceil(n/8) occupancy bytes,
/// bit i stored at byte i/8, bit i%8.
std::vector<std::uint8_t> save_fkr(const FkrDatabase& db);
/// Throws FormatError on bad magic, unsupported version or truncation.
FkrDatabase load_fkr(const std::vector<std::uint8_t>& bytes);

void write_fkr_file(const FkrDatabase& db, const std::string& path);
FkrDatabase read_fkr_file(const std::string& path);
}  // namespace mmseq
