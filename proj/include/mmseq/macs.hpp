#pragma once

#include <vector>

#include "mmseq/fkr.hpp"
#include "mmseq/geometry.hpp"
#include "mmseq/lattice_hull.hpp"

namespace mmseq
{
/// Voxel index set tied to the grid it came from.
class DigitalSet
{
public:
  DigitalSet() = default;
  /// Sorts and deduplicates; throws InputError if an index falls outside dims.
  DigitalSet(std::vector<Index3> voxels, const Vec3& origin, double resolution, const Index3& dims);

  static DigitalSet from_grid(const VoxelGrid& grid);

  const std::vector<Index3>& voxels() const { return voxels_; }
  const Vec3& origin() const { return origin_; }
  double resolution() const { return resolution_; }
  const Index3& dims() const { return dims_; }
  std::size_t size() const { return voxels_.size(); }
  bool empty() const { return voxels_.empty(); }
  bool contains(const Index3& v) const;

  Vec3 center(const Index3& v) const
  {
    return origin_ + resolution_ * Vec3(v[0] + 0.5, v[1] + 0.5, v[2] + 0.5);
  }

  bool operator==(const DigitalSet& other) const = default;

private:
  std::vector<Index3> voxels_;
  Vec3 origin_ = Vec3::Zero();
  double resolution_ = 1.0;
  Index3 dims_{0, 0, 0};
};

struct Halfspace
{
  UnitVec3 normal;
  double offset = 0.0;  // normal . x <= offset, meters
};

struct ConvexPolytope
{
  std::vector<Halfspace> halfspaces;

  /// Largest violation max(normal . x - offset); <= 0 inside.
  double max_violation(const Vec3& x) const;
};

/// True iff every lattice point of conv(s) belongs to s.
/// Throws InputError on an empty set.
bool is_digitally_convex(const DigitalSet& s);

/// Convex hull of the voxel centers, as unit-normal half-spaces in meters.
ConvexPolytope metric_hull(const DigitalSet& s);

struct MacsResult
{
  DigitalSet subset;
  ConvexPolytope hull;
  std::size_t peel_steps = 0;
  std::size_t restored = 0;
};

struct MacsOptions
{
  /// Cuts played out per step before committing; 1 is plain greedy.
  std::size_t lookahead = 4;
  /// Lookahead applies only while the set has at most this many voxels.
  std::size_t lookahead_max_voxels = 1000;
};

/// Maximal digitally convex subset by concavity peeling.
///
/// While the current set is not digitally convex, every hull facet normal and
/// every primitive lattice direction with coordinates in [-2, 2] is a
/// candidate cut direction: the cut removes all members at or beyond the
/// outermost missing lattice point along that direction, which excludes that
/// point from the next hull. The cut removing the fewest voxels, and not all
/// of them, wins (ties: lexicographically smallest removed voxel, then
/// direction order). On small sets the top `lookahead` cuts are each played
/// out greedily and the one leaving the largest final set is taken. Peeled
/// voxels are then restored one at a time, in lexicographic order, whenever
/// the set stays digitally convex, until no single voxel can be restored.
///
/// Throws InputError on an empty input.
MacsResult find_macs(const DigitalSet& s, const MacsOptions& options = {});
}  // namespace mmseq
