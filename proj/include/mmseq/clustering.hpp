#pragma once

#include <cstdint>
#include <vector>

#include "mmseq/geometry.hpp"

namespace mmseq
{
enum class DeltaMode
{
  /// delta = sqrt(3)/2 * d, the planar equilateral-triangle bound.
  Planar,
  /// delta = sqrt(2/3) * d, Jung's bound in three dimensions; cliques at this
  /// edge length always fit a ball of diameter d.
  Safe,
};

/// Throws InputError for negative or non-finite d.
double delta_from_diameter(double d, DeltaMode mode = DeltaMode::Planar);

/// Undirected graph with an edge (i, j), i != j, iff |x_i - x_j| <= delta.
/// Adjacency is stored both as sorted neighbor lists and as a bit matrix so
/// complement queries stay O(1) without materializing the complement.
class ProximityGraph
{
public:
  std::size_t size() const { return neighbors_.size(); }
  double delta() const { return delta_; }
  std::size_t edge_count() const { return edges_; }

  bool adjacent(std::size_t i, std::size_t j) const
  {
    return (bits_[i * words_ + (j >> 6)] >> (j & 63)) & 1ULL;
  }
  const std::vector<std::uint32_t>& neighbors(std::size_t i) const { return neighbors_[i]; }

  friend ProximityGraph build_graph(std::span<const Vec3> points, double delta);

private:
  double delta_ = 0.0;
  std::size_t words_ = 0;
  std::size_t edges_ = 0;
  std::vector<std::uint64_t> bits_;
  std::vector<std::vector<std::uint32_t>> neighbors_;
};

ProximityGraph build_graph(std::span<const Vec3> points, double delta);

struct Cluster
{
  std::vector<std::size_t> members;  // sorted target indices
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
};

/// Clique cover of g as a greedy coloring of its complement. Vertices are
/// visited in breadth-first order over each connected component of the
/// complement, starting from the lowest unvisited index; each vertex takes the
/// smallest color whose members are all adjacent to it in g. Clusters are
/// returned in color order with members sorted. Centers are not set here.
std::vector<Cluster> clique_cover(const ProximityGraph& g);

/// Ensures every cluster fits a ball of diameter d: while a cluster's minimum
/// enclosing ball is too large, its point farthest from the ball center
/// (lowest index on ties) moves to a spill cluster, which is checked the same
/// way afterwards. Sets centers and radii from the enclosing balls.
std::vector<Cluster> verify_and_split(std::vector<Cluster> clusters, std::span<const Vec3> points,
                                      double d);

/// Number of colors used versus the complement's maximum degree (for the
/// greedy bound colors <= max_degree + 1).
std::size_t complement_max_degree(const ProximityGraph& g);
}  // namespace mmseq
