#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "mmseq/clustering.hpp"
#include "mmseq/geometry.hpp"
#include "mmseq/kinematics.hpp"

namespace mmseq
{
/// Closed tour depot -> order[0] -> ... -> order.back() -> depot, measured in
/// the xy plane.
struct BaseTour
{
  std::vector<std::size_t> order;
  Vec3 depot = Vec3::Zero();
  double length = 0.0;
};

double planar_tour_length(std::span<const Vec3> positions, const Vec3& depot, std::span<const std::size_t> order);

/// Nearest-neighbor construction from the depot; ties go to the lower index.
BaseTour nearest_neighbor_tour(std::span<const Vec3> positions, const Vec3& depot);

/// Nearest-neighbor tour improved by segment reversals until none shortens it
/// by more than 1e-12. The seed only rotates where each improvement scan
/// begins, so different seeds may reach different local optima.
BaseTour base_tour_2opt(std::span<const Vec3> positions, const Vec3& depot, std::uint64_t seed = 0);

/// True if no segment reversal shortens the tour by more than `tolerance`.
bool is_two_opt_optimal(std::span<const Vec3> positions, const BaseTour& tour, double tolerance = 1e-9);

/// Targets translated into a virtual stack: each cluster's targets are taken
/// relative to its center and shifted by (k + 1) * h along +x, k being the
/// cluster's position in the base tour. points[0] is the start (offset 0),
/// points.back() the end (offset (c + 1) * h); the start and end inputs are
/// relative to that offset.
struct StackedTargets
{
  std::vector<Vec3> points;
  std::vector<std::size_t> target_of;   // target index for points[1 .. n]
  std::vector<std::size_t> cluster_of;  // cluster index for points[1 .. n]
  double h = 0.0;
};

/// h = h_scale * (largest intra-cluster pairwise distance), or `fallback_h`
/// when every cluster is a single point. Throws InputError for h_scale < 1.
StackedTargets stack_clusters(std::span<const Cluster> clusters, const BaseTour& tour, std::span<const Vec3> targets,
                              double h_scale, double fallback_h, const Vec3& start = Vec3::Zero(),
                              const Vec3& end = Vec3::Zero());

inline constexpr std::size_t kExactPathLimit = 14;

/// Shortest path from points.front() to points.back() visiting every point
/// once; returns point indices including both ends. Exact by dynamic
/// programming for up to kExactPathLimit interior points, otherwise
/// nearest-neighbor plus fixed-endpoint 2-opt.
std::vector<std::size_t> hamiltonian_path(std::span<const Vec3> points);

double path_length(std::span<const Vec3> points, std::span<const std::size_t> order);

/// Original target indices along a path over st.points, ends dropped.
std::vector<std::size_t> target_sequence(const StackedTargets& st, std::span<const std::size_t> path);

using JointWeights = std::array<double, kNumJoints>;

double weighted_joint_distance(const JointConfig& a, const JointConfig& b, const JointWeights& w);

struct ConfigSequence
{
  std::vector<std::size_t> choice;  // node index per layer
  std::vector<JointConfig> configs;
  std::vector<double> legs;  // weighted distance between consecutive layers
  double total = 0.0;
};

/// Shortest start-to-goal path through consecutive layers, edge weight
/// ||W (q_next - q)||. The first and last layers must hold exactly one
/// configuration. Among optimal paths the lexicographically smallest node
/// sequence wins (costs within 1e-12 count as equal). An empty interior layer
/// throws InfeasibleError naming `layer_names[layer - 1]` when provided.
ConfigSequence config_shortest_path(const std::vector<std::vector<JointConfig>>& layers, const JointWeights& weights,
                                    std::span<const std::size_t> layer_names = {});
}  // namespace mmseq
