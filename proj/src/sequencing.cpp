#include "mmseq/sequencing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mmseq/errors.hpp"

namespace mmseq
{
namespace
{
constexpr double kImproveEps = 1e-12;

double planar_distance(const Vec3& a, const Vec3& b)
{
  return std::hypot(a.x() - b.x(), a.y() - b.y());
}

// Segment reversals on seq[1 .. size-2] with both ends fixed, repeated until
// no reversal gains more than kImproveEps. `rotation` shifts where each scan
// over the first cut starts.
template <typename Dist>
void two_opt_fixed_ends(std::vector<std::size_t>& seq, const Dist& dist, std::size_t rotation)
{
  if (seq.size() < 4)
  {
    return;
  }
  const std::size_t n = seq.size() - 2;
  bool improved = true;
  while (improved)
  {
    improved = false;
    for (std::size_t ii = 0; ii < n; ++ii)
    {
      const std::size_t i = 1 + (ii + rotation) % n;
      for (std::size_t j = i + 1; j <= n; ++j)
      {
        const double delta = dist(seq[i - 1], seq[j]) + dist(seq[i], seq[j + 1]) - dist(seq[i - 1], seq[i]) -
                             dist(seq[j], seq[j + 1]);
        if (delta < -kImproveEps)
        {
          std::reverse(seq.begin() + static_cast<std::ptrdiff_t>(i), seq.begin() + static_cast<std::ptrdiff_t>(j) + 1);
          improved = true;
        }
      }
    }
  }
}

// Node n stands for the depot.
std::vector<std::size_t> closed_sequence(const BaseTour& tour, std::size_t n)
{
  std::vector<std::size_t> seq;
  seq.reserve(n + 2);
  seq.push_back(n);
  seq.insert(seq.end(), tour.order.begin(), tour.order.end());
  seq.push_back(n);
  return seq;
}

std::vector<std::size_t> held_karp(std::span<const Vec3> points)
{
  const std::size_t k = points.size() - 2;
  const std::size_t last = points.size() - 1;
  const std::size_t full = (std::size_t{1} << k) - 1;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> cost((full + 1) * k, inf);
  std::vector<std::uint8_t> parent((full + 1) * k, 0xff);
  auto dist = [&](std::size_t a, std::size_t b) { return (points[a] - points[b]).norm(); };
  for (std::size_t v = 0; v < k; ++v)
  {
    cost[(std::size_t{1} << v) * k + v] = dist(0, v + 1);
  }
  for (std::size_t mask = 1; mask <= full; ++mask)
  {
    for (std::size_t v = 0; v < k; ++v)
    {
      const double base = cost[mask * k + v];
      if (!(mask >> v & 1) || base == inf)
      {
        continue;
      }
      for (std::size_t u = 0; u < k; ++u)
      {
        if (mask >> u & 1)
        {
          continue;
        }
        const std::size_t next = mask | (std::size_t{1} << u);
        const double c = base + dist(v + 1, u + 1);
        if (c < cost[next * k + u])
        {
          cost[next * k + u] = c;
          parent[next * k + u] = static_cast<std::uint8_t>(v);
        }
      }
    }
  }
  std::size_t end = 0;
  double best = inf;
  for (std::size_t v = 0; v < k; ++v)
  {
    const double c = cost[full * k + v] + dist(v + 1, last);
    if (c < best)
    {
      best = c;
      end = v;
    }
  }
  std::vector<std::size_t> path{last};
  std::size_t mask = full;
  std::size_t v = end;
  while (mask != 0)
  {
    path.push_back(v + 1);
    const std::uint8_t p = parent[mask * k + v];
    mask &= ~(std::size_t{1} << v);
    v = p;
  }
  path.push_back(0);
  std::reverse(path.begin(), path.end());
  return path;
}

std::vector<std::size_t> heuristic_path(std::span<const Vec3> points)
{
  const std::size_t last = points.size() - 1;
  std::vector<bool> used(points.size(), false);
  std::vector<std::size_t> path{0};
  used[0] = true;
  used[last] = true;
  for (std::size_t step = 1; step < last; ++step)
  {
    const Vec3& from = points[path.back()];
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < last; ++i)
    {
      if (!used[i])
      {
        const double d = (points[i] - from).squaredNorm();
        if (d < best_d)
        {
          best_d = d;
          best = i;
        }
      }
    }
    used[best] = true;
    path.push_back(best);
  }
  path.push_back(last);
  two_opt_fixed_ends(path, [&](std::size_t a, std::size_t b) { return (points[a] - points[b]).norm(); }, 0);
  return path;
}
}  // namespace

double planar_tour_length(std::span<const Vec3> positions, const Vec3& depot, std::span<const std::size_t> order)
{
  double total = 0.0;
  Vec3 prev = depot;
  for (const auto i : order)
  {
    total += planar_distance(prev, positions[i]);
    prev = positions[i];
  }
  return total + planar_distance(prev, depot);
}

BaseTour nearest_neighbor_tour(std::span<const Vec3> positions, const Vec3& depot)
{
  BaseTour tour;
  tour.depot = depot;
  std::vector<bool> used(positions.size(), false);
  Vec3 at = depot;
  for (std::size_t step = 0; step < positions.size(); ++step)
  {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < positions.size(); ++i)
    {
      if (!used[i])
      {
        const double d = planar_distance(at, positions[i]);
        if (d < best_d)
        {
          best_d = d;
          best = i;
        }
      }
    }
    used[best] = true;
    tour.order.push_back(best);
    at = positions[best];
  }
  tour.length = planar_tour_length(positions, depot, tour.order);
  return tour;
}

BaseTour base_tour_2opt(std::span<const Vec3> positions, const Vec3& depot, std::uint64_t seed)
{
  BaseTour tour = nearest_neighbor_tour(positions, depot);
  const std::size_t n = positions.size();
  if (n < 2)
  {
    return tour;
  }
  std::vector<std::size_t> seq = closed_sequence(tour, n);
  auto point = [&](std::size_t i) -> const Vec3& { return i == n ? depot : positions[i]; };
  two_opt_fixed_ends(seq, [&](std::size_t a, std::size_t b) { return planar_distance(point(a), point(b)); },
                     static_cast<std::size_t>(seed % n));
  tour.order.assign(seq.begin() + 1, seq.end() - 1);
  tour.length = planar_tour_length(positions, depot, tour.order);
  return tour;
}

bool is_two_opt_optimal(std::span<const Vec3> positions, const BaseTour& tour, double tolerance)
{
  const std::size_t n = positions.size();
  const std::vector<std::size_t> seq = closed_sequence(tour, n);
  auto point = [&](std::size_t i) -> const Vec3& { return i == n ? tour.depot : positions[i]; };
  auto dist = [&](std::size_t a, std::size_t b) { return planar_distance(point(a), point(b)); };
  for (std::size_t i = 1; i <= n; ++i)
  {
    for (std::size_t j = i + 1; j <= n; ++j)
    {
      const double delta =
          dist(seq[i - 1], seq[j]) + dist(seq[i], seq[j + 1]) - dist(seq[i - 1], seq[i]) - dist(seq[j], seq[j + 1]);
      if (delta < -tolerance)
      {
        return false;
      }
    }
  }
  return true;
}

StackedTargets stack_clusters(std::span<const Cluster> clusters, const BaseTour& tour, std::span<const Vec3> targets,
                              double h_scale, double fallback_h, const Vec3& start, const Vec3& end)
{
  if (!(h_scale >= 1.0) || !std::isfinite(h_scale))
  {
    throw InputError("stack_clusters: h_scale must be a finite number >= 1");
  }
  std::vector<bool> seen(clusters.size(), false);
  if (tour.order.size() != clusters.size())
  {
    throw InputError("stack_clusters: base tour does not list every cluster once");
  }
  for (const auto c : tour.order)
  {
    if (c >= clusters.size() || seen[c])
    {
      throw InputError("stack_clusters: base tour does not list every cluster once");
    }
    seen[c] = true;
  }

  double diameter = 0.0;
  for (const auto& c : clusters)
  {
    std::vector<Vec3> pts;
    for (const auto m : c.members)
    {
      pts.push_back(targets[m]);
    }
    diameter = std::max(diameter, max_pairwise_distance(pts));
  }

  StackedTargets st;
  st.h = diameter > 0.0 ? h_scale * diameter : fallback_h;
  const Vec3 axis = Vec3::UnitX();
  st.points.push_back(start);
  for (std::size_t k = 0; k < tour.order.size(); ++k)
  {
    const Cluster& c = clusters[tour.order[k]];
    const Vec3 shift = static_cast<double>(k + 1) * st.h * axis;
    for (const auto m : c.members)
    {
      st.points.push_back(targets[m] - c.center + shift);
      st.target_of.push_back(m);
      st.cluster_of.push_back(tour.order[k]);
    }
  }
  st.points.push_back(end + static_cast<double>(tour.order.size() + 1) * st.h * axis);
  return st;
}

std::vector<std::size_t> hamiltonian_path(std::span<const Vec3> points)
{
  if (points.size() < 2)
  {
    throw InputError("hamiltonian_path: need a start and an end point");
  }
  if (points.size() - 2 <= kExactPathLimit)
  {
    if (points.size() == 2)
    {
      return {0, 1};
    }
    return held_karp(points);
  }
  return heuristic_path(points);
}

double path_length(std::span<const Vec3> points, std::span<const std::size_t> order)
{
  double total = 0.0;
  for (std::size_t i = 1; i < order.size(); ++i)
  {
    total += (points[order[i]] - points[order[i - 1]]).norm();
  }
  return total;
}

std::vector<std::size_t> target_sequence(const StackedTargets& st, std::span<const std::size_t> path)
{
  std::vector<std::size_t> seq;
  const std::size_t last = st.points.size() - 1;
  for (const auto p : path)
  {
    if (p != 0 && p != last)
    {
      seq.push_back(st.target_of[p - 1]);
    }
  }
  return seq;
}

double weighted_joint_distance(const JointConfig& a, const JointConfig& b, const JointWeights& w)
{
  double sum = 0.0;
  for (int j = 0; j < kNumJoints; ++j)
  {
    const double d = w[j] * (b[j] - a[j]);
    sum += d * d;
  }
  return std::sqrt(sum);
}

ConfigSequence config_shortest_path(const std::vector<std::vector<JointConfig>>& layers, const JointWeights& weights,
                                    std::span<const std::size_t> layer_names)
{
  if (layers.size() < 2 || layers.front().size() != 1 || layers.back().size() != 1)
  {
    throw InputError("config_shortest_path: start and goal layers must hold exactly one configuration");
  }
  for (std::size_t i = 1; i + 1 < layers.size(); ++i)
  {
    if (layers[i].empty())
    {
      const std::size_t name = i - 1 < layer_names.size() ? layer_names[i - 1] : i - 1;
      throw InfeasibleError("target " + std::to_string(name) + " is unreachable: no IK solution");
    }
  }

  // Backward cost-to-go.
  const std::size_t m = layers.size();
  std::vector<std::vector<double>> to_go(m);
  to_go[m - 1] = {0.0};
  for (std::size_t i = m - 1; i-- > 0;)
  {
    to_go[i].assign(layers[i].size(), std::numeric_limits<double>::infinity());
    for (std::size_t u = 0; u < layers[i].size(); ++u)
    {
      for (std::size_t v = 0; v < layers[i + 1].size(); ++v)
      {
        const double c = weighted_joint_distance(layers[i][u], layers[i + 1][v], weights) + to_go[i + 1][v];
        to_go[i][u] = std::min(to_go[i][u], c);
      }
    }
  }

  ConfigSequence out;
  std::size_t u = 0;
  out.choice.push_back(0);
  out.configs.push_back(layers[0][0]);
  for (std::size_t i = 0; i + 1 < m; ++i)
  {
    const double target = to_go[i][u];
    for (std::size_t v = 0; v < layers[i + 1].size(); ++v)
    {
      const double leg = weighted_joint_distance(layers[i][u], layers[i + 1][v], weights);
      if (leg + to_go[i + 1][v] <= target + kImproveEps)
      {
        out.legs.push_back(leg);
        out.total += leg;
        u = v;
        break;
      }
    }
    out.choice.push_back(u);
    out.configs.push_back(layers[i + 1][u]);
  }
  return out;
}
}  // namespace mmseq
