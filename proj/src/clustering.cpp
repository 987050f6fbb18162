#include "mmseq/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <list>

#include "mmseq/errors.hpp"

namespace mmseq
{
double delta_from_diameter(double d, DeltaMode mode)
{
  if (!(d >= 0.0) || !std::isfinite(d))
  {
    throw InputError("delta_from_diameter: diameter must be a finite non-negative number");
  }
  return mode == DeltaMode::Planar ? 0.5 * std::sqrt(3.0) * d : std::sqrt(2.0 / 3.0) * d;
}

ProximityGraph build_graph(std::span<const Vec3> points, double delta)
{
  ProximityGraph g;
  const std::size_t n = points.size();
  g.delta_ = delta;
  g.words_ = (n + 63) / 64;
  g.bits_.assign(n * g.words_, 0);
  g.neighbors_.assign(n, {});
  const double delta_sq = delta * delta;
  for (std::size_t i = 0; i < n; ++i)
  {
    for (std::size_t j = i + 1; j < n; ++j)
    {
      // Squared distances keep the closed boundary exact for representable
      // inputs; the norm comparison is the tie-breaker near delta.
      const double dsq = (points[i] - points[j]).squaredNorm();
      if (dsq <= delta_sq || (points[i] - points[j]).norm() <= delta)
      {
        g.bits_[i * g.words_ + (j >> 6)] |= 1ULL << (j & 63);
        g.bits_[j * g.words_ + (i >> 6)] |= 1ULL << (i & 63);
        g.neighbors_[i].push_back(static_cast<std::uint32_t>(j));
        g.neighbors_[j].push_back(static_cast<std::uint32_t>(i));
        ++g.edges_;
      }
    }
  }
  return g;
}

std::vector<Cluster> clique_cover(const ProximityGraph& g)
{
  const std::size_t n = g.size();

  // Breadth-first order over the complement graph. Unvisited vertices live in
  // an ordered list; scanning it once per dequeued vertex visits every
  // complement edge at most once.
  std::vector<std::size_t> order;
  order.reserve(n);
  std::list<std::size_t> unvisited;
  for (std::size_t i = 0; i < n; ++i)
  {
    unvisited.push_back(i);
  }
  std::deque<std::size_t> queue;
  while (!unvisited.empty())
  {
    queue.push_back(unvisited.front());
    unvisited.pop_front();
    while (!queue.empty())
    {
      const std::size_t v = queue.front();
      queue.pop_front();
      order.push_back(v);
      for (auto it = unvisited.begin(); it != unvisited.end();)
      {
        if (!g.adjacent(v, *it))
        {
          queue.push_back(*it);
          it = unvisited.erase(it);
        }
        else
        {
          ++it;
        }
      }
    }
  }

  // Greedy coloring of the complement: color c is admissible for v iff every
  // vertex already colored c is a neighbor of v in g.
  constexpr std::size_t kUncolored = static_cast<std::size_t>(-1);
  std::vector<std::size_t> color(n, kUncolored);
  std::vector<std::size_t> class_size;
  std::vector<std::size_t> hits;
  for (const std::size_t v : order)
  {
    hits.assign(class_size.size(), 0);
    for (const auto u : g.neighbors(v))
    {
      if (color[u] != kUncolored)
      {
        ++hits[color[u]];
      }
    }
    std::size_t c = 0;
    while (c < class_size.size() && hits[c] != class_size[c])
    {
      ++c;
    }
    if (c == class_size.size())
    {
      class_size.push_back(0);
    }
    color[v] = c;
    ++class_size[c];
  }

  std::vector<Cluster> clusters(class_size.size());
  for (std::size_t v = 0; v < n; ++v)
  {
    clusters[color[v]].members.push_back(v);
  }
  return clusters;
}

std::vector<Cluster> verify_and_split(std::vector<Cluster> clusters, std::span<const Vec3> points, double d)
{
  std::vector<Cluster> out;
  std::deque<std::vector<std::size_t>> work;
  for (auto& c : clusters)
  {
    work.push_back(std::move(c.members));
  }
  while (!work.empty())
  {
    std::vector<std::size_t> members = std::move(work.front());
    work.pop_front();
    if (members.empty())
    {
      continue;
    }
    std::sort(members.begin(), members.end());
    std::vector<std::size_t> spill;
    Ball ball;
    for (;;)
    {
      std::vector<Vec3> pts;
      pts.reserve(members.size());
      for (auto i : members)
      {
        pts.push_back(points[i]);
      }
      ball = min_enclosing_ball(pts);
      if (2.0 * ball.radius <= d + 1e-9)
      {
        break;
      }
      std::size_t far = 0;
      for (std::size_t k = 1; k < members.size(); ++k)
      {
        if ((pts[k] - ball.center).norm() > (pts[far] - ball.center).norm())
        {
          far = k;
        }
      }
      spill.push_back(members[far]);
      members.erase(members.begin() + static_cast<std::ptrdiff_t>(far));
    }
    out.push_back(Cluster{members, ball.center, ball.radius});
    if (!spill.empty())
    {
      work.push_back(std::move(spill));
    }
  }
  return out;
}

std::size_t complement_max_degree(const ProximityGraph& g)
{
  std::size_t best = 0;
  for (std::size_t i = 0; i < g.size(); ++i)
  {
    best = std::max(best, g.size() - 1 - g.neighbors(i).size());
  }
  return best;
}
}  // namespace mmseq
