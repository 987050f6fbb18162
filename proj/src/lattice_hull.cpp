#include "mmseq/lattice_hull.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <unordered_set>

#include "mmseq/errors.hpp"

namespace mmseq
{
namespace
{
using I64 = std::int64_t;

Lattice3 sub(const Lattice3& a, const Lattice3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

Lattice3 cross(const Lattice3& a, const Lattice3& b)
{
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

I64 dot(const Lattice3& a, const Lattice3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

bool is_zero(const Lattice3& a) { return a[0] == 0 && a[1] == 0 && a[2] == 0; }

Lattice3 negate(const Lattice3& a) { return {-a[0], -a[1], -a[2]}; }

Lattice3 primitive(const Lattice3& a)
{
  const I64 g = std::gcd(std::gcd(std::llabs(a[0]), std::llabs(a[1])), std::llabs(a[2]));
  if (g <= 1)
  {
    return a;
  }
  return {a[0] / g, a[1] / g, a[2] / g};
}

LatticeHalfspace make_halfspace(const Lattice3& normal, const Lattice3& on_plane)
{
  const Lattice3 n = primitive(normal);
  return LatticeHalfspace{n, dot(n, on_plane)};
}

// Adds the opposing pair n.p <= n.p0 and -n.p <= -n.p0.
void add_equality(std::vector<LatticeHalfspace>& out, const Lattice3& n, const Lattice3& p0)
{
  out.push_back(make_halfspace(n, p0));
  out.push_back(make_halfspace(negate(n), p0));
}

struct Face
{
  int a, b, c;
  Lattice3 normal;
  I64 offset;
  bool alive;
};

Face make_face(const std::vector<Lattice3>& pts, int a, int b, int c)
{
  const Lattice3 n = cross(sub(pts[b], pts[a]), sub(pts[c], pts[a]));
  return Face{a, b, c, n, dot(n, pts[a]), true};
}

void hull_3d(const std::vector<Lattice3>& pts, const std::array<int, 4>& seed, LatticeHull& hull)
{
  std::vector<Face> faces;
  const std::array<std::array<int, 4>, 4> tet{{{seed[0], seed[1], seed[2], seed[3]},
                                                {seed[0], seed[1], seed[3], seed[2]},
                                                {seed[0], seed[2], seed[3], seed[1]},
                                                {seed[1], seed[2], seed[3], seed[0]}}};
  for (const auto& t : tet)
  {
    Face f = make_face(pts, t[0], t[1], t[2]);
    if (dot(f.normal, pts[t[3]]) > f.offset)
    {
      f = make_face(pts, t[0], t[2], t[1]);
    }
    faces.push_back(f);
  }

  const auto n = static_cast<I64>(pts.size());
  std::unordered_set<I64> edges;
  std::vector<int> visible;
  std::size_t dead = 0;
  for (int pi = 0; pi < static_cast<int>(pts.size()); ++pi)
  {
    if (std::find(seed.begin(), seed.end(), pi) != seed.end())
    {
      continue;
    }
    const Lattice3& p = pts[pi];
    visible.clear();
    for (int fi = 0; fi < static_cast<int>(faces.size()); ++fi)
    {
      if (faces[fi].alive && dot(faces[fi].normal, p) > faces[fi].offset)
      {
        visible.push_back(fi);
      }
    }
    if (visible.empty())
    {
      continue;
    }
    edges.clear();
    for (int fi : visible)
    {
      const Face& f = faces[fi];
      edges.insert(f.a * n + f.b);
      edges.insert(f.b * n + f.c);
      edges.insert(f.c * n + f.a);
    }
    for (int fi : visible)
    {
      faces[fi].alive = false;
      ++dead;
      const Face f = faces[fi];
      const std::array<std::pair<int, int>, 3> fe{{{f.a, f.b}, {f.b, f.c}, {f.c, f.a}}};
      for (const auto& [u, v] : fe)
      {
        if (!edges.contains(v * n + u))
        {
          faces.push_back(make_face(pts, u, v, pi));
        }
      }
    }
    if (dead > faces.size() / 2)
    {
      std::erase_if(faces, [](const Face& f) { return !f.alive; });
      dead = 0;
    }
  }

  std::vector<int> used;
  for (const auto& f : faces)
  {
    if (f.alive)
    {
      hull.halfspaces.push_back(make_halfspace(f.normal, pts[f.a]));
      used.insert(used.end(), {f.a, f.b, f.c});
    }
  }
  for (int i : used)
  {
    hull.vertices.push_back(pts[i]);
  }
}

// Strictly convex polygon (counter-clockwise in the projection that drops axis
// `drop`) by the monotone chain method; returns point indices.
std::vector<int> polygon_2d(const std::vector<Lattice3>& pts, int drop)
{
  const int u = drop == 0 ? 1 : 0;
  const int v = drop == 2 ? 1 : 2;
  std::vector<int> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::tie(pts[a][u], pts[a][v]) < std::tie(pts[b][u], pts[b][v]);
  });
  order.erase(std::unique(order.begin(), order.end(),
                          [&](int a, int b) { return pts[a][u] == pts[b][u] && pts[a][v] == pts[b][v]; }),
              order.end());
  auto turn = [&](int o, int a, int b) {
    return (pts[a][u] - pts[o][u]) * (pts[b][v] - pts[o][v]) -
           (pts[a][v] - pts[o][v]) * (pts[b][u] - pts[o][u]);
  };
  std::vector<int> chain(2 * order.size());
  std::size_t k = 0;
  for (int idx : order)
  {
    while (k >= 2 && turn(chain[k - 2], chain[k - 1], idx) <= 0)
    {
      --k;
    }
    chain[k++] = idx;
  }
  for (std::size_t i = order.size() - 1, t = k + 1; i-- > 0;)
  {
    const int idx = order[i];
    while (k >= t && turn(chain[k - 2], chain[k - 1], idx) <= 0)
    {
      --k;
    }
    chain[k++] = idx;
  }
  chain.resize(k - 1);
  return chain;
}
}  // namespace

bool LatticeHull::contains(const Lattice3& p) const
{
  return std::all_of(halfspaces.begin(), halfspaces.end(),
                     [&](const LatticeHalfspace& h) { return dot(h.normal, p) <= h.offset; });
}

std::int64_t LatticeHull::lattice_point_count() const
{
  std::int64_t total = 0;
  for_each_row([&](I64, I64, I64 lo, I64 hi) { total += hi - lo + 1; });
  return total;
}

LatticeHull lattice_hull(std::span<const Lattice3> input)
{
  if (input.empty())
  {
    throw InputError("lattice_hull: empty point set");
  }
  std::vector<Lattice3> pts(input.begin(), input.end());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  LatticeHull hull;
  hull.box_min = pts.front();
  hull.box_max = pts.front();
  for (const auto& p : pts)
  {
    for (int a = 0; a < 3; ++a)
    {
      hull.box_min[a] = std::min(hull.box_min[a], p[a]);
      hull.box_max[a] = std::max(hull.box_max[a], p[a]);
    }
  }

  const Lattice3& p0 = pts[0];
  int i1 = -1, i2 = -1, i3 = -1;
  for (int i = 1; i < static_cast<int>(pts.size()) && i1 < 0; ++i)
  {
    i1 = i;
  }
  Lattice3 plane{0, 0, 0};
  if (i1 >= 0)
  {
    for (int i = 1; i < static_cast<int>(pts.size()); ++i)
    {
      const Lattice3 c = cross(sub(pts[i1], p0), sub(pts[i], p0));
      if (!is_zero(c))
      {
        i2 = i;
        plane = c;
        break;
      }
    }
  }
  if (i2 >= 0)
  {
    for (int i = 1; i < static_cast<int>(pts.size()); ++i)
    {
      if (dot(plane, sub(pts[i], p0)) != 0)
      {
        i3 = i;
        break;
      }
    }
  }

  if (i1 < 0)
  {
    hull.dimension = 0;
    for (const Lattice3& axis : {Lattice3{1, 0, 0}, Lattice3{0, 1, 0}, Lattice3{0, 0, 1}})
    {
      add_equality(hull.halfspaces, axis, p0);
    }
    hull.vertices.push_back(p0);
  }
  else if (i2 < 0)
  {
    hull.dimension = 1;
    const Lattice3 e = primitive(sub(pts[i1], p0));
    Lattice3 side{0, 0, 0};
    for (const Lattice3& axis : {Lattice3{1, 0, 0}, Lattice3{0, 1, 0}, Lattice3{0, 0, 1}})
    {
      side = cross(e, axis);
      if (!is_zero(side))
      {
        break;
      }
    }
    add_equality(hull.halfspaces, side, p0);
    add_equality(hull.halfspaces, cross(e, side), p0);
    // pts is sorted lexicographically, so the extremes along e are the ends.
    const auto [lo, hi] = std::minmax_element(pts.begin(), pts.end(), [&](const Lattice3& a, const Lattice3& b) {
      return dot(e, a) < dot(e, b);
    });
    hull.halfspaces.push_back(LatticeHalfspace{e, dot(e, *hi)});
    hull.halfspaces.push_back(LatticeHalfspace{negate(e), -dot(e, *lo)});
    hull.vertices = {*lo, *hi};
  }
  else if (i3 < 0)
  {
    hull.dimension = 2;
    const Lattice3 normal = primitive(plane);
    add_equality(hull.halfspaces, normal, p0);
    int drop = 0;
    for (int a = 1; a < 3; ++a)
    {
      if (std::llabs(normal[a]) > std::llabs(normal[drop]))
      {
        drop = a;
      }
    }
    const std::vector<int> poly = polygon_2d(pts, drop);
    for (std::size_t i = 0; i < poly.size(); ++i)
    {
      const Lattice3& a = pts[poly[i]];
      const Lattice3& b = pts[poly[(i + 1) % poly.size()]];
      LatticeHalfspace h = make_halfspace(cross(sub(b, a), normal), a);
      const Lattice3& other = pts[poly[(i + 2) % poly.size()]];
      if (dot(h.normal, other) > h.offset)
      {
        h = make_halfspace(negate(h.normal), a);
      }
      hull.halfspaces.push_back(h);
      hull.vertices.push_back(a);
    }
  }
  else
  {
    hull.dimension = 3;
    hull_3d(pts, {0, i1, i2, i3}, hull);
  }

  std::sort(hull.halfspaces.begin(), hull.halfspaces.end());
  hull.halfspaces.erase(std::unique(hull.halfspaces.begin(), hull.halfspaces.end()), hull.halfspaces.end());
  std::sort(hull.vertices.begin(), hull.vertices.end());
  hull.vertices.erase(std::unique(hull.vertices.begin(), hull.vertices.end()), hull.vertices.end());
  return hull;
}
}  // namespace mmseq
