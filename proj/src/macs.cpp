#include "mmseq/macs.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <numeric>

#include "mmseq/errors.hpp"

namespace mmseq
{
namespace
{
using I64 = std::int64_t;

Lattice3 to_lattice(const Index3& v) { return {v[0], v[1], v[2]}; }
Index3 to_index(const Lattice3& v)
{
  return {static_cast<int>(v[0]), static_cast<int>(v[1]), static_cast<int>(v[2])};
}

I64 dot(const Lattice3& a, const Lattice3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

// Dense membership over a fixed box; lookups outside the box are false.
class Mask
{
public:
  explicit Mask(const std::vector<Lattice3>& pts)
  {
    lo_ = hi_ = pts.front();
    for (const auto& p : pts)
    {
      for (int a = 0; a < 3; ++a)
      {
        lo_[a] = std::min(lo_[a], p[a]);
        hi_[a] = std::max(hi_[a], p[a]);
      }
    }
    for (int a = 0; a < 3; ++a)
    {
      ext_[a] = hi_[a] - lo_[a] + 1;
    }
    bits_.assign(static_cast<std::size_t>(ext_[0] * ext_[1] * ext_[2]), 0);
    for (const auto& p : pts)
    {
      set(p, true);
    }
  }

  bool get(const Lattice3& p) const
  {
    for (int a = 0; a < 3; ++a)
    {
      if (p[a] < lo_[a] || p[a] > hi_[a])
      {
        return false;
      }
    }
    return bits_[offset(p)] != 0;
  }

  void set(const Lattice3& p, bool value) { bits_[offset(p)] = value ? 1 : 0; }

private:
  std::size_t offset(const Lattice3& p) const
  {
    return static_cast<std::size_t>((p[0] - lo_[0]) + ext_[0] * ((p[1] - lo_[1]) + ext_[1] * (p[2] - lo_[2])));
  }

  Lattice3 lo_{}, hi_{}, ext_{};
  std::vector<std::uint8_t> bits_;
};

// Members with at least one 6-neighbor outside the set. Voxels whose six
// neighbors are all members are midpoints of member pairs, so they are never
// hull vertices.
std::vector<Lattice3> boundary(const std::vector<Lattice3>& members, const Mask& mask)
{
  static constexpr std::array<Lattice3, 6> kNeighbors{
      {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}}};
  std::vector<Lattice3> out;
  for (const auto& p : members)
  {
    for (const auto& d : kNeighbors)
    {
      if (!mask.get({p[0] + d[0], p[1] + d[1], p[2] + d[2]}))
      {
        out.push_back(p);
        break;
      }
    }
  }
  return out;
}

std::vector<Lattice3> missing_points(const LatticeHull& hull, const Mask& mask)
{
  std::vector<Lattice3> out;
  hull.for_each_row([&](I64 y, I64 z, I64 lo, I64 hi) {
    for (I64 x = lo; x <= hi; ++x)
    {
      if (!mask.get({x, y, z}))
      {
        out.push_back({x, y, z});
      }
    }
  });
  return out;
}

// cur (with `count` members) is digitally convex; checks whether adding v
// keeps it so.
bool can_restore(const LatticeHull& hull, const Mask& mask, std::int64_t count, const Lattice3& v)
{
  // Cheap rejection: lattice points strictly between v and a hull vertex must
  // already be members.
  for (const auto& w : hull.vertices)
  {
    const Lattice3 d{v[0] - w[0], v[1] - w[1], v[2] - w[2]};
    const I64 g = std::gcd(std::gcd(std::llabs(d[0]), std::llabs(d[1])), std::llabs(d[2]));
    for (I64 k = 1; k < g; ++k)
    {
      if (!mask.get({w[0] + k * d[0] / g, w[1] + k * d[1] / g, w[2] + k * d[2] / g}))
      {
        return false;
      }
    }
  }
  std::vector<Lattice3> gens = hull.vertices;
  gens.push_back(v);
  return lattice_hull(gens).lattice_point_count() == count + 1;
}

std::vector<Lattice3> lattice_points(const DigitalSet& s)
{
  std::vector<Lattice3> pts;
  pts.reserve(s.size());
  for (const auto& v : s.voxels())
  {
    pts.push_back(to_lattice(v));
  }
  return pts;
}
}  // namespace

DigitalSet::DigitalSet(std::vector<Index3> voxels, const Vec3& origin, double resolution,
                       const Index3& dims)
    : voxels_(std::move(voxels)), origin_(origin), resolution_(resolution), dims_(dims)
{
  if (!(resolution > 0.0))
  {
    throw InputError("digital set: resolution must be positive");
  }
  std::sort(voxels_.begin(), voxels_.end());
  voxels_.erase(std::unique(voxels_.begin(), voxels_.end()), voxels_.end());
  for (const auto& v : voxels_)
  {
    for (int a = 0; a < 3; ++a)
    {
      if (v[a] < 0 || v[a] >= dims_[a])
      {
        throw InputError("digital set: voxel index outside grid dimensions");
      }
    }
  }
}

DigitalSet DigitalSet::from_grid(const VoxelGrid& grid)
{
  return DigitalSet(grid.marked(), grid.origin(), grid.resolution(), grid.dims());
}

bool DigitalSet::contains(const Index3& v) const
{
  return std::binary_search(voxels_.begin(), voxels_.end(), v);
}

double ConvexPolytope::max_violation(const Vec3& x) const
{
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& h : halfspaces)
  {
    worst = std::max(worst, h.normal.vec().dot(x) - h.offset);
  }
  return worst;
}

bool is_digitally_convex(const DigitalSet& s)
{
  if (s.empty())
  {
    throw InputError("is_digitally_convex: empty set");
  }
  const auto pts = lattice_points(s);
  const Mask mask(pts);
  const LatticeHull hull = lattice_hull(boundary(pts, mask));
  return hull.lattice_point_count() == static_cast<I64>(pts.size());
}

ConvexPolytope metric_hull(const DigitalSet& s)
{
  if (s.empty())
  {
    throw InputError("metric_hull: empty set");
  }
  const auto pts = lattice_points(s);
  const Mask mask(pts);
  const LatticeHull hull = lattice_hull(boundary(pts, mask));
  ConvexPolytope poly;
  for (const auto& h : hull.halfspaces)
  {
    const Vec3 n(static_cast<double>(h.normal[0]), static_cast<double>(h.normal[1]),
                 static_cast<double>(h.normal[2]));
    // Lattice index i maps to origin + (i + 0.5) * resolution.
    const double offset = s.resolution() * (static_cast<double>(h.offset) + 0.5 * n.sum()) + n.dot(s.origin());
    const double len = n.norm();
    poly.halfspaces.push_back(Halfspace{UnitVec3::normalized(n), offset / len});
  }
  return poly;
}

namespace
{
// Candidate cut: drop every member p with normal . p >= level.
struct Cut
{
  Lattice3 normal{};
  I64 level = 0;
  std::size_t removed = 0;
  Lattice3 smallest{};
};

// Hull facet normals plus every primitive direction with coordinates in
// [-2, 2]; the fixed directions let a cut shave a corner that no facet
// normal isolates.
std::vector<Lattice3> cut_directions(const LatticeHull& hull)
{
  std::vector<Lattice3> out;
  out.reserve(hull.halfspaces.size() + 98);
  for (const auto& h : hull.halfspaces)
  {
    out.push_back(h.normal);
  }
  for (I64 a = -2; a <= 2; ++a)
  {
    for (I64 b = -2; b <= 2; ++b)
    {
      for (I64 c = -2; c <= 2; ++c)
      {
        if (std::gcd(std::gcd(std::llabs(a), std::llabs(b)), std::llabs(c)) == 1)
        {
          out.push_back({a, b, c});
        }
      }
    }
  }
  return out;
}

// Cuts that exclude the outermost missing point along each direction and keep
// at least one member, fewest removed members first (ties: lexicographically
// smallest removed voxel, then direction order).
std::vector<Cut> ranked_cuts(const std::vector<Lattice3>& members, const LatticeHull& hull,
                             const std::vector<Lattice3>& missing)
{
  std::vector<Cut> cuts;
  for (const auto& n : cut_directions(hull))
  {
    Cut c{n, std::numeric_limits<I64>::min(), 0, {std::numeric_limits<I64>::max(), 0, 0}};
    for (const auto& m : missing)
    {
      c.level = std::max(c.level, dot(n, m));
    }
    for (const auto& p : members)
    {
      if (dot(n, p) >= c.level)
      {
        ++c.removed;
        c.smallest = std::min(c.smallest, p);
      }
    }
    // A cut that removes every member is never useful.
    if (c.removed < members.size())
    {
      cuts.push_back(c);
    }
  }
  std::stable_sort(cuts.begin(), cuts.end(), [](const Cut& x, const Cut& y) {
    return x.removed != y.removed ? x.removed < y.removed : x.smallest < y.smallest;
  });
  return cuts;
}

struct PeelState
{
  std::vector<Lattice3> members;
  Mask mask;
  std::vector<Lattice3> removed;
  std::size_t steps = 0;
  std::size_t restored = 0;
};

void apply_cut(PeelState& st, const Cut& cut)
{
  std::erase_if(st.members, [&](const Lattice3& p) {
    if (dot(cut.normal, p) >= cut.level)
    {
      st.removed.push_back(p);
      st.mask.set(p, false);
      return true;
    }
    return false;
  });
  ++st.steps;
}

// Puts peeled voxels back, in lexicographic order, while the set stays
// digitally convex; repeats until a full pass restores nothing.
void restore(PeelState& st)
{
  std::sort(st.removed.begin(), st.removed.end());
  std::vector<bool> back(st.removed.size(), false);
  bool changed = !st.removed.empty();
  while (changed)
  {
    changed = false;
    LatticeHull hull = lattice_hull(boundary(st.members, st.mask));
    for (std::size_t i = 0; i < st.removed.size(); ++i)
    {
      if (back[i] || !can_restore(hull, st.mask, static_cast<I64>(st.members.size()), st.removed[i]))
      {
        continue;
      }
      back[i] = true;
      st.members.push_back(st.removed[i]);
      st.mask.set(st.removed[i], true);
      ++st.restored;
      changed = true;
      std::vector<Lattice3> gens = hull.vertices;
      gens.push_back(st.removed[i]);
      hull = lattice_hull(gens);
    }
  }
}

// Peels until digitally convex, then restores. With lookahead, each of the
// best-ranked cuts is played out greedily and the one with the largest final
// set is taken (ties: rank order).
void peel(PeelState& st, const MacsOptions& opt)
{
  for (;;)
  {
    const LatticeHull hull = lattice_hull(boundary(st.members, st.mask));
    const std::vector<Lattice3> missing = missing_points(hull, st.mask);
    if (missing.empty())
    {
      break;
    }
    const std::vector<Cut> cuts = ranked_cuts(st.members, hull, missing);
    if (cuts.empty())
    {
      // Every direction empties the set; a single voxel is convex.
      const Lattice3 keep = *std::min_element(st.members.begin(), st.members.end());
      apply_cut(st, Cut{{0, 0, 0}, 0, 0, {}});
      st.removed.erase(std::find(st.removed.begin(), st.removed.end(), keep));
      st.members.push_back(keep);
      st.mask.set(keep, true);
      continue;
    }
    std::size_t pick = 0;
    const std::size_t width = std::min(opt.lookahead, cuts.size());
    if (width > 1 && st.members.size() <= opt.lookahead_max_voxels)
    {
      std::size_t best_size = 0;
      for (std::size_t k = 0; k < width; ++k)
      {
        PeelState trial = st;
        apply_cut(trial, cuts[k]);
        peel(trial, MacsOptions{1, 0});
        if (trial.members.size() > best_size)
        {
          best_size = trial.members.size();
          pick = k;
        }
      }
    }
    apply_cut(st, cuts[pick]);
  }
  restore(st);
}
}  // namespace

MacsResult find_macs(const DigitalSet& s, const MacsOptions& options)
{
  if (s.empty())
  {
    throw InputError("find_macs: empty set");
  }
  std::vector<Lattice3> members = lattice_points(s);
  Mask mask(members);
  PeelState st{std::move(members), std::move(mask), {}, 0, 0};
  peel(st, options);

  MacsResult result;
  result.peel_steps = st.steps;
  result.restored = st.restored;
  std::vector<Index3> kept;
  kept.reserve(st.members.size());
  for (const auto& p : st.members)
  {
    kept.push_back(to_index(p));
  }
  result.subset = DigitalSet(std::move(kept), s.origin(), s.resolution(), s.dims());
  result.hull = metric_hull(result.subset);
  return result;
}
}  // namespace mmseq
