#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace mmseq
{
using Lattice3 = std::array<std::int64_t, 3>;

/// normal . p <= offset, with a primitive integer normal.
struct LatticeHalfspace
{
  Lattice3 normal{0, 0, 0};
  std::int64_t offset = 0;

  auto operator<=>(const LatticeHalfspace&) const = default;
};

/// Exact convex hull of a finite integer point set as an H-representation.
/// Lower-dimensional hulls are expressed with opposing half-space pairs, so
/// the representation is uniform across dimensions 0..3.
struct LatticeHull
{
  int dimension = -1;
  std::vector<LatticeHalfspace> halfspaces;  // sorted, unique
  std::vector<Lattice3> vertices;            // sorted, unique
  Lattice3 box_min{0, 0, 0};
  Lattice3 box_max{0, 0, 0};

  bool contains(const Lattice3& p) const;

  /// Calls fn(y, z, x_lo, x_hi) for every (y, z) row of the bounding box whose
  /// intersection with the hull holds at least one lattice point.
  template <typename Fn>
  void for_each_row(Fn&& fn) const;

  /// Number of lattice points inside the hull.
  std::int64_t lattice_point_count() const;
};

/// Throws InputError on an empty input.
LatticeHull lattice_hull(std::span<const Lattice3> points);

namespace detail
{
inline std::int64_t floor_div(std::int64_t a, std::int64_t b)
{
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0)))
  {
    --q;
  }
  return q;
}

inline std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }
}  // namespace detail

template <typename Fn>
void LatticeHull::for_each_row(Fn&& fn) const
{
  for (std::int64_t z = box_min[2]; z <= box_max[2]; ++z)
  {
    for (std::int64_t y = box_min[1]; y <= box_max[1]; ++y)
    {
      std::int64_t lo = box_min[0];
      std::int64_t hi = box_max[0];
      for (const auto& h : halfspaces)
      {
        const std::int64_t rest = h.offset - h.normal[1] * y - h.normal[2] * z;
        if (h.normal[0] > 0)
        {
          hi = std::min(hi, detail::floor_div(rest, h.normal[0]));
        }
        else if (h.normal[0] < 0)
        {
          lo = std::max(lo, detail::ceil_div(rest, h.normal[0]));
        }
        else if (rest < 0)
        {
          hi = lo - 1;
        }
        if (hi < lo)
        {
          break;
        }
      }
      if (lo <= hi)
      {
        fn(y, z, lo, hi);
      }
    }
  }
}
}  // namespace mmseq
