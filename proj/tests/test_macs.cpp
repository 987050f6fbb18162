#include <doctest.h>

#include <random>
#include <set>

#include "mmseq/errors.hpp"
#include "mmseq/lattice_hull.hpp"
#include "mmseq/macs.hpp"
#include "oracles.hpp"

using namespace mmseq;

namespace
{
std::vector<oracle::P3> to_p3(const std::vector<Index3>& v)
{
  std::vector<oracle::P3> out;
  for (const auto& i : v)
  {
    out.push_back({i[0], i[1], i[2]});
  }
  return out;
}

std::vector<Index3> box(Index3 lo, Index3 hi)
{
  std::vector<Index3> out;
  for (int x = lo[0]; x <= hi[0]; ++x)
  {
    for (int y = lo[1]; y <= hi[1]; ++y)
    {
      for (int z = lo[2]; z <= hi[2]; ++z)
      {
        out.push_back({x, y, z});
      }
    }
  }
  return out;
}

DigitalSet make_set(std::vector<Index3> v, Index3 dims = {4, 4, 4})
{
  return DigitalSet(std::move(v), Vec3(0.1, -0.2, 0.3), 0.05, dims);
}

std::vector<Index3> random_voxels(std::mt19937_64& rng, Index3 dims, double density)
{
  std::bernoulli_distribution keep(density);
  std::vector<Index3> out;
  for (const auto& v : box({0, 0, 0}, {dims[0] - 1, dims[1] - 1, dims[2] - 1}))
  {
    if (keep(rng))
    {
      out.push_back(v);
    }
  }
  if (out.empty())
  {
    out.push_back({0, 0, 0});
  }
  return out;
}
}  // namespace

TEST_CASE("lattice hull agrees with the triple-facet hull")
{
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> coord(-3, 3);
  std::uniform_int_distribution<int> count(1, 9);
  for (int trial = 0; trial < 400; ++trial)
  {
    std::vector<Lattice3> pts;
    const int n = count(rng);
    const int flat = trial % 4;  // 0: full, 1: planar, 2: collinear, 3: arbitrary small
    for (int i = 0; i < n; ++i)
    {
      Lattice3 p{coord(rng), coord(rng), coord(rng)};
      if (flat == 1)
      {
        p[2] = p[0] - p[1];
      }
      else if (flat == 2)
      {
        p = {p[0], 2 * p[0], -p[0]};
      }
      pts.push_back(p);
    }
    const LatticeHull h = lattice_hull(pts);
    const oracle::BruteHull b = oracle::brute_hull(std::vector<oracle::P3>(pts.begin(), pts.end()));
    std::int64_t inside = 0;
    for (std::int64_t x = -4; x <= 4; ++x)
    {
      for (std::int64_t y = -7; y <= 7; ++y)
      {
        for (std::int64_t z = -7; z <= 7; ++z)
        {
          const bool want = b.contains({x, y, z});
          CHECK(h.contains({x, y, z}) == want);
          inside += want;
        }
      }
    }
    CHECK(h.lattice_point_count() == inside);
  }
  CHECK_THROWS_AS(lattice_hull(std::vector<Lattice3>{}), InputError);
}

TEST_CASE("digital convexity examples")
{
  CHECK(is_digitally_convex(make_set(box({0, 0, 0}, {2, 2, 2}))));

  auto hollow = box({0, 0, 0}, {2, 2, 2});
  std::erase(hollow, Index3{1, 1, 1});
  CHECK_FALSE(is_digitally_convex(make_set(hollow)));

  auto ell = box({0, 0, 0}, {3, 1, 0});
  const auto arm = box({0, 2, 0}, {1, 3, 0});
  ell.insert(ell.end(), arm.begin(), arm.end());
  CHECK_FALSE(is_digitally_convex(make_set(ell)));
  CHECK_FALSE(oracle::brute_digitally_convex(to_p3(ell)));

  CHECK_THROWS_AS(is_digitally_convex(DigitalSet()), InputError);
}

TEST_CASE("digital convexity matches brute force on random sets")
{
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 200; ++trial)
  {
    const auto v = random_voxels(rng, {3, 3, 3}, trial % 2 ? 0.9 : 0.3);
    CHECK(is_digitally_convex(make_set(v, {3, 3, 3})) == oracle::brute_digitally_convex(to_p3(v)));
  }
}

TEST_CASE("convex input is a fixed point")
{
  const DigitalSet s = make_set(box({0, 1, 0}, {3, 2, 2}));
  const MacsResult r = find_macs(s);
  CHECK(r.subset == s);
  CHECK(r.peel_steps == 0);
}

TEST_CASE("detached voxel is peeled")
{
  // A voxel glued to a face keeps the union convex, so the stray voxel sits
  // apart from the box; the optimum then drops exactly that voxel.
  auto v = box({0, 0, 0}, {1, 1, 1});
  v.push_back({3, 0, 0});
  const MacsResult r = find_macs(make_set(v));
  CHECK(r.subset.voxels() == box({0, 0, 0}, {1, 1, 1}));
  CHECK(oracle::brute_max_convex_subset(to_p3(v)) == 8);
}

TEST_CASE("L-shape keeps at least one arm")
{
  auto v = box({0, 0, 0}, {3, 1, 1});
  const auto arm = box({0, 0, 2}, {1, 1, 3});
  v.insert(v.end(), arm.begin(), arm.end());
  const MacsResult r = find_macs(make_set(v));
  CHECK(is_digitally_convex(r.subset));
  CHECK(r.subset.size() >= 16);
  CHECK(r.subset.size() <= oracle::brute_max_convex_subset(to_p3(v)));
}

TEST_CASE("peeling on random sets")
{
  std::mt19937_64 rng(29);
  std::uniform_int_distribution<int> side(2, 4);
  std::uniform_real_distribution<double> density(0.5, 0.95);
  for (int trial = 0; trial < 20; ++trial)
  {
    const Index3 dims{side(rng), side(rng), side(rng)};
    const DigitalSet s = make_set(random_voxels(rng, dims, density(rng)), dims);
    const MacsResult r = find_macs(s);
    CHECK(is_digitally_convex(r.subset));
    CHECK(std::includes(s.voxels().begin(), s.voxels().end(), r.subset.voxels().begin(), r.subset.voxels().end()));
    CHECK(find_macs(r.subset).subset == r.subset);
    const std::size_t best = oracle::brute_max_convex_subset(to_p3(s.voxels()));
    CHECK(r.subset.size() <= best);
    CHECK(static_cast<double>(r.subset.size()) >= 0.8 * static_cast<double>(best));
    const MacsResult greedy = find_macs(s, MacsOptions{1, 0});
    CHECK(is_digitally_convex(greedy.subset));
    CHECK(greedy.subset.size() <= best);
  }
}

TEST_CASE("metric hull separates members from non-members")
{
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 10; ++trial)
  {
    const DigitalSet s = make_set(random_voxels(rng, {4, 4, 4}, 0.8));
    const MacsResult r = find_macs(s);
    const std::set<Index3> members(r.subset.voxels().begin(), r.subset.voxels().end());
    for (const auto& v : box({0, 0, 0}, {3, 3, 3}))
    {
      const double viol = r.hull.max_violation(r.subset.center(v));
      if (members.count(v))
      {
        CHECK(viol <= 1e-9);
      }
      else
      {
        CHECK(viol > 1e-9);
      }
    }
  }
}

TEST_CASE("empty input is rejected")
{
  CHECK_THROWS_AS(find_macs(DigitalSet()), InputError);
}
