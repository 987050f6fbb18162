#include <doctest.h>

#include <numeric>
#include <random>

#include "mmseq/errors.hpp"
#include "mmseq/geometry.hpp"
#include "mmseq/sequencing.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace mmseq;

namespace
{
bool is_permutation_of(const std::vector<std::size_t>& order, std::size_t n)
{
  std::vector<std::size_t> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> expect(n);
  std::iota(expect.begin(), expect.end(), 0);
  return sorted == expect;
}

std::vector<Vec3> planar_points(std::mt19937_64& rng, std::size_t n, double span)
{
  std::uniform_real_distribution<double> u(-span, span);
  std::vector<Vec3> out;
  for (std::size_t i = 0; i < n; ++i)
  {
    out.push_back(Vec3(u(rng), u(rng), 0.0));
  }
  return out;
}

Cluster make_cluster(std::vector<std::size_t> members, std::span<const Vec3> pts)
{
  Cluster c;
  c.members = std::move(members);
  std::vector<Vec3> sub;
  for (const auto i : c.members)
  {
    sub.push_back(pts[i]);
  }
  const Ball b = min_enclosing_ball(sub);
  c.center = b.center;
  c.radius = b.radius;
  return c;
}

// Clusters of a few points each around well separated centers.
void random_clusters(std::mt19937_64& rng, std::size_t count, std::size_t per, std::vector<Vec3>& pts,
                     std::vector<Cluster>& clusters)
{
  std::uniform_real_distribution<double> u(-0.15, 0.15);
  const auto centers = planar_points(rng, count, 4.0);
  for (std::size_t c = 0; c < count; ++c)
  {
    std::vector<std::size_t> members;
    for (std::size_t k = 0; k < per; ++k)
    {
      members.push_back(pts.size());
      pts.push_back(centers[c] + Vec3(u(rng), u(rng), 1.0 + u(rng)));
    }
    clusters.push_back(make_cluster(members, pts));
  }
}

bool contiguous(const std::vector<std::size_t>& cluster_seq, const std::vector<std::size_t>& tour_order)
{
  std::vector<std::size_t> blocks;
  for (const auto c : cluster_seq)
  {
    if (blocks.empty() || blocks.back() != c)
    {
      blocks.push_back(c);
    }
  }
  return blocks == tour_order;
}

JointConfig random_q(std::mt19937_64& rng)
{
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  JointConfig q{};
  for (auto& v : q)
  {
    v = u(rng);
  }
  return q;
}
}  // namespace

TEST_CASE("trivial tours")
{
  const std::vector<Vec3> none;
  const BaseTour t0 = base_tour_2opt(none, Vec3::Zero());
  CHECK(t0.order.empty());
  CHECK(t0.length == 0.0);

  const std::vector<Vec3> one{Vec3(3.0, 4.0, 1.0)};
  const BaseTour t1 = base_tour_2opt(one, Vec3::Zero());
  CHECK(t1.order == std::vector<std::size_t>{0});
  CHECK(t1.length == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("unit square perimeter")
{
  const std::vector<Vec3> corners{Vec3(1, 1, 0), Vec3(0, 1, 0), Vec3(1, 0, 0)};
  const BaseTour t = base_tour_2opt(corners, Vec3::Zero());
  CHECK(t.length == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(oracle::brute_tour(corners, Vec3::Zero()) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("2-opt tours against brute force and nearest neighbor")
{
  std::mt19937_64 rng(79);
  std::uniform_int_distribution<std::size_t> count(2, 8);
  for (int trial = 0; trial < 100; ++trial)
  {
    const auto pts = planar_points(rng, count(rng), 5.0);
    const Vec3 depot(0.3, -0.2, 0.0);
    const BaseTour t = base_tour_2opt(pts, depot, static_cast<std::uint64_t>(trial));
    const BaseTour nn = nearest_neighbor_tour(pts, depot);
    CHECK(is_permutation_of(t.order, pts.size()));
    CHECK(t.length == doctest::Approx(planar_tour_length(pts, depot, t.order)).epsilon(1e-12));
    CHECK(is_two_opt_optimal(pts, t));
    CHECK(t.length <= nn.length + 1e-12);
    CHECK(t.length >= oracle::brute_tour(pts, depot) - 1e-9);
  }
}

TEST_CASE("2-opt is deterministic per seed")
{
  std::mt19937_64 rng(83);
  const auto pts = planar_points(rng, 40, 10.0);
  for (std::uint64_t seed = 0; seed < 4; ++seed)
  {
    CHECK(base_tour_2opt(pts, Vec3::Zero(), seed).order == base_tour_2opt(pts, Vec3::Zero(), seed).order);
  }
}

TEST_CASE("2-opt optimality check detects a crossing")
{
  const std::vector<Vec3> pts{Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0)};
  BaseTour crossing;
  crossing.order = {1, 0, 2};
  crossing.length = planar_tour_length(pts, Vec3::Zero(), crossing.order);
  CHECK_FALSE(is_two_opt_optimal(pts, crossing));
}

TEST_CASE("stack offsets")
{
  // Two clusters of diameter 1, h_scale 2 -> h = 2; start 0, clusters at 2
  // and 4, end at 6.
  const std::vector<Vec3> pts{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(5, 5, 0), Vec3(5, 6, 0)};
  const std::vector<Cluster> clusters{make_cluster({0, 1}, pts), make_cluster({2, 3}, pts)};
  BaseTour tour;
  tour.order = {1, 0};
  const StackedTargets st = stack_clusters(clusters, tour, pts, 2.0, 0.5);
  CHECK(st.h == doctest::Approx(2.0).epsilon(1e-12));
  REQUIRE(st.points.size() == 6);
  CHECK((st.points.front() - Vec3::Zero()).norm() < 1e-12);
  CHECK((st.points.back() - Vec3(6, 0, 0)).norm() < 1e-12);
  for (std::size_t i = 1; i + 1 < st.points.size(); ++i)
  {
    const std::size_t cluster = st.cluster_of[i - 1];
    const std::size_t rank = cluster == 1 ? 0 : 1;
    const Vec3 expect = pts[st.target_of[i - 1]] - clusters[cluster].center + Vec3((rank + 1) * 2.0, 0, 0);
    CHECK((st.points[i] - expect).norm() < 1e-12);
  }
  CHECK_THROWS_AS(stack_clusters(clusters, tour, pts, 0.5, 0.5), InputError);
  BaseTour bad;
  bad.order = {0, 0};
  CHECK_THROWS_AS(stack_clusters(clusters, bad, pts, 2.0, 0.5), InputError);
}

TEST_CASE("singleton clusters use the fallback spacing")
{
  const std::vector<Vec3> pts{Vec3(0, 0, 0), Vec3(3, 0, 0)};
  const std::vector<Cluster> clusters{make_cluster({0}, pts), make_cluster({1}, pts)};
  BaseTour tour;
  tour.order = {0, 1};
  const StackedTargets st = stack_clusters(clusters, tour, pts, 1.5, 0.4);
  CHECK(st.h == doctest::Approx(0.4).epsilon(1e-12));
  const auto path = hamiltonian_path(st.points);
  CHECK(target_sequence(st, path) == std::vector<std::size_t>{0, 1});
}

TEST_CASE("collinear points come out in geometric order")
{
  const std::vector<Vec3> pts{Vec3(0, 0, 0), Vec3(2, 0, 0), Vec3(1, 0, 0), Vec3(3, 0, 0), Vec3(4, 0, 0)};
  CHECK(hamiltonian_path(pts) == std::vector<std::size_t>{0, 2, 1, 3, 4});
}

TEST_CASE("Hamiltonian paths match brute force")
{
  std::mt19937_64 rng(89);
  std::uniform_int_distribution<std::size_t> count(3, 10);
  for (int trial = 0; trial < 60; ++trial)
  {
    const auto pts = testutil::random_points(rng, count(rng), -1.0, 1.0);
    const auto path = hamiltonian_path(pts);
    REQUIRE(path.size() == pts.size());
    CHECK(path.front() == 0);
    CHECK(path.back() == pts.size() - 1);
    CHECK(is_permutation_of(path, pts.size()));
    CHECK(path_length(pts, path) == doctest::Approx(oracle::brute_path(pts)).epsilon(1e-12));
  }
}

TEST_CASE("large paths fall back to the heuristic")
{
  std::mt19937_64 rng(97);
  const auto pts = testutil::random_points(rng, kExactPathLimit + 12, -1.0, 1.0);
  const auto path = hamiltonian_path(pts);
  CHECK(path.front() == 0);
  CHECK(path.back() == pts.size() - 1);
  CHECK(is_permutation_of(path, pts.size()));
  // No fixed-end segment reversal shortens the path.
  const double len = path_length(pts, path);
  for (std::size_t i = 1; i + 1 < path.size(); ++i)
  {
    for (std::size_t j = i + 1; j + 1 < path.size(); ++j)
    {
      auto alt = path;
      std::reverse(alt.begin() + static_cast<std::ptrdiff_t>(i), alt.begin() + static_cast<std::ptrdiff_t>(j) + 1);
      CHECK(path_length(pts, alt) >= len - 1e-9);
    }
  }
}

TEST_CASE("stacked sequences are cluster-contiguous and exact on small stacks")
{
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 40; ++trial)
  {
    std::vector<Vec3> pts;
    std::vector<Cluster> clusters;
    const std::size_t count = 2 + static_cast<std::size_t>(trial % 3);
    random_clusters(rng, count, 3, pts, clusters);
    std::vector<Vec3> centers;
    for (const auto& c : clusters)
    {
      centers.push_back(c.center);
    }
    const BaseTour tour = base_tour_2opt(centers, Vec3::Zero());
    const double h_scale = trial % 2 == 0 ? 1.5 : 2.0;
    const StackedTargets st = stack_clusters(clusters, tour, pts, h_scale, 0.3);
    const auto path = hamiltonian_path(st.points);
    if (st.points.size() <= 10)
    {
      CHECK(path_length(st.points, path) == doctest::Approx(oracle::brute_path(st.points)).epsilon(1e-12));
    }
    std::vector<std::size_t> cluster_seq;
    for (std::size_t k = 1; k + 1 < path.size(); ++k)
    {
      cluster_seq.push_back(st.cluster_of[path[k] - 1]);
    }
    CHECK(contiguous(cluster_seq, tour.order));
    const auto seq = target_sequence(st, path);
    CHECK(is_permutation_of(seq, pts.size()));
  }
}

TEST_CASE("layered shortest path matches brute force")
{
  std::mt19937_64 rng(103);
  std::uniform_int_distribution<std::size_t> width(1, 4);
  std::uniform_int_distribution<std::size_t> depth(1, 5);
  std::uniform_real_distribution<double> wu(0.2, 2.0);
  for (int trial = 0; trial < 80; ++trial)
  {
    JointWeights w{};
    for (auto& x : w)
    {
      x = wu(rng);
    }
    std::vector<std::vector<JointConfig>> layers{{JointConfig{}}};
    const std::size_t inner = depth(rng);
    for (std::size_t l = 0; l < inner; ++l)
    {
      std::vector<JointConfig> layer;
      const std::size_t k = width(rng);
      for (std::size_t i = 0; i < k; ++i)
      {
        layer.push_back(random_q(rng));
      }
      layers.push_back(layer);
    }
    layers.push_back({JointConfig{}});
    const auto cost = [&](const JointConfig& a, const JointConfig& b) {
      double s = 0.0;
      for (int j = 0; j < kNumJoints; ++j)
      {
        s += w[j] * w[j] * (b[j] - a[j]) * (b[j] - a[j]);
      }
      return std::sqrt(s);
    };
    std::vector<std::size_t> best_choice;
    const double best = oracle::brute_layers(layers, cost, best_choice);
    const ConfigSequence seq = config_shortest_path(layers, w);
    CHECK(seq.total == doctest::Approx(best).epsilon(1e-12));
    CHECK(seq.choice == best_choice);
    REQUIRE(seq.legs.size() == layers.size() - 1);
    CHECK(std::accumulate(seq.legs.begin(), seq.legs.end(), 0.0) == doctest::Approx(seq.total).epsilon(1e-12));

    // Never worse than taking the first solution of every layer.
    double greedy = 0.0;
    for (std::size_t l = 1; l < layers.size(); ++l)
    {
      greedy += cost(layers[l - 1][0], layers[l][0]);
    }
    CHECK(seq.total <= greedy + 1e-12);
  }
}

TEST_CASE("singleton layers and zero weights")
{
  std::mt19937_64 rng(107);
  std::vector<std::vector<JointConfig>> single{{JointConfig{}}, {random_q(rng)}, {random_q(rng)}, {JointConfig{}}};
  const JointWeights ones{1, 1, 1, 1, 1, 1};
  const ConfigSequence s = config_shortest_path(single, ones);
  double expect = 0.0;
  for (std::size_t l = 1; l < single.size(); ++l)
  {
    expect += weighted_joint_distance(single[l - 1][0], single[l][0], ones);
  }
  CHECK(s.total == doctest::Approx(expect).epsilon(1e-12));

  std::vector<std::vector<JointConfig>> wide{{JointConfig{}}, {random_q(rng), random_q(rng)},
                                             {random_q(rng), random_q(rng), random_q(rng)}, {JointConfig{}}};
  const ConfigSequence z = config_shortest_path(wide, JointWeights{});
  CHECK(z.total == 0.0);
  CHECK(z.choice == std::vector<std::size_t>{0, 0, 0, 0});
}

TEST_CASE("empty layer names the unreachable target")
{
  std::vector<std::vector<JointConfig>> layers{{JointConfig{}}, {JointConfig{}}, {}, {JointConfig{}}};
  const std::vector<std::size_t> names{7, 42};
  try
  {
    config_shortest_path(layers, JointWeights{1, 1, 1, 1, 1, 1}, names);
    FAIL("expected InfeasibleError");
  }
  catch (const InfeasibleError& e)
  {
    CHECK(std::string(e.what()).find("target 42") != std::string::npos);
  }
  std::vector<std::vector<JointConfig>> two_starts{{JointConfig{}, JointConfig{}}, {JointConfig{}}};
  CHECK_THROWS_AS(config_shortest_path(two_starts, JointWeights{}), InputError);
}
