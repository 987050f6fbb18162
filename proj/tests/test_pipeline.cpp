#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "mmseq/errors.hpp"
#include "mmseq/io.hpp"
#include "mmseq/pipeline.hpp"
#include "mmseq/targets.hpp"

using namespace mmseq;

namespace
{
constexpr double kDeg = std::numbers::pi / 180.0;

PipelineConfig coarse_config()
{
  PipelineConfig c;
  c.resolution = 0.08;
  c.threads = 1;
  return c;
}

std::vector<TaskPoint> wall_targets(std::size_t n, std::uint64_t seed)
{
  TargetGenParams p;
  p.n = n;
  p.seed = seed;
  p.theta = 10.0 * kDeg;
  p.theta_spread = 5.0 * kDeg;
  return generate_targets(p);
}

// One coarse run shared by the end-to-end cases.
const PipelineResult& shared_run()
{
  static const PipelineResult r = run_pipeline(coarse_config(), wall_targets(183, 1));
  return r;
}
}  // namespace

TEST_CASE("targets JSON parsing")
{
  const auto t = parse_targets(R"([{"position": [1, 2, 3], "direction": [0, 0, 1.0000001]}])");
  REQUIRE(t.size() == 1);
  CHECK((t[0].position - Vec3(1, 2, 3)).norm() == 0.0);
  CHECK(t[0].direction.vec().norm() == doctest::Approx(1.0).epsilon(1e-15));

  CHECK_THROWS_AS(parse_targets("[]"), FormatError);
  CHECK_THROWS_AS(parse_targets(R"([{"position": [1, 2, 3]}])"), FormatError);
  CHECK_THROWS_AS(parse_targets(R"([{"position": [1, 2], "direction": [1, 0, 0]}])"), FormatError);
  CHECK_THROWS_AS(parse_targets(R"([{"position": [1, 2, 3], "direction": [2, 0, 0]}])"), FormatError);
  CHECK_THROWS_AS(parse_targets(R"({"position": [1, 2, 3]})"), FormatError);
  try
  {
    parse_targets("[\n  {\"position\": [1, 2,, 3]}\n]");
    FAIL("expected FormatError");
  }
  catch (const FormatError& e)
  {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("targets round-trip through JSON")
{
  const auto t = wall_targets(20, 3);
  const auto back = parse_targets(dump_json(targets_to_json(t)));
  REQUIRE(back.size() == t.size());
  for (std::size_t i = 0; i < t.size(); ++i)
  {
    CHECK((back[i].position - t[i].position).norm() == 0.0);
    CHECK((back[i].direction.vec() - t[i].direction.vec()).norm() == 0.0);
  }
}

TEST_CASE("target generator")
{
  for (const auto kind : {TargetKind::CurvedWall, TargetKind::Grid, TargetKind::RandomShell})
  {
    TargetGenParams p;
    p.kind = kind;
    p.n = 50;
    p.seed = 9;
    p.theta = 10.0 * kDeg;
    p.theta_spread = 7.0 * kDeg;
    const auto a = generate_targets(p);
    const auto b = generate_targets(p);
    REQUIRE(a.size() == 50);
    for (std::size_t i = 0; i < a.size(); ++i)
    {
      CHECK((a[i].position - b[i].position).norm() == 0.0);
      CHECK(a[i].position.z() >= p.z_min - 1e-12);
      CHECK(a[i].position.z() <= p.z_max + 1e-12);
      // Tilt from the horizontal outward normal stays within the spread.
      Vec3 normal = kind == TargetKind::Grid ? Vec3::UnitX() : Vec3(a[i].position.x(), a[i].position.y(), 0.0);
      normal.normalize();
      const double tilt = std::acos(std::clamp(a[i].direction.vec().dot(normal), -1.0, 1.0));
      CHECK(tilt <= p.theta_spread + 1e-9);
    }
  }
  CHECK(parse_target_kind("grid") == TargetKind::Grid);
  CHECK_THROWS_AS(parse_target_kind("spiral"), InputError);
  TargetGenParams bad;
  bad.theta = 5.0 * kDeg;
  bad.theta_spread = 6.0 * kDeg;
  CHECK_THROWS_AS(generate_targets(bad), InputError);
  bad.theta_spread = 0.0;
  bad.n = 0;
  CHECK_THROWS_AS(generate_targets(bad), InputError);
}

TEST_CASE("config validation")
{
  PipelineConfig c;
  CHECK_NOTHROW(validate_config(c));
  c.h_scale = 0.9;
  CHECK_THROWS_AS(validate_config(c), InputError);
  c = PipelineConfig{};
  c.resolution = 0.0;
  CHECK_THROWS_AS(validate_config(c), InputError);
  c = PipelineConfig{};
  c.joint_weights[2] = -1.0;
  CHECK_THROWS_AS(validate_config(c), InputError);
}

TEST_CASE("end to end: every cluster is placed and validated")
{
  const PipelineResult& r = shared_run();
  const auto targets = wall_targets(183, 1);
  REQUIRE(r.target_count == 183);
  REQUIRE(r.placements.size() == r.clusters.size());
  CHECK(r.segment.diameter > 0.0);

  std::vector<int> seen(targets.size(), 0);
  for (std::size_t k = 0; k < r.clusters.size(); ++k)
  {
    const Cluster& c = r.clusters[k];
    const ClusterPlacement& p = r.placements[k];
    for (const auto i : c.members)
    {
      ++seen[i];
    }
    // The matched ball center lands on the cluster center.
    CHECK((p.pose.world_from_base().apply(p.ball_center) - c.center).norm() <= 1e-9);
    CHECK(2.0 * c.radius <= r.segment.diameter + 1e-9);
    CHECK(p.report.all_in_ball());
    for (const auto& t : p.report.targets)
    {
      CHECK(t.ball_distance <= 0.5 * r.segment.diameter + 1e-9);
    }
  }
  CHECK(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));
}

TEST_CASE("end to end: sequences")
{
  const PipelineResult& r = shared_run();
  const SequenceResult& s = r.sequence;
  CHECK(s.tour.order.size() == r.clusters.size());
  REQUIRE(s.targets.size() == r.target_count);
  CHECK(std::set<std::size_t>(s.targets.begin(), s.targets.end()).size() == r.target_count);

  // Targets follow the base tour one cluster at a time.
  std::vector<std::size_t> cluster_of(r.target_count);
  for (std::size_t k = 0; k < r.clusters.size(); ++k)
  {
    for (const auto i : r.clusters[k].members)
    {
      cluster_of[i] = k;
    }
  }
  std::vector<std::size_t> blocks;
  for (const auto t : s.targets)
  {
    if (blocks.empty() || blocks.back() != cluster_of[t])
    {
      blocks.push_back(cluster_of[t]);
    }
  }
  CHECK(blocks == s.tour.order);

  // Home, one configuration per target, home.
  CHECK(s.configs.configs.size() == r.target_count + 2);
  CHECK(s.configs.total >= 0.0);
}

TEST_CASE("end to end: stable output is reproducible")
{
  const auto targets = wall_targets(40, 5);
  const PipelineConfig c = coarse_config();
  const std::string a = dump_json(result_to_json(run_pipeline(c, targets), true));
  const std::string b = dump_json(result_to_json(run_pipeline(c, targets), true));
  CHECK(a == b);
  CHECK(a.find("timings") == std::string::npos);
  CHECK(dump_json(result_to_json(shared_run(), false)).find("timings_s") != std::string::npos);
}

TEST_CASE("stage errors carry the stage name")
{
  const auto targets = wall_targets(10, 2);
  PipelineConfig c = coarse_config();
  c.h_scale = 0.5;
  try
  {
    run_pipeline(c, targets);
    FAIL("expected StageError");
  }
  catch (const StageError& e)
  {
    CHECK(e.stage() == "config");
    CHECK(e.kind() == ErrorKind::Input);
  }

  c = coarse_config();
  c.diameter = 10.0;
  try
  {
    run_pipeline(c, targets, nullptr, &shared_run().macs.hull);
    FAIL("expected StageError");
  }
  catch (const StageError& e)
  {
    CHECK(e.stage() == "ballfit");
    CHECK(e.kind() == ErrorKind::Infeasible);
  }
}
