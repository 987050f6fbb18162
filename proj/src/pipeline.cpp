#include "mmseq/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "mmseq/errors.hpp"

namespace mmseq
{
namespace
{
class Stopwatch
{
public:
  double seconds() const
  {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

template <typename Fn>
auto in_stage(const char* stage, Fn&& fn) -> decltype(fn())
{
  try
  {
    return fn();
  }
  catch (const StageError&)
  {
    throw;
  }
  catch (const InputError& e)
  {
    throw StageError(stage, ErrorKind::Input, e.what());
  }
  catch (const InfeasibleError& e)
  {
    throw StageError(stage, ErrorKind::Infeasible, e.what());
  }
  catch (const InvariantError& e)
  {
    throw StageError(stage, ErrorKind::Invariant, e.what());
  }
}

std::vector<Vec3> positions_of(std::span<const TaskPoint> targets)
{
  std::vector<Vec3> out;
  out.reserve(targets.size());
  for (const auto& t : targets)
  {
    out.push_back(t.position);
  }
  return out;
}

void check_result(const PipelineResult& r)
{
  std::vector<int> seen(r.target_count, 0);
  for (const auto t : r.sequence.targets)
  {
    if (t >= r.target_count || seen[t]++ > 0)
    {
      throw InvariantError("target sequence is not a permutation of the targets");
    }
  }
  if (r.sequence.targets.size() != r.target_count || r.placements.size() != r.clusters.size())
  {
    throw InvariantError("result cross-references are inconsistent");
  }
}
}  // namespace

void validate_config(const PipelineConfig& c)
{
  if (!(c.resolution > 0.0) || !std::isfinite(c.resolution))
  {
    throw InputError("config: resolution must be positive");
  }
  if (!(c.theta >= 0.0 && c.theta < 0.5 * std::numbers::pi))
  {
    throw InputError("config: theta must lie in [0, 90) degrees");
  }
  if (!(c.h_scale >= 1.0) || !std::isfinite(c.h_scale))
  {
    throw InputError("config: h_scale must be >= 1");
  }
  for (const double w : c.joint_weights)
  {
    if (!(w >= 0.0) || !std::isfinite(w))
    {
      throw InputError("config: joint weights must be finite and non-negative");
    }
  }
  if (c.diameter && !(*c.diameter > 0.0))
  {
    throw InputError("config: diameter must be positive");
  }
}

KinematicChain chain_for(const PipelineConfig& config)
{
  return config.chain.empty() ? bundled_test_chain() : load_chain(config.chain);
}

FkrDatabase build_fkr_for(const PipelineConfig& config, const KinematicChain& chain)
{
  FkrBuildOptions options;
  options.resolution = config.resolution;
  options.theta = config.theta;
  options.seed = config.seed;
  options.threads = config.threads;
  const ChainBackend backend(chain, config.ik);
  return build_fkr(backend, config.region.value_or(default_region(chain)), bounding_directions(config.theta),
                   options);
}

void check_fkr_matches(const FkrDatabase& db, const KinematicChain& chain, double theta)
{
  if (db.chain_id != chain.name())
  {
    throw InputError("fkr database was built for chain '" + db.chain_id + "', not '" + chain.name() + "'");
  }
  if (std::abs(db.theta - theta) > 1e-12)
  {
    throw InputError("fkr database was built for theta " + std::to_string(db.theta) + " rad, not " +
                     std::to_string(theta) + " rad");
  }
}

BallSegment fit_for_targets(const ConvexPolytope& hull, std::span<const TaskPoint> targets,
                            const PipelineConfig& config)
{
  if (targets.empty())
  {
    throw InputError("no targets");
  }
  double z_min = std::numeric_limits<double>::infinity();
  double z_max = -std::numeric_limits<double>::infinity();
  for (const auto& t : targets)
  {
    z_min = std::min(z_min, t.position.z());
    z_max = std::max(z_max, t.position.z());
  }
  BallSegment seg = fit_ball_segment(hull, z_min, z_max, config.planes);
  if (config.diameter)
  {
    if (*config.diameter > seg.diameter + 1e-12)
    {
      throw InfeasibleError("requested diameter " + std::to_string(*config.diameter) +
                            " exceeds the largest fitting diameter " + std::to_string(seg.diameter));
    }
    seg.diameter = *config.diameter;
  }
  return seg;
}

std::vector<Cluster> cluster_targets(std::span<const TaskPoint> targets, double d, DeltaMode mode)
{
  const std::vector<Vec3> pts = positions_of(targets);
  const ProximityGraph g = build_graph(pts, delta_from_diameter(d, mode));
  return verify_and_split(clique_cover(g), pts, d);
}

std::vector<ClusterPlacement> place_bases(std::span<const Cluster> clusters, std::span<const TaskPoint> targets,
                                          const BallSegment& seg, const FkrDatabase& db)
{
  std::vector<ClusterPlacement> out;
  out.reserve(clusters.size());
  for (const auto& c : clusters)
  {
    std::vector<UnitVec3> dirs;
    for (const auto m : c.members)
    {
      dirs.push_back(targets[m].direction);
    }
    ClusterPlacement p;
    p.ball_center = match_ball(c.center.z(), seg);
    p.pose = base_transform(cluster_frame(c.center, dirs), p.ball_center);
    p.report = validate_reachability(c.members, targets, p.pose, p.ball_center, seg.diameter, db);
    out.push_back(std::move(p));
  }
  return out;
}

SequenceResult sequence_targets(std::span<const TaskPoint> targets, std::span<const Cluster> clusters,
                                std::span<const ClusterPlacement> placements, const KinematicChain& chain,
                                const PipelineConfig& config, double d)
{
  SequenceResult r;
  std::vector<Vec3> bases;
  for (const auto& p : placements)
  {
    bases.emplace_back(p.pose.x, p.pose.y, 0.0);
  }
  r.tour = base_tour_2opt(bases, config.depot, config.seed);
  const std::vector<Vec3> pts = positions_of(targets);
  r.stack = stack_clusters(clusters, r.tour, pts, config.h_scale, d);
  const std::vector<std::size_t> path = hamiltonian_path(r.stack.points);
  r.stacked_length = path_length(r.stack.points, path);
  r.targets = target_sequence(r.stack, path);

  std::vector<std::size_t> cluster_of(targets.size());
  for (std::size_t c = 0; c < clusters.size(); ++c)
  {
    for (const auto m : clusters[c].members)
    {
      cluster_of[m] = c;
    }
  }
  const JointConfig home{};
  std::vector<std::vector<JointConfig>> layers{{home}};
  for (const auto t : r.targets)
  {
    const RigidTransform base_from_world = transform_invert(placements[cluster_of[t]].pose.world_from_base());
    const TaskPoint local{base_from_world.apply(targets[t].position),
                          UnitVec3::normalized(base_from_world.apply_direction(targets[t].direction.vec()))};
    IkParams ik = config.ik;
    ik.seed = mix_seed(config.seed, t);
    layers.push_back(ik_solutions(chain, local, ik));
  }
  layers.push_back({home});
  r.configs = config_shortest_path(layers, config.joint_weights, r.targets);
  return r;
}

PipelineResult run_pipeline(const PipelineConfig& config, const std::vector<TaskPoint>& targets,
                            const FkrDatabase* fkr, const ConvexPolytope* hull)
{
  in_stage("config", [&] { validate_config(config); });
  if (targets.empty())
  {
    throw StageError("targets", ErrorKind::Input, "no targets");
  }
  PipelineResult r;
  r.target_count = targets.size();
  const KinematicChain chain = in_stage("chain", [&] { return chain_for(config); });
  r.chain_id = chain.name();

  Stopwatch fkr_clock;
  const FkrDatabase db = in_stage("fkr", [&] {
    if (fkr)
    {
      check_fkr_matches(*fkr, chain, config.theta);
      return *fkr;
    }
    return build_fkr_for(config, chain);
  });
  r.fkr_marked = db.grid.count();
  r.timings.v_fkr = fkr_clock.seconds();

  Stopwatch macs_clock;
  in_stage("macs", [&] {
    if (hull)
    {
      r.macs.hull = *hull;
      return;
    }
    if (db.grid.count() == 0)
    {
      throw InfeasibleError("fkr database has no reachable voxel");
    }
    r.macs = find_macs(DigitalSet::from_grid(db.grid));
  });
  r.timings.m_fkr = macs_clock.seconds();

  Stopwatch fit_clock;
  r.segment = in_stage("ballfit", [&] { return fit_for_targets(r.macs.hull, targets, config); });
  r.timings.ball_fit = fit_clock.seconds();

  Stopwatch cluster_clock;
  in_stage("cluster", [&] {
    r.delta = delta_from_diameter(r.segment.diameter, config.delta_mode);
    r.clusters = cluster_targets(targets, r.segment.diameter, config.delta_mode);
  });
  r.placements = in_stage("baseplacement", [&] { return place_bases(r.clusters, targets, r.segment, db); });
  r.timings.clustering = cluster_clock.seconds();

  Stopwatch tour_clock;
  r.sequence = in_stage("sequence", [&] {
    return sequence_targets(targets, r.clusters, r.placements, chain, config, r.segment.diameter);
  });
  r.timings.tour_finding = tour_clock.seconds();

  in_stage("result", [&] { check_result(r); });
  return r;
}

Json result_to_json(const PipelineResult& r, bool stable)
{
  Json doc;
  doc["chain"] = r.chain_id;
  doc["targets"] = r.target_count;
  doc["fkr"] = Json{{"marked_voxels", r.fkr_marked}};
  doc["macs"] = Json{{"voxels", r.macs.subset.size()},
                     {"halfspaces", r.macs.hull.halfspaces.size()},
                     {"peel_steps", r.macs.peel_steps},
                     {"restored", r.macs.restored}};
  doc["ball_segment"] = segment_to_json(r.segment);
  doc["delta"] = r.delta;
  doc["clusters"] = clusters_to_json(r.clusters);

  Json poses = Json::array();
  Json centers = Json::array();
  Json validation_clusters = Json::array();
  bool all_in_ball = true;
  bool all_marked = true;
  bool all_directions = true;
  for (std::size_t c = 0; c < r.placements.size(); ++c)
  {
    const auto& p = r.placements[c];
    poses.push_back(pose_to_json(p.pose));
    centers.push_back(vec_to_json(p.ball_center));
    Json checks = Json::array();
    for (const auto& t : p.report.targets)
    {
      checks.push_back(Json{{"target", t.target},
                            {"ball_distance", t.ball_distance},
                            {"in_ball", t.in_ball},
                            {"voxel_marked", t.voxel_marked},
                            {"direction_angle_rad", t.direction_angle},
                            {"direction_ok", t.direction_ok}});
    }
    validation_clusters.push_back(Json{{"cluster", c}, {"targets", checks}});
    all_in_ball = all_in_ball && p.report.all_in_ball();
    all_marked = all_marked && p.report.all_marked();
    all_directions = all_directions && p.report.all_directions_ok();
  }
  doc["base_poses"] = poses;
  doc["matched_ball_centers"] = centers;

  const auto& s = r.sequence;
  doc["base_tour"] = Json{{"order", s.tour.order}, {"depot", vec_to_json(s.tour.depot)}, {"length", s.tour.length}};
  doc["stack_spacing"] = s.stack.h;
  doc["target_sequence"] = s.targets;
  Json configs = Json::array();
  for (std::size_t i = 1; i + 1 < s.configs.configs.size(); ++i)
  {
    configs.push_back(s.configs.configs[i]);
  }
  doc["config_sequence"] = configs;
  doc["lengths"] = Json{{"base_tour", s.tour.length},
                        {"stacked_path", s.stacked_length},
                        {"joint_space_total", s.configs.total},
                        {"joint_space_legs", s.configs.legs}};
  doc["validation"] = Json{{"all_in_ball", all_in_ball},
                           {"all_voxels_marked", all_marked},
                           {"all_directions_within_theta", all_directions},
                           {"clusters", validation_clusters}};
  if (!stable)
  {
    doc["timings_s"] = Json{{"V_fkr", r.timings.v_fkr},
                            {"M_fkr", r.timings.m_fkr},
                            {"ball_fit", r.timings.ball_fit},
                            {"clustering", r.timings.clustering},
                            {"tour_finding", r.timings.tour_finding}};
  }
  return doc;
}

Json plot_data(const PipelineResult& r, std::span<const TaskPoint> targets)
{
  Json doc;
  doc["targets"] = targets_to_json(targets);
  Json clusters = Json::array();
  for (std::size_t c = 0; c < r.clusters.size(); ++c)
  {
    const auto& p = r.placements[c];
    const RigidTransform w = p.pose.world_from_base();
    clusters.push_back(Json{{"members", r.clusters[c].members},
                            {"center", vec_to_json(r.clusters[c].center)},
                            {"radius", r.clusters[c].radius},
                            {"base", vec_to_json(w.translation())},
                            {"base_heading", vec_to_json(w.rotation().col(0))},
                            {"ball_center_world", vec_to_json(w.apply(p.ball_center))}});
  }
  doc["clusters"] = clusters;
  Json base_path = Json::array({vec_to_json(r.sequence.tour.depot)});
  for (const auto c : r.sequence.tour.order)
  {
    base_path.push_back(vec_to_json(Vec3(r.placements[c].pose.x, r.placements[c].pose.y, 0.0)));
  }
  base_path.push_back(vec_to_json(r.sequence.tour.depot));
  doc["base_path"] = base_path;
  Json target_path = Json::array();
  for (const auto t : r.sequence.targets)
  {
    target_path.push_back(vec_to_json(targets[t].position));
  }
  doc["target_path"] = target_path;
  return doc;
}
}  // namespace mmseq
