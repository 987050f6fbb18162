#include <cmath>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mmseq/errors.hpp"
#include "mmseq/io.hpp"
#include "mmseq/pipeline.hpp"
#include "mmseq/targets.hpp"

namespace
{
using namespace mmseq;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitInvariant = 4;

constexpr double kDeg = std::numbers::pi / 180.0;

// Flag values as typed; converted to a PipelineConfig after parsing.
struct PipelineFlags
{
  std::string chain;
  std::vector<double> region;
  double resolution = 0.04;
  double theta = 10.0;  // degrees
  std::optional<double> x_offset;
  std::optional<double> z_offset;
  std::optional<double> diameter;
  std::string delta_mode = "planar";
  double h_scale = 1.5;
  std::vector<double> joint_weights;
  std::uint64_t seed = 1;
  std::vector<double> depot;
  unsigned threads = 0;
};

void add_chain_flags(CLI::App* app, PipelineFlags& f)
{
  app->add_option("--chain", f.chain, "chain JSON file (default: bundled generic-6r)");
  app->add_option("--theta", f.theta, "half-angle of the approach pyramid, degrees")->capture_default_str();
  app->add_option("--seed", f.seed, "seed for IK restarts and tour scans")->capture_default_str();
}

void add_fkr_flags(CLI::App* app, PipelineFlags& f)
{
  app->add_option("--region", f.region, "voxel region: xmin ymin zmin xmax ymax zmax (base frame, m)")->expected(6);
  app->add_option("--resolution", f.resolution, "voxel edge length, m")->capture_default_str();
  app->add_option("--threads", f.threads, "worker threads, 0 = all cores")->capture_default_str();
}

void add_plane_flags(CLI::App* app, PipelineFlags& f)
{
  app->add_option("--x_offset", f.x_offset, "collision plane: -c.x + r <= x_offset (m)");
  app->add_option("--z_offset", f.z_offset, "collision plane: -c.z + r <= z_offset (m)");
}

void add_sequence_flags(CLI::App* app, PipelineFlags& f)
{
  app->add_option("--h_scale", f.h_scale, "stack spacing factor, >= 1")->capture_default_str();
  app->add_option("--joint_weights", f.joint_weights, "six joint-distance weights")->expected(6);
  app->add_option("--depot", f.depot, "depot position x y z (m)")->expected(3);
}

DeltaMode parse_delta_mode(const std::string& s)
{
  if (s == "planar")
  {
    return DeltaMode::Planar;
  }
  if (s == "safe")
  {
    return DeltaMode::Safe;
  }
  throw InputError("delta_mode must be 'planar' or 'safe'");
}

PipelineConfig to_config(const PipelineFlags& f)
{
  PipelineConfig c;
  c.chain = f.chain;
  if (!f.region.empty())
  {
    c.region = AxisBox{Vec3(f.region[0], f.region[1], f.region[2]), Vec3(f.region[3], f.region[4], f.region[5])};
  }
  c.resolution = f.resolution;
  c.theta = f.theta * kDeg;
  c.planes.x_offset = f.x_offset;
  c.planes.z_offset = f.z_offset;
  c.diameter = f.diameter;
  c.delta_mode = parse_delta_mode(f.delta_mode);
  c.h_scale = f.h_scale;
  if (!f.joint_weights.empty())
  {
    std::copy(f.joint_weights.begin(), f.joint_weights.end(), c.joint_weights.begin());
  }
  c.seed = f.seed;
  if (!f.depot.empty())
  {
    c.depot = Vec3(f.depot[0], f.depot[1], f.depot[2]);
  }
  c.threads = f.threads;
  validate_config(c);
  return c;
}

// Flat "key = value" file; keys are flag names without dashes. Flags given on
// the command line win.
void apply_config_file(CLI::App* app, const std::string& path)
{
  std::vector<CLI::ConfigItem> items;
  try
  {
    items = CLI::ConfigTOML().from_file(path);
  }
  catch (const CLI::Error& e)
  {
    throw InputError("config file " + path + ": " + e.what());
  }
  for (const auto& item : items)
  {
    CLI::Option* opt = item.parents.empty() ? app->get_option_no_throw("--" + item.name) : nullptr;
    if (opt == nullptr || item.name == "config")
    {
      throw InputError("config file " + path + ": unknown key '" + item.fullname() + "'");
    }
    if (opt->count() == 0)
    {
      try
      {
        opt->add_result(item.inputs);
        opt->run_callback();
      }
      catch (const CLI::Error& e)
      {
        throw InputError("config file " + path + ": key '" + item.name + "': " + e.what());
      }
    }
  }
}

void emit(const std::string& path, const std::string& text)
{
  if (path.empty() || path == "-")
  {
    std::cout << text;
  }
  else
  {
    write_text_file(path, text);
  }
}

ConvexPolytope read_hull(const std::string& path)
{
  const Json doc = parse_json(read_text_file(path), path);
  return hull_from_json(doc.is_object() && doc.contains("hull") ? doc.at("hull") : doc);
}

BallSegment read_segment(const std::string& path)
{
  const Json doc = parse_json(read_text_file(path), path);
  return segment_from_json(doc.is_object() && doc.contains("ball_segment") ? doc.at("ball_segment") : doc);
}

std::vector<Cluster> read_clusters(const std::string& path)
{
  const Json doc = parse_json(read_text_file(path), path);
  return clusters_from_json(doc.is_object() && doc.contains("clusters") ? doc.at("clusters") : doc);
}

int exit_code(ErrorKind kind)
{
  switch (kind)
  {
  case ErrorKind::Input:
    return kExitInput;
  case ErrorKind::Infeasible:
    return kExitInfeasible;
  case ErrorKind::Invariant:
    return kExitInvariant;
  }
  return kExitInvariant;
}

struct GenFlags
{
  std::string kind = "curved-wall";
  std::size_t n = 183;
  std::uint64_t seed = 1;
  double theta_spread = 5.0;  // degrees
  double theta = 10.0;        // degrees
  double radius = 3.0;
  double arc = 120.0;  // degrees
  double depth = 0.3;
  double z_min = 0.9;
  double z_max = 1.2;
};
}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Mobile-manipulator target clustering, base placement and sequencing"};
  app.require_subcommand(1);
  std::string output;

  PipelineFlags flags;
  std::string targets_path;
  std::string fkr_path;
  std::string hull_path;
  std::string config_path;
  std::string plot_path;
  bool stable = false;

  auto* build = app.add_subcommand("build-fkr", "build the reachability voxel database");
  add_chain_flags(build, flags);
  add_fkr_flags(build, flags);
  build->add_option("-o,--output", output, "database file")->required();

  auto* macs = app.add_subcommand("macs", "maximal digitally convex subset of a database, as half-spaces");
  macs->add_option("--fkr", fkr_path, "database file")->required();
  macs->add_option("-o,--output", output, "hull JSON (default stdout)");

  double z_min = NAN;
  double z_max = NAN;
  auto* fit = app.add_subcommand("fit-balls", "largest ball segment inside a hull");
  fit->add_option("--hull", hull_path, "hull JSON")->required();
  fit->add_option("--targets", targets_path, "targets JSON; heights span their z range");
  fit->add_option("--z_min", z_min, "bottom height (m)");
  fit->add_option("--z_max", z_max, "top height (m)");
  add_plane_flags(fit, flags);
  fit->add_option("--diameter", flags.diameter, "diameter override, at most the fitted one");
  fit->add_option("-o,--output", output, "segment JSON (default stdout)");

  auto* cluster = app.add_subcommand("cluster", "group targets into ball-sized clusters");
  cluster->add_option("--targets", targets_path, "targets JSON")->required();
  cluster->add_option("--diameter", flags.diameter, "ball diameter (m)")->required();
  cluster->add_option("--delta_mode", flags.delta_mode, "planar | safe")->capture_default_str();
  cluster->add_option("-o,--output", output, "clusters JSON (default stdout)");

  std::string clusters_path;
  std::string segment_path;
  auto* sequence = app.add_subcommand("sequence", "base poses, base tour, target order and joint configurations");
  sequence->add_option("--targets", targets_path, "targets JSON")->required();
  sequence->add_option("--clusters", clusters_path, "clusters JSON")->required();
  sequence->add_option("--segment", segment_path, "ball segment JSON")->required();
  sequence->add_option("--fkr", fkr_path, "database file, for the voxel check in the report");
  add_chain_flags(sequence, flags);
  add_sequence_flags(sequence, flags);
  sequence->add_option("-o,--output", output, "result JSON (default stdout)");

  auto* run = app.add_subcommand("run", "whole pipeline");
  run->add_option("--targets", targets_path, "targets JSON")->required();
  run->add_option("--config", config_path, "flat key = value file with flag values");
  run->add_option("--fkr", fkr_path, "prebuilt database (skips the build)");
  run->add_option("--hull", hull_path, "prebuilt hull (skips the convex subset search)");
  add_chain_flags(run, flags);
  add_fkr_flags(run, flags);
  add_plane_flags(run, flags);
  run->add_option("--diameter", flags.diameter, "ball diameter override (m)");
  run->add_option("--delta_mode", flags.delta_mode, "planar | safe")->capture_default_str();
  add_sequence_flags(run, flags);
  run->add_flag("--stable", stable, "omit wall-clock timings");
  run->add_option("--plot", plot_path, "also write plot data JSON here");
  run->add_option("-o,--output", output, "result JSON (default stdout)");

  GenFlags gen;
  auto* gen_cmd = app.add_subcommand("gen-targets", "synthetic targets");
  gen_cmd->add_option("--kind", gen.kind, "curved-wall | grid | random-shell")->capture_default_str();
  gen_cmd->add_option("--n", gen.n, "number of targets")->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed)->capture_default_str();
  gen_cmd->add_option("--theta_spread", gen.theta_spread, "max tilt from the wall normal, degrees")
      ->capture_default_str();
  gen_cmd->add_option("--theta", gen.theta, "bound for theta_spread, degrees")->capture_default_str();
  gen_cmd->add_option("--radius", gen.radius, "wall distance from the z axis (m)")->capture_default_str();
  gen_cmd->add_option("--arc", gen.arc, "angular extent of the wall, degrees")->capture_default_str();
  gen_cmd->add_option("--depth", gen.depth, "random-shell thickness (m)")->capture_default_str();
  gen_cmd->add_option("--z_min", gen.z_min, "lowest target height (m)")->capture_default_str();
  gen_cmd->add_option("--z_max", gen.z_max, "highest target height (m)")->capture_default_str();
  gen_cmd->add_option("-o,--output", output, "targets JSON (default stdout)");

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::CallForHelp& e)
  {
    return app.exit(e);
  }
  catch (const CLI::CallForAllHelp& e)
  {
    return app.exit(e);
  }
  catch (const CLI::ParseError& e)
  {
    app.exit(e);
    return kExitInput;
  }

  try
  {
    if (*build)
    {
      const PipelineConfig config = to_config(flags);
      const KinematicChain chain = chain_for(config);
      const FkrDatabase db = build_fkr_for(config, chain);
      write_fkr_file(db, output);
      std::cerr << "marked " << db.grid.count() << " of " << db.grid.size() << " voxels\n";
    }
    else if (*macs)
    {
      const FkrDatabase db = read_fkr_file(fkr_path);
      if (db.grid.count() == 0)
      {
        throw InfeasibleError("database has no reachable voxel");
      }
      const MacsResult r = find_macs(DigitalSet::from_grid(db.grid));
      Json doc{{"voxels", r.subset.size()},
               {"input_voxels", db.grid.count()},
               {"peel_steps", r.peel_steps},
               {"restored", r.restored},
               {"hull", hull_to_json(r.hull)}};
      emit(output, dump_json(doc));
    }
    else if (*fit)
    {
      PipelineConfig config = to_config(flags);
      const ConvexPolytope hull = read_hull(hull_path);
      BallSegment seg;
      if (!targets_path.empty())
      {
        seg = fit_for_targets(hull, parse_targets(read_text_file(targets_path)), config);
      }
      else
      {
        if (std::isnan(z_min) || std::isnan(z_max))
        {
          throw InputError("fit-balls: give --targets or both --z_min and --z_max");
        }
        seg = fit_ball_segment(hull, z_min, z_max, config.planes);
        if (config.diameter)
        {
          if (*config.diameter > seg.diameter + 1e-12)
          {
            throw InfeasibleError("requested diameter exceeds the largest fitting diameter");
          }
          seg.diameter = *config.diameter;
        }
      }
      emit(output, dump_json(Json{{"ball_segment", segment_to_json(seg)},
                                  {"containment_violation", segment_containment_violation(hull, seg)}}));
    }
    else if (*cluster)
    {
      const PipelineConfig config = to_config(flags);
      const std::vector<TaskPoint> targets = parse_targets(read_text_file(targets_path));
      const std::vector<Cluster> clusters = cluster_targets(targets, *config.diameter, config.delta_mode);
      emit(output, dump_json(Json{{"diameter", *config.diameter},
                                  {"delta", delta_from_diameter(*config.diameter, config.delta_mode)},
                                  {"clusters", clusters_to_json(clusters)}}));
    }
    else if (*sequence)
    {
      const PipelineConfig config = to_config(flags);
      const KinematicChain chain = chain_for(config);
      const std::vector<TaskPoint> targets = parse_targets(read_text_file(targets_path));
      PipelineResult r;
      r.chain_id = chain.name();
      r.target_count = targets.size();
      r.segment = read_segment(segment_path);
      r.clusters = read_clusters(clusters_path);
      FkrDatabase db;
      db.theta = config.theta;
      if (!fkr_path.empty())
      {
        db = read_fkr_file(fkr_path);
        check_fkr_matches(db, chain, config.theta);
      }
      r.placements = place_bases(r.clusters, targets, r.segment, db);
      r.sequence = sequence_targets(targets, r.clusters, r.placements, chain, config, r.segment.diameter);
      Json doc = result_to_json(r, true);
      doc.erase("fkr");
      doc.erase("macs");
      emit(output, dump_json(doc));
    }
    else if (*run)
    {
      if (!config_path.empty())
      {
        apply_config_file(run, config_path);
      }
      const PipelineConfig config = to_config(flags);
      const std::vector<TaskPoint> targets = parse_targets(read_text_file(targets_path));
      std::optional<FkrDatabase> db;
      if (!fkr_path.empty())
      {
        db = read_fkr_file(fkr_path);
      }
      std::optional<ConvexPolytope> hull;
      if (!hull_path.empty())
      {
        hull = read_hull(hull_path);
      }
      const PipelineResult r = run_pipeline(config, targets, db ? &*db : nullptr, hull ? &*hull : nullptr);
      emit(output, dump_json(result_to_json(r, stable)));
      if (!plot_path.empty())
      {
        write_text_file(plot_path, dump_json(plot_data(r, targets)));
      }
    }
    else if (*gen_cmd)
    {
      TargetGenParams p;
      p.kind = parse_target_kind(gen.kind);
      p.n = gen.n;
      p.seed = gen.seed;
      p.theta_spread = gen.theta_spread * kDeg;
      p.theta = gen.theta * kDeg;
      p.radius = gen.radius;
      p.arc = gen.arc * kDeg;
      p.depth = gen.depth;
      p.z_min = gen.z_min;
      p.z_max = gen.z_max;
      emit(output, dump_json(targets_to_json(generate_targets(p))));
    }
  }
  catch (const StageError& e)
  {
    std::cerr << "error [" << e.stage() << "]: " << e.what() << "\n";
    return exit_code(e.kind());
  }
  catch (const InputError& e)
  {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  }
  catch (const InfeasibleError& e)
  {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  }
  catch (const std::exception& e)
  {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInvariant;
  }
  return kExitOk;
}
