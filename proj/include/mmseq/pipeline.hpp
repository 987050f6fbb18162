#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mmseq/ballfit.hpp"
#include "mmseq/baseplacement.hpp"
#include "mmseq/clustering.hpp"
#include "mmseq/fkr.hpp"
#include "mmseq/io.hpp"
#include "mmseq/kinematics.hpp"
#include "mmseq/macs.hpp"
#include "mmseq/sequencing.hpp"

namespace mmseq
{
struct PipelineConfig
{
  std::string chain;  // chain file; empty selects the bundled chain
  std::optional<AxisBox> region;
  double resolution = 0.04;
  double theta = 10.0 * std::numbers::pi / 180.0;
  CollisionPlanes planes;
  std::optional<double> diameter;  // must not exceed the fitted diameter
  DeltaMode delta_mode = DeltaMode::Planar;
  double h_scale = 1.5;
  JointWeights joint_weights{1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
  std::uint64_t seed = 1;
  Vec3 depot = Vec3::Zero();
  IkParams ik;
  unsigned threads = 0;
};

/// Throws InputError unless resolution > 0, theta in [0, 90 deg), h_scale >= 1
/// and every joint weight is finite and non-negative.
void validate_config(const PipelineConfig& config);

KinematicChain chain_for(const PipelineConfig& config);

struct StageTimings
{
  double v_fkr = 0.0;
  double m_fkr = 0.0;
  double ball_fit = 0.0;
  double clustering = 0.0;    // includes base placement
  double tour_finding = 0.0;  // includes IK
};

struct ClusterPlacement
{
  Vec3 ball_center = Vec3::Zero();  // base frame
  BasePose pose;
  ReachabilityReport report;
};

struct SequenceResult
{
  BaseTour tour;
  StackedTargets stack;
  std::vector<std::size_t> targets;  // visiting order
  double stacked_length = 0.0;
  ConfigSequence configs;  // home, one per target, home
};

struct PipelineResult
{
  std::string chain_id;
  std::size_t target_count = 0;
  std::size_t fkr_marked = 0;
  MacsResult macs;
  BallSegment segment;
  double delta = 0.0;
  std::vector<Cluster> clusters;
  std::vector<ClusterPlacement> placements;
  SequenceResult sequence;
  StageTimings timings;
};

FkrDatabase build_fkr_for(const PipelineConfig& config, const KinematicChain& chain);

/// Throws InputError if a loaded database was built for another chain or theta.
void check_fkr_matches(const FkrDatabase& db, const KinematicChain& chain, double theta);

/// Ball segment spanning the target heights; applies the diameter override.
BallSegment fit_for_targets(const ConvexPolytope& hull, std::span<const TaskPoint> targets,
                            const PipelineConfig& config);

std::vector<Cluster> cluster_targets(std::span<const TaskPoint> targets, double d, DeltaMode mode);

std::vector<ClusterPlacement> place_bases(std::span<const Cluster> clusters, std::span<const TaskPoint> targets,
                                          const BallSegment& seg, const FkrDatabase& db);

SequenceResult sequence_targets(std::span<const TaskPoint> targets, std::span<const Cluster> clusters,
                                std::span<const ClusterPlacement> placements, const KinematicChain& chain,
                                const PipelineConfig& config, double d);

/// fkr -> macs -> ballfit -> cluster -> base placement -> sequence. Stage
/// failures are rethrown as StageError carrying the stage name. A supplied
/// database or hull replaces the corresponding offline stage.
PipelineResult run_pipeline(const PipelineConfig& config, const std::vector<TaskPoint>& targets,
                            const FkrDatabase* fkr = nullptr, const ConvexPolytope* hull = nullptr);

/// With `stable` set, wall-clock timings are left out so equal inputs give
/// byte-identical output.
Json result_to_json(const PipelineResult& result, bool stable);

/// Positions and poses in the world frame for external plotting.
Json plot_data(const PipelineResult& result, std::span<const TaskPoint> targets);
}  // namespace mmseq
