#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmseq/ballfit.hpp"
#include "mmseq/baseplacement.hpp"
#include "mmseq/clustering.hpp"
#include "mmseq/kinematics.hpp"
#include "mmseq/macs.hpp"

namespace mmseq
{
using Json = nlohmann::ordered_json;

/// Whole file as text; throws InputError if it cannot be read.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Parses a JSON document, reporting syntax errors as FormatError with the
/// 1-based line and column.
Json parse_json(const std::string& text, const std::string& what);

/// Targets: [{"position": [x, y, z], "direction": [dx, dy, dz]}, ...].
/// Directions within 1e-6 of unit length are renormalized; others, an empty
/// array and missing fields throw FormatError naming the entry.
std::vector<TaskPoint> parse_targets(const std::string& text);
Json targets_to_json(std::span<const TaskPoint> targets);

Json vec_to_json(const Vec3& v);
Vec3 vec_from_json(const Json& j, const std::string& field);

Json hull_to_json(const ConvexPolytope& hull);
ConvexPolytope hull_from_json(const Json& j);

Json segment_to_json(const BallSegment& seg);
BallSegment segment_from_json(const Json& j);

Json clusters_to_json(std::span<const Cluster> clusters);
std::vector<Cluster> clusters_from_json(const Json& j);

Json pose_to_json(const BasePose& pose);

/// Shortest decimal text that round-trips, for reports meant to be diffed.
std::string dump_json(const Json& j);
}  // namespace mmseq
