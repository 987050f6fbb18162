#include "mmseq/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "mmseq/errors.hpp"

namespace mmseq
{
namespace
{
std::pair<std::size_t, std::size_t> line_and_column(const std::string& text, std::size_t byte)
{
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
  {
    if (text[i] == '\n')
    {
      ++line;
      column = 1;
    }
    else
    {
      ++column;
    }
  }
  return {line, column};
}

double number_at(const Json& j, const std::string& field)
{
  if (!j.is_number())
  {
    throw FormatError(field + ": expected a number");
  }
  const double v = j.get<double>();
  if (!std::isfinite(v))
  {
    throw FormatError(field + ": expected a finite number");
  }
  return v;
}

const Json& member(const Json& j, const char* key, const std::string& where)
{
  if (!j.is_object() || !j.contains(key))
  {
    throw FormatError(where + ": missing field '" + key + "'");
  }
  return j.at(key);
}
}  // namespace

std::string read_text_file(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
  {
    throw InputError("cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text)
{
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text))
  {
    throw InputError("cannot write " + path.string());
  }
}

Json parse_json(const std::string& text, const std::string& what)
{
  try
  {
    return Json::parse(text);
  }
  catch (const nlohmann::json::parse_error& e)
  {
    const auto [line, column] = line_and_column(text, e.byte > 0 ? e.byte - 1 : 0);
    throw FormatError(what + ": JSON syntax error at line " + std::to_string(line) + ", column " +
                      std::to_string(column));
  }
}

Json vec_to_json(const Vec3& v)
{
  return Json::array({v.x(), v.y(), v.z()});
}

Vec3 vec_from_json(const Json& j, const std::string& field)
{
  if (!j.is_array() || j.size() != 3)
  {
    throw FormatError(field + ": expected an array of 3 numbers");
  }
  return Vec3(number_at(j[0], field), number_at(j[1], field), number_at(j[2], field));
}

std::vector<TaskPoint> parse_targets(const std::string& text)
{
  const Json doc = parse_json(text, "targets");
  if (!doc.is_array())
  {
    throw FormatError("targets: top level must be an array");
  }
  if (doc.empty())
  {
    throw FormatError("targets: no targets");
  }
  std::vector<TaskPoint> out;
  out.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i)
  {
    const std::string where = "targets[" + std::to_string(i) + "]";
    const Vec3 p = vec_from_json(member(doc[i], "position", where), where + ".position");
    const Vec3 d = vec_from_json(member(doc[i], "direction", where), where + ".direction");
    if (std::abs(d.norm() - 1.0) > 1e-6)
    {
      throw FormatError(where + ".direction: not a unit vector (norm " + std::to_string(d.norm()) + ")");
    }
    out.push_back(TaskPoint{p, UnitVec3::normalized(d)});
  }
  return out;
}

Json targets_to_json(std::span<const TaskPoint> targets)
{
  Json doc = Json::array();
  for (const auto& t : targets)
  {
    doc.push_back(Json{{"position", vec_to_json(t.position)}, {"direction", vec_to_json(t.direction.vec())}});
  }
  return doc;
}

Json hull_to_json(const ConvexPolytope& hull)
{
  Json doc = Json::array();
  for (const auto& h : hull.halfspaces)
  {
    doc.push_back(Json{{"normal", vec_to_json(h.normal.vec())}, {"offset", h.offset}});
  }
  return doc;
}

ConvexPolytope hull_from_json(const Json& j)
{
  if (!j.is_array())
  {
    throw FormatError("hull: expected an array of half-spaces");
  }
  ConvexPolytope hull;
  for (std::size_t i = 0; i < j.size(); ++i)
  {
    const std::string where = "hull[" + std::to_string(i) + "]";
    const Vec3 n = vec_from_json(member(j[i], "normal", where), where + ".normal");
    if (std::abs(n.norm() - 1.0) > 1e-6)
    {
      throw FormatError(where + ".normal: not a unit vector");
    }
    hull.halfspaces.push_back(
        Halfspace{UnitVec3::normalized(n), number_at(member(j[i], "offset", where), where + ".offset")});
  }
  return hull;
}

Json segment_to_json(const BallSegment& seg)
{
  return Json{{"bottom", vec_to_json(seg.bottom)}, {"top", vec_to_json(seg.top)}, {"diameter", seg.diameter}};
}

BallSegment segment_from_json(const Json& j)
{
  BallSegment seg;
  seg.bottom = vec_from_json(member(j, "bottom", "segment"), "segment.bottom");
  seg.top = vec_from_json(member(j, "top", "segment"), "segment.top");
  seg.diameter = number_at(member(j, "diameter", "segment"), "segment.diameter");
  if (!(seg.diameter >= 0.0))
  {
    throw FormatError("segment.diameter: must be non-negative");
  }
  return seg;
}

Json clusters_to_json(std::span<const Cluster> clusters)
{
  Json doc = Json::array();
  for (const auto& c : clusters)
  {
    doc.push_back(Json{{"members", c.members}, {"center", vec_to_json(c.center)}, {"radius", c.radius}});
  }
  return doc;
}

std::vector<Cluster> clusters_from_json(const Json& j)
{
  if (!j.is_array())
  {
    throw FormatError("clusters: expected an array");
  }
  std::vector<Cluster> out;
  for (std::size_t i = 0; i < j.size(); ++i)
  {
    const std::string where = "clusters[" + std::to_string(i) + "]";
    Cluster c;
    const Json& members = member(j[i], "members", where);
    if (!members.is_array() || members.empty())
    {
      throw FormatError(where + ".members: expected a non-empty array");
    }
    for (const auto& m : members)
    {
      if (!m.is_number_unsigned())
      {
        throw FormatError(where + ".members: expected non-negative integers");
      }
      c.members.push_back(m.get<std::size_t>());
    }
    c.center = vec_from_json(member(j[i], "center", where), where + ".center");
    c.radius = number_at(member(j[i], "radius", where), where + ".radius");
    out.push_back(std::move(c));
  }
  return out;
}

Json pose_to_json(const BasePose& pose)
{
  return Json{{"x", pose.x}, {"y", pose.y}, {"yaw_rad", pose.yaw}};
}

std::string dump_json(const Json& j)
{
  return j.dump(2) + "\n";
}
}  // namespace mmseq
