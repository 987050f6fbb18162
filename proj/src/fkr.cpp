#include "mmseq/fkr.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "mmseq/errors.hpp"
#include "parallel.hpp"

namespace mmseq
{
VoxelGrid::VoxelGrid(const Vec3& origin, double resolution, const Index3& dims)
    : origin_(origin), resolution_(resolution), dims_(dims)
{
  if (!(resolution > 0.0) || !std::isfinite(resolution))
  {
    throw InputError("voxel grid: resolution must be positive");
  }
  if (dims[0] <= 0 || dims[1] <= 0 || dims[2] <= 0)
  {
    throw InputError("voxel grid: dimensions must be positive");
  }
  bits_.assign((size() + 63) / 64, 0);
}

Index3 VoxelGrid::index_of(std::size_t linear) const
{
  const auto nx = static_cast<std::size_t>(dims_[0]);
  const auto ny = static_cast<std::size_t>(dims_[1]);
  return {static_cast<int>(linear % nx), static_cast<int>((linear / nx) % ny),
          static_cast<int>(linear / (nx * ny))};
}

bool VoxelGrid::contains_index(const Index3& idx) const
{
  for (int a = 0; a < 3; ++a)
  {
    if (idx[a] < 0 || idx[a] >= dims_[a])
    {
      return false;
    }
  }
  return true;
}

Vec3 VoxelGrid::center(const Index3& idx) const
{
  return origin_ + resolution_ * Vec3(idx[0] + 0.5, idx[1] + 0.5, idx[2] + 0.5);
}

bool VoxelGrid::locate(const Vec3& p, Index3& idx) const
{
  for (int a = 0; a < 3; ++a)
  {
    const double f = std::floor((p[a] - origin_[a]) / resolution_);
    if (!(f >= 0.0 && f < dims_[a]))
    {
      return false;
    }
    idx[a] = static_cast<int>(f);
  }
  return true;
}

void VoxelGrid::set(std::size_t linear, bool value)
{
  const std::uint64_t mask = 1ULL << (linear & 63);
  if (value)
  {
    bits_[linear >> 6] |= mask;
  }
  else
  {
    bits_[linear >> 6] &= ~mask;
  }
}

std::size_t VoxelGrid::count() const
{
  std::size_t n = 0;
  for (auto w : bits_)
  {
    n += static_cast<std::size_t>(std::popcount(w));
  }
  return n;
}

std::vector<Index3> VoxelGrid::marked() const
{
  std::vector<Index3> out;
  for (std::size_t i = 0; i < size(); ++i)
  {
    if (get(i))
    {
      out.push_back(index_of(i));
    }
  }
  return out;
}

std::vector<UnitVec3> bounding_directions(double theta)
{
  if (!(theta >= 0.0 && theta < std::numbers::pi / 2))
  {
    throw InputError("bounding_directions: theta must be in [0, pi/2)");
  }
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const std::array<Vec3, 4> raw{Vec3(c, 0.0, s), Vec3(c, 0.0, -s), Vec3(c, s, 0.0),
                                Vec3(c, -s, 0.0)};
  std::vector<UnitVec3> out;
  for (const auto& v : raw)
  {
    const UnitVec3 u = UnitVec3::normalized(v);
    const bool duplicate = std::any_of(out.begin(), out.end(), [&](const UnitVec3& o) {
      return (o.vec() - u.vec()).norm() <= 1e-12;
    });
    if (!duplicate)
    {
      out.push_back(u);
    }
  }
  return out;
}

AxisBox default_region(const KinematicChain& chain)
{
  const Vec3 s = chain.shoulder();
  const double r = chain.reach_bound();
  return AxisBox{Vec3(s.x(), s.y() - r, s.z()), Vec3(s.x() + r, s.y() + r, s.z() + r)};
}

FkrDatabase build_fkr(const ReachabilityBackend& backend, const AxisBox& region,
                      const std::vector<UnitVec3>& r_ext, const FkrBuildOptions& options)
{
  if (r_ext.empty())
  {
    throw InputError("build_fkr: r_ext must not be empty");
  }
  if (!(options.resolution > 0.0))
  {
    throw InputError("build_fkr: resolution must be positive");
  }
  const Vec3 extent = region.max - region.min;
  if (!extent.allFinite() || !(extent.minCoeff() > 0.0))
  {
    throw InputError("build_fkr: region has zero volume");
  }
  Index3 dims;
  for (int a = 0; a < 3; ++a)
  {
    dims[a] = std::max(1, static_cast<int>(std::ceil(extent[a] / options.resolution - 1e-9)));
  }
  FkrDatabase db;
  db.grid = VoxelGrid(region.min, options.resolution, dims);
  db.r_ext = r_ext;
  db.theta = options.theta;
  db.chain_id = backend.identifier();

  std::vector<std::uint8_t> marks(db.grid.size(), 0);
  detail::parallel_for(db.grid.size(), options.threads, [&](std::size_t i) {
    const Vec3 c = db.grid.center(db.grid.index_of(i));
    const std::uint64_t seed = mix_seed(options.seed, i);
    for (const auto& dir : r_ext)
    {
      if (!backend.reachable(TaskPoint{c, dir}, seed))
      {
        return;
      }
    }
    marks[i] = 1;
  });
  for (std::size_t i = 0; i < marks.size(); ++i)
  {
    if (marks[i])
    {
      db.grid.set(i, true);
    }
  }
  return db;
}

namespace
{
constexpr char kMagic[8] = {'M', 'M', 'S', 'Q', 'F', 'K', 'R', '\0'};

class Writer
{
public:
  void bytes(const void* data, std::size_t n)
  {
    const auto* p = static_cast<const std::uint8_t*>(data);
    out_.insert(out_.end(), p, p + n);
  }
  void u32(std::uint32_t v)
  {
    for (int i = 0; i < 4; ++i)
    {
      out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
  }
  void f64(double v)
  {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i)
    {
      out_.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
    }
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

private:
  std::vector<std::uint8_t> out_;
};

class Reader
{
public:
  explicit Reader(const std::vector<std::uint8_t>& in) : in_(in) {}

  const std::uint8_t* take(std::size_t n)
  {
    if (n > in_.size() - pos_)
    {
      throw FormatError("fkr file truncated");
    }
    const std::uint8_t* p = in_.data() + pos_;
    pos_ += n;
    return p;
  }
  std::uint32_t u32()
  {
    const auto* p = take(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
    {
      v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    }
    return v;
  }
  double f64()
  {
    const auto* p = take(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
    {
      v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    }
    return std::bit_cast<double>(v);
  }
  bool at_end() const { return pos_ == in_.size(); }

private:
  const std::vector<std::uint8_t>& in_;
  std::size_t pos_ = 0;
};
}  // namespace

std::vector<std::uint8_t> save_fkr(const FkrDatabase& db)
{
  Writer w;
  w.bytes(kMagic, sizeof(kMagic));
  w.u32(db.version);
  w.u32(static_cast<std::uint32_t>(db.chain_id.size()));
  w.bytes(db.chain_id.data(), db.chain_id.size());
  w.f64(db.theta);
  w.u32(static_cast<std::uint32_t>(db.r_ext.size()));
  for (const auto& d : db.r_ext)
  {
    w.f64(d.x());
    w.f64(d.y());
    w.f64(d.z());
  }
  for (int a = 0; a < 3; ++a)
  {
    w.f64(db.grid.origin()[a]);
  }
  w.f64(db.grid.resolution());
  for (int a = 0; a < 3; ++a)
  {
    w.u32(static_cast<std::uint32_t>(db.grid.dims()[a]));
  }
  const std::size_t n = db.grid.size();
  std::vector<std::uint8_t> packed((n + 7) / 8, 0);
  for (std::size_t i = 0; i < n; ++i)
  {
    if (db.grid.get(i))
    {
      packed[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
    }
  }
  w.bytes(packed.data(), packed.size());
  return w.take();
}

FkrDatabase load_fkr(const std::vector<std::uint8_t>& bytes)
{
  Reader r(bytes);
  if (std::memcmp(r.take(sizeof(kMagic)), kMagic, sizeof(kMagic)) != 0)
  {
    throw FormatError("not an fkr file (bad magic)");
  }
  FkrDatabase db;
  db.version = r.u32();
  if (db.version != FkrDatabase::kFormatVersion)
  {
    throw FormatError("unsupported fkr format version " + std::to_string(db.version));
  }
  const std::uint32_t id_len = r.u32();
  const auto* id = r.take(id_len);
  db.chain_id.assign(reinterpret_cast<const char*>(id), id_len);
  db.theta = r.f64();
  const std::uint32_t n_dirs = r.u32();
  if (n_dirs == 0)
  {
    throw FormatError("fkr file has no bounding directions");
  }
  for (std::uint32_t i = 0; i < n_dirs; ++i)
  {
    const double x = r.f64();
    const double y = r.f64();
    const double z = r.f64();
    try
    {
      db.r_ext.emplace_back(Vec3(x, y, z));
    }
    catch (const InvariantError&)
    {
      throw FormatError("fkr file holds a non-unit direction");
    }
  }
  Vec3 origin;
  for (int a = 0; a < 3; ++a)
  {
    origin[a] = r.f64();
  }
  const double resolution = r.f64();
  Index3 dims;
  for (int a = 0; a < 3; ++a)
  {
    const std::uint32_t d = r.u32();
    if (d == 0 || d > (1u << 20))
    {
      throw FormatError("fkr file has invalid grid dimensions");
    }
    dims[a] = static_cast<int>(d);
  }
  try
  {
    db.grid = VoxelGrid(origin, resolution, dims);
  }
  catch (const InputError& e)
  {
    throw FormatError(std::string("fkr file: ") + e.what());
  }
  const std::size_t n = db.grid.size();
  const auto* packed = r.take((n + 7) / 8);
  for (std::size_t i = 0; i < n; ++i)
  {
    if (packed[i / 8] & (1u << (i % 8)))
    {
      db.grid.set(i, true);
    }
  }
  if (!r.at_end())
  {
    throw FormatError("fkr file has trailing bytes");
  }
  return db;
}

void write_fkr_file(const FkrDatabase& db, const std::string& path)
{
  const auto bytes = save_fkr(db);
  std::ofstream out(path, std::ios::binary);
  if (!out)
  {
    throw InputError("cannot write " + path);
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

FkrDatabase read_fkr_file(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
  {
    throw InputError("cannot open " + path);
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return load_fkr(bytes);
}
}  // namespace mmseq
