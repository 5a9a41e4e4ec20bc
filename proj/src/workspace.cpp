#include "pinch/workspace.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numbers>
#include <ostream>
#include <string>

#include "format.hpp"
#include "hash.hpp"
#include "pinch/errors.hpp"
#include "pinch/parallel.hpp"

namespace pinch {

std::string_view to_string(SamplingConvention s) {
  switch (s) {
    case SamplingConvention::MinInclusive: return "min-inclusive";
    case SamplingConvention::MaxInclusive: return "max-inclusive";
    case SamplingConvention::Midpoint: return "midpoint";
  }
  return "min-inclusive";
}

SamplingConvention sampling_from_string(std::string_view s) {
  if (s == "min-inclusive") return SamplingConvention::MinInclusive;
  if (s == "max-inclusive") return SamplingConvention::MaxInclusive;
  if (s == "midpoint") return SamplingConvention::Midpoint;
  throw ConfigError("unknown sampling convention '" + std::string(s) + "'");
}

Resolution resolution_from_number(int n) {
  if (n < 1 || n > 3) throw ConfigError("resolution must be 1, 2 or 3, got " + std::to_string(n));
  return static_cast<Resolution>(n);
}

std::optional<std::size_t> samples_for_width(Resolution level, double width_radians) {
  const double deg = width_radians * 180.0 / std::numbers::pi;
  struct Row { double width; std::size_t counts[3]; };
  static constexpr Row table[] = {{90.0, {9, 18, 30}}, {60.0, {6, 12, 20}}, {130.0, {11, 22, 33}}};
  for (const Row& r : table) {
    if (std::abs(deg - r.width) < 1e-6) return r.counts[static_cast<int>(level) - 1];
  }
  return std::nullopt;
}

ConfigurationGrid::ConfigurationGrid(std::vector<std::vector<double>> axes) : axes_(std::move(axes)) {
  strides_.assign(axes_.size(), 1);
  size_ = axes_.empty() ? 0 : 1;
  for (std::size_t k = axes_.size(); k-- > 0;) {
    if (axes_[k].empty()) throw ConfigError("grid axis " + std::to_string(k) + " has no samples");
    strides_[k] = size_;
    size_ *= axes_[k].size();
  }
}

std::vector<std::size_t> ConfigurationGrid::counts() const {
  std::vector<std::size_t> c;
  c.reserve(axes_.size());
  for (const auto& a : axes_) c.push_back(a.size());
  return c;
}

void ConfigurationGrid::decode(std::size_t index, std::span<double> q) const {
  if (q.size() != axes_.size()) throw ContractViolation("configuration buffer has wrong length");
  if (index >= size_) throw ContractViolation("grid index out of range");
  for (std::size_t k = 0; k < axes_.size(); ++k) {
    q[k] = axes_[k][(index / strides_[k]) % axes_[k].size()];
  }
}

std::vector<double> ConfigurationGrid::configuration(std::size_t index) const {
  std::vector<double> q(axes_.size());
  decode(index, q);
  return q;
}

std::vector<std::size_t> ConfigurationGrid::digits(std::size_t index) const {
  if (index >= size_) throw ContractViolation("grid index out of range");
  std::vector<std::size_t> d(axes_.size());
  for (std::size_t k = 0; k < axes_.size(); ++k) d[k] = (index / strides_[k]) % axes_[k].size();
  return d;
}

ConfigurationGrid grid(const JointRangeSet& ranges, const ResolutionPolicy& policy) {
  if (!policy.explicit_counts.empty() && policy.explicit_counts.size() != ranges.size()) {
    throw ConfigError("explicit sample counts: expected " + std::to_string(ranges.size()) + " values");
  }
  std::vector<std::vector<double>> axes;
  axes.reserve(ranges.size());
  for (std::size_t k = 0; k < ranges.size(); ++k) {
    const JointRange& r = ranges[k];
    if (!(r.min < r.max)) throw ConfigError("joint range " + std::to_string(k) + " needs min < max");
    std::size_t n = 0;
    if (!policy.explicit_counts.empty()) {
      n = policy.explicit_counts[k];
    } else if (policy.level) {
      const auto found = samples_for_width(*policy.level, r.width());
      if (!found) {
        throw ConfigError("no sample count for a " + std::to_string(r.width() * 180.0 / std::numbers::pi) +
                          " degree range; give explicit counts");
      }
      n = *found;
    } else {
      throw ConfigError("resolution policy has neither a level nor explicit counts");
    }
    if (n < 2) throw ConfigError("sample counts must be at least 2");

    const double step = r.width() / static_cast<double>(n);
    const double shift = policy.sampling == SamplingConvention::MinInclusive   ? 0.0
                         : policy.sampling == SamplingConvention::MaxInclusive ? 1.0
                                                                               : 0.5;
    std::vector<double> axis(n);
    for (std::size_t i = 0; i < n; ++i) axis[i] = r.min + (static_cast<double>(i) + shift) * step;
    if (policy.sampling == SamplingConvention::MaxInclusive) axis.back() = r.max;
    axes.push_back(std::move(axis));
  }
  return ConfigurationGrid(std::move(axes));
}

FingertipSample SampleSet::sample(std::size_t k) const {
  if (k >= size()) throw ContractViolation("sample index out of range");
  FingertipSample s;
  s.finger = finger;
  s.grid_index = k;
  s.distal_joint = distal_joints[k];
  s.tip = tips[k];
  s.direction = directions[k];
  if (has_phalanges()) {
    const auto pts = phalanges(k);
    s.phalanx_points.assign(pts.begin(), pts.end());
  }
  return s;
}

namespace {

// Per-row transform tables: fixed rows have one entry, actuated rows one per axis sample.
struct RowTables {
  std::vector<std::vector<Transform4>> table;
  std::vector<int> joint_of_row;      // -1 for fixed rows
  std::vector<std::size_t> first_row;  // first row driven by each joint
};

RowTables build_tables(const KinematicChain& chain, const ConfigurationGrid& g) {
  RowTables t;
  t.first_row.assign(chain.actuated_count, chain.rows.size());
  for (std::size_t r = 0; r < chain.rows.size(); ++r) {
    const DhRow& row = chain.rows[r];
    if (const auto* j = std::get_if<ActuatedJoint>(&row.theta)) {
      std::vector<Transform4> entries;
      for (double theta : g.axes()[j->index]) entries.push_back(dh_transform(row, theta));
      t.table.push_back(std::move(entries));
      t.joint_of_row.push_back(static_cast<int>(j->index));
      t.first_row[j->index] = std::min(t.first_row[j->index], r);
    } else {
      t.table.push_back({dh_transform(row, 0.0)});
      t.joint_of_row.push_back(-1);
    }
  }
  return t;
}

}  // namespace

SampleSet enumerate_samples(const HandModel& model, FingerId finger, const ConfigurationGrid& g,
                            const EnumerationOptions& options) {
  const KinematicChain& chain = model.chain(finger);
  if (g.joint_count() != chain.actuated_count) {
    throw ContractViolation("grid has " + std::to_string(g.joint_count()) + " joints, " +
                            std::string(to_string(finger)) + " chain has " + std::to_string(chain.actuated_count));
  }
  const JointRangeSet& ranges = model.joint_ranges(finger);
  for (std::size_t k = 0; k < g.joint_count(); ++k) {
    for (double v : g.axes()[k]) {
      if (v < ranges[k].min || v > ranges[k].max) {
        throw ContractViolation("grid sample outside the model's range for joint " + std::to_string(k));
      }
    }
  }

  SampleSet set;
  set.finger = finger;
  set.grid = g;
  set.model_fingerprint = model.fingerprint();
  const std::size_t n = g.size();
  set.distal_joints.resize(n);
  set.tips.resize(n);
  set.directions.resize(n);
  if (options.with_phalanges) {
    set.points_per_sample = chain.phalanx_frames.size();
    set.phalanx_points.resize(n * set.points_per_sample);
  }

  const RowTables tables = build_tables(chain, g);
  const std::size_t rows = chain.rows.size();
  const std::size_t joints = g.joint_count();
  const auto counts = g.counts();

  parallel_chunks(n, options.workers, options.chunk_size, [&](std::size_t begin, std::size_t end, std::size_t, unsigned) {
    std::vector<std::size_t> digit = g.digits(begin);
    std::vector<Transform4> prefix(rows);
    std::size_t dirty_from = 0;
    for (std::size_t k = begin; k < end; ++k) {
      for (std::size_t r = dirty_from; r < rows; ++r) {
        const int j = tables.joint_of_row[r];
        const Transform4& step = tables.table[r][j < 0 ? 0 : digit[static_cast<std::size_t>(j)]];
        prefix[r] = (r == 0 ? Transform4{} : prefix[r - 1]) * step;
      }
      set.tips[k] = prefix[rows - 1].translation;
      set.distal_joints[k] = prefix[rows - 2].translation;
      set.directions[k] = unit_direction(set.distal_joints[k], set.tips[k]);
      if (options.with_phalanges) {
        Vec3* out = set.phalanx_points.data() + k * set.points_per_sample;
        for (std::size_t frame : chain.phalanx_frames) *out++ = prefix[frame - 1].translation;
      }

      // Advance the mixed-radix counter; rows before the lowest changed joint keep their prefix.
      std::size_t jj = joints;
      while (jj-- > 0) {
        if (++digit[jj] < counts[jj]) break;
        digit[jj] = 0;
      }
      dirty_from = jj < joints ? tables.first_row[jj] : 0;
    }
  });
  return set;
}

std::vector<Vec3> reachable_cloud(const SampleSet& set) { return set.tips; }

void write_cloud_csv(std::ostream& out, const SampleSet& set) {
  out << "finger,grid_index,x,y,z\n";
  const std::string name(to_string(set.finger));
  for (std::size_t k = 0; k < set.size(); ++k) {
    const Vec3& p = set.tips[k];
    out << name << ',' << k << ',' << detail::format_double(p.x()) << ',' << detail::format_double(p.y()) << ','
        << detail::format_double(p.z()) << '\n';
  }
}

std::uint64_t sample_set_key(const HandModel& model, FingerId finger, const ConfigurationGrid& g,
                             bool with_phalanges) {
  detail::Fnv1a h;
  h.add_u64(model.fingerprint());
  h.add_u64(index_of(finger));
  h.add_u64(with_phalanges ? 1 : 0);
  for (const auto& axis : g.axes()) {
    h.add_u64(axis.size());
    for (double v : axis) h.add_double(v);
  }
  return h.value();
}

namespace {

constexpr char kMagic[8] = {'P', 'I', 'N', 'C', 'H', 'S', 'S', '\0'};
constexpr std::uint32_t kFormatVersion = 1;

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw IoError("cannot open '" + path.string() + "' for writing");
  }
  void bytes(const void* p, std::size_t n) { out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n)); }
  void u32(std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    bytes(b, 4);
  }
  void u64(std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    bytes(b, 8);
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void vectors(const std::vector<Vec3>& v) {
    if constexpr (std::endian::native == std::endian::little) {
      bytes(v.data(), v.size() * sizeof(Vec3));
    } else {
      for (const Vec3& p : v) { f64(p.x()); f64(p.y()); f64(p.z()); }
    }
  }
  void finish() {
    out_.flush();
    if (!out_) throw IoError("write failed for '" + path_.string() + "'");
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw IoError("cannot open '" + path.string() + "'");
  }
  void bytes(void* p, std::size_t n) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (!in_) throw IoError("truncated sample set '" + path_.string() + "'");
  }
  std::uint32_t u32() {
    unsigned char b[4];
    bytes(b, 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    unsigned char b[8];
    bytes(b, 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  void vectors(std::vector<Vec3>& v, std::size_t n) {
    v.resize(n);
    if constexpr (std::endian::native == std::endian::little) {
      bytes(v.data(), n * sizeof(Vec3));
    } else {
      for (Vec3& p : v) { p.x() = f64(); p.y() = f64(); p.z() = f64(); }
    }
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
};

static_assert(sizeof(Vec3) == 3 * sizeof(double));

}  // namespace

void save_sample_set(const std::filesystem::path& path, const SampleSet& set) {
  Writer w(path);
  w.bytes(kMagic, sizeof kMagic);
  w.u32(kFormatVersion);
  w.u32(static_cast<std::uint32_t>(index_of(set.finger)));
  w.u64(set.model_fingerprint);
  w.u32(static_cast<std::uint32_t>(set.grid.joint_count()));
  for (const auto& axis : set.grid.axes()) {
    w.u64(axis.size());
    for (double v : axis) w.f64(v);
  }
  w.u64(set.size());
  w.u32(static_cast<std::uint32_t>(set.points_per_sample));
  w.vectors(set.distal_joints);
  w.vectors(set.tips);
  w.vectors(set.directions);
  w.vectors(set.phalanx_points);
  w.finish();
}

SampleSet load_sample_set(const std::filesystem::path& path) {
  Reader r(path);
  char magic[8];
  r.bytes(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw IoError("'" + path.string() + "' is not a sample set");
  if (const auto v = r.u32(); v != kFormatVersion) {
    throw IoError("'" + path.string() + "' has unsupported format version " + std::to_string(v));
  }
  SampleSet set;
  const auto finger = r.u32();
  if (finger > 4) throw IoError("'" + path.string() + "' has an invalid finger id");
  set.finger = static_cast<FingerId>(finger);
  set.model_fingerprint = r.u64();
  const auto joints = r.u32();
  if (joints > 16) throw IoError("'" + path.string() + "' has an implausible joint count");
  std::vector<std::vector<double>> axes(joints);
  for (auto& axis : axes) {
    const auto n = r.u64();
    if (n == 0 || n > (1u << 20)) throw IoError("'" + path.string() + "' has an implausible axis length");
    axis.resize(n);
    for (double& v : axis) v = r.f64();
  }
  set.grid = ConfigurationGrid(std::move(axes));
  const auto n = r.u64();
  if (n != set.grid.size()) throw IoError("'" + path.string() + "' sample count does not match its grid");
  set.points_per_sample = r.u32();
  r.vectors(set.distal_joints, n);
  r.vectors(set.tips, n);
  r.vectors(set.directions, n);
  r.vectors(set.phalanx_points, n * set.points_per_sample);
  return set;
}

}  // namespace pinch
