#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "pinch/hand_model.hpp"
#include "pinch/kinematics.hpp"

namespace pinch {

enum class Resolution { Res1 = 1, Res2 = 2, Res3 = 3 };

/// Where the N samples of a range sit: min + i*w/N, min + (i+1)*w/N, or min + (i+0.5)*w/N.
enum class SamplingConvention { MinInclusive, MaxInclusive, Midpoint };

std::string_view to_string(SamplingConvention s);
SamplingConvention sampling_from_string(std::string_view s);
Resolution resolution_from_number(int n);

/// Published sample count for a range width (90, 60 or 130 degrees); nullopt for other widths.
std::optional<std::size_t> samples_for_width(Resolution level, double width_radians);

struct ResolutionPolicy {
  std::optional<Resolution> level;
  /// Per-joint counts; when non-empty they take precedence over `level`.
  std::vector<std::size_t> explicit_counts;
  SamplingConvention sampling = SamplingConvention::MinInclusive;

  static ResolutionPolicy named(Resolution r, SamplingConvention s = SamplingConvention::MinInclusive) {
    return ResolutionPolicy{r, {}, s};
  }
};

/// Row-major grid over joint samples: the last joint varies fastest.
class ConfigurationGrid {
 public:
  ConfigurationGrid() = default;
  explicit ConfigurationGrid(std::vector<std::vector<double>> axes);

  std::size_t size() const { return size_; }
  std::size_t joint_count() const { return axes_.size(); }
  const std::vector<std::vector<double>>& axes() const { return axes_; }
  std::vector<std::size_t> counts() const;

  /// Writes the configuration of grid index `index` into q (q.size() == joint_count()).
  void decode(std::size_t index, std::span<double> q) const;
  std::vector<double> configuration(std::size_t index) const;
  /// Per-joint digit of a grid index.
  std::vector<std::size_t> digits(std::size_t index) const;

  bool operator==(const ConfigurationGrid& other) const { return axes_ == other.axes_; }

 private:
  std::vector<std::vector<double>> axes_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
};

/// Throws ConfigError when a range width has no published count and no explicit count is given.
ConfigurationGrid grid(const JointRangeSet& ranges, const ResolutionPolicy& policy);

/// Fingertip digests for every grid configuration, stored as dense position/direction blocks.
struct SampleSet {
  FingerId finger = FingerId::Index;
  ConfigurationGrid grid;
  std::uint64_t model_fingerprint = 0;
  std::vector<Vec3> distal_joints;
  std::vector<Vec3> tips;
  std::vector<Vec3> directions;
  /// Joint positions per sample (proximal to distal); empty when not materialized.
  std::size_t points_per_sample = 0;
  std::vector<Vec3> phalanx_points;

  std::size_t size() const { return tips.size(); }
  bool empty() const { return tips.empty(); }
  bool has_phalanges() const { return points_per_sample > 0; }
  std::span<const Vec3> phalanges(std::size_t k) const {
    return {phalanx_points.data() + k * points_per_sample, points_per_sample};
  }
  FingertipSample sample(std::size_t k) const;
};

struct EnumerationOptions {
  unsigned workers = 1;
  bool with_phalanges = true;
  std::size_t chunk_size = 1 << 14;
};

/// Forward kinematics for every configuration of `grid`. Output order follows grid indices and
/// is bit-identical for any worker count.
SampleSet enumerate_samples(const HandModel& model, FingerId finger, const ConfigurationGrid& grid,
                            const EnumerationOptions& options = {});

/// Fingertip positions in grid order; duplicates are kept.
std::vector<Vec3> reachable_cloud(const SampleSet& set);

/// CSV with header `finger,grid_index,x,y,z` at round-trip precision.
void write_cloud_csv(std::ostream& out, const SampleSet& set);

/// Content key of (model, finger, grid, phalanx flag); used to name cache files.
std::uint64_t sample_set_key(const HandModel& model, FingerId finger, const ConfigurationGrid& grid,
                             bool with_phalanges);

/// Versioned little-endian binary dump of a SampleSet.
void save_sample_set(const std::filesystem::path& path, const SampleSet& set);
SampleSet load_sample_set(const std::filesystem::path& path);

}  // namespace pinch
