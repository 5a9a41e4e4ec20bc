#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string_view>
#include <tuple>
#include <vector>

#include "pinch/align_detector.hpp"
#include "pinch/detection.hpp"
#include "pinch/hand_model.hpp"
#include "pinch/lateral_detector.hpp"
#include "pinch/tip_detector.hpp"
#include "pinch/workspace.hpp"

namespace pinch {

enum class DetectorKind { Align, AlignNoThumb, Lateral, Tip };
inline constexpr DetectorKind kAllDetectors[] = {DetectorKind::Align, DetectorKind::AlignNoThumb, DetectorKind::Lateral,
                                                 DetectorKind::Tip};
std::string_view to_string(DetectorKind d);
DetectorKind detector_from_string(std::string_view s);

/// One detector run on one hand model.
struct RunSpec {
  DetectorKind detector = DetectorKind::Align;
  Resolution resolution = Resolution::Res1;
  SamplingConvention sampling = SamplingConvention::MinInclusive;
  double epsilon = 1e-5;
  DeltaMode delta_mode = DeltaMode::Bucket;
  /// Span tolerance for DeltaMode::Explicit.
  double delta_value = 0.05;
  /// Replaces the default span grid (0..1.0 for lateral, 0..1.2 for tip) when set.
  std::optional<std::vector<double>> spans;
  OverlapRule overlap = OverlapRule::Strict;
  PairStrategy strategy = PairStrategy::Binned;
  double contact_step = 0.1;
  bool lateral_distal_only = false;
  unsigned workers = 1;
  bool log_pairs = false;
};

/// Sets the span tolerance from "strict", "bucket" or a positive number. Throws ConfigError otherwise.
void apply_delta(RunSpec& spec, std::string_view delta);

/// Span grid a RunSpec resolves to (lateral and tip detectors only).
SpanGrid span_grid(const RunSpec& spec);

/// Enumerated sample sets shared between runs, optionally persisted to a directory.
class SampleCache {
 public:
  explicit SampleCache(std::optional<std::filesystem::path> directory = std::nullopt, unsigned workers = 1);

  /// Enumerates on first use; later calls with an identical (model, finger, grid) reuse the set.
  /// A set with phalanx points also serves requests without them.
  const SampleSet& get(const HandModel& model, FingerId finger, const ConfigurationGrid& grid, bool with_phalanges);
  void clear() { sets_.clear(); }
  std::size_t size() const { return sets_.size(); }
  /// Number of sets read from disk instead of enumerated.
  std::size_t disk_hits() const { return disk_hits_; }

 private:
  std::optional<std::filesystem::path> dir_;
  unsigned workers_;
  std::map<std::uint64_t, std::unique_ptr<SampleSet>> sets_;
  std::size_t disk_hits_ = 0;
};

/// Environment variable naming the default on-disk cache directory.
inline constexpr const char* kCacheEnv = "PINCH_CACHE_DIR";

struct RunOutput {
  DetectionSets sets;
  /// Span histograms per opposing finger (tip) or a single thumb/index histogram (lateral).
  std::vector<SpanHistogram> histograms;
  std::vector<AlignPairRecord> pairs;
  double wall_seconds = 0.0;
};

/// Builds the grids of the detector's fingers, fetches samples through the cache and runs it.
RunOutput run_detection(const HandModel& model, const RunSpec& spec, SampleCache& cache);

}  // namespace pinch
