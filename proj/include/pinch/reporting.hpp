#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pinch/detection.hpp"
#include "pinch/hand_model.hpp"
#include "pinch/pipeline.hpp"
#include "pinch/workspace.hpp"

namespace pinch {

/// Percentage 100 * detected / evaluated rounded half-up to two decimals, computed on integers.
/// An empty universe renders as "0.00".
std::string format_ratio_pct(std::uint64_t detected, std::uint64_t evaluated);

struct FingerCount {
  FingerId finger = FingerId::Thumb;
  std::uint64_t evaluated = 0;
  std::uint64_t detected = 0;

  double ratio() const { return evaluated == 0 ? 0.0 : 100.0 * double(detected) / double(evaluated); }
  std::string ratio_pct() const { return format_ratio_pct(detected, evaluated); }
  bool operator==(const FingerCount&) const = default;
};

struct DetectionReport {
  CaseId case_id = CaseId::Case4;
  DetectorKind detector = DetectorKind::Align;
  Resolution resolution = Resolution::Res1;
  double epsilon = 1e-5;
  DeltaMode delta_mode = DeltaMode::Bucket;
  double delta = 0.0;
  SamplingConvention sampling = SamplingConvention::MinInclusive;
  PairStrategy strategy = PairStrategy::Binned;
  /// Reference finger first, then the opposing fingers in detector order.
  std::vector<FingerCount> fingers;
  /// Fingers the histograms belong to: the opposing fingers for tip, the index for lateral.
  std::vector<FingerId> histogram_fingers;
  std::vector<SpanHistogram> histograms;
  std::uint64_t candidate_pairs = 0;
  std::uint64_t accepted_pairs = 0;
  /// Not written to report files, which must not depend on timing.
  double wall_seconds = 0.0;

  const FingerCount& finger(FingerId f) const;
  bool has_finger(FingerId f) const;
  bool uses_spans() const { return detector == DetectorKind::Lateral || detector == DetectorKind::Tip; }
};

/// Counts every finger of a detection run. Histograms and pair metrics are copied from `output`.
DetectionReport summarize(CaseId case_id, const RunSpec& spec, const RunOutput& output);
/// Counts only, from bare detection sets.
DetectionReport summarize(const DetectionSets& sets);

enum class SweepParameter { Epsilon, Resolution };
std::string_view to_string(SweepParameter p);

struct FingerTrend {
  FingerId finger = FingerId::Thumb;
  /// Epsilon sweeps: detected counts never grow as epsilon shrinks.
  /// Resolution sweeps: detection ratios strictly grow with resolution.
  bool monotone = false;
  /// Epsilon sweeps only: detected sets are nested in the same order.
  std::optional<bool> nested;
};

struct SweepResult {
  SweepParameter parameter = SweepParameter::Epsilon;
  std::vector<double> values;
  std::vector<DetectionReport> reports;
  std::vector<FingerTrend> trends;

  /// Mean of the opposing fingers' ratios (%) for report k.
  double opposing_average(std::size_t k) const;
};

/// Runs `base` once per swept value. Throws ConfigError unless there are at least two values
/// in strictly increasing or strictly decreasing order.
SweepResult sweep(const HandModel& model, const RunSpec& base, SweepParameter parameter,
                  std::span<const double> values, SampleCache& cache);

/// One row of the summary CSV.
struct SummaryRow {
  int case_number = 0;
  std::string detector;
  int resolution = 0;
  std::string epsilon;
  std::string delta_mode;
  std::string finger;
  std::uint64_t evaluated = 0;
  std::uint64_t detected = 0;
  std::string ratio_pct;
  bool operator==(const SummaryRow&) const = default;
};

inline constexpr std::string_view kSummaryHeader =
    "case,detector,resolution,epsilon,delta_mode,finger,evaluated,detected,ratio_pct";

/// Delta column: "strict", "bucket", the explicit value, or "none" for alignment detectors.
std::string delta_label(const DetectionReport& report);
std::vector<SummaryRow> summary_rows(const DetectionReport& report);
void write_summary_csv(std::ostream& out, std::span<const DetectionReport> reports);
/// Throws ConfigError on a malformed header or row.
std::vector<SummaryRow> read_summary_csv(std::istream& in);

/// Histogram CSV in the lateral or tip schema. Throws ContractViolation for alignment reports.
void write_histogram_csv(std::ostream& out, const DetectionReport& report);
/// Per-span tip ratios under both normalizations: unique thumb configurations over the thumb
/// grid and unique finger configurations over that finger's grid.
/// Header `finger,span,thumb_ratio_pct,finger_ratio_pct`.
void write_span_ratio_csv(std::ostream& out, const DetectionReport& report);

std::string to_json(const DetectionReport& report);
std::string to_json(const SweepResult& sweep);
DetectionReport report_from_json(std::string_view text);

/// Writes `text` to `path`, surfacing failures as IoError naming the path.
void write_text_file(const std::filesystem::path& path, std::string_view text);

/// Published value a produced quantity is compared against.
enum class Quantity {
  Evaluated,           ///< grid size at Res 3
  AlignDetected,       ///< detected count, thumb reference, Res 3, epsilon 1e-5
  AlignNoThumbDetected,
  LateralRatio,        ///< % at Res 1, bucket span tolerance
  TipRatio,
  EpsilonSweepRatio,   ///< % for Case 4 alignment at Res 3
};
std::string_view to_string(Quantity q);

struct ReferenceValue {
  Quantity quantity = Quantity::AlignDetected;
  CaseId case_id = CaseId::Case1;
  /// Empty for the four-finger average of the epsilon sweep.
  std::optional<FingerId> finger;
  double epsilon = 1e-5;
  double value = 0.0;
};

/// Every published value the reproduction bundle checks.
std::span<const ReferenceValue> reference_values();

/// Relative tolerance (fraction) for count quantities, absolute percentage points otherwise.
double default_tolerance(Quantity q);
bool is_count(Quantity q);

enum class MatchStatus { Within, Outside, Missing };
std::string_view to_string(MatchStatus s);

struct ComparisonRow {
  ReferenceValue reference;
  /// Sampling convention of the produced value; empty when missing.
  std::optional<SamplingConvention> sampling;
  std::optional<double> produced;
  /// Relative deviation in % for counts, percentage points for ratios.
  double deviation = 0.0;
  double tolerance = 0.0;
  MatchStatus status = MatchStatus::Missing;
  std::string note;
};

/// Matches every reference value against the reports that reproduce its setting. One row is
/// emitted per matching report (one per sampling convention), or a single Missing row.
std::vector<ComparisonRow> compare(std::span<const DetectionReport> reports,
                                   std::span<const ReferenceValue> references = reference_values());
/// Header `quantity,case,finger,epsilon,sampling,reference,produced,deviation,tolerance,status,note`.
void write_comparison_csv(std::ostream& out, std::span<const ComparisonRow> rows);

enum class TrendStatus { Holds, Violated, NotRun };
std::string_view to_string(TrendStatus s);

struct TrendCheck {
  std::string name;
  TrendStatus status = TrendStatus::NotRun;
  std::string detail;
};

/// Detection ratios of every finger grow from the lowest to the highest resolution among
/// alignment reports of Case 4 at epsilon 1e-5 sharing a sampling convention.
TrendCheck resolution_trend(std::span<const DetectionReport> reports);
/// For every tip report, the index/little ordering of per-span finger ratios at the nearest
/// populated span is opposite to the ordering at the farthest populated span.
TrendCheck tip_reversal_trend(std::span<const DetectionReport> reports);
/// Every fingertip of `inner` lies within `tolerance` of a fingertip of `outer`, and some
/// fingertip of `outer` lies farther than `tolerance` from all of `inner`.
TrendCheck cloud_extension_trend(const SampleSet& inner, const SampleSet& outer, double tolerance = 1e-9);
void write_trend_csv(std::ostream& out, std::span<const TrendCheck> checks);

}  // namespace pinch
