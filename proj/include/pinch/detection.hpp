#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "pinch/hand_model.hpp"
#include "pinch/workspace.hpp"

namespace pinch {

/// Dense set of grid indices over a fixed universe [0, universe).
class ConfigSet {
 public:
  ConfigSet() = default;
  explicit ConfigSet(std::size_t universe) : universe_(universe), words_((universe + 63) / 64, 0) {}

  void insert(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  bool contains(std::size_t i) const { return i < universe_ && ((words_[i >> 6] >> (i & 63)) & 1u) != 0; }
  std::size_t universe() const { return universe_; }
  std::size_t count() const;
  bool empty() const { return count() == 0; }
  bool subset_of(const ConfigSet& other) const;
  std::vector<std::size_t> indices() const;

  ConfigSet& operator|=(const ConfigSet& other);
  bool operator==(const ConfigSet& other) const = default;

 private:
  std::size_t universe_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Pair enumeration strategy: exhaustive double loop or pruned candidate generation.
enum class PairStrategy { Naive, Binned };
std::string_view to_string(PairStrategy s);
PairStrategy strategy_from_string(std::string_view s);

/// Parallelism tolerance applied to |1 - v_t . v_f|.
struct AlignmentTolerance {
  double epsilon = 1e-5;
};

/// How the span tolerance is chosen: equal to epsilon, half the span step, or an explicit value.
enum class DeltaMode { Strict, Bucket, Explicit };
std::string_view to_string(DeltaMode m);

/// Target separations d_span and the tolerance used to match a distance to them.
struct SpanGrid {
  std::vector<double> spans;
  double delta = 0.05;
  DeltaMode mode = DeltaMode::Bucket;

  /// Spans start, start+step, ... up to stop (inclusive, computed as start + k*step).
  /// Strict mode uses delta = epsilon, bucket mode delta = step/2, explicit mode `explicit_delta`.
  static SpanGrid uniform(double start, double stop, double step, DeltaMode mode, double epsilon,
                          double explicit_delta = 0.0);
  /// Spans 0.0..1.0 in steps of 0.1.
  static SpanGrid lateral(DeltaMode mode, double epsilon, double explicit_delta = 0.0);
  /// Spans 0.0..1.2 in steps of 0.1.
  static SpanGrid tip(DeltaMode mode, double epsilon, double explicit_delta = 0.0);

  double max_span() const { return spans.back(); }
  /// Throws ConfigError unless spans are strictly increasing and delta > 0.
  void validate() const;
  /// Calls fn(k) for every span k with |d - spans[k]| < delta, in increasing k.
  template <class Fn>
  void for_each_match(double d, Fn&& fn) const {
    // Spans are sorted, so matches form one contiguous run; binary search its start.
    std::size_t lo = 0, hi = spans.size();
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (spans[mid] <= d - delta) lo = mid + 1; else hi = mid;
    }
    if (lo > 0) --lo;
    for (std::size_t k = lo; k < spans.size() && spans[k] < d + delta + delta; ++k) {
      if (std::abs(d - spans[k]) < delta) fn(k);
    }
  }
};

/// Configurations that took part in at least one accepted pair.
struct DetectionSets {
  FingerId reference = FingerId::Thumb;
  /// W for the reference finger (union over all opposing fingers).
  ConfigSet reference_detected;
  std::vector<FingerId> opposing;
  /// W per opposing finger, parallel to `opposing`.
  std::vector<ConfigSet> opposing_detected;
  /// Reference configurations paired with each opposing finger, parallel to `opposing`.
  std::vector<ConfigSet> reference_by_finger;
  /// Pairs on which the full predicate was evaluated, and pairs (or tuples) accepted.
  std::uint64_t candidate_pairs = 0;
  std::uint64_t accepted_pairs = 0;

  std::size_t evaluated(FingerId f) const;
  std::size_t detected(FingerId f) const;
  const ConfigSet& detected_set(FingerId f) const;
  /// Sets compared for equality; pair counters are ignored since they depend on the strategy.
  bool same_sets(const DetectionSets& other) const;
};

/// Per-span counts: accepted tuples, distinct accepted configuration pairs, and distinct
/// configurations on each side.
struct SpanBin {
  double span = 0.0;
  std::uint64_t accepted_tuples = 0;
  std::uint64_t detected_pairs = 0;
  std::uint64_t unique_reference = 0;
  std::uint64_t unique_opposing = 0;
  bool operator==(const SpanBin&) const = default;
};
using SpanHistogram = std::vector<SpanBin>;

/// Tip schema: `finger,span,detected_pairs,unique_thumb,unique_finger`, one block per finger.
void write_finger_histogram_csv(std::ostream& out, std::span<const FingerId> fingers,
                                std::span<const SpanHistogram> histograms);
/// Lateral schema: `span,detected_pairs,unique_thumb,unique_index`.
void write_pair_histogram_csv(std::ostream& out, const SpanHistogram& histogram);

/// Throws ContractViolation unless every set carries the same model fingerprint.
void require_same_model(std::span<const SampleSet* const> sets);

}  // namespace pinch
