#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "pinch/detection.hpp"
#include "pinch/workspace.hpp"

namespace pinch {

struct Segment {
  Vec3 start = Vec3::Zero();
  Vec3 end = Vec3::Zero();
};

/// |1 - v_t . v_f|, in [0, 2] for unit inputs.
double parallel_residual(const Vec3& v_t, const Vec3& v_f);

/// Length of the intersection of both segments' projections onto v_t; negative when disjoint.
double projected_overlap(const Vec3& v_t, const Segment& seg_t, const Segment& seg_f);

/// Whether a touching overlap (L_ovr == 0) counts.
enum class OverlapRule { Strict, Inclusive };

struct AlignOptions {
  AlignmentTolerance tolerance;
  OverlapRule overlap = OverlapRule::Strict;
  PairStrategy strategy = PairStrategy::Binned;
  unsigned workers = 1;
  /// Keep every accepted pair; only sensible for small grids.
  bool log_pairs = false;
};

struct AlignPairRecord {
  std::size_t reference_index = 0;
  FingerId finger = FingerId::Index;
  std::size_t finger_index = 0;
  double residual = 0.0;
  double l_ovr = 0.0;
  bool operator==(const AlignPairRecord&) const = default;
};

struct AlignResult {
  DetectionSets sets;
  /// Sorted by (reference_index, finger, finger_index) when logging is enabled.
  std::vector<AlignPairRecord> pairs;
};

/// Pairs every thumb configuration with every configuration of each opposing finger and keeps
/// those with parallel distal segments whose projections onto v_t overlap.
AlignResult detect_alignment(const SampleSet& thumb, std::span<const SampleSet* const> fingers,
                             const AlignOptions& options = {});

/// Same predicate with the index finger as reference and the remaining fingers opposing.
/// The index is never paired with itself.
AlignResult detect_alignment_no_thumb(const SampleSet& index, std::span<const SampleSet* const> others,
                                      const AlignOptions& options = {});

/// CSV with header `thumb_index,finger,finger_index,residual,l_ovr`.
void write_pair_log_csv(std::ostream& out, const std::vector<AlignPairRecord>& pairs);

}  // namespace pinch
