#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "pinch/detection.hpp"
#include "pinch/workspace.hpp"

namespace pinch {

struct TipOptions {
  PairStrategy strategy = PairStrategy::Binned;
  unsigned workers = 1;
};

struct TipResult {
  DetectionSets sets;
  /// One histogram per opposing finger, parallel to sets.opposing.
  std::vector<SpanHistogram> histograms;
};

/// Non-parallel distal segments (1 - |v_t . v_f| > 0), thumb tip not below the finger tip in y,
/// finger tip not below the thumb tip in z.
bool tip_posture_ok(const Vec3& thumb_tip, const Vec3& thumb_dir, const Vec3& finger_tip, const Vec3& finger_dir);

/// Pairs every thumb configuration with every configuration of each finger and records the
/// spans the fingertip distance matches.
TipResult detect_tip(const SampleSet& thumb, std::span<const SampleSet* const> fingers, const SpanGrid& spans,
                     const TipOptions& options = {});

/// CSV with header `finger,span,detected_pairs,unique_thumb,unique_finger`.
void write_tip_histogram_csv(std::ostream& out, const TipResult& result);

}  // namespace pinch
