#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "pinch/detection.hpp"
#include "pinch/workspace.hpp"

namespace pinch {

struct ContactPoint {
  FingerId finger = FingerId::Index;
  /// Phalanx number, 0 = proximal.
  std::size_t phalanx = 0;
  double s = 0.0;
  Vec3 position = Vec3::Zero();
};

/// Interpolation parameters 0, ds, 2ds, ... with 1 always included. Throws DomainError unless 0 < ds <= 1.
std::vector<double> contact_parameters(double ds);

/// Points at every contact parameter on each phalanx, proximal to distal. Joints shared by two
/// phalanges appear twice.
std::vector<ContactPoint> phalanx_points(const FingertipSample& sample, double ds);

struct LateralOptions {
  double contact_step = 0.1;
  PairStrategy strategy = PairStrategy::Binned;
  unsigned workers = 1;
  /// Sample index contact points on the distal phalanx only instead of every phalanx.
  bool index_distal_only = false;
};

struct LateralResult {
  DetectionSets sets;
  SpanHistogram histogram;
};

/// Pairs points on the thumb distal segment with points on the index phalanges. A tuple is
/// accepted when the point distance matches a span, the thumb point is not below the index point
/// in y, and the thumb point's x lies within the owning phalanx's x range.
/// The index set must carry phalanx points.
LateralResult detect_lateral(const SampleSet& thumb, const SampleSet& index, const SpanGrid& spans,
                             const LateralOptions& options = {});

/// CSV with header `span,detected_pairs,unique_thumb,unique_index`.
void write_lateral_histogram_csv(std::ostream& out, const LateralResult& result);

}  // namespace pinch
