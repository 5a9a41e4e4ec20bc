#include "pinch/tip_detector.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "pinch/errors.hpp"
#include "pinch/geometry.hpp"
#include "pinch/pair_index.hpp"
#include "pinch/parallel.hpp"

namespace pinch {

bool tip_posture_ok(const Vec3& thumb_tip, const Vec3& thumb_dir, const Vec3& finger_tip, const Vec3& finger_dir) {
  return thumb_tip.y() >= finger_tip.y() && finger_tip.z() >= thumb_tip.z() &&
         1.0 - std::abs(dot3(thumb_dir, finger_dir)) > 0.0;
}

namespace {

constexpr std::size_t kChunk = 256;

struct SpanState {
  std::uint64_t pairs = 0;
  ConfigSet thumb, finger;
};

struct FingerState {
  ConfigSet thumb, finger;
  std::vector<SpanState> spans;
  std::uint64_t candidates = 0, accepted = 0;
};

}  // namespace

TipResult detect_tip(const SampleSet& thumb, std::span<const SampleSet* const> fingers, const SpanGrid& spans,
                     const TipOptions& options) {
  spans.validate();
  if (thumb.finger != FingerId::Thumb) throw ContractViolation("reference set must belong to the thumb");
  std::vector<const SampleSet*> all{&thumb};
  all.insert(all.end(), fingers.begin(), fingers.end());
  require_same_model(all);

  const std::size_t nf = fingers.size();
  const double reach = spans.max_span() + spans.delta;
  std::vector<PointGrid> grids;
  if (options.strategy == PairStrategy::Binned) {
    const double cell = spans.spans.size() > 1 ? spans.spans[1] - spans.spans[0] : 0.1;
    for (const SampleSet* f : fingers) grids.emplace_back(f->tips, cell);
  }

  const unsigned slots = worker_slots(thumb.size(), options.workers, kChunk);
  std::vector<std::vector<FingerState>> state(slots);
  for (auto& ws : state) {
    for (const SampleSet* f : fingers) {
      FingerState fs{ConfigSet(thumb.size()), ConfigSet(f->size()), {}, 0, 0};
      for (std::size_t k = 0; k < spans.spans.size(); ++k) fs.spans.push_back({0, ConfigSet(thumb.size()), ConfigSet(f->size())});
      ws.push_back(std::move(fs));
    }
  }

  parallel_chunks(thumb.size(), options.workers, kChunk, [&](std::size_t b, std::size_t e, std::size_t, unsigned w) {
    for (std::size_t f = 0; f < nf; ++f) {
      const SampleSet& fin = *fingers[f];
      FingerState& fs = state[w][f];
      for (std::size_t t = b; t < e; ++t) {
        const Vec3& pt = thumb.tips[t];
        const Vec3& vt = thumb.directions[t];
        auto visit = [&](std::size_t k) {
          ++fs.candidates;
          if (!tip_posture_ok(pt, vt, fin.tips[k], fin.directions[k])) return;
          spans.for_each_match(distance3(pt, fin.tips[k]), [&](std::size_t s) {
            ++fs.accepted;
            fs.thumb.insert(t);
            fs.finger.insert(k);
            SpanState& ss = fs.spans[s];
            ++ss.pairs;
            ss.thumb.insert(t);
            ss.finger.insert(k);
          });
        };
        if (options.strategy == PairStrategy::Binned) {
          // Cell bounds are tight, so a rejected cell holds no point that could pass.
          grids[f].for_each(
              [&](const Box3& box) { return box.lo.y() <= pt.y() && box.hi.z() >= pt.z() && box.distance_to(pt) < reach + 1e-9; },
              visit);
        } else {
          for (std::size_t k = 0; k < fin.size(); ++k) visit(k);
        }
      }
    }
  });

  TipResult result;
  DetectionSets& sets = result.sets;
  sets.reference = FingerId::Thumb;
  sets.reference_detected = ConfigSet(thumb.size());
  for (std::size_t f = 0; f < nf; ++f) {
    ConfigSet t_all(thumb.size()), f_all(fingers[f]->size());
    SpanHistogram hist;
    for (std::size_t s = 0; s < spans.spans.size(); ++s) {
      ConfigSet ts(thumb.size()), fs(fingers[f]->size());
      SpanBin bin;
      bin.span = spans.spans[s];
      for (auto& ws : state) {
        ts |= ws[f].spans[s].thumb;
        fs |= ws[f].spans[s].finger;
        bin.accepted_tuples += ws[f].spans[s].pairs;
      }
      bin.detected_pairs = bin.accepted_tuples;
      bin.unique_reference = ts.count();
      bin.unique_opposing = fs.count();
      hist.push_back(bin);
    }
    for (auto& ws : state) {
      t_all |= ws[f].thumb;
      f_all |= ws[f].finger;
      sets.candidate_pairs += ws[f].candidates;
      sets.accepted_pairs += ws[f].accepted;
    }
    sets.reference_detected |= t_all;
    sets.opposing.push_back(fingers[f]->finger);
    sets.opposing_detected.push_back(std::move(f_all));
    sets.reference_by_finger.push_back(std::move(t_all));
    result.histograms.push_back(std::move(hist));
  }
  return result;
}

void write_tip_histogram_csv(std::ostream& out, const TipResult& result) {
  write_finger_histogram_csv(out, result.sets.opposing, result.histograms);
}

}  // namespace pinch
