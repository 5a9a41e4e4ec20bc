#include "pinch/align_detector.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <tuple>

#include "pinch/errors.hpp"
#include "pinch/geometry.hpp"
#include "pinch/pair_index.hpp"
#include "pinch/parallel.hpp"

namespace pinch {

double parallel_residual(const Vec3& v_t, const Vec3& v_f) { return std::abs(1.0 - dot3(v_t, v_f)); }

double projected_overlap(const Vec3& v_t, const Segment& seg_t, const Segment& seg_f) {
  const double a1 = dot3(v_t, seg_t.start);
  const double a2 = dot3(v_t, seg_t.end);
  const double b1 = dot3(v_t, seg_f.start);
  const double b2 = dot3(v_t, seg_f.end);
  return std::min(std::max(a1, a2), std::max(b1, b2)) - std::max(std::min(a1, a2), std::min(b1, b2));
}

namespace {

constexpr std::size_t kChunk = 1024;


// Opposing-finger data in visiting order, packed per slot so a cell range is one contiguous block.
struct Slot {
  Vec3 direction, joint, tip;
};

struct OpposingView {
  std::vector<std::uint32_t> index;
  std::vector<Slot> slots;
  std::size_t size() const { return index.size(); }
};

OpposingView gather(const SampleSet& set, std::span<const std::uint32_t> order) {
  OpposingView v;
  v.index.assign(order.begin(), order.end());
  v.slots.reserve(order.size());
  for (std::uint32_t k : order) v.slots.push_back({set.directions[k], set.distal_joints[k], set.tips[k]});
  return v;
}

struct FingerState {
  ConfigSet ref;
  ConfigSet opp;
};

struct WorkerState {
  std::vector<FingerState> fingers;
  std::uint64_t candidates = 0;
  std::uint64_t accepted = 0;
  std::vector<AlignPairRecord> pairs;
};

AlignResult detect(const SampleSet& ref, std::span<const SampleSet* const> opposing, const AlignOptions& options) {
  const double eps = options.tolerance.epsilon;
  if (!(eps > 0.0)) throw DomainError("epsilon must be positive");
  std::vector<const SampleSet*> all{&ref};
  all.insert(all.end(), opposing.begin(), opposing.end());
  require_same_model(all);
  for (const SampleSet* s : opposing) {
    if (s->finger == ref.finger) throw ContractViolation("a finger cannot oppose itself");
  }

  const bool binned = options.strategy == PairStrategy::Binned;
  const bool inclusive = options.overlap == OverlapRule::Inclusive;
  const std::size_t nf = opposing.size();

  std::vector<DirectionIndex> indexes(binned ? nf : 0);
  std::vector<OpposingView> views(nf);
  for (std::size_t f = 0; f < nf; ++f) {
    const SampleSet& opp = *opposing[f];
    if (binned) {
      indexes[f] = DirectionIndex(opp.directions, eps, options.workers);
      views[f] = gather(opp, indexes[f].members());
    } else {
      std::vector<std::uint32_t> order(opp.size());
      for (std::size_t k = 0; k < order.size(); ++k) order[k] = static_cast<std::uint32_t>(k);
      views[f] = gather(opp, order);
    }
  }

  const unsigned slots = worker_slots(ref.size(), options.workers, kChunk);
  std::vector<WorkerState> state(slots);
  for (auto& st : state) {
    for (const SampleSet* opp : opposing) st.fingers.push_back({ConfigSet(ref.size()), ConfigSet(opp->size())});
  }

  parallel_chunks(ref.size(), options.workers, kChunk, [&](std::size_t b, std::size_t e, std::size_t, unsigned w) {
    WorkerState& st = state[w];
    for (std::size_t r = b; r < e; ++r) {
      const Vec3& v = ref.directions[r];
      const Segment seg_r{ref.distal_joints[r], ref.tips[r]};
      DirectionIndex::Region region;
      if (binned && nf > 0) region = indexes[0].query(v);

      for (std::size_t f = 0; f < nf; ++f) {
        const OpposingView& view = views[f];
        FingerState& fs = st.fingers[f];
        auto visit = [&](std::uint32_t s0, std::uint32_t s1) {
          st.candidates += s1 - s0;
          for (std::uint32_t s = s0; s < s1; ++s) {
            const Slot& slot = view.slots[s];
            const double residual = parallel_residual(v, slot.direction);
            if (!(residual < eps)) continue;
            const double l = projected_overlap(v, seg_r, Segment{slot.joint, slot.tip});
            if (!(inclusive ? l >= 0.0 : l > 0.0)) continue;
            ++st.accepted;
            fs.ref.insert(r);
            fs.opp.insert(view.index[s]);
            if (options.log_pairs) st.pairs.push_back({r, opposing[f]->finger, view.index[s], residual, l});
          }
        };
        if (binned) {
          if (!indexes[f].compatible(indexes[0])) throw ContractViolation("direction indexes are incompatible");
          indexes[f].for_each_range(region, visit);
        } else {
          visit(0, static_cast<std::uint32_t>(view.size()));
        }
      }
    }
  });

  AlignResult result;
  DetectionSets& sets = result.sets;
  sets.reference = ref.finger;
  sets.reference_detected = ConfigSet(ref.size());
  for (std::size_t f = 0; f < nf; ++f) {
    ConfigSet ref_f(ref.size()), opp_f(opposing[f]->size());
    for (WorkerState& st : state) {
      ref_f |= st.fingers[f].ref;
      opp_f |= st.fingers[f].opp;
    }
    sets.reference_detected |= ref_f;
    sets.opposing.push_back(opposing[f]->finger);
    sets.opposing_detected.push_back(std::move(opp_f));
    sets.reference_by_finger.push_back(std::move(ref_f));
  }
  for (WorkerState& st : state) {
    sets.candidate_pairs += st.candidates;
    sets.accepted_pairs += st.accepted;
    result.pairs.insert(result.pairs.end(), st.pairs.begin(), st.pairs.end());
  }
  std::sort(result.pairs.begin(), result.pairs.end(), [](const AlignPairRecord& a, const AlignPairRecord& b) {
    return std::tie(a.reference_index, a.finger, a.finger_index) < std::tie(b.reference_index, b.finger, b.finger_index);
  });
  return result;
}

}  // namespace

AlignResult detect_alignment(const SampleSet& thumb, std::span<const SampleSet* const> fingers,
                             const AlignOptions& options) {
  if (thumb.finger != FingerId::Thumb) throw ContractViolation("reference set must belong to the thumb");
  return detect(thumb, fingers, options);
}

AlignResult detect_alignment_no_thumb(const SampleSet& index, std::span<const SampleSet* const> others,
                                      const AlignOptions& options) {
  if (index.finger != FingerId::Index) throw ContractViolation("reference set must belong to the index finger");
  for (const SampleSet* s : others) {
    if (s->finger == FingerId::Thumb) throw ContractViolation("the thumb does not take part in no-thumb detection");
  }
  return detect(index, others, options);
}

void write_pair_log_csv(std::ostream& out, const std::vector<AlignPairRecord>& pairs) {
  out << "thumb_index,finger,finger_index,residual,l_ovr\n";
  char buf[96];
  for (const AlignPairRecord& p : pairs) {
    out << p.reference_index << ',' << to_string(p.finger) << ',' << p.finger_index;
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g\n", p.residual, p.l_ovr);
    out << buf;
  }
}

}  // namespace pinch
