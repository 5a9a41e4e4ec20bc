#include "pinch/lateral_detector.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "pinch/errors.hpp"
#include "pinch/geometry.hpp"
#include "pinch/pair_index.hpp"
#include "pinch/parallel.hpp"

namespace pinch {

std::vector<double> contact_parameters(double ds) {
  if (!(ds > 0.0 && ds <= 1.0)) throw DomainError("contact step must lie in (0, 1]");
  std::vector<double> s;
  for (std::size_t k = 0;; ++k) {
    const double v = static_cast<double>(k) * ds;
    if (v >= 1.0 - 1e-9) break;
    s.push_back(v);
  }
  s.push_back(1.0);
  return s;
}

std::vector<ContactPoint> phalanx_points(const FingertipSample& sample, double ds) {
  const std::vector<double> params = contact_parameters(ds);
  std::vector<ContactPoint> out;
  const auto& pts = sample.phalanx_points;
  for (std::size_t p = 0; p + 1 < pts.size(); ++p) {
    for (double s : params) out.push_back({sample.finger, p, s, lerp3(pts[p], pts[p + 1], s)});
  }
  return out;
}

namespace {

constexpr std::size_t kChunk = 64;

// Index contact points for every configuration and phalanx, plus per-phalanx bounds.
struct IndexContacts {
  std::size_t phalanges = 0;   // per configuration
  std::size_t first = 0;       // first phalanx used
  std::size_t per_phalanx = 0;
  std::vector<Vec3> points;    // [config][phalanx][point]
  std::vector<double> x_lo, x_hi, y_min;  // [config * phalanges + phalanx]

  const Vec3* phalanx(std::size_t item) const { return points.data() + item * per_phalanx; }
};

IndexContacts build_contacts(const SampleSet& index, const std::vector<double>& params, bool distal_only) {
  IndexContacts c;
  const std::size_t total = index.points_per_sample - 1;
  c.first = distal_only ? total - 1 : 0;
  c.phalanges = total - c.first;
  c.per_phalanx = params.size();
  const std::size_t items = index.size() * c.phalanges;
  c.points.reserve(items * c.per_phalanx);
  c.x_lo.reserve(items);
  c.x_hi.reserve(items);
  c.y_min.reserve(items);
  for (std::size_t k = 0; k < index.size(); ++k) {
    const auto joints = index.phalanges(k);
    for (std::size_t p = c.first; p < total; ++p) {
      const Vec3& a = joints[p];
      const Vec3& b = joints[p + 1];
      double ymin = a.y();
      for (double s : params) {
        c.points.push_back(lerp3(a, b, s));
        ymin = std::min(ymin, c.points.back().y());
      }
      c.x_lo.push_back(std::min(a.x(), b.x()));
      c.x_hi.push_back(std::max(a.x(), b.x()));
      c.y_min.push_back(ymin);
    }
  }
  return c;
}

struct WorkerState {
  ConfigSet thumb, index;
  std::vector<ConfigSet> span_thumb, span_index;
  std::vector<std::uint64_t> tuples, pairs;
  // stamp[span * |Q_i| + i] == t + 1 once (t, i) was counted at that span.
  std::vector<std::uint32_t> stamp;
  std::uint64_t candidates = 0, accepted = 0;
};

}  // namespace

LateralResult detect_lateral(const SampleSet& thumb, const SampleSet& index, const SpanGrid& spans,
                             const LateralOptions& options) {
  spans.validate();
  if (thumb.finger != FingerId::Thumb || index.finger != FingerId::Index) {
    throw ContractViolation("lateral detection pairs the thumb with the index finger");
  }
  const SampleSet* pair[] = {&thumb, &index};
  require_same_model(pair);
  if (!index.has_phalanges() || index.points_per_sample < 2) {
    throw ContractViolation("index sample set was enumerated without phalanx points");
  }
  if (thumb.size() >= 0xffffffffu) throw ContractViolation("thumb set too large for lateral detection");

  const std::vector<double> params = contact_parameters(options.contact_step);
  const IndexContacts contacts = build_contacts(index, params, options.index_distal_only);
  const std::size_t nspan = spans.spans.size();
  const std::size_t ni = index.size();
  const std::size_t items = ni * contacts.phalanges;

  IntervalIndex stabber;
  if (options.strategy == PairStrategy::Binned) stabber = IntervalIndex(contacts.x_lo, contacts.x_hi, 512);

  const unsigned slots = worker_slots(thumb.size(), options.workers, kChunk);
  std::vector<WorkerState> state(slots);
  for (auto& st : state) {
    st.thumb = ConfigSet(thumb.size());
    st.index = ConfigSet(ni);
    st.span_thumb.assign(nspan, ConfigSet(thumb.size()));
    st.span_index.assign(nspan, ConfigSet(ni));
    st.tuples.assign(nspan, 0);
    st.pairs.assign(nspan, 0);
    st.stamp.assign(nspan * ni, 0);
  }

  parallel_chunks(thumb.size(), options.workers, kChunk, [&](std::size_t b, std::size_t e, std::size_t, unsigned w) {
    WorkerState& st = state[w];
    std::vector<Vec3> tp(params.size());
    for (std::size_t t = b; t < e; ++t) {
      for (std::size_t m = 0; m < params.size(); ++m) tp[m] = lerp3(thumb.distal_joints[t], thumb.tips[t], params[m]);
      const auto stamp_value = static_cast<std::uint32_t>(t + 1);

      // Tests one thumb point against one index phalanx (item = config * phalanges + phalanx).
      auto test = [&](const Vec3& p, std::size_t item) {
        if (!(p.x() >= contacts.x_lo[item] && p.x() <= contacts.x_hi[item])) return;
        const std::size_t i = item / contacts.phalanges;
        const Vec3* q = contacts.phalanx(item);
        st.candidates += contacts.per_phalanx;
        for (std::size_t n = 0; n < contacts.per_phalanx; ++n) {
          if (!(p.y() >= q[n].y())) continue;
          spans.for_each_match(distance3(p, q[n]), [&](std::size_t s) {
            ++st.accepted;
            ++st.tuples[s];
            st.thumb.insert(t);
            st.index.insert(i);
            std::uint32_t& mark = st.stamp[s * ni + i];
            if (mark != stamp_value) {
              mark = stamp_value;
              ++st.pairs[s];
              st.span_thumb[s].insert(t);
              st.span_index[s].insert(i);
            }
          });
        }
      };

      if (options.strategy == PairStrategy::Binned) {
        for (const Vec3& p : tp) {
          for (std::uint32_t item : stabber.stab(p.x())) {
            if (contacts.y_min[item] > p.y()) continue;
            test(p, item);
          }
        }
      } else {
        for (std::size_t item = 0; item < items; ++item) {
          for (const Vec3& p : tp) test(p, item);
        }
      }
    }
  });

  LateralResult result;
  DetectionSets& sets = result.sets;
  sets.reference = FingerId::Thumb;
  sets.reference_detected = ConfigSet(thumb.size());
  ConfigSet idx(ni);
  for (std::size_t s = 0; s < nspan; ++s) result.histogram.push_back(SpanBin{spans.spans[s], 0, 0, 0, 0});
  for (std::size_t s = 0; s < nspan; ++s) {
    ConfigSet ts(thumb.size()), is(ni);
    for (auto& st : state) {
      ts |= st.span_thumb[s];
      is |= st.span_index[s];
      result.histogram[s].accepted_tuples += st.tuples[s];
      result.histogram[s].detected_pairs += st.pairs[s];
    }
    result.histogram[s].unique_reference = ts.count();
    result.histogram[s].unique_opposing = is.count();
  }
  for (auto& st : state) {
    sets.reference_detected |= st.thumb;
    idx |= st.index;
    sets.candidate_pairs += st.candidates;
    sets.accepted_pairs += st.accepted;
  }
  sets.opposing.push_back(FingerId::Index);
  sets.reference_by_finger.push_back(sets.reference_detected);
  sets.opposing_detected.push_back(std::move(idx));
  return result;
}

void write_lateral_histogram_csv(std::ostream& out, const LateralResult& result) {
  write_pair_histogram_csv(out, result.histogram);
}

}  // namespace pinch
