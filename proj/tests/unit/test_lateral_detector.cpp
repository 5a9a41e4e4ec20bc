#include <gtest/gtest.h>

#include <map>
#include <set>
#include <sstream>

#include "pinch/errors.hpp"
#include "pinch/geometry.hpp"
#include "pinch/lateral_detector.hpp"
#include "test_support.hpp"

using namespace pinch;
using pinch::testing::coarse_grid;
using pinch::testing::model;

namespace {

struct Oracle {
  std::set<std::size_t> thumbs, indexes;
  SpanHistogram histogram;
};

// Direct transcription of the lateral predicate over every (thumb point, index point) tuple.
Oracle brute_force(const SampleSet& thumb, const SampleSet& index, const SpanGrid& spans, double ds, bool distal_only) {
  const std::vector<double> s = contact_parameters(ds);
  Oracle o;
  std::vector<std::set<std::pair<std::size_t, std::size_t>>> pairs(spans.spans.size());
  std::vector<std::set<std::size_t>> ts(spans.spans.size()), is(spans.spans.size());
  for (double d : spans.spans) o.histogram.push_back(SpanBin{d, 0, 0, 0, 0});
  for (std::size_t t = 0; t < thumb.size(); ++t) {
    for (double st : s) {
      const Vec3 p = lerp3(thumb.distal_joints[t], thumb.tips[t], st);
      for (std::size_t i = 0; i < index.size(); ++i) {
        const auto joints = index.phalanges(i);
        const std::size_t first = distal_only ? joints.size() - 2 : 0;
        for (std::size_t ph = first; ph + 1 < joints.size(); ++ph) {
          const double xlo = std::min(joints[ph].x(), joints[ph + 1].x());
          const double xhi = std::max(joints[ph].x(), joints[ph + 1].x());
          if (p.x() < xlo || p.x() > xhi) continue;
          for (double si : s) {
            const Vec3 q = lerp3(joints[ph], joints[ph + 1], si);
            if (p.y() < q.y()) continue;
            const double d = distance3(p, q);
            for (std::size_t k = 0; k < spans.spans.size(); ++k) {
              if (std::abs(d - spans.spans[k]) >= spans.delta) continue;
              ++o.histogram[k].accepted_tuples;
              pairs[k].insert({t, i});
              ts[k].insert(t);
              is[k].insert(i);
              o.thumbs.insert(t);
              o.indexes.insert(i);
            }
          }
        }
      }
    }
  }
  for (std::size_t k = 0; k < spans.spans.size(); ++k) {
    o.histogram[k].detected_pairs = pairs[k].size();
    o.histogram[k].unique_reference = ts[k].size();
    o.histogram[k].unique_opposing = is[k].size();
  }
  return o;
}

struct Pair {
  SampleSet thumb, index;
};

Pair coarse(CaseId c, std::size_t n) {
  const HandModel& m = model(c);
  return {pinch::testing::samples(m, FingerId::Thumb, coarse_grid(m, FingerId::Thumb, n), false),
          pinch::testing::samples(m, FingerId::Index, coarse_grid(m, FingerId::Index, n), true)};
}

}  // namespace

TEST(ContactParameters, StepsIncludeBothEnds) {
  const auto s = contact_parameters(0.1);
  ASSERT_EQ(s.size(), 11u);
  EXPECT_EQ(s.front(), 0.0);
  EXPECT_EQ(s.back(), 1.0);
  EXPECT_EQ(contact_parameters(0.3), (std::vector<double>{0.0, 0.3, 0.6, 0.8999999999999999, 1.0}));
  EXPECT_EQ(contact_parameters(1.0), (std::vector<double>{0.0, 1.0}));
  EXPECT_THROW(contact_parameters(0.0), DomainError);
  EXPECT_THROW(contact_parameters(1.5), DomainError);
}

TEST(PhalanxPoints, ElevenPerPhalanxWithinSegmentBox) {
  // Four-DoF finger: three phalanges of eleven points each.
  const std::vector<double> q{0.2, -0.7, -0.4, -0.3};
  const FingertipSample s = fingertip_sample(model(CaseId::Case3).chain(FingerId::Index), q);
  const auto pts = phalanx_points(s, 0.1);
  ASSERT_EQ(pts.size(), 33u);
  for (const ContactPoint& c : pts) {
    const Vec3& a = s.phalanx_points[c.phalanx];
    const Vec3& b = s.phalanx_points[c.phalanx + 1];
    EXPECT_TRUE((c.position.array() >= a.cwiseMin(b).array() - 1e-15).all());
    EXPECT_TRUE((c.position.array() <= a.cwiseMax(b).array() + 1e-15).all());
    EXPECT_EQ(c.finger, FingerId::Index);
  }
  EXPECT_EQ(pts.front().position, s.phalanx_points.front());
  EXPECT_EQ(pts.back().position, s.tip);
}

TEST(Lateral, MatchesBruteForceOnCoarseGrids) {
  for (CaseId c : kAllCases) {
    const Pair p = coarse(c, 3);
    for (DeltaMode mode : {DeltaMode::Bucket, DeltaMode::Explicit}) {
      const SpanGrid spans = SpanGrid::lateral(mode, 1e-5, 0.02);
      for (bool distal : {false, true}) {
        const Oracle o = brute_force(p.thumb, p.index, spans, 0.1, distal);
        for (PairStrategy strategy : {PairStrategy::Naive, PairStrategy::Binned}) {
          LateralOptions opt;
          opt.strategy = strategy;
          opt.index_distal_only = distal;
          const LateralResult r = detect_lateral(p.thumb, p.index, spans, opt);
          EXPECT_EQ(r.histogram, o.histogram) << "case " << case_number(c);
          const auto th = r.sets.reference_detected.indices();
          const auto ix = r.sets.detected_set(FingerId::Index).indices();
          EXPECT_EQ(std::set<std::size_t>(th.begin(), th.end()), o.thumbs);
          EXPECT_EQ(std::set<std::size_t>(ix.begin(), ix.end()), o.indexes);
        }
      }
    }
  }
}

TEST(Lateral, FindsContactsOnCaseOneGrid) {
  const Pair p = coarse(CaseId::Case1, 4);
  const LateralResult r = detect_lateral(p.thumb, p.index, SpanGrid::lateral(DeltaMode::Bucket, 1e-5));
  EXPECT_GT(r.sets.accepted_pairs, 0u);
  std::uint64_t tuples = 0;
  for (const SpanBin& b : r.histogram) {
    tuples += b.accepted_tuples;
    EXPECT_LE(b.detected_pairs, b.accepted_tuples);
    EXPECT_LE(b.unique_reference, r.sets.detected(FingerId::Thumb));
    EXPECT_LE(b.unique_opposing, r.sets.detected(FingerId::Index));
    EXPECT_LE(b.detected_pairs, std::uint64_t(b.unique_reference) * b.unique_opposing);
  }
  // Bucket bins do not overlap, so every accepted tuple lands in exactly one bin.
  EXPECT_EQ(tuples, r.sets.accepted_pairs);
}

TEST(Lateral, StrictSpanZeroNeedsCoincidentPoints) {
  const Pair p = coarse(CaseId::Case2, 4);
  const LateralResult r = detect_lateral(p.thumb, p.index, SpanGrid::lateral(DeltaMode::Strict, 1e-5));
  EXPECT_EQ(r.histogram.front().accepted_tuples, 0u);
}

TEST(Lateral, WiderDeltaDetectsSuperset) {
  const Pair p = coarse(CaseId::Case4, 3);
  ConfigSet prev;
  bool first = true;
  for (double delta : {0.001, 0.01, 0.03, 0.05}) {
    const LateralResult r = detect_lateral(p.thumb, p.index, SpanGrid::lateral(DeltaMode::Explicit, 1e-5, delta));
    if (!first) {
      EXPECT_TRUE(prev.subset_of(r.sets.reference_detected));
    }
    prev = r.sets.reference_detected;
    first = false;
  }
}

TEST(Lateral, IndependentOfWorkers) {
  const Pair p = coarse(CaseId::Case3, 4);
  const SpanGrid spans = SpanGrid::lateral(DeltaMode::Bucket, 1e-5);
  LateralOptions four;
  four.workers = 4;
  const LateralResult a = detect_lateral(p.thumb, p.index, spans);
  const LateralResult b = detect_lateral(p.thumb, p.index, spans, four);
  EXPECT_EQ(a.histogram, b.histogram);
  EXPECT_TRUE(a.sets.same_sets(b.sets));
}

TEST(Lateral, ContractChecks) {
  const HandModel& m = model(CaseId::Case1);
  const SampleSet thumb = pinch::testing::samples(m, FingerId::Thumb, coarse_grid(m, FingerId::Thumb, 2), false);
  const SampleSet bare = pinch::testing::samples(m, FingerId::Index, coarse_grid(m, FingerId::Index, 2), false);
  const SampleSet middle = pinch::testing::samples(m, FingerId::Middle, coarse_grid(m, FingerId::Middle, 2), true);
  const SpanGrid spans = SpanGrid::lateral(DeltaMode::Bucket, 1e-5);
  EXPECT_THROW(detect_lateral(thumb, bare, spans), ContractViolation);
  EXPECT_THROW(detect_lateral(thumb, middle, spans), ContractViolation);
  SpanGrid bad = spans;
  bad.delta = -1;
  EXPECT_THROW(detect_lateral(thumb, middle, bad), ConfigError);
}

TEST(Lateral, HistogramCsv) {
  const Pair p = coarse(CaseId::Case1, 3);
  const LateralResult r = detect_lateral(p.thumb, p.index, SpanGrid::lateral(DeltaMode::Bucket, 1e-5));
  std::ostringstream out;
  write_lateral_histogram_csv(out, r);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "span,detected_pairs,unique_thumb,unique_index");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 11);
}
