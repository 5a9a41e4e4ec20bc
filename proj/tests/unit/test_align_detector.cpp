#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "pinch/align_detector.hpp"
#include "pinch/errors.hpp"
#include "test_support.hpp"

using namespace pinch;
using pinch::testing::model;
using pinch::testing::named_grid;
using pinch::testing::segment_set;

namespace {

struct CaseSets {
  SampleSet thumb;
  std::vector<SampleSet> fingers;
  std::vector<const SampleSet*> ptrs(std::size_t from = 0) const {
    std::vector<const SampleSet*> out;
    for (std::size_t i = from; i < fingers.size(); ++i) out.push_back(&fingers[i]);
    return out;
  }
};

CaseSets res1_sets(CaseId c) {
  const HandModel& m = model(c);
  CaseSets s;
  s.thumb = pinch::testing::samples(m, FingerId::Thumb, named_grid(m, FingerId::Thumb, Resolution::Res1), false);
  for (FingerId f : kOpposingFingers) s.fingers.push_back(pinch::testing::samples(m, f, named_grid(m, f, Resolution::Res1), false));
  return s;
}

const CaseSets& case1() {
  static const CaseSets s = res1_sets(CaseId::Case1);
  return s;
}

}  // namespace

TEST(ParallelResidual, Examples) {
  const Vec3 x = Vec3::UnitX();
  EXPECT_EQ(parallel_residual(x, x), 0.0);
  EXPECT_EQ(parallel_residual(x, -x), 2.0);
  EXPECT_EQ(parallel_residual(x, Vec3::UnitY()), 1.0);
  const Vec3 tilted = Vec3(1.0, 1e-3, 0.0).normalized();
  EXPECT_NEAR(parallel_residual(x, tilted), 5e-7, 1e-9);
  EXPECT_EQ(parallel_residual(x, tilted), parallel_residual(tilted, x));
}

TEST(ProjectedOverlap, Examples) {
  const Vec3 x = Vec3::UnitX();
  const Segment t{Vec3(0, 0, 0), Vec3(1, 0, 0)};
  // Identical segments overlap over their full length.
  EXPECT_DOUBLE_EQ(projected_overlap(x, t, t), 1.0);
  // Reversed opposing segment still overlaps; projection ignores orientation.
  EXPECT_DOUBLE_EQ(projected_overlap(x, t, Segment{Vec3(1.4, 5, 0), Vec3(0.6, 5, 0)}), 0.4);
  EXPECT_DOUBLE_EQ(projected_overlap(x, t, Segment{Vec3(1, 1, 0), Vec3(2, 1, 0)}), 0.0);
  EXPECT_DOUBLE_EQ(projected_overlap(x, t, Segment{Vec3(1.5, 0, 0), Vec3(2, 0, 0)}), -0.5);
}

TEST(ProjectedOverlap, TranslationInvariant) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n;
  for (int i = 0; i < 200; ++i) {
    const Vec3 v = Vec3(n(rng), n(rng), n(rng)).normalized();
    const Segment a{Vec3(n(rng), n(rng), n(rng)), Vec3(n(rng), n(rng), n(rng))};
    const Segment b{Vec3(n(rng), n(rng), n(rng)), Vec3(n(rng), n(rng), n(rng))};
    const Vec3 shift(n(rng), n(rng), n(rng));
    const double l0 = projected_overlap(v, a, b);
    const double l1 = projected_overlap(v, Segment{a.start + shift, a.end + shift}, Segment{b.start + shift, b.end + shift});
    EXPECT_NEAR(l0, l1, 1e-12);
  }
}

TEST(Alignment, TouchingSegmentsDependOnOverlapRule) {
  const SampleSet thumb = segment_set(FingerId::Thumb, {Vec3(0, 0, 0)}, {Vec3(1, 0, 0)});
  const SampleSet index = segment_set(FingerId::Index, {Vec3(1, 1, 0)}, {Vec3(2, 1, 0)});
  const SampleSet* fingers[] = {&index};
  for (PairStrategy s : {PairStrategy::Naive, PairStrategy::Binned}) {
    AlignOptions o;
    o.strategy = s;
    EXPECT_EQ(detect_alignment(thumb, fingers, o).sets.detected(FingerId::Thumb), 0u);
    o.overlap = OverlapRule::Inclusive;
    const AlignResult r = detect_alignment(thumb, fingers, o);
    EXPECT_EQ(r.sets.detected(FingerId::Thumb), 1u);
    EXPECT_EQ(r.sets.detected(FingerId::Index), 1u);
  }
}

TEST(Alignment, AntiParallelSegmentsRejected) {
  const SampleSet thumb = segment_set(FingerId::Thumb, {Vec3(0, 0, 0)}, {Vec3(1, 0, 0)});
  const SampleSet index = segment_set(FingerId::Index, {Vec3(1, 1, 0), Vec3(0, 1, 0)}, {Vec3(0, 1, 0), Vec3(1, 1, 0)});
  const SampleSet* fingers[] = {&index};
  const AlignResult r = detect_alignment(thumb, fingers);
  EXPECT_EQ(r.sets.detected(FingerId::Index), 1u);
  EXPECT_TRUE(r.sets.detected_set(FingerId::Index).contains(1));
}

TEST(Alignment, ContractChecks) {
  const SampleSet thumb = segment_set(FingerId::Thumb, {Vec3::Zero()}, {Vec3::UnitX()}, 1);
  const SampleSet other = segment_set(FingerId::Index, {Vec3::Zero()}, {Vec3::UnitX()}, 2);
  const SampleSet* mixed[] = {&other};
  EXPECT_THROW(detect_alignment(thumb, mixed), ContractViolation);
  const SampleSet* self[] = {&thumb};
  EXPECT_THROW(detect_alignment(thumb, self), ContractViolation);
  AlignOptions o;
  o.tolerance.epsilon = 0.0;
  const SampleSet same = segment_set(FingerId::Index, {Vec3::Zero()}, {Vec3::UnitX()}, 1);
  const SampleSet* ok[] = {&same};
  EXPECT_THROW(detect_alignment(thumb, ok, o), DomainError);
  EXPECT_THROW(detect_alignment_no_thumb(same, ok), ContractViolation);
  EXPECT_THROW(detect_alignment_no_thumb(thumb, ok), ContractViolation);
}

TEST(Alignment, NaiveAndBinnedAgreeOnCaseOne) {
  const CaseSets& s = case1();
  const auto fingers = s.ptrs();
  AlignOptions naive, binned;
  naive.strategy = PairStrategy::Naive;
  const AlignResult a = detect_alignment(s.thumb, fingers, naive);
  const AlignResult b = detect_alignment(s.thumb, fingers, binned);
  EXPECT_TRUE(a.sets.same_sets(b.sets));
  EXPECT_EQ(a.sets.accepted_pairs, b.sets.accepted_pairs);
  EXPECT_EQ(a.sets.candidate_pairs, s.thumb.size() * 4 * 594);
  EXPECT_LT(b.sets.candidate_pairs, a.sets.candidate_pairs);
  EXPECT_GT(a.sets.detected(FingerId::Thumb), 0u);
}

TEST(Alignment, NoThumbNaiveAndBinnedAgree) {
  for (CaseId c : {CaseId::Case1, CaseId::Case3}) {
    const CaseSets s = res1_sets(c);
    const auto others = s.ptrs(1);
    AlignOptions naive;
    naive.strategy = PairStrategy::Naive;
    const AlignResult a = detect_alignment_no_thumb(s.fingers[0], others, naive);
    const AlignResult b = detect_alignment_no_thumb(s.fingers[0], others);
    EXPECT_TRUE(a.sets.same_sets(b.sets));
    EXPECT_EQ(a.sets.reference, FingerId::Index);
    EXPECT_EQ(a.sets.opposing.size(), 3u);
    // Fingers share their joint axes, so equal poses on neighbouring stations are parallel.
    EXPECT_GT(a.sets.detected(FingerId::Index), 0u);
  }
}

TEST(Alignment, SetsShrinkWithEpsilon) {
  const CaseSets& s = case1();
  const auto fingers = s.ptrs();
  DetectionSets prev;
  bool first = true;
  for (double eps : {1e-3, 1e-4, 1e-5}) {
    AlignOptions o;
    o.tolerance.epsilon = eps;
    const DetectionSets cur = detect_alignment(s.thumb, fingers, o).sets;
    if (!first) {
      EXPECT_TRUE(cur.reference_detected.subset_of(prev.reference_detected));
      for (std::size_t f = 0; f < cur.opposing.size(); ++f) {
        EXPECT_TRUE(cur.opposing_detected[f].subset_of(prev.opposing_detected[f]));
      }
    }
    prev = cur;
    first = false;
  }
}

TEST(Alignment, IndependentOfWorkers) {
  const CaseSets& s = case1();
  const auto fingers = s.ptrs();
  AlignOptions one, four;
  four.workers = 4;
  one.log_pairs = four.log_pairs = true;
  const AlignResult a = detect_alignment(s.thumb, fingers, one);
  const AlignResult b = detect_alignment(s.thumb, fingers, four);
  EXPECT_TRUE(a.sets.same_sets(b.sets));
  EXPECT_EQ(a.sets.candidate_pairs, b.sets.candidate_pairs);
  EXPECT_EQ(a.pairs, b.pairs);
}

TEST(Alignment, PairLogReverifies) {
  const CaseSets& s = case1();
  const auto fingers = s.ptrs();
  AlignOptions o;
  o.log_pairs = true;
  const AlignResult r = detect_alignment(s.thumb, fingers, o);
  ASSERT_EQ(r.pairs.size(), r.sets.accepted_pairs);
  for (const AlignPairRecord& p : r.pairs) {
    const SampleSet& f = s.fingers[index_of(p.finger) - 1];
    const Vec3& v = s.thumb.directions[p.reference_index];
    EXPECT_EQ(p.residual, parallel_residual(v, f.directions[p.finger_index]));
    EXPECT_LT(p.residual, 1e-5);
    const double l = projected_overlap(v, Segment{s.thumb.distal_joints[p.reference_index], s.thumb.tips[p.reference_index]},
                                       Segment{f.distal_joints[p.finger_index], f.tips[p.finger_index]});
    EXPECT_EQ(p.l_ovr, l);
    EXPECT_GT(l, 0.0);
    EXPECT_TRUE(r.sets.reference_detected.contains(p.reference_index));
  }
  std::ostringstream out;
  write_pair_log_csv(out, r.pairs);
  const std::string text = out.str();
  EXPECT_EQ(text.rfind("thumb_index,finger,finger_index,residual,l_ovr\n", 0), 0u);
  EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')), r.pairs.size() + 1);
}
