#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "pinch/errors.hpp"
#include "pinch/reporting.hpp"
#include "test_support.hpp"

using namespace pinch;
using pinch::testing::model;

namespace {

DetectionReport align_report(CaseId c, Resolution r, SamplingConvention s, std::vector<FingerCount> fingers,
                             double eps = 1e-5) {
  DetectionReport rep;
  rep.case_id = c;
  rep.detector = DetectorKind::Align;
  rep.resolution = r;
  rep.sampling = s;
  rep.epsilon = eps;
  rep.fingers = std::move(fingers);
  return rep;
}

std::vector<FingerCount> counts(std::uint64_t thumb_n, std::uint64_t thumb_d, std::uint64_t finger_n,
                                std::initializer_list<std::uint64_t> finger_d) {
  std::vector<FingerCount> out{{FingerId::Thumb, thumb_n, thumb_d}};
  std::size_t k = 0;
  for (std::uint64_t d : finger_d) out.push_back({kOpposingFingers[k++], finger_n, d});
  return out;
}

DetectionReport tip_report(std::vector<std::uint64_t> index_unique, std::vector<std::uint64_t> little_unique) {
  DetectionReport rep;
  rep.detector = DetectorKind::Tip;
  rep.delta_mode = DeltaMode::Bucket;
  rep.fingers = counts(100, 50, 100, {10, 10, 10, 10});
  rep.histogram_fingers = {FingerId::Index, FingerId::Middle, FingerId::Ring, FingerId::Little};
  auto hist = [](const std::vector<std::uint64_t>& u) {
    SpanHistogram h;
    for (std::size_t k = 0; k < u.size(); ++k) h.push_back(SpanBin{0.1 * double(k), u[k], u[k], 1, u[k]});
    return h;
  };
  const std::vector<std::uint64_t> zero(index_unique.size(), 0);
  rep.histograms = {hist(index_unique), hist(zero), hist(zero), hist(little_unique)};
  return rep;
}

}  // namespace

TEST(RatioFormat, RoundsHalfUpOnIntegers) {
  EXPECT_EQ(format_ratio_pct(1, 800), "0.13");   // 0.125 exactly
  EXPECT_EQ(format_ratio_pct(115644, 16200000), "0.71");
  EXPECT_EQ(format_ratio_pct(159525, 16200000), "0.98");
  EXPECT_EQ(format_ratio_pct(0, 5), "0.00");
  EXPECT_EQ(format_ratio_pct(0, 0), "0.00");
  EXPECT_EQ(format_ratio_pct(7, 7), "100.00");
  EXPECT_EQ(format_ratio_pct(1, 3), "33.33");
  EXPECT_EQ(format_ratio_pct(2, 3), "66.67");
  EXPECT_THROW(format_ratio_pct(4, 3), ContractViolation);
  EXPECT_EQ(format_ratio_pct(16199999, 16200000), "100.00");
}

TEST(Summarize, CountsEveryFinger) {
  DetectionSets sets;
  sets.reference_detected = ConfigSet(10);
  sets.reference_detected.insert(3);
  sets.opposing = {FingerId::Index};
  sets.opposing_detected = {ConfigSet(4)};
  sets.opposing_detected[0].insert(0);
  sets.opposing_detected[0].insert(1);
  const DetectionReport r = summarize(sets);
  ASSERT_EQ(r.fingers.size(), 2u);
  EXPECT_EQ(r.finger(FingerId::Thumb), (FingerCount{FingerId::Thumb, 10, 1}));
  EXPECT_EQ(r.finger(FingerId::Index).ratio_pct(), "50.00");
  EXPECT_FALSE(r.has_finger(FingerId::Ring));
  EXPECT_THROW(r.finger(FingerId::Ring), ContractViolation);
}

TEST(SummaryCsv, RoundTrips) {
  std::vector<DetectionReport> reports{
      align_report(CaseId::Case1, Resolution::Res1, SamplingConvention::MinInclusive, counts(6561, 120, 594, {1, 2, 3, 4})),
      tip_report({1, 2}, {2, 1})};
  reports[1].delta_mode = DeltaMode::Explicit;
  reports[1].delta = 0.025;
  std::ostringstream out;
  write_summary_csv(out, reports);
  const std::string text = out.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), kSummaryHeader);
  EXPECT_NE(text.find("\n1,align,1,1e-05,none,thumb,6561,120,1.83\n"), std::string::npos);
  EXPECT_NE(text.find(",tip,1,1e-05,0.025,little,100,10,10.00\n"), std::string::npos);
  std::istringstream in(text);
  const auto rows = read_summary_csv(in);
  ASSERT_EQ(rows.size(), 10u);
  std::vector<SummaryRow> expected = summary_rows(reports[0]);
  const auto more = summary_rows(reports[1]);
  expected.insert(expected.end(), more.begin(), more.end());
  EXPECT_EQ(rows, expected);

  std::istringstream bad_header("case,detector\n");
  EXPECT_THROW(read_summary_csv(bad_header), ConfigError);
  std::istringstream short_row(std::string(kSummaryHeader) + "\n1,align\n");
  EXPECT_THROW(read_summary_csv(short_row), ConfigError);
}

TEST(DeltaLabel, PerDetector) {
  DetectionReport r;
  EXPECT_EQ(delta_label(r), "none");
  r.detector = DetectorKind::Lateral;
  r.delta_mode = DeltaMode::Strict;
  EXPECT_EQ(delta_label(r), "strict");
  r.delta_mode = DeltaMode::Bucket;
  EXPECT_EQ(delta_label(r), "bucket");
}

TEST(ReportJson, RoundTrips) {
  DetectionReport r = tip_report({0, 3, 5}, {1, 2, 0});
  r.case_id = CaseId::Case3;
  r.epsilon = 1e-4;
  r.delta = 0.05;
  r.sampling = SamplingConvention::Midpoint;
  r.strategy = PairStrategy::Naive;
  r.candidate_pairs = 123456789012ull;
  r.accepted_pairs = 42;
  r.wall_seconds = 9.5;
  const std::string text = to_json(r);
  EXPECT_EQ(text.find("wall"), std::string::npos);
  const DetectionReport back = report_from_json(text);
  EXPECT_EQ(back.case_id, r.case_id);
  EXPECT_EQ(back.detector, r.detector);
  EXPECT_EQ(back.epsilon, r.epsilon);
  EXPECT_EQ(back.delta, r.delta);
  EXPECT_EQ(back.sampling, r.sampling);
  EXPECT_EQ(back.strategy, r.strategy);
  EXPECT_EQ(back.fingers, r.fingers);
  EXPECT_EQ(back.histogram_fingers, r.histogram_fingers);
  EXPECT_EQ(back.histograms, r.histograms);
  EXPECT_EQ(back.candidate_pairs, r.candidate_pairs);
  EXPECT_EQ(to_json(back), text);
  EXPECT_THROW(report_from_json("{\"case_id\": 1}"), ConfigError);
  EXPECT_THROW(report_from_json("not json"), ConfigError);
}

TEST(HistogramCsv, SchemasAndErrors) {
  const DetectionReport tip = tip_report({1, 0}, {0, 1});
  std::ostringstream t;
  write_histogram_csv(t, tip);
  EXPECT_EQ(t.str().substr(0, t.str().find('\n')), "finger,span,detected_pairs,unique_thumb,unique_finger");

  DetectionReport lat;
  lat.detector = DetectorKind::Lateral;
  lat.histograms = {SpanHistogram{{0.0, 1, 1, 1, 1}}};
  std::ostringstream l;
  write_histogram_csv(l, lat);
  EXPECT_EQ(l.str(), "span,detected_pairs,unique_thumb,unique_index\n0,1,1,1\n");

  std::ostringstream a;
  EXPECT_THROW(write_histogram_csv(a, DetectionReport{}), ContractViolation);
  EXPECT_THROW(write_span_ratio_csv(a, lat), ContractViolation);

  std::ostringstream sr;
  write_span_ratio_csv(sr, tip);
  EXPECT_NE(sr.str().find("index,0,1.00,1.00\n"), std::string::npos);
}

TEST(References, PublishedTables) {
  const auto refs = reference_values();
  std::size_t align = 0, no_thumb = 0, tip = 0, lateral = 0, sweep = 0;
  for (const ReferenceValue& r : refs) {
    align += r.quantity == Quantity::AlignDetected;
    no_thumb += r.quantity == Quantity::AlignNoThumbDetected;
    tip += r.quantity == Quantity::TipRatio;
    lateral += r.quantity == Quantity::LateralRatio;
    sweep += r.quantity == Quantity::EpsilonSweepRatio;
    if (r.quantity == Quantity::AlignDetected && r.case_id == CaseId::Case4 && r.finger == FingerId::Thumb) {
      EXPECT_EQ(r.value, 159525);
    }
  }
  EXPECT_EQ(align, 20u);
  EXPECT_EQ(no_thumb, 16u);
  EXPECT_EQ(tip, 20u);
  EXPECT_EQ(lateral, 8u);
  EXPECT_EQ(sweep, 6u);
  EXPECT_TRUE(is_count(Quantity::AlignDetected));
  EXPECT_FALSE(is_count(Quantity::TipRatio));
  EXPECT_EQ(default_tolerance(Quantity::EpsilonSweepRatio), 3.0);
  EXPECT_EQ(default_tolerance(Quantity::AlignDetected), 5.0);
}

TEST(Compare, StatusPerSamplingConvention) {
  const ReferenceValue ref{Quantity::AlignDetected, CaseId::Case1, FingerId::Index, 1e-5, 1000};
  const std::vector<DetectionReport> reports{
      align_report(CaseId::Case1, Resolution::Res3, SamplingConvention::MinInclusive, counts(10, 1, 19800, {1040, 0, 0, 0})),
      align_report(CaseId::Case1, Resolution::Res3, SamplingConvention::Midpoint, counts(10, 1, 19800, {1060, 0, 0, 0})),
      align_report(CaseId::Case1, Resolution::Res1, SamplingConvention::MaxInclusive, counts(10, 1, 594, {1000, 0, 0, 0})),
      align_report(CaseId::Case1, Resolution::Res3, SamplingConvention::MinInclusive, counts(10, 1, 19800, {1, 0, 0, 0}),
                   1e-4)};
  const ReferenceValue refs[] = {ref};
  const auto rows = compare(reports, refs);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].status, MatchStatus::Within);
  EXPECT_NEAR(rows[0].deviation, 4.0, 1e-12);
  EXPECT_EQ(rows[1].status, MatchStatus::Outside);
  EXPECT_EQ(rows[1].sampling, SamplingConvention::Midpoint);

  const auto none = compare(std::span<const DetectionReport>{}, refs);
  ASSERT_EQ(none.size(), 1u);
  EXPECT_EQ(none[0].status, MatchStatus::Missing);
  EXPECT_EQ(none[0].note, "requires Res 3");

  std::ostringstream out;
  write_comparison_csv(out, rows);
  EXPECT_NE(out.str().find("align_detected,1,index,1e-05,min-inclusive,1000,1040,+4.00,5.00,within,\n"), std::string::npos)
      << out.str();
}

TEST(Compare, FingerAverageAndEvaluated) {
  const ReferenceValue refs[] = {{Quantity::EpsilonSweepRatio, CaseId::Case4, std::nullopt, 1e-3, 10.0},
                                 {Quantity::Evaluated, CaseId::Case4, FingerId::Thumb, 1e-5, 200}};
  std::vector<DetectionReport> reports{
      align_report(CaseId::Case4, Resolution::Res3, SamplingConvention::MinInclusive, counts(200, 2, 100, {8, 10, 12, 14}), 1e-3),
      align_report(CaseId::Case4, Resolution::Res3, SamplingConvention::Midpoint, counts(200, 2, 100, {8, 10, 12, 14}), 1e-3)};
  const auto rows = compare(reports, refs);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_NEAR(*rows[0].produced, 11.0, 1e-12);
  EXPECT_EQ(rows[0].status, MatchStatus::Within);
  EXPECT_EQ(rows[2].reference.quantity, Quantity::Evaluated);
  EXPECT_EQ(rows[2].status, MatchStatus::Within);
}

TEST(Trends, ResolutionTrend) {
  EXPECT_EQ(resolution_trend({}).status, TrendStatus::NotRun);
  std::vector<DetectionReport> reports{
      align_report(CaseId::Case4, Resolution::Res1, SamplingConvention::MinInclusive, counts(100, 1, 100, {1, 1, 1, 1})),
      align_report(CaseId::Case4, Resolution::Res2, SamplingConvention::MinInclusive, counts(100, 2, 100, {2, 2, 2, 2}))};
  EXPECT_EQ(resolution_trend(reports).status, TrendStatus::Holds);
  reports[1].fingers[3].detected = 1;
  const TrendCheck c = resolution_trend(reports);
  EXPECT_EQ(c.status, TrendStatus::Violated);
  EXPECT_NE(c.detail.find("ring 1.00/1.00 (not increasing)"), std::string::npos) << c.detail;
}

TEST(Trends, TipReversal) {
  EXPECT_EQ(tip_reversal_trend({}).status, TrendStatus::NotRun);
  const DetectionReport reverses[] = {tip_report({0, 5, 1, 0}, {0, 1, 4, 0})};
  EXPECT_EQ(tip_reversal_trend(reverses).status, TrendStatus::Holds);
  const DetectionReport same[] = {tip_report({5, 4}, {1, 1})};
  EXPECT_EQ(tip_reversal_trend(same).status, TrendStatus::Violated);
}

TEST(Trends, CloudExtension) {
  const SampleSet inner = pinch::testing::segment_set(FingerId::Index, {Vec3::Zero(), Vec3::Zero()}, {Vec3(1, 0, 0), Vec3(0, 1, 0)});
  const SampleSet outer =
      pinch::testing::segment_set(FingerId::Index, {Vec3::Zero(), Vec3::Zero(), Vec3::Zero()}, {Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)});
  EXPECT_EQ(cloud_extension_trend(inner, outer).status, TrendStatus::Holds);
  EXPECT_EQ(cloud_extension_trend(outer, inner).status, TrendStatus::Violated);
  EXPECT_EQ(cloud_extension_trend(inner, inner).status, TrendStatus::Violated);
  std::ostringstream out;
  const TrendCheck checks[] = {cloud_extension_trend(inner, outer)};
  write_trend_csv(out, checks);
  EXPECT_NE(out.str().find(",holds,\"0 of 2 inner tips uncovered, 1 of 3 outer tips beyond\""), std::string::npos);
}

TEST(Sweep, EpsilonSweepIsNestedAndDeterministic) {
  RunSpec base;
  base.detector = DetectorKind::Align;
  SampleCache cache;
  const double eps[] = {1e-3, 1e-4, 1e-5};
  const SweepResult a = sweep(model(CaseId::Case1), base, SweepParameter::Epsilon, eps, cache);
  const SweepResult b = sweep(model(CaseId::Case1), base, SweepParameter::Epsilon, eps, cache);
  EXPECT_EQ(to_json(a), to_json(b));
  ASSERT_EQ(a.trends.size(), 5u);
  for (const FingerTrend& t : a.trends) {
    EXPECT_TRUE(t.monotone);
    EXPECT_TRUE(t.nested.value_or(false));
  }
  EXPECT_GE(a.opposing_average(0), a.opposing_average(2));
  const double one[] = {1e-3};
  EXPECT_THROW(sweep(model(CaseId::Case1), base, SweepParameter::Epsilon, one, cache), ConfigError);
  const double unordered[] = {1e-3, 1e-5, 1e-4};
  EXPECT_THROW(sweep(model(CaseId::Case1), base, SweepParameter::Epsilon, unordered, cache), ConfigError);
  const double fractional[] = {1, 1.5};
  EXPECT_THROW(sweep(model(CaseId::Case1), base, SweepParameter::Resolution, fractional, cache), ConfigError);
}

TEST(WriteTextFile, ReportsPath) {
  const auto dir = std::filesystem::temp_directory_path() / "pinch_missing_dir_for_test" / "x";
  try {
    write_text_file(dir / "out.txt", "x");
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("out.txt"), std::string::npos);
  }
}
