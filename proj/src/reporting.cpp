#include "pinch/reporting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "format.hpp"
#include "pinch/errors.hpp"

namespace pinch {

using nlohmann::json;

std::string format_ratio_pct(std::uint64_t detected, std::uint64_t evaluated) {
  if (evaluated == 0) return "0.00";
  if (detected > evaluated) throw ContractViolation("detected count exceeds evaluated count");
  // hundredths of a percent = round(10000 * d / e), half-up.
  const unsigned __int128 num = static_cast<unsigned __int128>(detected) * 20000u + evaluated;
  const auto hundredths = static_cast<std::uint64_t>(num / (2u * static_cast<unsigned __int128>(evaluated)));
  char buf[32];
  std::snprintf(buf, sizeof buf, "%llu.%02llu", static_cast<unsigned long long>(hundredths / 100),
                static_cast<unsigned long long>(hundredths % 100));
  return buf;
}

const FingerCount& DetectionReport::finger(FingerId f) const {
  for (const FingerCount& c : fingers) {
    if (c.finger == f) return c;
  }
  throw ContractViolation("finger '" + std::string(to_string(f)) + "' is not part of this report");
}

bool DetectionReport::has_finger(FingerId f) const {
  return std::any_of(fingers.begin(), fingers.end(), [f](const FingerCount& c) { return c.finger == f; });
}

DetectionReport summarize(const DetectionSets& sets) {
  DetectionReport r;
  r.fingers.push_back({sets.reference, sets.reference_detected.universe(), sets.reference_detected.count()});
  for (std::size_t i = 0; i < sets.opposing.size(); ++i) {
    r.fingers.push_back({sets.opposing[i], sets.opposing_detected[i].universe(), sets.opposing_detected[i].count()});
  }
  r.candidate_pairs = sets.candidate_pairs;
  r.accepted_pairs = sets.accepted_pairs;
  return r;
}

DetectionReport summarize(CaseId case_id, const RunSpec& spec, const RunOutput& output) {
  DetectionReport r = summarize(output.sets);
  r.case_id = case_id;
  r.detector = spec.detector;
  r.resolution = spec.resolution;
  r.epsilon = spec.epsilon;
  r.delta_mode = spec.delta_mode;
  r.sampling = spec.sampling;
  r.strategy = spec.strategy;
  r.wall_seconds = output.wall_seconds;
  if (r.uses_spans()) {
    r.delta = span_grid(spec).delta;
    r.histograms = output.histograms;
    if (spec.detector == DetectorKind::Tip) {
      r.histogram_fingers = output.sets.opposing;
    } else {
      r.histogram_fingers = {FingerId::Index};
    }
  }
  return r;
}

std::string_view to_string(SweepParameter p) { return p == SweepParameter::Epsilon ? "epsilon" : "resolution"; }

double SweepResult::opposing_average(std::size_t k) const {
  const auto& fingers = reports.at(k).fingers;
  if (fingers.size() < 2) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 1; i < fingers.size(); ++i) sum += fingers[i].ratio();
  return sum / double(fingers.size() - 1);
}

SweepResult sweep(const HandModel& model, const RunSpec& base, SweepParameter parameter,
                  std::span<const double> values, SampleCache& cache) {
  if (values.size() < 2) throw ConfigError("a sweep needs at least two values");
  const bool increasing = values[1] > values[0];
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (increasing ? !(values[i] > values[i - 1]) : !(values[i] < values[i - 1])) {
      throw ConfigError("swept values must be strictly ordered");
    }
  }

  SweepResult out;
  out.parameter = parameter;
  out.values.assign(values.begin(), values.end());
  std::vector<DetectionSets> sets;
  for (double v : values) {
    RunSpec spec = base;
    if (parameter == SweepParameter::Epsilon) {
      spec.epsilon = v;
    } else {
      if (v != std::floor(v)) throw ConfigError("resolution values must be integers");
      spec.resolution = resolution_from_number(static_cast<int>(v));
    }
    RunOutput run = run_detection(model, spec, cache);
    out.reports.push_back(summarize(model.case_id, spec, run));
    sets.push_back(std::move(run.sets));
  }

  // Visit reports from the loosest setting (largest epsilon / lowest resolution) onwards.
  std::vector<std::size_t> order(values.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const bool loosest_first = parameter == SweepParameter::Epsilon ? !increasing : increasing;
  if (!loosest_first) std::reverse(order.begin(), order.end());

  for (const FingerCount& fc : out.reports.front().fingers) {
    FingerTrend t;
    t.finger = fc.finger;
    t.monotone = true;
    if (parameter == SweepParameter::Epsilon) t.nested = true;
    for (std::size_t i = 1; i < order.size(); ++i) {
      const auto& prev = out.reports[order[i - 1]].finger(fc.finger);
      const auto& cur = out.reports[order[i]].finger(fc.finger);
      if (parameter == SweepParameter::Epsilon) {
        t.monotone = t.monotone && cur.detected <= prev.detected;
        t.nested = *t.nested &&
                   sets[order[i]].detected_set(fc.finger).subset_of(sets[order[i - 1]].detected_set(fc.finger));
      } else {
        t.monotone = t.monotone && cur.ratio() > prev.ratio();
      }
    }
    out.trends.push_back(t);
  }
  return out;
}

std::string delta_label(const DetectionReport& report) {
  if (!report.uses_spans()) return "none";
  if (report.delta_mode == DeltaMode::Explicit) return detail::format_double(report.delta);
  return std::string(to_string(report.delta_mode));
}

std::vector<SummaryRow> summary_rows(const DetectionReport& report) {
  std::vector<SummaryRow> rows;
  for (const FingerCount& c : report.fingers) {
    rows.push_back({case_number(report.case_id), std::string(to_string(report.detector)),
                    static_cast<int>(report.resolution), detail::format_double(report.epsilon), delta_label(report),
                    std::string(to_string(c.finger)), c.evaluated, c.detected, c.ratio_pct()});
  }
  return rows;
}

void write_summary_csv(std::ostream& out, std::span<const DetectionReport> reports) {
  out << kSummaryHeader << '\n';
  for (const DetectionReport& r : reports) {
    for (const SummaryRow& row : summary_rows(r)) {
      out << row.case_number << ',' << row.detector << ',' << row.resolution << ',' << row.epsilon << ','
          << row.delta_mode << ',' << row.finger << ',' << row.evaluated << ',' << row.detected << ','
          << row.ratio_pct << '\n';
    }
  }
}

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t p = line.find(sep, start);
    parts.push_back(line.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
    if (p == std::string_view::npos) return parts;
    start = p + 1;
  }
}

}  // namespace

std::vector<SummaryRow> read_summary_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kSummaryHeader) throw ConfigError("summary CSV header mismatch");
  std::vector<SummaryRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 9) throw ConfigError("summary CSV line " + std::to_string(lineno) + ": expected 9 fields");
    SummaryRow r;
    r.case_number = static_cast<int>(detail::parse_u64(f[0]));
    r.detector = f[1];
    r.resolution = static_cast<int>(detail::parse_u64(f[2]));
    r.epsilon = f[3];
    r.delta_mode = f[4];
    r.finger = f[5];
    r.evaluated = detail::parse_u64(f[6]);
    r.detected = detail::parse_u64(f[7]);
    r.ratio_pct = f[8];
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_histogram_csv(std::ostream& out, const DetectionReport& report) {
  if (report.detector == DetectorKind::Tip) {
    write_finger_histogram_csv(out, report.histogram_fingers, report.histograms);
  } else if (report.detector == DetectorKind::Lateral) {
    if (report.histograms.size() != 1) throw ContractViolation("lateral report needs one histogram");
    write_pair_histogram_csv(out, report.histograms.front());
  } else {
    throw ContractViolation("alignment reports carry no span histogram");
  }
}

void write_span_ratio_csv(std::ostream& out, const DetectionReport& report) {
  if (report.detector != DetectorKind::Tip) throw ContractViolation("span ratios are defined for tip reports");
  const std::uint64_t thumb = report.finger(FingerId::Thumb).evaluated;
  out << "finger,span,thumb_ratio_pct,finger_ratio_pct\n";
  char span[32];
  for (std::size_t f = 0; f < report.histograms.size(); ++f) {
    const std::uint64_t own = report.finger(report.histogram_fingers[f]).evaluated;
    for (const SpanBin& bin : report.histograms[f]) {
      std::snprintf(span, sizeof span, "%.10g", bin.span);
      out << to_string(report.histogram_fingers[f]) << ',' << span << ','
          << format_ratio_pct(bin.unique_reference, thumb) << ',' << format_ratio_pct(bin.unique_opposing, own)
          << '\n';
    }
  }
}

namespace {

DeltaMode delta_mode_from_string(std::string_view s) {
  if (s == "strict") return DeltaMode::Strict;
  if (s == "bucket") return DeltaMode::Bucket;
  if (s == "explicit") return DeltaMode::Explicit;
  throw ConfigError("unknown delta mode '" + std::string(s) + "'");
}

json report_json(const DetectionReport& r) {
  json j;
  j["case_id"] = case_number(r.case_id);
  j["detector"] = to_string(r.detector);
  j["resolution"] = static_cast<int>(r.resolution);
  j["epsilon"] = r.epsilon;
  j["delta_mode"] = to_string(r.delta_mode);
  j["delta"] = r.delta;
  j["sampling"] = to_string(r.sampling);
  j["strategy"] = to_string(r.strategy);
  json fingers = json::array();
  for (const FingerCount& c : r.fingers) {
    fingers.push_back({{"finger", to_string(c.finger)},
                       {"evaluated", c.evaluated},
                       {"detected", c.detected},
                       {"ratio_pct", c.ratio_pct()}});
  }
  j["fingers"] = std::move(fingers);
  json hf = json::array();
  for (FingerId f : r.histogram_fingers) hf.push_back(to_string(f));
  j["histogram_fingers"] = std::move(hf);
  json hs = json::array();
  for (const SpanHistogram& h : r.histograms) {
    json bins = json::array();
    for (const SpanBin& b : h) {
      bins.push_back({{"span", b.span},
                      {"accepted_tuples", b.accepted_tuples},
                      {"detected_pairs", b.detected_pairs},
                      {"unique_reference", b.unique_reference},
                      {"unique_opposing", b.unique_opposing}});
    }
    hs.push_back(std::move(bins));
  }
  j["histograms"] = std::move(hs);
  j["candidate_pairs"] = r.candidate_pairs;
  j["accepted_pairs"] = r.accepted_pairs;
  return j;
}

}  // namespace

std::string to_json(const DetectionReport& report) { return report_json(report).dump(2) + "\n"; }

std::string to_json(const SweepResult& s) {
  json j;
  j["parameter"] = to_string(s.parameter);
  j["values"] = s.values;
  json reports = json::array();
  for (const DetectionReport& r : s.reports) reports.push_back(report_json(r));
  j["reports"] = std::move(reports);
  json trends = json::array();
  for (const FingerTrend& t : s.trends) {
    json e{{"finger", to_string(t.finger)}, {"monotone", t.monotone}};
    e["nested"] = t.nested ? json(*t.nested) : json(nullptr);
    trends.push_back(std::move(e));
  }
  j["trends"] = std::move(trends);
  return j.dump(2) + "\n";
}

DetectionReport report_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    DetectionReport r;
    r.case_id = case_from_number(j.at("case_id").get<int>());
    r.detector = detector_from_string(j.at("detector").get<std::string>());
    r.resolution = resolution_from_number(j.at("resolution").get<int>());
    r.epsilon = j.at("epsilon").get<double>();
    r.delta_mode = delta_mode_from_string(j.at("delta_mode").get<std::string>());
    r.delta = j.at("delta").get<double>();
    r.sampling = sampling_from_string(j.at("sampling").get<std::string>());
    r.strategy = strategy_from_string(j.at("strategy").get<std::string>());
    for (const json& c : j.at("fingers")) {
      r.fingers.push_back({finger_from_string(c.at("finger").get<std::string>()),
                           c.at("evaluated").get<std::uint64_t>(), c.at("detected").get<std::uint64_t>()});
    }
    for (const json& f : j.at("histogram_fingers")) r.histogram_fingers.push_back(finger_from_string(f.get<std::string>()));
    for (const json& h : j.at("histograms")) {
      SpanHistogram hist;
      for (const json& b : h) {
        hist.push_back({b.at("span").get<double>(), b.at("accepted_tuples").get<std::uint64_t>(),
                        b.at("detected_pairs").get<std::uint64_t>(), b.at("unique_reference").get<std::uint64_t>(),
                        b.at("unique_opposing").get<std::uint64_t>()});
      }
      r.histograms.push_back(std::move(hist));
    }
    r.candidate_pairs = j.at("candidate_pairs").get<std::uint64_t>();
    r.accepted_pairs = j.at("accepted_pairs").get<std::uint64_t>();
    return r;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed report JSON: ") + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

std::string_view to_string(Quantity q) {
  switch (q) {
    case Quantity::Evaluated: return "evaluated";
    case Quantity::AlignDetected: return "align_detected";
    case Quantity::AlignNoThumbDetected: return "align_no_thumb_detected";
    case Quantity::LateralRatio: return "lateral_ratio_pct";
    case Quantity::TipRatio: return "tip_ratio_pct";
    case Quantity::EpsilonSweepRatio: return "epsilon_sweep_ratio_pct";
  }
  return "evaluated";
}

namespace {

constexpr FingerId T = FingerId::Thumb, I = FingerId::Index, M = FingerId::Middle, R = FingerId::Ring,
                   L = FingerId::Little;
constexpr CaseId C1 = CaseId::Case1, C2 = CaseId::Case2, C3 = CaseId::Case3, C4 = CaseId::Case4;

std::vector<ReferenceValue> build_references() {
  std::vector<ReferenceValue> v;
  auto row = [&v](Quantity q, CaseId c, std::initializer_list<FingerId> fingers, std::initializer_list<double> values) {
    auto f = fingers.begin();
    for (double x : values) v.push_back({q, c, *f++, 1e-5, x});
  };
  const auto all = {T, I, M, R, L};
  row(Quantity::Evaluated, C1, all, {810000, 19800, 19800, 19800, 19800});
  row(Quantity::Evaluated, C2, all, {16200000, 19800, 19800, 19800, 19800});
  row(Quantity::Evaluated, C3, all, {810000, 594000, 594000, 594000, 594000});
  row(Quantity::Evaluated, C4, all, {16200000, 594000, 594000, 594000, 594000});

  row(Quantity::AlignDetected, C1, all, {38708, 4698, 4745, 4711, 4615});
  row(Quantity::AlignDetected, C2, all, {115644, 3638, 3761, 3928, 4031});
  row(Quantity::AlignDetected, C3, all, {38797, 67367, 70104, 73556, 76568});
  row(Quantity::AlignDetected, C4, all, {159525, 41249, 44811, 49363, 53025});

  // The published rows cover cases 1/2 and 3/4 together.
  for (CaseId c : {C1, C2}) row(Quantity::AlignNoThumbDetected, c, {I, M, R, L}, {19800, 19800, 19800, 19115});
  for (CaseId c : {C3, C4}) row(Quantity::AlignNoThumbDetected, c, {I, M, R, L}, {594000, 594000, 572461, 526435});

  row(Quantity::LateralRatio, C1, {T, I}, {44.25, 35.77});
  row(Quantity::LateralRatio, C2, {T, I}, {73.87, 32.26});
  row(Quantity::LateralRatio, C3, {T, I}, {79.45, 36.14});
  row(Quantity::LateralRatio, C4, {T, I}, {88.57, 36.24});

  row(Quantity::TipRatio, C1, all, {26.66, 42.09, 53.37, 55.56, 57.74});
  row(Quantity::TipRatio, C2, all, {28.83, 80.30, 81.82, 81.82, 81.82});
  row(Quantity::TipRatio, C3, all, {93.77, 44.11, 55.31, 58.21, 56.34});
  row(Quantity::TipRatio, C4, all, {95.24, 81.11, 81.72, 81.71, 81.69});

  const double eps[] = {1e-3, 1e-4, 1e-5};
  const double thumb[] = {17.43, 12.01, 4.95};
  const double average[] = {66.28, 54.61, 25.68};
  for (int k = 0; k < 3; ++k) {
    v.push_back({Quantity::EpsilonSweepRatio, C4, T, eps[k], thumb[k]});
    v.push_back({Quantity::EpsilonSweepRatio, C4, std::nullopt, eps[k], average[k]});
  }
  return v;
}

bool same_epsilon(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); }

bool reproduces(const DetectionReport& r, const ReferenceValue& ref) {
  if (r.case_id != ref.case_id) return false;
  switch (ref.quantity) {
    case Quantity::Evaluated:
      return r.detector == DetectorKind::Align && r.resolution == Resolution::Res3;
    case Quantity::AlignDetected:
    case Quantity::EpsilonSweepRatio:
      return r.detector == DetectorKind::Align && r.resolution == Resolution::Res3 && same_epsilon(r.epsilon, ref.epsilon);
    case Quantity::AlignNoThumbDetected:
      return r.detector == DetectorKind::AlignNoThumb && r.resolution == Resolution::Res3 &&
             same_epsilon(r.epsilon, ref.epsilon);
    case Quantity::LateralRatio:
      return r.detector == DetectorKind::Lateral && r.resolution == Resolution::Res1 && r.delta_mode == DeltaMode::Bucket;
    case Quantity::TipRatio:
      return r.detector == DetectorKind::Tip && r.resolution == Resolution::Res1 && r.delta_mode == DeltaMode::Bucket;
  }
  return false;
}

double produced_value(const DetectionReport& r, const ReferenceValue& ref) {
  if (!ref.finger) {
    double sum = 0.0;
    for (FingerId f : kOpposingFingers) sum += r.finger(f).ratio();
    return sum / 4.0;
  }
  const FingerCount& c = r.finger(*ref.finger);
  switch (ref.quantity) {
    case Quantity::Evaluated: return double(c.evaluated);
    case Quantity::AlignDetected:
    case Quantity::AlignNoThumbDetected: return double(c.detected);
    default: return c.ratio();
  }
}

}  // namespace

std::span<const ReferenceValue> reference_values() {
  static const std::vector<ReferenceValue> values = build_references();
  return values;
}

bool is_count(Quantity q) {
  return q == Quantity::Evaluated || q == Quantity::AlignDetected || q == Quantity::AlignNoThumbDetected;
}

double default_tolerance(Quantity q) {
  switch (q) {
    case Quantity::Evaluated: return 0.0;
    case Quantity::EpsilonSweepRatio: return 3.0;
    default: return 5.0;
  }
}

std::string_view to_string(MatchStatus s) {
  switch (s) {
    case MatchStatus::Within: return "within";
    case MatchStatus::Outside: return "outside";
    case MatchStatus::Missing: return "missing";
  }
  return "missing";
}

std::vector<ComparisonRow> compare(std::span<const DetectionReport> reports, std::span<const ReferenceValue> references) {
  std::vector<ComparisonRow> rows;
  for (const ReferenceValue& ref : references) {
    std::vector<SamplingConvention> seen;
    const std::size_t before = rows.size();
    for (const DetectionReport& r : reports) {
      if (!reproduces(r, ref)) continue;
      if (std::find(seen.begin(), seen.end(), r.sampling) != seen.end()) continue;
      // Grid sizes do not depend on the sampling convention; one row is enough.
      if (ref.quantity == Quantity::Evaluated && !seen.empty()) continue;
      seen.push_back(r.sampling);
      ComparisonRow row;
      row.reference = ref;
      row.sampling = r.sampling;
      row.produced = produced_value(r, ref);
      row.tolerance = default_tolerance(ref.quantity);
      row.deviation = is_count(ref.quantity) ? 100.0 * (*row.produced - ref.value) / ref.value
                                             : *row.produced - ref.value;
      row.status = std::abs(row.deviation) <= row.tolerance ? MatchStatus::Within : MatchStatus::Outside;
      if (ref.quantity == Quantity::Evaluated) row.status = *row.produced == ref.value ? MatchStatus::Within : MatchStatus::Outside;
      rows.push_back(std::move(row));
    }
    if (rows.size() == before) {
      ComparisonRow row;
      row.reference = ref;
      row.tolerance = default_tolerance(ref.quantity);
      const bool res3 = ref.quantity == Quantity::Evaluated || ref.quantity == Quantity::AlignDetected ||
                        ref.quantity == Quantity::AlignNoThumbDetected || ref.quantity == Quantity::EpsilonSweepRatio;
      row.note = res3 ? "requires Res 3" : "not run";
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_comparison_csv(std::ostream& out, std::span<const ComparisonRow> rows) {
  out << "quantity,case,finger,epsilon,sampling,reference,produced,deviation,tolerance,status,note\n";
  char buf[64];
  for (const ComparisonRow& r : rows) {
    const bool count = is_count(r.reference.quantity);
    out << to_string(r.reference.quantity) << ',' << case_number(r.reference.case_id) << ','
        << (r.reference.finger ? to_string(*r.reference.finger) : std::string_view("finger-average")) << ','
        << detail::format_double(r.reference.epsilon) << ',' << (r.sampling ? to_string(*r.sampling) : "") << ',';
    std::snprintf(buf, sizeof buf, count ? "%.0f" : "%.2f", r.reference.value);
    out << buf << ',';
    if (r.produced) {
      std::snprintf(buf, sizeof buf, count ? "%.0f" : "%.2f", *r.produced);
      out << buf << ',';
      std::snprintf(buf, sizeof buf, "%+.2f", r.deviation);
      out << buf;
    } else {
      out << ',';
    }
    std::snprintf(buf, sizeof buf, "%.2f", r.tolerance);
    out << ',' << buf << ',' << to_string(r.status) << ',' << r.note << '\n';
  }
}

std::string_view to_string(TrendStatus s) {
  switch (s) {
    case TrendStatus::Holds: return "holds";
    case TrendStatus::Violated: return "violated";
    case TrendStatus::NotRun: return "not-run";
  }
  return "not-run";
}

TrendCheck resolution_trend(std::span<const DetectionReport> reports) {
  TrendCheck check{"alignment ratio grows with resolution (case 4)", TrendStatus::NotRun, ""};
  for (SamplingConvention s : {SamplingConvention::MinInclusive, SamplingConvention::MaxInclusive,
                               SamplingConvention::Midpoint}) {
    std::vector<const DetectionReport*> series;
    for (const DetectionReport& r : reports) {
      if (r.detector == DetectorKind::Align && r.case_id == CaseId::Case4 && r.sampling == s &&
          same_epsilon(r.epsilon, 1e-5) &&
          std::none_of(series.begin(), series.end(), [&](const DetectionReport* p) { return p->resolution == r.resolution; })) {
        series.push_back(&r);
      }
    }
    if (series.size() < 2) continue;
    std::sort(series.begin(), series.end(),
              [](const DetectionReport* a, const DetectionReport* b) { return a->resolution < b->resolution; });
    if (check.status == TrendStatus::NotRun) check.status = TrendStatus::Holds;
    for (const FingerCount& fc : series.front()->fingers) {
      std::string ratios;
      bool increasing = true;
      for (std::size_t i = 0; i < series.size(); ++i) {
        const double r = series[i]->finger(fc.finger).ratio();
        if (i > 0 && !(r > series[i - 1]->finger(fc.finger).ratio())) increasing = false;
        ratios += (i ? "/" : "") + series[i]->finger(fc.finger).ratio_pct();
      }
      if (!increasing) check.status = TrendStatus::Violated;
      if (!check.detail.empty()) check.detail += "; ";
      check.detail += std::string(to_string(s)) + " " + std::string(to_string(fc.finger)) + " " + ratios +
                      (increasing ? "" : " (not increasing)");
    }
  }
  return check;
}

TrendCheck tip_reversal_trend(std::span<const DetectionReport> reports) {
  TrendCheck check{"tip index/little ordering reverses between near and far spans", TrendStatus::NotRun, ""};
  for (const DetectionReport& r : reports) {
    if (r.detector != DetectorKind::Tip || !r.has_finger(FingerId::Index) || !r.has_finger(FingerId::Little)) continue;
    std::size_t ii = 0, li = 0;
    for (std::size_t f = 0; f < r.histogram_fingers.size(); ++f) {
      if (r.histogram_fingers[f] == FingerId::Index) ii = f;
      if (r.histogram_fingers[f] == FingerId::Little) li = f;
    }
    const auto& hi = r.histograms[ii];
    const auto& hl = r.histograms[li];
    const double ei = double(r.finger(FingerId::Index).evaluated), el = double(r.finger(FingerId::Little).evaluated);
    std::optional<std::size_t> near, far;
    for (std::size_t k = 0; k < hi.size(); ++k) {
      if (hi[k].unique_opposing > 0 || hl[k].unique_opposing > 0) {
        if (!near) near = k;
        far = k;
      }
    }
    if (!near) continue;
    auto sign = [&](std::size_t k) {
      const double d = hi[k].unique_opposing / ei - hl[k].unique_opposing / el;
      return d > 0 ? 1 : (d < 0 ? -1 : 0);
    };
    const int sn = sign(*near), sf = sign(*far);
    const bool reverses = sn != 0 && sf != 0 && sn != sf;
    if (check.status != TrendStatus::Violated) check.status = reverses ? TrendStatus::Holds : TrendStatus::Violated;
    char buf[160];
    std::snprintf(buf, sizeof buf, "case %d %s: index%slittle at %.10g, index%slittle at %.10g",
                  case_number(r.case_id), std::string(to_string(r.delta_mode)).c_str(),
                  sn > 0 ? ">" : (sn < 0 ? "<" : "="), hi[*near].span, sf > 0 ? ">" : (sf < 0 ? "<" : "="),
                  hi[*far].span);
    if (!check.detail.empty()) check.detail += "; ";
    check.detail += buf;
  }
  return check;
}

TrendCheck cloud_extension_trend(const SampleSet& inner, const SampleSet& outer, double tolerance) {
  TrendCheck check{"case 3 " + std::string(to_string(outer.finger)) + " fingertip cloud extends case 1",
                   TrendStatus::Holds, ""};
  const double tol2 = tolerance * tolerance;
  auto nearest2 = [](const Vec3& p, const std::vector<Vec3>& cloud) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec3& q : cloud) best = std::min(best, (p - q).squaredNorm());
    return best;
  };
  std::size_t uncovered = 0, beyond = 0;
  for (const Vec3& p : inner.tips) {
    if (nearest2(p, outer.tips) > tol2) ++uncovered;
  }
  for (const Vec3& p : outer.tips) {
    if (nearest2(p, inner.tips) > tol2) ++beyond;
  }
  if (uncovered > 0 || beyond == 0) check.status = TrendStatus::Violated;
  check.detail = std::to_string(uncovered) + " of " + std::to_string(inner.tips.size()) + " inner tips uncovered, " +
                 std::to_string(beyond) + " of " + std::to_string(outer.tips.size()) + " outer tips beyond";
  return check;
}

void write_trend_csv(std::ostream& out, std::span<const TrendCheck> checks) {
  out << "check,status,detail\n";
  for (const TrendCheck& c : checks) {
    out << '"' << c.name << "\"," << to_string(c.status) << ",\"" << c.detail << "\"\n";
  }
}

}  // namespace pinch
