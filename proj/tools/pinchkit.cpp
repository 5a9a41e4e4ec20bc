// pinchkit: enumerate hand workspaces, run pinch detectors and export reports.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <new>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "format.hpp"
#include "pinch/errors.hpp"
#include "pinch/hand_model.hpp"
#include "pinch/pipeline.hpp"
#include "pinch/reporting.hpp"
#include "pinch/workspace.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pinch;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct RunConfig {
  std::vector<int> cases{4};
  std::vector<DetectorKind> detectors{DetectorKind::Align};
  int resolution = 1;
  double epsilon = 1e-5;
  std::string delta = "bucket";
  SamplingConvention sampling = SamplingConvention::MinInclusive;
  PairStrategy strategy = PairStrategy::Binned;
  OverlapRule overlap = OverlapRule::Strict;
  std::optional<std::vector<double>> spans;
  double contact_step = 0.1;
  bool lateral_distal_only = false;
  bool pair_log = false;
  std::optional<std::string> hand;
  unsigned workers = 1;
};

std::vector<int> parse_cases(const std::string& s) {
  if (s == "all") return {1, 2, 3, 4};
  std::vector<int> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto n = detail::parse_u64(item);
    case_from_number(static_cast<int>(n));
    out.push_back(static_cast<int>(n));
  }
  if (out.empty()) throw ConfigError("no case selected");
  return out;
}

std::vector<DetectorKind> parse_detectors(const std::string& s) {
  if (s == "all") return {std::begin(kAllDetectors), std::end(kAllDetectors)};
  std::vector<DetectorKind> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(detector_from_string(item));
  if (out.empty()) throw ConfigError("no detector selected");
  return out;
}

OverlapRule overlap_from_string(std::string_view s) {
  if (s == "strict") return OverlapRule::Strict;
  if (s == "inclusive") return OverlapRule::Inclusive;
  throw ConfigError("unknown overlap rule '" + std::string(s) + "'");
}

RunSpec to_spec(const RunConfig& c, DetectorKind d) {
  RunSpec s;
  s.detector = d;
  s.resolution = resolution_from_number(c.resolution);
  s.sampling = c.sampling;
  s.epsilon = c.epsilon;
  if (!(c.epsilon > 0.0) || !(c.epsilon < 1.0)) throw ConfigError("--epsilon must lie in (0, 1)");
  apply_delta(s, c.delta);
  s.spans = c.spans;
  s.overlap = c.overlap;
  s.strategy = c.strategy;
  s.contact_step = c.contact_step;
  s.lateral_distal_only = c.lateral_distal_only;
  s.workers = c.workers;
  s.log_pairs = c.pair_log && (d == DetectorKind::Align || d == DetectorKind::AlignNoThumb);
  if (s.log_pairs && s.resolution != Resolution::Res1) throw ConfigError("--pair-log is limited to --res 1");
  if (s.detector == DetectorKind::Lateral || s.detector == DetectorKind::Tip) span_grid(s);
  return s;
}

json config_json(const RunConfig& c) {
  json j;
  j["case"] = c.cases;
  json dets = json::array();
  for (DetectorKind d : c.detectors) dets.push_back(to_string(d));
  j["detector"] = std::move(dets);
  j["res"] = c.resolution;
  j["epsilon"] = c.epsilon;
  j["delta"] = c.delta;
  j["sampling"] = to_string(c.sampling);
  j["strategy"] = to_string(c.strategy);
  j["overlap"] = c.overlap == OverlapRule::Strict ? "strict" : "inclusive";
  j["spans"] = c.spans ? json(*c.spans) : json(nullptr);
  j["contact_step"] = c.contact_step;
  j["lateral_distal_only"] = c.lateral_distal_only;
  j["pair_log"] = c.pair_log;
  j["hand"] = c.hand ? json(*c.hand) : json(nullptr);
  j["workers"] = c.workers;
  return j;
}

// Keys present in `j` replace the corresponding fields. A manifest's "config" object is accepted.
void apply_config_json(RunConfig& c, json j) {
  if (j.contains("config") && j["config"].is_object()) j = j["config"];
  static const std::set<std::string> known{"case",    "detector",     "res",  "epsilon",    "delta",
                                           "sampling", "strategy",    "overlap", "spans",   "contact_step",
                                           "lateral_distal_only", "pair_log", "hand", "workers"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  try {
    if (j.contains("case")) {
      const json& v = j["case"];
      if (v.is_string()) {
        c.cases = parse_cases(v.get<std::string>());
      } else if (v.is_number_integer()) {
        c.cases = {v.get<int>()};
      } else {
        c.cases = v.get<std::vector<int>>();
      }
      for (int n : c.cases) case_from_number(n);
    }
    if (j.contains("detector")) {
      const json& v = j["detector"];
      if (v.is_string()) {
        c.detectors = parse_detectors(v.get<std::string>());
      } else {
        c.detectors.clear();
        for (const json& d : v) c.detectors.push_back(detector_from_string(d.get<std::string>()));
      }
    }
    if (j.contains("res")) c.resolution = j["res"].get<int>();
    if (j.contains("epsilon")) c.epsilon = j["epsilon"].get<double>();
    if (j.contains("delta")) {
      c.delta = j["delta"].is_number() ? detail::format_double(j["delta"].get<double>()) : j["delta"].get<std::string>();
    }
    if (j.contains("sampling")) c.sampling = sampling_from_string(j["sampling"].get<std::string>());
    if (j.contains("strategy")) c.strategy = strategy_from_string(j["strategy"].get<std::string>());
    if (j.contains("overlap")) c.overlap = overlap_from_string(j["overlap"].get<std::string>());
    if (j.contains("spans")) {
      c.spans = j["spans"].is_null() ? std::nullopt : std::optional(j["spans"].get<std::vector<double>>());
    }
    if (j.contains("contact_step")) c.contact_step = j["contact_step"].get<double>();
    if (j.contains("lateral_distal_only")) c.lateral_distal_only = j["lateral_distal_only"].get<bool>();
    if (j.contains("pair_log")) c.pair_log = j["pair_log"].get<bool>();
    if (j.contains("hand")) c.hand = j["hand"].is_null() ? std::nullopt : std::optional(j["hand"].get<std::string>());
    if (j.contains("workers")) c.workers = j["workers"].get<unsigned>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

std::string utc_timestamp() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Files written by this invocation; removed again if the command fails.
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {
    if (!fs::exists(dir_)) {
      std::error_code ec;
      fs::create_directories(dir_, ec);
      if (ec) throw IoError("cannot create '" + dir_.string() + "': " + ec.message());
      created_dir_ = true;
    }
  }
  void write(const std::string& name, std::string_view text) {
    const fs::path p = dir_ / name;
    files_.push_back(p);
    write_text_file(p, text);
  }
  void discard() {
    std::error_code ec;
    for (const fs::path& p : files_) fs::remove(p, ec);
    if (created_dir_) fs::remove(dir_, ec);
  }
  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  bool created_dir_ = false;
  std::vector<fs::path> files_;
};

HandModel model_for(const RunConfig& c, int case_number) {
  HandConfig hc;
  if (c.hand) hc = load_hand_config(*c.hand);
  hc.case_id = case_from_number(case_number);
  return build_model(hc);
}

std::optional<fs::path> cache_dir(const std::string& flag) {
  if (!flag.empty()) return fs::path(flag);
  if (const char* env = std::getenv(kCacheEnv); env && *env) return fs::path(env);
  return std::nullopt;
}

std::string stem(int case_number, DetectorKind d, std::string_view suffix = {}) {
  return "case" + std::to_string(case_number) + "_" + std::string(to_string(d)) + std::string(suffix);
}

template <class T>
std::string render(const T& fn) {
  std::ostringstream s;
  fn(s);
  return s.str();
}

void emit_report_files(OutputSet& out, const DetectionReport& r, const std::string& name) {
  out.write(name + ".json", to_json(r));
  if (r.uses_spans()) {
    out.write(name + "_histogram.csv", render([&](std::ostream& s) { write_histogram_csv(s, r); }));
  }
  if (r.detector == DetectorKind::Tip) {
    out.write(name + "_span_ratio.csv", render([&](std::ostream& s) { write_span_ratio_csv(s, r); }));
  }
}

int cmd_run(const RunConfig& config, const std::string& out_dir, const std::string& cache_flag) {
  std::vector<std::pair<int, RunSpec>> plan;
  for (int c : config.cases) {
    for (DetectorKind d : config.detectors) plan.emplace_back(c, to_spec(config, d));
  }
  OutputSet out(out_dir);
  try {
    const auto start = std::chrono::steady_clock::now();
    std::vector<DetectionReport> reports;
    json runs = json::array();
    for (std::size_t k = 0; k < plan.size(); ++k) {
      const auto& [c, spec] = plan[k];
      // Sample sets are shared between detectors of one case only.
      SampleCache cache(cache_dir(cache_flag), spec.workers);
      const HandModel model = model_for(config, c);
      std::fprintf(stderr, "[%zu/%zu] case %d %s res %d\n", k + 1, plan.size(), c,
                   std::string(to_string(spec.detector)).c_str(), static_cast<int>(spec.resolution));
      RunOutput output = run_detection(model, spec, cache);
      DetectionReport report = summarize(model.case_id, spec, output);
      std::fprintf(stderr, "      done in %.1f s\n", output.wall_seconds);
      emit_report_files(out, report, stem(c, spec.detector));
      if (spec.log_pairs) {
        out.write(stem(c, spec.detector, "_pairs.csv"),
                  render([&](std::ostream& s) { write_pair_log_csv(s, output.pairs); }));
      }
      runs.push_back({{"case", c}, {"detector", to_string(spec.detector)}, {"wall_seconds", report.wall_seconds},
                      {"candidate_pairs", report.candidate_pairs}});
      reports.push_back(std::move(report));
    }
    out.write("summary.csv", render([&](std::ostream& s) { write_summary_csv(s, reports); }));
    json manifest;
    manifest["artifact"] = "pinchkit";
    manifest["version"] = PINCHKIT_VERSION;
    manifest["command"] = "run";
    manifest["config"] = config_json(config);
    manifest["runs"] = std::move(runs);
    manifest["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    manifest["timestamp"] = utc_timestamp();
    out.write("manifest.json", manifest.dump(2) + "\n");
  } catch (...) {
    out.discard();
    throw;
  }
  return 0;
}

struct PlannedRun {
  int case_number;
  RunSpec spec;
};

bool same_setting(const DetectionReport& a, const DetectionReport& b) {
  return a.case_id == b.case_id && a.detector == b.detector && a.resolution == b.resolution &&
         a.epsilon == b.epsilon && a.sampling == b.sampling && a.delta_mode == b.delta_mode;
}

int cmd_reproduce(bool fast, unsigned workers, PairStrategy strategy, const std::string& out_dir,
                  const std::string& cache_flag) {
  const std::vector<SamplingConvention> conventions{SamplingConvention::MinInclusive,
                                                    SamplingConvention::MaxInclusive, SamplingConvention::Midpoint};
  RunSpec base;
  base.strategy = strategy;
  base.workers = workers;

  // Res 1 lateral/tip in both span tolerance modes, and Res 1 alignment.
  std::vector<PlannedRun> plan;
  for (int c = 1; c <= 4; ++c) {
    for (DetectorKind d : {DetectorKind::Align, DetectorKind::AlignNoThumb}) {
      RunSpec s = base;
      s.detector = d;
      plan.push_back({c, s});
    }
    for (DetectorKind d : {DetectorKind::Lateral, DetectorKind::Tip}) {
      for (DeltaMode m : {DeltaMode::Bucket, DeltaMode::Strict}) {
        RunSpec s = base;
        s.detector = d;
        s.delta_mode = m;
        plan.push_back({c, s});
      }
    }
  }
  if (!fast) {
    for (int c = 1; c <= 4; ++c) {
      for (SamplingConvention conv : conventions) {
        for (DetectorKind d : {DetectorKind::Align, DetectorKind::AlignNoThumb}) {
          RunSpec s = base;
          s.detector = d;
          s.resolution = Resolution::Res3;
          s.sampling = conv;
          plan.push_back({c, s});
        }
      }
    }
  }

  OutputSet out(out_dir);
  int failures = 0;
  try {
    const auto start = std::chrono::steady_clock::now();
    std::vector<DetectionReport> reports;
    json runs = json::array();
    const std::optional<fs::path> cdir = cache_dir(cache_flag);
    auto record = [&](int c, const RunSpec& s, const std::optional<DetectionReport>& r, const std::string& error) {
      json e{{"case", c},
             {"detector", to_string(s.detector)},
             {"res", static_cast<int>(s.resolution)},
             {"epsilon", s.epsilon},
             {"delta", to_string(s.delta_mode)},
             {"sampling", to_string(s.sampling)},
             {"strategy", to_string(s.strategy)}};
      if (r) e["wall_seconds"] = r->wall_seconds;
      if (!error.empty()) e["error"] = error;
      runs.push_back(std::move(e));
    };

    // Consecutive runs with the same case, resolution and sampling share one cache.
    std::optional<SampleCache> cache;
    std::tuple<int, Resolution, SamplingConvention> cache_for{0, Resolution::Res1, SamplingConvention::MinInclusive};
    for (std::size_t k = 0; k < plan.size(); ++k) {
      const auto& [c, spec] = plan[k];
      const auto key = std::make_tuple(c, spec.resolution, spec.sampling);
      if (!cache || key != cache_for) {
        cache.reset();
        cache.emplace(cdir, workers);
        cache_for = key;
      }
      std::fprintf(stderr, "[%zu/%zu] case %d %s res %d %s %s\n", k + 1, plan.size(), c,
                   std::string(to_string(spec.detector)).c_str(), static_cast<int>(spec.resolution),
                   std::string(to_string(spec.sampling)).c_str(),
                   spec.detector == DetectorKind::Lateral || spec.detector == DetectorKind::Tip
                       ? std::string(to_string(spec.delta_mode)).c_str()
                       : "");
      try {
        const HandModel model = build_case(case_from_number(c), HandParameters{});
        const RunOutput output = run_detection(model, spec, *cache);
        DetectionReport r = summarize(model.case_id, spec, output);
        std::fprintf(stderr, "      done in %.1f s\n", r.wall_seconds);
        std::string name = stem(c, spec.detector, "_res" + std::to_string(static_cast<int>(spec.resolution)));
        if (r.uses_spans()) name += "_" + std::string(to_string(spec.delta_mode));
        if (spec.resolution == Resolution::Res3) name += "_" + std::string(to_string(spec.sampling));
        emit_report_files(out, r, name);
        record(c, spec, r, "");
        reports.push_back(std::move(r));
      } catch (const std::bad_alloc&) {
        ++failures;
        std::fprintf(stderr, "      failed: out of memory\n");
        record(c, spec, std::nullopt, "out of memory");
        cache.reset();
      } catch (const std::exception& e) {
        ++failures;
        std::fprintf(stderr, "      failed: %s\n", e.what());
        record(c, spec, std::nullopt, e.what());
      }
    }
    cache.reset();

    std::vector<std::string> sweeps;
    if (!fast) {
      const HandModel model = build_case(CaseId::Case4, HandParameters{});
      RunSpec s = base;
      s.detector = DetectorKind::Align;
      s.resolution = Resolution::Res3;
      struct Job {
        SweepParameter p;
        std::vector<double> values;
      };
      for (const Job& job : {Job{SweepParameter::Epsilon, {1e-3, 1e-4, 1e-5}},
                             Job{SweepParameter::Resolution, {1, 2, 3}}}) {
        std::fprintf(stderr, "sweep case 4 align over %s\n", std::string(to_string(job.p)).c_str());
        try {
          SampleCache sweep_cache(cdir, workers);
          const SweepResult result = sweep(model, s, job.p, job.values, sweep_cache);
          out.write("case4_align_" + std::string(to_string(job.p)) + "_sweep.json", to_json(result));
          for (const DetectionReport& r : result.reports) {
            const bool known = std::any_of(reports.begin(), reports.end(),
                                           [&](const DetectionReport& q) { return same_setting(q, r); });
            if (!known) reports.push_back(r);
          }
          sweeps.push_back(std::string(to_string(job.p)));
        } catch (const std::exception& e) {
          ++failures;
          std::fprintf(stderr, "      failed: %s\n", e.what());
          runs.push_back({{"sweep", to_string(job.p)}, {"error", e.what()}});
        }
      }
    }

    std::vector<TrendCheck> trends{resolution_trend(reports), tip_reversal_trend(reports)};
    {
      // Max-inclusive sampling puts the extra flexion joint's zero angle on the grid, so the
      // Case 1 finger grid is a slice of the Case 3 grid.
      const ResolutionPolicy policy = ResolutionPolicy::named(Resolution::Res1, SamplingConvention::MaxInclusive);
      const HandModel m1 = build_case(CaseId::Case1, HandParameters{});
      const HandModel m3 = build_case(CaseId::Case3, HandParameters{});
      for (FingerId f : kOpposingFingers) {
        EnumerationOptions o;
        o.workers = workers;
        o.with_phalanges = false;
        const SampleSet inner = enumerate_samples(m1, f, grid(m1.joint_ranges(f), policy), o);
        const SampleSet outer = enumerate_samples(m3, f, grid(m3.joint_ranges(f), policy), o);
        trends.push_back(cloud_extension_trend(inner, outer));
      }
    }

    const auto rows = compare(reports);
    out.write("summary.csv", render([&](std::ostream& s) { write_summary_csv(s, reports); }));
    out.write("comparison.csv", render([&](std::ostream& s) { write_comparison_csv(s, rows); }));
    out.write("trends.csv", render([&](std::ostream& s) { write_trend_csv(s, trends); }));

    std::size_t within = 0, outside = 0, missing = 0;
    for (const auto& r : rows) {
      (r.status == MatchStatus::Within ? within : r.status == MatchStatus::Outside ? outside : missing)++;
    }
    json manifest;
    manifest["artifact"] = "pinchkit";
    manifest["version"] = PINCHKIT_VERSION;
    manifest["command"] = fast ? "reproduce --fast" : "reproduce";
    manifest["config"] = {{"fast", fast}, {"workers", workers}, {"strategy", to_string(strategy)}};
    manifest["runs"] = std::move(runs);
    manifest["sweeps"] = sweeps;
    manifest["comparison"] = {{"within", within}, {"outside", outside}, {"missing", missing}};
    manifest["failures"] = failures;
    manifest["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    manifest["timestamp"] = utc_timestamp();
    out.write("manifest.json", manifest.dump(2) + "\n");
    std::fprintf(stderr, "comparison: %zu within, %zu outside, %zu missing; %d failed runs\n", within, outside,
                 missing, failures);
  } catch (...) {
    out.discard();
    throw;
  }
  return failures == 0 ? 0 : kExitRuntime;
}

int cmd_cloud(int case_number, const std::string& finger, int res, SamplingConvention sampling, unsigned workers,
              const std::string& out_file) {
  const HandModel model = build_case(case_from_number(case_number), HandParameters{});
  const ResolutionPolicy policy = ResolutionPolicy::named(resolution_from_number(res), sampling);
  std::vector<FingerId> fingers;
  if (finger == "all") {
    fingers.assign(kAllFingers.begin(), kAllFingers.end());
  } else {
    fingers.push_back(finger_from_string(finger));
  }
  std::ostringstream text;
  bool header = true;
  for (FingerId f : fingers) {
    EnumerationOptions o;
    o.workers = workers;
    o.with_phalanges = false;
    const SampleSet set = enumerate_samples(model, f, grid(model.joint_ranges(f), policy), o);
    std::ostringstream part;
    write_cloud_csv(part, set);
    std::string s = part.str();
    if (!header) s.erase(0, s.find('\n') + 1);
    header = false;
    text << s;
  }
  if (out_file.empty() || out_file == "-") {
    std::cout << text.str();
  } else {
    try {
      write_text_file(out_file, text.str());
    } catch (...) {
      std::error_code ec;
      fs::remove(out_file, ec);
      throw;
    }
  }
  return 0;
}

int fail(int code, std::string_view kind, std::string message) {
  for (char& ch : message) {
    if (ch == '\n') ch = ' ';
  }
  std::fprintf(stderr, "error: %.*s: %s\n", static_cast<int>(kind.size()), kind.data(), message.c_str());
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pinch capability evaluation for five-finger hand models"};
  app.require_subcommand(1);
  app.set_version_flag("--version", PINCHKIT_VERSION);

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());

  RunConfig config;
  config.workers = hw;
  std::string case_text = "4", detector_text = "align", sampling_text = "min-inclusive", strategy_text = "binned",
              overlap_text = "strict", out_dir = "pinch-out", cache_flag, config_file;
  std::vector<double> spans;

  auto* run = app.add_subcommand("run", "Run detectors and write reports");
  run->add_option("--case", case_text, "Case number(s) 1-4, comma separated, or 'all'")->capture_default_str();
  run->add_option("--detector", detector_text, "align|align-no-thumb|lateral|tip|all, comma separated")
      ->capture_default_str();
  run->add_option("--res", config.resolution, "Resolution level")->check(CLI::Range(1, 3))->capture_default_str();
  run->add_option("--epsilon", config.epsilon, "Parallelism tolerance on |1 - v_t . v_f|")->capture_default_str();
  run->add_option("--delta", config.delta, "Span tolerance: strict|bucket|<value>")->capture_default_str();
  run->add_option("--sampling", sampling_text, "min-inclusive|max-inclusive|midpoint")->capture_default_str();
  run->add_option("--strategy", strategy_text, "naive|binned")->capture_default_str();
  run->add_option("--overlap", overlap_text, "strict|inclusive projected overlap test")->capture_default_str();
  run->add_option("--spans", spans, "Explicit span grid, replaces the default");
  run->add_option("--contact-step", config.contact_step, "Contact point spacing along a phalanx")
      ->capture_default_str();
  run->add_flag("--lateral-distal-only", config.lateral_distal_only, "Lateral: index distal phalanx only");
  run->add_flag("--pair-log", config.pair_log, "Write accepted alignment pairs (Res 1 only)");
  run->add_option("--hand", config.hand, "Hand configuration JSON");
  run->add_option("--workers", config.workers, "Worker threads")->check(CLI::Range(1u, 1024u))->capture_default_str();
  run->add_option("--out", out_dir, "Output directory")->capture_default_str();
  run->add_option("--cache", cache_flag, std::string("Sample-set cache directory (default $") + kCacheEnv + ")");
  run->add_option("--config", config_file, "JSON config; its keys override flags")->check(CLI::ExistingFile);

  bool fast = false;
  auto* reproduce = app.add_subcommand("reproduce", "Run the full comparison matrix");
  reproduce->add_flag("--fast", fast, "Res 1 only");
  reproduce->add_option("--workers", config.workers, "Worker threads")->check(CLI::Range(1u, 1024u));
  reproduce->add_option("--strategy", strategy_text, "naive|binned")->capture_default_str();
  reproduce->add_option("--out", out_dir, "Output directory")->capture_default_str();
  reproduce->add_option("--cache", cache_flag, "Sample-set cache directory");

  int cloud_case = 4;
  std::string cloud_finger = "all", cloud_out;
  auto* cloud = app.add_subcommand("cloud", "Export reachable fingertip positions as CSV");
  cloud->add_option("--case", cloud_case, "Case number")->check(CLI::Range(1, 4))->capture_default_str();
  cloud->add_option("--finger", cloud_finger, "thumb|index|middle|ring|little|all")->capture_default_str();
  cloud->add_option("--res", config.resolution, "Resolution level")->check(CLI::Range(1, 3))->capture_default_str();
  cloud->add_option("--sampling", sampling_text, "min-inclusive|max-inclusive|midpoint")->capture_default_str();
  cloud->add_option("--workers", config.workers, "Worker threads")->check(CLI::Range(1u, 1024u));
  cloud->add_option("--out", cloud_out, "CSV file, '-' for stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(kExitConfig, "config", e.what());
  }

  try {
    config.sampling = sampling_from_string(sampling_text);
    config.strategy = strategy_from_string(strategy_text);
    if (*run) {
      config.cases = parse_cases(case_text);
      config.detectors = parse_detectors(detector_text);
      config.overlap = overlap_from_string(overlap_text);
      if (!spans.empty()) config.spans = spans;
      if (!config_file.empty()) {
        std::ifstream in(config_file);
        json j;
        try {
          j = json::parse(in);
        } catch (const json::exception& e) {
          throw ConfigError(config_file + ": " + e.what());
        }
        apply_config_json(config, j);
      }
      for (DetectorKind d : config.detectors) to_spec(config, d);
      return cmd_run(config, out_dir, cache_flag);
    }
    if (*reproduce) return cmd_reproduce(fast, config.workers, config.strategy, out_dir, cache_flag);
    return cmd_cloud(cloud_case, cloud_finger, config.resolution, config.sampling, config.workers, cloud_out);
  } catch (const ConfigError& e) {
    return fail(kExitConfig, "config", e.what());
  } catch (const DomainError& e) {
    return fail(kExitConfig, "config", e.what());
  } catch (const std::bad_alloc&) {
    return fail(kExitRuntime, "runtime", "out of memory");
  } catch (const std::exception& e) {
    return fail(kExitRuntime, "runtime", e.what());
  }
}
