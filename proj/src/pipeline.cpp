#include "pinch/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <string>

#include "format.hpp"
#include "pinch/errors.hpp"

namespace pinch {

std::string_view to_string(DetectorKind d) {
  switch (d) {
    case DetectorKind::Align: return "align";
    case DetectorKind::AlignNoThumb: return "align-no-thumb";
    case DetectorKind::Lateral: return "lateral";
    case DetectorKind::Tip: return "tip";
  }
  return "align";
}

DetectorKind detector_from_string(std::string_view s) {
  for (DetectorKind d : kAllDetectors) {
    if (to_string(d) == s) return d;
  }
  throw ConfigError("unknown detector '" + std::string(s) + "'");
}

void apply_delta(RunSpec& spec, std::string_view delta) {
  if (delta == "strict") {
    spec.delta_mode = DeltaMode::Strict;
  } else if (delta == "bucket") {
    spec.delta_mode = DeltaMode::Bucket;
  } else {
    const double value = detail::parse_double(delta);
    if (!(value > 0.0)) throw ConfigError("delta must be strict, bucket or a positive number");
    spec.delta_mode = DeltaMode::Explicit;
    spec.delta_value = value;
  }
}

SpanGrid span_grid(const RunSpec& spec) {
  SpanGrid g = spec.detector == DetectorKind::Tip ? SpanGrid::tip(spec.delta_mode, spec.epsilon, spec.delta_value)
                                                  : SpanGrid::lateral(spec.delta_mode, spec.epsilon, spec.delta_value);
  if (spec.spans) {
    g.spans = *spec.spans;
    if (spec.delta_mode == DeltaMode::Bucket) {
      if (g.spans.size() < 2) throw ConfigError("bucket span tolerance needs at least two spans");
      g.delta = (g.spans[1] - g.spans[0]) / 2.0;
    }
  }
  g.validate();
  return g;
}

SampleCache::SampleCache(std::optional<std::filesystem::path> directory, unsigned workers)
    : dir_(std::move(directory)), workers_(workers) {}

const SampleSet& SampleCache::get(const HandModel& model, FingerId finger, const ConfigurationGrid& g,
                                  bool with_phalanges) {
  const std::uint64_t full_key = sample_set_key(model, finger, g, true);
  if (auto it = sets_.find(full_key); it != sets_.end()) return *it->second;
  const std::uint64_t key = sample_set_key(model, finger, g, with_phalanges);
  if (auto it = sets_.find(key); it != sets_.end()) return *it->second;

  std::unique_ptr<SampleSet> set;
  std::filesystem::path file;
  if (dir_) {
    char name[40];
    std::snprintf(name, sizeof name, "samples-%016llx.bin", static_cast<unsigned long long>(key));
    file = *dir_ / name;
    std::error_code ec;
    if (std::filesystem::exists(file, ec)) {
      auto loaded = std::make_unique<SampleSet>(load_sample_set(file));
      // A stale or foreign file is ignored and overwritten.
      if (loaded->model_fingerprint == model.fingerprint() && loaded->finger == finger && loaded->grid == g &&
          loaded->has_phalanges() == with_phalanges) {
        set = std::move(loaded);
        ++disk_hits_;
      }
    }
  }
  if (!set) {
    EnumerationOptions opts;
    opts.workers = workers_;
    opts.with_phalanges = with_phalanges;
    set = std::make_unique<SampleSet>(enumerate_samples(model, finger, g, opts));
    if (dir_) {
      std::filesystem::create_directories(*dir_);
      const auto tmp = file.string() + ".tmp";
      save_sample_set(tmp, *set);
      std::filesystem::rename(tmp, file);
    }
  }
  return *sets_.emplace(key, std::move(set)).first->second;
}

namespace {

std::vector<FingerId> fingers_of(DetectorKind d) {
  switch (d) {
    case DetectorKind::Align:
    case DetectorKind::Tip: return {FingerId::Thumb, FingerId::Index, FingerId::Middle, FingerId::Ring, FingerId::Little};
    case DetectorKind::AlignNoThumb: return {FingerId::Index, FingerId::Middle, FingerId::Ring, FingerId::Little};
    case DetectorKind::Lateral: return {FingerId::Thumb, FingerId::Index};
  }
  return {};
}

}  // namespace

RunOutput run_detection(const HandModel& model, const RunSpec& spec, SampleCache& cache) {
  if (!(spec.epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  const auto start = std::chrono::steady_clock::now();
  const auto policy = ResolutionPolicy::named(spec.resolution, spec.sampling);

  std::vector<const SampleSet*> sets;
  for (FingerId f : fingers_of(spec.detector)) {
    const bool phalanges = spec.detector == DetectorKind::Lateral && f == FingerId::Index;
    sets.push_back(&cache.get(model, f, grid(model.joint_ranges(f), policy), phalanges));
  }
  const std::span<const SampleSet* const> rest(sets.data() + 1, sets.size() - 1);

  RunOutput out;
  switch (spec.detector) {
    case DetectorKind::Align:
    case DetectorKind::AlignNoThumb: {
      AlignOptions o;
      o.tolerance.epsilon = spec.epsilon;
      o.overlap = spec.overlap;
      o.strategy = spec.strategy;
      o.workers = spec.workers;
      o.log_pairs = spec.log_pairs;
      AlignResult r = spec.detector == DetectorKind::Align ? detect_alignment(*sets[0], rest, o)
                                                           : detect_alignment_no_thumb(*sets[0], rest, o);
      out.sets = std::move(r.sets);
      out.pairs = std::move(r.pairs);
      break;
    }
    case DetectorKind::Lateral: {
      LateralOptions o;
      o.contact_step = spec.contact_step;
      o.strategy = spec.strategy;
      o.workers = spec.workers;
      o.index_distal_only = spec.lateral_distal_only;
      LateralResult r = detect_lateral(*sets[0], *sets[1], span_grid(spec), o);
      out.sets = std::move(r.sets);
      out.histograms.push_back(std::move(r.histogram));
      break;
    }
    case DetectorKind::Tip: {
      TipOptions o;
      o.strategy = spec.strategy;
      o.workers = spec.workers;
      TipResult r = detect_tip(*sets[0], rest, span_grid(spec), o);
      out.sets = std::move(r.sets);
      out.histograms = std::move(r.histograms);
      break;
    }
  }
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace pinch
