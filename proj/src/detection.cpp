#include "pinch/detection.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "pinch/errors.hpp"

namespace pinch {

std::size_t ConfigSet::count() const {
  std::size_t n = 0;
  for (std::uint64_t w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

bool ConfigSet::subset_of(const ConfigSet& other) const {
  if (universe_ != other.universe_) return false;
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if ((words_[i] & ~other.words_[i]) != 0) return false;
  }
  return true;
}

std::vector<std::size_t> ConfigSet::indices() const {
  std::vector<std::size_t> out;
  out.reserve(count());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    std::uint64_t w = words_[i];
    while (w != 0) {
      out.push_back(i * 64 + static_cast<std::size_t>(std::countr_zero(w)));
      w &= w - 1;
    }
  }
  return out;
}

ConfigSet& ConfigSet::operator|=(const ConfigSet& other) {
  if (universe_ != other.universe_) throw ContractViolation("cannot merge sets over different universes");
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
  return *this;
}

std::string_view to_string(PairStrategy s) { return s == PairStrategy::Naive ? "naive" : "binned"; }

PairStrategy strategy_from_string(std::string_view s) {
  if (s == "naive") return PairStrategy::Naive;
  if (s == "binned") return PairStrategy::Binned;
  throw ConfigError("unknown strategy '" + std::string(s) + "'");
}

std::string_view to_string(DeltaMode m) {
  switch (m) {
    case DeltaMode::Strict: return "strict";
    case DeltaMode::Bucket: return "bucket";
    case DeltaMode::Explicit: return "explicit";
  }
  return "bucket";
}

SpanGrid SpanGrid::uniform(double start, double stop, double step, DeltaMode mode, double epsilon,
                           double explicit_delta) {
  if (!(step > 0.0) || !(stop >= start)) throw ConfigError("span grid needs step > 0 and stop >= start");
  SpanGrid g;
  const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  for (std::size_t k = 0; k < n; ++k) g.spans.push_back(start + static_cast<double>(k) * step);
  g.mode = mode;
  switch (mode) {
    case DeltaMode::Strict: g.delta = epsilon; break;
    case DeltaMode::Bucket: g.delta = step / 2.0; break;
    case DeltaMode::Explicit: g.delta = explicit_delta; break;
  }
  g.validate();
  return g;
}

SpanGrid SpanGrid::lateral(DeltaMode mode, double epsilon, double explicit_delta) {
  return uniform(0.0, 1.0, 0.1, mode, epsilon, explicit_delta);
}

SpanGrid SpanGrid::tip(DeltaMode mode, double epsilon, double explicit_delta) {
  return uniform(0.0, 1.2, 0.1, mode, epsilon, explicit_delta);
}

void SpanGrid::validate() const {
  if (spans.empty()) throw ConfigError("span grid is empty");
  for (std::size_t k = 1; k < spans.size(); ++k) {
    if (!(spans[k] > spans[k - 1])) throw ConfigError("spans must be strictly increasing");
  }
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ConfigError("span tolerance must be positive");
}

std::size_t DetectionSets::evaluated(FingerId f) const { return detected_set(f).universe(); }

std::size_t DetectionSets::detected(FingerId f) const { return detected_set(f).count(); }

const ConfigSet& DetectionSets::detected_set(FingerId f) const {
  if (f == reference) return reference_detected;
  for (std::size_t i = 0; i < opposing.size(); ++i) {
    if (opposing[i] == f) return opposing_detected[i];
  }
  throw ContractViolation("finger '" + std::string(to_string(f)) + "' is not part of this detection");
}

bool DetectionSets::same_sets(const DetectionSets& other) const {
  return reference == other.reference && opposing == other.opposing &&
         reference_detected == other.reference_detected && opposing_detected == other.opposing_detected &&
         reference_by_finger == other.reference_by_finger;
}

void require_same_model(std::span<const SampleSet* const> sets) {
  for (const SampleSet* s : sets) {
    if (s->model_fingerprint != sets.front()->model_fingerprint) {
      throw ContractViolation("sample sets come from different hand models");
    }
  }
}

namespace {

std::string span_label(double span) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", span);
  return buf;
}

}  // namespace

void write_finger_histogram_csv(std::ostream& out, std::span<const FingerId> fingers,
                                std::span<const SpanHistogram> histograms) {
  if (fingers.size() != histograms.size()) throw ContractViolation("one histogram per finger expected");
  out << "finger,span,detected_pairs,unique_thumb,unique_finger\n";
  for (std::size_t f = 0; f < histograms.size(); ++f) {
    for (const SpanBin& bin : histograms[f]) {
      out << to_string(fingers[f]) << ',' << span_label(bin.span) << ',' << bin.detected_pairs << ','
          << bin.unique_reference << ',' << bin.unique_opposing << '\n';
    }
  }
}

void write_pair_histogram_csv(std::ostream& out, const SpanHistogram& histogram) {
  out << "span,detected_pairs,unique_thumb,unique_index\n";
  for (const SpanBin& bin : histogram) {
    out << span_label(bin.span) << ',' << bin.detected_pairs << ',' << bin.unique_reference << ','
        << bin.unique_opposing << '\n';
  }
}

}  // namespace pinch
