#include "pinch/hand_model.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hash.hpp"
#include "pinch/errors.hpp"

namespace pinch {
namespace {

using std::numbers::pi;
using json = nlohmann::json;

constexpr std::array<std::string_view, 5> kFingerNames{"thumb", "index", "middle", "ring", "little"};

DhRow fixed(double alpha, double a, double d, double theta) { return DhRow{alpha, a, d, FixedAngle{theta}}; }
DhRow joint(double alpha, double a, double d, std::size_t index) {
  return DhRow{alpha, a, d, ActuatedJoint{index}};
}

void require_positive(double v, const char* name) {
  if (!std::isfinite(v) || v <= 0.0) {
    throw DomainError(std::string(name) + " must be positive and finite");
  }
}

void require_non_negative(double v, const char* name) {
  if (!std::isfinite(v) || v < 0.0) {
    throw DomainError(std::string(name) + " must be non-negative and finite");
  }
}

// Scalar fields addressable from a HandConfig.
double* scalar_field(HandParameters& p, std::string_view name) {
  if (name == "hand_width") return &p.hand_width;
  if (name == "finger_length") return &p.finger_length;
  if (name == "thumb_length") return &p.thumb_length;
  if (name == "thumb_base_offset") return &p.thumb_base_offset;
  if (name == "thumb_root_offset") return &p.thumb_root_offset;
  if (name == "finger_station_depth") return &p.finger_station_depth;
  if (name == "finger_spacing") return &p.finger_spacing;
  if (name == "station_offset") return &p.station_offset;
  return nullptr;
}

template <std::size_t N>
void assign_segments(std::array<double, N>& dst, const std::vector<double>& src, std::string_view name) {
  if (src.size() != N) {
    throw ConfigError("segment override '" + std::string(name) + "' needs " + std::to_string(N) + " values");
  }
  std::copy(src.begin(), src.end(), dst.begin());
}

}  // namespace

std::string_view to_string(FingerId f) { return kFingerNames[index_of(f)]; }

FingerId finger_from_string(std::string_view name) {
  for (FingerId f : kAllFingers) {
    if (kFingerNames[index_of(f)] == name) return f;
  }
  throw ConfigError("unknown finger '" + std::string(name) + "'");
}

int case_number(CaseId c) { return static_cast<int>(c); }

CaseId case_from_number(int n) {
  if (n < 1 || n > 4) throw ConfigError("case must be 1..4, got " + std::to_string(n));
  return static_cast<CaseId>(n);
}

int finger_dof(CaseId c) { return (c == CaseId::Case1 || c == CaseId::Case2) ? 3 : 4; }
int thumb_dof(CaseId c) { return (c == CaseId::Case1 || c == CaseId::Case3) ? 4 : 5; }

HandParameters derive_ratios(double hand_length) {
  require_positive(hand_length, "hand_length");
  HandParameters p;
  const auto scale = [hand_length](double& v) { v *= hand_length; };
  scale(p.hand_length);
  scale(p.hand_width);
  scale(p.finger_length);
  scale(p.thumb_length);
  scale(p.thumb_base_offset);
  scale(p.thumb_root_offset);
  scale(p.finger_station_depth);
  scale(p.finger_spacing);
  scale(p.station_offset);
  for (double& v : p.finger_segments_4dof) scale(v);
  for (double& v : p.finger_segments_3dof) scale(v);
  for (double& v : p.thumb_segments_4dof) scale(v);
  for (double& v : p.thumb_segments_5dof) scale(v);
  return p;
}

void validate(const HandParameters& p) {
  require_positive(p.hand_length, "hand_length");
  require_positive(p.hand_width, "hand_width");
  require_positive(p.finger_length, "finger_length");
  require_positive(p.thumb_length, "thumb_length");
  require_non_negative(p.thumb_base_offset, "thumb_base_offset");
  require_non_negative(p.thumb_root_offset, "thumb_root_offset");
  require_non_negative(p.finger_station_depth, "finger_station_depth");
  require_non_negative(p.finger_spacing, "finger_spacing");
  require_non_negative(p.station_offset, "station_offset");
  for (double v : p.finger_segments_4dof) require_positive(v, "finger_segments_4dof");
  for (double v : p.finger_segments_3dof) require_positive(v, "finger_segments_3dof");
  for (double v : p.thumb_segments_4dof) require_positive(v, "thumb_segments_4dof");
  for (double v : p.thumb_segments_5dof) require_positive(v, "thumb_segments_5dof");
}

KinematicChain finger_chain(FingerId f, int dof, const HandParameters& p) {
  if (f == FingerId::Thumb) throw ContractViolation("finger_chain called for the thumb");
  if (dof != 3 && dof != 4) throw ContractViolation("finger DoF must be 3 or 4");

  // The first row's d runs along -y_o, so it steps the stations laterally from the index.
  const double lateral = static_cast<double>(index_of(f) - 1) * p.finger_spacing;

  KinematicChain chain;
  chain.finger = f;
  chain.rows.push_back(fixed(pi / 2, 0.0, lateral, pi / 2));
  chain.rows.push_back(joint(pi / 2, p.station_offset, p.finger_station_depth, 0));  // A/A
  chain.rows.push_back(joint(-pi / 2, 0.0, 0.0, 1));                                  // F/E (MCP)
  if (dof == 4) {
    chain.rows.push_back(joint(0.0, p.finger_segments_4dof[0], 0.0, 2));
    chain.rows.push_back(joint(0.0, p.finger_segments_4dof[1], 0.0, 3));
    chain.rows.push_back(fixed(0.0, p.finger_segments_4dof[2], 0.0, 0.0));
    chain.actuated_count = 4;
    chain.phalanx_frames = {3, 4, 5, 6};
  } else {
    chain.rows.push_back(joint(0.0, p.finger_segments_3dof[0], 0.0, 2));
    chain.rows.push_back(fixed(0.0, p.finger_segments_3dof[1], 0.0, 0.0));
    chain.actuated_count = 3;
    chain.phalanx_frames = {3, 4, 5};
  }
  return chain;
}

KinematicChain thumb_chain(int dof, const HandParameters& p) {
  if (dof != 4 && dof != 5) throw ContractViolation("thumb DoF must be 4 or 5");
  KinematicChain chain;
  chain.finger = FingerId::Thumb;
  chain.rows.push_back(joint(0.0, p.thumb_base_offset, 0.0, 0));
  chain.rows.push_back(joint(-pi / 2, p.thumb_root_offset, 0.0, 1));
  if (dof == 5) {
    const auto& s = p.thumb_segments_5dof;
    chain.rows.push_back(fixed(pi / 2, s[0], 0.0, pi / 2));
    chain.rows.push_back(joint(pi / 2, 0.0, 0.0, 2));
    chain.rows.push_back(fixed(-pi / 2, 0.0, 0.0, -pi / 2));
    chain.rows.push_back(joint(-pi / 2, 0.0, 0.0, 3));
    chain.rows.push_back(joint(0.0, s[1], 0.0, 4));
    chain.rows.push_back(fixed(0.0, s[2], 0.0, 0.0));
    chain.actuated_count = 5;
    chain.phalanx_frames = {2, 3, 7, 8};
  } else {
    const auto& s = p.thumb_segments_4dof;
    chain.rows.push_back(joint(pi / 2, s[0], 0.0, 2));
    chain.rows.push_back(joint(0.0, s[1], 0.0, 3));
    chain.rows.push_back(fixed(0.0, s[2], 0.0, 0.0));
    chain.actuated_count = 4;
    chain.phalanx_frames = {2, 3, 4, 5};
  }
  return chain;
}

JointRangeSet joint_ranges(CaseId c, FingerId f) {
  constexpr JointRange kFlexion{-pi / 2, 0.0};
  if (f != FingerId::Thumb) {
    JointRangeSet r{{-pi / 6, pi / 6}, {-pi / 2, 2 * pi / 9}, kFlexion};
    if (finger_dof(c) == 4) r.push_back(kFlexion);
    return r;
  }
  if (thumb_dof(c) == 4) {
    return {{0.0, pi / 2}, kFlexion, kFlexion, kFlexion};
  }
  return {{0.0, pi / 2}, kFlexion, {-pi / 6, pi / 6}, kFlexion, kFlexion};
}

JointRangeSet literal_thumb_ranges(CaseId c) {
  constexpr JointRange kFlexion{-pi / 2, 0.0};
  constexpr JointRange kNarrow{-pi / 6, pi / 6};
  const bool upper_rows = (c == CaseId::Case1 || c == CaseId::Case2);
  if (thumb_dof(c) == 4) {
    // theta_1', theta_2', theta_3', theta_4'
    return {{0.0, pi / 2}, kFlexion, upper_rows ? kFlexion : kNarrow, kFlexion};
  }
  // theta_1', theta_2', theta_4', theta_6', theta_7'; theta_4' shares the theta_2' column.
  return {{0.0, pi / 2}, kFlexion, kFlexion, kFlexion, kFlexion};
}

HandModel build_case(CaseId c, const HandParameters& params) {
  validate(params);
  HandModel model;
  model.case_id = c;
  model.params = params;
  model.chains[index_of(FingerId::Thumb)] = thumb_chain(thumb_dof(c), params);
  model.ranges[index_of(FingerId::Thumb)] = joint_ranges(c, FingerId::Thumb);
  for (FingerId f : kOpposingFingers) {
    model.chains[index_of(f)] = finger_chain(f, finger_dof(c), params);
    model.ranges[index_of(f)] = joint_ranges(c, f);
  }
  return model;
}

std::uint64_t HandModel::fingerprint() const {
  detail::Fnv1a h;
  h.add_u64(static_cast<std::uint64_t>(case_number(case_id)));
  for (std::size_t i = 0; i < chains.size(); ++i) {
    h.add_u64(chains[i].rows.size());
    for (const DhRow& row : chains[i].rows) {
      h.add_double(row.alpha_prev);
      h.add_double(row.a_prev);
      h.add_double(row.d);
      if (const auto* j = std::get_if<ActuatedJoint>(&row.theta)) {
        h.add_u64(1);
        h.add_u64(j->index);
      } else {
        h.add_u64(0);
        h.add_double(std::get<FixedAngle>(row.theta).radians);
      }
    }
    for (std::size_t frame : chains[i].phalanx_frames) h.add_u64(frame);
    h.add_u64(ranges[i].size());
    for (const JointRange& r : ranges[i]) {
      h.add_double(r.min);
      h.add_double(r.max);
    }
  }
  return h.value();
}

HandModel build_model(const HandConfig& config) {
  HandParameters params = derive_ratios(config.hand_length);
  for (const auto& [name, value] : config.overrides) {
    double* field = scalar_field(params, name);
    if (field == nullptr) throw ConfigError("unknown parameter override '" + name + "'");
    *field = value;
  }
  for (const auto& [name, values] : config.segment_overrides) {
    if (name == "finger_segments_4dof") {
      assign_segments(params.finger_segments_4dof, values, name);
    } else if (name == "finger_segments_3dof") {
      assign_segments(params.finger_segments_3dof, values, name);
    } else if (name == "thumb_segments_4dof") {
      assign_segments(params.thumb_segments_4dof, values, name);
    } else if (name == "thumb_segments_5dof") {
      assign_segments(params.thumb_segments_5dof, values, name);
    } else {
      throw ConfigError("unknown segment override '" + name + "'");
    }
  }
  HandModel model = build_case(config.case_id, params);
  for (const auto& [finger, joints] : config.range_overrides) {
    JointRangeSet& ranges = model.ranges[index_of(finger)];
    for (const auto& [joint_index, range] : joints) {
      if (joint_index >= ranges.size()) {
        throw ConfigError("range override joint " + std::to_string(joint_index) + " out of bounds for " +
                          std::string(to_string(finger)));
      }
      if (!(range.min < range.max)) throw ConfigError("range override needs min < max");
      ranges[joint_index] = range;
    }
  }
  return model;
}

std::string serialize(const HandConfig& config) {
  json doc;
  doc["case"] = case_number(config.case_id);
  doc["hand_length"] = config.hand_length;
  doc["overrides"] = json::object();
  for (const auto& [k, v] : config.overrides) doc["overrides"][k] = v;
  for (const auto& [k, v] : config.segment_overrides) doc["overrides"][k] = v;
  doc["joint_ranges"] = json::object();
  for (const auto& [finger, joints] : config.range_overrides) {
    json& entry = doc["joint_ranges"][std::string(to_string(finger))];
    entry = json::object();
    for (const auto& [j, r] : joints) entry[std::to_string(j)] = json::array({r.min, r.max});
  }
  return doc.dump(2) + "\n";
}

HandConfig parse_hand_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("hand config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("hand config must be a JSON object");
  for (const auto& [key, _] : doc.items()) {
    if (key != "case" && key != "hand_length" && key != "overrides" && key != "joint_ranges") {
      throw ConfigError("unknown hand config key '" + key + "'");
    }
  }
  HandConfig config;
  try {
    config.case_id = case_from_number(doc.at("case").get<int>());
    config.hand_length = doc.value("hand_length", 1.0);
    if (doc.contains("overrides")) {
      for (const auto& [k, v] : doc["overrides"].items()) {
        if (v.is_array()) {
          config.segment_overrides[k] = v.get<std::vector<double>>();
        } else {
          config.overrides[k] = v.get<double>();
        }
      }
    }
    if (doc.contains("joint_ranges")) {
      for (const auto& [finger, joints] : doc["joint_ranges"].items()) {
        auto& dst = config.range_overrides[finger_from_string(finger)];
        for (const auto& [j, r] : joints.items()) {
          const auto bounds = r.get<std::vector<double>>();
          if (bounds.size() != 2) throw ConfigError("joint range must be [min, max]");
          dst[static_cast<std::size_t>(std::stoul(j))] = JointRange{bounds[0], bounds[1]};
        }
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed hand config: ") + e.what());
  }
  return config;
}

HandConfig load_hand_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open hand config: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_hand_config(buffer.str());
}

void save_hand_config(const std::filesystem::path& path, const HandConfig& config) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write hand config: " + path.string());
  out << serialize(config);
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace pinch
