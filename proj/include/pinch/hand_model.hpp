#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pinch {

enum class CaseId { Case1 = 1, Case2 = 2, Case3 = 3, Case4 = 4 };

/// Finger identities in a fixed order; the numeric value indexes per-finger arrays.
enum class FingerId { Thumb = 0, Index = 1, Middle = 2, Ring = 3, Little = 4 };

inline constexpr std::array<FingerId, 5> kAllFingers{FingerId::Thumb, FingerId::Index, FingerId::Middle,
                                                     FingerId::Ring, FingerId::Little};
inline constexpr std::array<FingerId, 4> kOpposingFingers{FingerId::Index, FingerId::Middle, FingerId::Ring,
                                                          FingerId::Little};
inline constexpr std::array<CaseId, 4> kAllCases{CaseId::Case1, CaseId::Case2, CaseId::Case3, CaseId::Case4};

constexpr std::size_t index_of(FingerId f) { return static_cast<std::size_t>(f); }
std::string_view to_string(FingerId f);
FingerId finger_from_string(std::string_view name);
int case_number(CaseId c);
CaseId case_from_number(int n);

/// Number of actuated joints of the four non-thumb fingers for a case.
int finger_dof(CaseId c);
/// Number of actuated joints of the thumb for a case.
int thumb_dof(CaseId c);

/// Link lengths and offsets of the hand, all in the same length unit as hand_length.
///
/// The defaults describe a hand of unit length. Segment lengths are the rounded
/// per-case values; every segment list sums to its finger/thumb length.
struct HandParameters {
  double hand_length = 1.0;
  double hand_width = 0.54;
  double finger_length = 0.45;
  double thumb_length = 0.51;
  /// Offset from the palm origin to the first thumb joint (a_0').
  double thumb_base_offset = 0.1;
  /// Offset between the first and second thumb joints (a_1').
  double thumb_root_offset = 0.1;
  /// Depth of the finger stations from the palm origin (d_1 = hand_length - finger_length).
  double finger_station_depth = 1.0 - 0.45;
  /// Lateral spacing between neighbouring finger stations (a_2).
  double finger_spacing = 0.18;
  /// Station offset of the finger base along its mounting frame (a_1).
  double station_offset = 0.18;
  /// Proximal, middle and distal phalanx of the 4-DoF finger.
  std::array<double, 3> finger_segments_4dof{0.23, 0.12, 0.10};
  /// Proximal and combined middle/distal phalanx of the 3-DoF finger.
  std::array<double, 2> finger_segments_3dof{0.23, 0.22};
  /// Thumb links a_2', a_3', a_4' of the 4-DoF thumb.
  std::array<double, 3> thumb_segments_4dof{0.24, 0.16, 0.11};
  /// Thumb links a_2', a_6', a_7' of the 5-DoF thumb.
  std::array<double, 3> thumb_segments_5dof{0.24, 0.16, 0.11};

  bool operator==(const HandParameters&) const = default;
};

/// Scales the reference unit hand to `hand_length`. Throws DomainError for non-positive lengths.
HandParameters derive_ratios(double hand_length);

/// Throws DomainError when a length is non-finite or non-positive where it must be positive.
void validate(const HandParameters& params);

struct FixedAngle {
  double radians = 0.0;
  bool operator==(const FixedAngle&) const = default;
};
struct ActuatedJoint {
  std::size_t index = 0;
  bool operator==(const ActuatedJoint&) const = default;
};

/// One row of a modified Denavit-Hartenberg table: alpha_{i-1}, a_{i-1}, d_i, theta_i.
struct DhRow {
  double alpha_prev = 0.0;
  double a_prev = 0.0;
  double d = 0.0;
  std::variant<FixedAngle, ActuatedJoint> theta;

  bool actuated() const { return std::holds_alternative<ActuatedJoint>(theta); }
  bool operator==(const DhRow&) const = default;
};

struct KinematicChain {
  FingerId finger = FingerId::Index;
  std::vector<DhRow> rows;
  std::size_t actuated_count = 0;
  /// Frame numbers (rows applied, 1-based) whose origins form the phalanx polyline,
  /// proximal to distal. The last two delimit the distal segment.
  std::vector<std::size_t> phalanx_frames;

  std::size_t distal_row() const { return rows.size() - 1; }
  std::size_t phalanx_count() const { return phalanx_frames.size() - 1; }
  bool operator==(const KinematicChain&) const = default;
};

struct JointRange {
  double min = 0.0;
  double max = 0.0;
  double width() const { return max - min; }
  bool operator==(const JointRange&) const = default;
};
using JointRangeSet = std::vector<JointRange>;

/// Joint ranges used for the reproduction runs. The 60 degree thumb range is
/// assigned to the thumb abduction joint of the 5-DoF thumb (see README).
JointRangeSet joint_ranges(CaseId c, FingerId f);

/// Thumb ranges read column-by-column from the published range table, keyed by case row.
/// Only meaningful for sensitivity runs; grid sizes no longer match the published counts.
JointRangeSet literal_thumb_ranges(CaseId c);

struct HandModel {
  CaseId case_id = CaseId::Case4;
  HandParameters params;
  std::array<KinematicChain, 5> chains;
  std::array<JointRangeSet, 5> ranges;

  const KinematicChain& chain(FingerId f) const { return chains[index_of(f)]; }
  const JointRangeSet& joint_ranges(FingerId f) const { return ranges[index_of(f)]; }
  /// Stable 64-bit content hash of chains and ranges; used to key caches and to
  /// reject sample sets that come from different models.
  std::uint64_t fingerprint() const;
  bool operator==(const HandModel&) const = default;
};

/// Builds the five chains of a case from validated parameters.
HandModel build_case(CaseId c, const HandParameters& params);

KinematicChain finger_chain(FingerId f, int dof, const HandParameters& params);
KinematicChain thumb_chain(int dof, const HandParameters& params);

/// Structured, serializable description of a hand model.
struct HandConfig {
  CaseId case_id = CaseId::Case4;
  double hand_length = 1.0;
  /// Scalar parameter overrides keyed by HandParameters field name.
  std::map<std::string, double> overrides;
  /// Segment-list overrides keyed by HandParameters array field name.
  std::map<std::string, std::vector<double>> segment_overrides;
  /// Per-finger, per-joint range overrides.
  std::map<FingerId, std::map<std::size_t, JointRange>> range_overrides;

  bool operator==(const HandConfig&) const = default;
};

HandModel build_model(const HandConfig& config);
std::string serialize(const HandConfig& config);
HandConfig parse_hand_config(std::string_view text);
HandConfig load_hand_config(const std::filesystem::path& path);
void save_hand_config(const std::filesystem::path& path, const HandConfig& config);

}  // namespace pinch
