#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "pinch/hand_model.hpp"

namespace pinch {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Rigid homogeneous transform stored as rotation + translation.
struct Transform4 {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static Transform4 identity() { return {}; }
  Transform4 operator*(const Transform4& rhs) const {
    return {rotation * rhs.rotation, rotation * rhs.translation + translation};
  }
  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  Eigen::Matrix4d matrix() const;
};

/// Single modified-DH row: RotX(alpha_{i-1}) * TransX(a_{i-1}) * RotZ(theta_i) * TransZ(d_i).
/// `theta` is used for actuated rows; fixed rows ignore it and use their own angle.
Transform4 dh_transform(const DhRow& row, double theta);

/// Frame k (0-based) is the product of rows 1..k+1, expressed in the palm frame.
/// Throws ContractViolation when q.size() differs from the chain's actuated count.
std::vector<Transform4> forward_kinematics(const KinematicChain& chain, std::span<const double> q);

/// Per-configuration digest of a finger: distal segment and its unit direction.
struct FingertipSample {
  FingerId finger = FingerId::Index;
  std::size_t grid_index = 0;
  Vec3 distal_joint = Vec3::Zero();
  Vec3 tip = Vec3::Zero();
  Vec3 direction = Vec3::UnitX();
  /// Joint positions from the proximal station to the tip.
  std::vector<Vec3> phalanx_points;
};

/// Throws DegenerateGeometry when the distal segment has zero length.
FingertipSample fingertip_sample(const KinematicChain& chain, std::span<const double> q, std::size_t grid_index = 0);

/// Unit direction from `from` to `to`; throws DegenerateGeometry for coincident points.
Vec3 unit_direction(const Vec3& from, const Vec3& to);

}  // namespace pinch
