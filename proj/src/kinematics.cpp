#include "pinch/kinematics.hpp"

#include <cmath>
#include <string>

#include "pinch/errors.hpp"

namespace pinch {

Eigen::Matrix4d Transform4::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation;
  m.topRightCorner<3, 1>() = translation;
  return m;
}

Transform4 dh_transform(const DhRow& row, double theta) {
  if (const auto* f = std::get_if<FixedAngle>(&row.theta)) theta = f->radians;
  const double ct = std::cos(theta);
  const double st = std::sin(theta);
  const double ca = std::cos(row.alpha_prev);
  const double sa = std::sin(row.alpha_prev);

  Transform4 t;
  t.rotation << ct, -st, 0.0,
                st * ca, ct * ca, -sa,
                st * sa, ct * sa, ca;
  t.translation << row.a_prev, -sa * row.d, ca * row.d;
  return t;
}

namespace {

double joint_angle(const DhRow& row, std::span<const double> q) {
  if (const auto* j = std::get_if<ActuatedJoint>(&row.theta)) return q[j->index];
  return 0.0;
}

void check_length(const KinematicChain& chain, std::span<const double> q) {
  if (q.size() != chain.actuated_count) {
    throw ContractViolation("configuration has " + std::to_string(q.size()) + " angles, chain expects " +
                            std::to_string(chain.actuated_count));
  }
}

}  // namespace

std::vector<Transform4> forward_kinematics(const KinematicChain& chain, std::span<const double> q) {
  check_length(chain, q);
  std::vector<Transform4> frames;
  frames.reserve(chain.rows.size());
  Transform4 acc;
  for (const DhRow& row : chain.rows) {
    acc = acc * dh_transform(row, joint_angle(row, q));
    frames.push_back(acc);
  }
  return frames;
}

Vec3 unit_direction(const Vec3& from, const Vec3& to) {
  const Vec3 d = to - from;
  const double n = d.norm();
  if (!(n > 0.0)) throw DegenerateGeometry("zero-length distal segment; direction is undefined");
  return d / n;
}

FingertipSample fingertip_sample(const KinematicChain& chain, std::span<const double> q, std::size_t grid_index) {
  const std::vector<Transform4> frames = forward_kinematics(chain, q);
  FingertipSample s;
  s.finger = chain.finger;
  s.grid_index = grid_index;
  s.phalanx_points.reserve(chain.phalanx_frames.size());
  for (std::size_t frame : chain.phalanx_frames) s.phalanx_points.push_back(frames[frame - 1].translation);
  s.tip = frames.back().translation;
  s.distal_joint = frames[frames.size() - 2].translation;
  s.direction = unit_direction(s.distal_joint, s.tip);
  return s;
}

}  // namespace pinch
