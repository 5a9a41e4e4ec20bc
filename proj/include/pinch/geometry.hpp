#pragma once

#include <cmath>

#include "pinch/kinematics.hpp"

namespace pinch {

/// Fixed-order dot product; every detector uses this so pruned and exhaustive runs agree bit for bit.
inline double dot3(const Vec3& a, const Vec3& b) { return a.x() * b.x() + a.y() * b.y() + a.z() * b.z(); }

/// Euclidean distance with a fixed evaluation order; symmetric in its arguments.
inline double distance3(const Vec3& a, const Vec3& b) {
  const double dx = a.x() - b.x();
  const double dy = a.y() - b.y();
  const double dz = a.z() - b.z();
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

/// Point a + s (b - a).
inline Vec3 lerp3(const Vec3& a, const Vec3& b, double s) {
  return {a.x() + s * (b.x() - a.x()), a.y() + s * (b.y() - a.y()), a.z() + s * (b.z() - a.z())};
}

}  // namespace pinch
