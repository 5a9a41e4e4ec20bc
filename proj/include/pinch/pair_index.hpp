#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "pinch/kinematics.hpp"

namespace pinch {

/// Half-angle of the cone of directions d with 1 - v.d < epsilon.
double parallel_cone_half_angle(double epsilon);

/// Unit directions bucketed on the six faces of a cube, N x N cells per face.
///
/// Cells are at most parallel_cone_half_angle(epsilon) wide (N is capped at 1024). Queries bound
/// the face coordinates of every direction within the chord sqrt(2*epsilon) of the query, so
/// they return a superset of the directions passing the parallel test.
class DirectionIndex {
 public:
  DirectionIndex() = default;
  DirectionIndex(std::span<const Vec3> directions, double epsilon, unsigned workers = 1);

  double epsilon() const { return epsilon_; }
  std::size_t cells_per_side() const { return n_; }
  std::size_t cell_count() const { return 6 * n_ * n_; }
  std::size_t size() const { return members_.size(); }
  std::size_t occupied_cells() const;
  /// Cell id of a direction: face * N * N + row * N + column.
  std::size_t cell_of(const Vec3& v) const;
  std::span<const std::uint32_t> cell_members(std::size_t cell) const {
    return {members_.data() + offsets_[cell], offsets_[cell + 1] - offsets_[cell]};
  }
  /// All members in cell order; `position(i)` is the slot of members()[i].
  std::span<const std::uint32_t> members() const { return members_; }

  struct CellBox {
    std::size_t face = 0, r0 = 0, r1 = 0, c0 = 0, c1 = 0;
  };
  /// Cell blocks that may hold a direction d with 1 - v.d < epsilon(). Depends only on v,
  /// epsilon and the cell count, so one region serves every index built with the same epsilon.
  struct Region {
    std::array<CellBox, 6> boxes;
    int count = 0;
  };
  Region query(const Vec3& v) const;
  bool compatible(const DirectionIndex& other) const { return n_ == other.n_ && chord_ == other.chord_; }

  /// Calls fn(slot_begin, slot_end) for each non-empty cell range of `region`. Slots index members().
  template <class Fn>
  void for_each_range(const Region& region, Fn&& fn) const {
    for (int b = 0; b < region.count; ++b) {
      const CellBox& box = region.boxes[b];
      for (std::size_t r = box.r0; r <= box.r1; ++r) {
        const std::size_t row = box.face * n_ * n_ + r * n_;
        const std::uint32_t begin = offsets_[row + box.c0];
        const std::uint32_t end = offsets_[row + box.c1 + 1];
        if (begin != end) fn(begin, end);
      }
    }
  }
  template <class Fn>
  void for_each_candidate_range(const Vec3& v, Fn&& fn) const {
    for_each_range(query(v), fn);
  }
  /// Calls fn(member) for every candidate member index.
  template <class Fn>
  void for_each_candidate(const Vec3& v, Fn&& fn) const {
    for_each_candidate_range(v, [&](std::uint32_t b, std::uint32_t e) {
      for (std::uint32_t s = b; s < e; ++s) fn(static_cast<std::size_t>(members_[s]));
    });
  }

 private:
  double epsilon_ = 0.0;
  double chord_ = 0.0;
  std::size_t n_ = 1;
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> members_;
};

/// Every (reference, opposing) member pair whose directions may pass the parallel test.
/// Throws ContractViolation when the two indexes were built for different epsilons.
std::vector<std::pair<std::size_t, std::size_t>> candidate_pairs(const DirectionIndex& ref,
                                                                 std::span<const Vec3> ref_directions,
                                                                 const DirectionIndex& opp);

/// Number of distinct direction vectors (bitwise) in a set.
std::size_t distinct_directions(std::span<const Vec3> directions);

struct Box3 {
  Vec3 lo = Vec3::Constant(0.0);
  Vec3 hi = Vec3::Constant(0.0);
  /// Lower bound on the distance from p to any point in the box.
  double distance_to(const Vec3& p) const;
};

/// Uniform 3D grid of cubic cells over a point set. Each cell keeps the tight bounding box of
/// its own points, so pruning by cell bounds never drops a point.
class PointGrid {
 public:
  PointGrid() = default;
  PointGrid(std::span<const Vec3> points, double cell_size);

  std::size_t size() const { return members_.size(); }
  std::size_t occupied_cells() const { return cells_.size(); }

  /// Visits every occupied cell whose box passes `keep(box)` and calls fn(member) for its members.
  template <class Keep, class Fn>
  void for_each(Keep&& keep, Fn&& fn) const {
    for (const Cell& c : cells_) {
      if (!keep(c.box)) continue;
      for (std::uint32_t s = c.begin; s < c.end; ++s) fn(static_cast<std::size_t>(members_[s]));
    }
  }

 private:
  struct Cell {
    Box3 box;
    std::uint32_t begin = 0, end = 0;
  };
  std::vector<Cell> cells_;
  std::vector<std::uint32_t> members_;
};

/// Closed x-intervals bucketed into uniform bins for stabbing queries.
class IntervalIndex {
 public:
  IntervalIndex() = default;
  /// Item i covers [lo[i], hi[i]].
  IntervalIndex(std::span<const double> lo, std::span<const double> hi, std::size_t bins);

  /// Superset of the items whose interval contains x.
  std::span<const std::uint32_t> stab(double x) const;

 private:
  double origin_ = 0.0;
  double top_ = 0.0;
  double width_ = 1.0;
  std::size_t bins_ = 0;
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> items_;
};

}  // namespace pinch
