#include "pinch/pair_index.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <tuple>

#include "pinch/errors.hpp"
#include "pinch/parallel.hpp"

namespace pinch {

namespace {

constexpr std::size_t kMaxCellsPerSide = 1024;
// Any unit vector has a component of magnitude >= 1/sqrt(3); the slack absorbs rounding.
const double kFaceFloor = 1.0 / std::sqrt(3.0) - 1e-9;

struct FaceCoords {
  std::size_t face;
  double u, w;
};

FaceCoords face_coords(const Vec3& v) {
  std::size_t m = 0;
  if (std::abs(v.y()) > std::abs(v[m])) m = 1;
  if (std::abs(v.z()) > std::abs(v[m])) m = 2;
  const std::size_t a = m == 0 ? 1 : 0;
  const std::size_t b = m == 2 ? 1 : 2;
  const double denom = std::abs(v[m]);
  return {2 * m + (v[m] < 0.0 ? 1 : 0), v[a] / denom, v[b] / denom};
}

std::size_t axis_cell(double u, std::size_t n) {
  const double t = std::floor((u + 1.0) * 0.5 * static_cast<double>(n));
  if (!(t > 0.0)) return 0;
  return std::min(static_cast<std::size_t>(t), n - 1);
}

}  // namespace

double parallel_cone_half_angle(double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
  return std::acos(std::max(-1.0, 1.0 - epsilon));
}

DirectionIndex::DirectionIndex(std::span<const Vec3> directions, double epsilon, unsigned workers)
    : epsilon_(epsilon) {
  const double theta = parallel_cone_half_angle(epsilon);
  n_ = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(2.0 / theta)), 1, kMaxCellsPerSide);
  chord_ = std::sqrt(2.0 * epsilon) * (1.0 + 1e-6) + 1e-9;
  if (directions.size() >= std::numeric_limits<std::uint32_t>::max()) {
    throw ContractViolation("direction index holds at most 2^32 - 1 entries");
  }

  std::vector<std::uint32_t> cell(directions.size());
  parallel_chunks(directions.size(), workers, 1 << 16, [&](std::size_t b, std::size_t e, std::size_t, unsigned) {
    for (std::size_t i = b; i < e; ++i) cell[i] = static_cast<std::uint32_t>(cell_of(directions[i]));
  });

  offsets_.assign(cell_count() + 1, 0);
  for (std::uint32_t c : cell) ++offsets_[c + 1];
  for (std::size_t c = 0; c < cell_count(); ++c) offsets_[c + 1] += offsets_[c];
  members_.resize(directions.size());
  std::vector<std::uint32_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t i = 0; i < directions.size(); ++i) members_[fill[cell[i]]++] = static_cast<std::uint32_t>(i);
}

std::size_t DirectionIndex::occupied_cells() const {
  std::size_t n = 0;
  for (std::size_t c = 0; c < cell_count(); ++c) n += offsets_[c + 1] != offsets_[c] ? 1 : 0;
  return n;
}

std::size_t DirectionIndex::cell_of(const Vec3& v) const {
  const FaceCoords fc = face_coords(v);
  return fc.face * n_ * n_ + axis_cell(fc.u, n_) * n_ + axis_cell(fc.w, n_);
}

DirectionIndex::Region DirectionIndex::query(const Vec3& v) const {
  const double c = chord_;
  Region region;
  for (std::size_t m = 0; m < 3; ++m) {
    const std::size_t a = m == 0 ? 1 : 0;
    const std::size_t b = m == 2 ? 1 : 2;
    for (int s = 0; s < 2; ++s) {
      // Candidates d satisfy |d - v| <= c componentwise and |d_m| >= 1/sqrt(3) on this face.
      const double sm = s == 0 ? v[m] : -v[m];
      const double hi_m = sm + c;
      const double lo_m = std::max(sm - c, kFaceFloor);
      if (hi_m < lo_m) continue;
      auto range = [&](double comp) {
        const double lo = comp - c, hi = comp + c;
        const double umin = std::min(lo / lo_m, lo / hi_m) - 1e-9;
        const double umax = std::max(hi / lo_m, hi / hi_m) + 1e-9;
        return std::pair{axis_cell(std::max(umin, -1.0), n_), axis_cell(std::min(umax, 1.0), n_)};
      };
      const auto [r0, r1] = range(v[a]);
      const auto [c0, c1] = range(v[b]);
      region.boxes[region.count++] = CellBox{2 * m + static_cast<std::size_t>(s), r0, r1, c0, c1};
    }
  }
  return region;
}

std::vector<std::pair<std::size_t, std::size_t>> candidate_pairs(const DirectionIndex& ref,
                                                                 std::span<const Vec3> ref_directions,
                                                                 const DirectionIndex& opp) {
  if (ref.epsilon() != opp.epsilon()) throw ContractViolation("direction indexes use different epsilons");
  if (ref_directions.size() != ref.size()) throw ContractViolation("reference directions do not match the index");
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::uint32_t r : ref.members()) {
    opp.for_each_candidate(ref_directions[r], [&](std::size_t o) { out.emplace_back(r, o); });
  }
  return out;
}

std::size_t distinct_directions(std::span<const Vec3> directions) {
  std::vector<std::tuple<std::uint64_t, std::uint64_t, std::uint64_t>> keys;
  keys.reserve(directions.size());
  for (const Vec3& v : directions) {
    keys.emplace_back(std::bit_cast<std::uint64_t>(v.x()), std::bit_cast<std::uint64_t>(v.y()),
                      std::bit_cast<std::uint64_t>(v.z()));
  }
  std::sort(keys.begin(), keys.end());
  return static_cast<std::size_t>(std::unique(keys.begin(), keys.end()) - keys.begin());
}

double Box3::distance_to(const Vec3& p) const {
  double s = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double d = p[k] < lo[k] ? lo[k] - p[k] : (p[k] > hi[k] ? p[k] - hi[k] : 0.0);
    s += d * d;
  }
  return std::sqrt(s);
}

PointGrid::PointGrid(std::span<const Vec3> points, double cell_size) {
  if (!(cell_size > 0.0)) throw DomainError("cell size must be positive");
  if (points.empty()) return;
  if (points.size() >= std::numeric_limits<std::uint32_t>::max()) {
    throw ContractViolation("point grid holds at most 2^32 - 1 points");
  }
  Vec3 lo = points[0], hi = points[0];
  for (const Vec3& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  std::array<std::size_t, 3> dims{};
  for (int k = 0; k < 3; ++k) dims[k] = static_cast<std::size_t>((hi[k] - lo[k]) / cell_size) + 1;

  std::vector<std::uint32_t> cell(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::size_t id = 0;
    for (int k = 0; k < 3; ++k) {
      const auto c = std::min(static_cast<std::size_t>((points[i][k] - lo[k]) / cell_size), dims[k] - 1);
      id = id * dims[k] + c;
    }
    cell[i] = static_cast<std::uint32_t>(id);
  }
  std::vector<std::uint32_t> order(points.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<std::uint32_t>(i);
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t x, std::uint32_t y) { return cell[x] < cell[y]; });
  members_ = order;

  for (std::size_t s = 0; s < members_.size();) {
    std::size_t e = s;
    Cell c;
    c.box.lo = c.box.hi = points[members_[s]];
    while (e < members_.size() && cell[members_[e]] == cell[members_[s]]) {
      c.box.lo = c.box.lo.cwiseMin(points[members_[e]]);
      c.box.hi = c.box.hi.cwiseMax(points[members_[e]]);
      ++e;
    }
    c.begin = static_cast<std::uint32_t>(s);
    c.end = static_cast<std::uint32_t>(e);
    cells_.push_back(c);
    s = e;
  }
}

IntervalIndex::IntervalIndex(std::span<const double> lo, std::span<const double> hi, std::size_t bins) {
  if (lo.size() != hi.size()) throw ContractViolation("interval bounds differ in length");
  if (lo.empty()) return;
  bins_ = std::max<std::size_t>(bins, 1);
  origin_ = *std::min_element(lo.begin(), lo.end());
  const double top = *std::max_element(hi.begin(), hi.end());
  top_ = top;
  width_ = top > origin_ ? (top - origin_) / static_cast<double>(bins_) : 1.0;
  auto bin = [&](double x) {
    const double t = std::floor((x - origin_) / width_);
    if (!(t > 0.0)) return std::size_t{0};
    return std::min(static_cast<std::size_t>(t), bins_ - 1);
  };
  offsets_.assign(bins_ + 1, 0);
  for (std::size_t i = 0; i < lo.size(); ++i) {
    for (std::size_t b = bin(lo[i]); b <= bin(hi[i]); ++b) ++offsets_[b + 1];
  }
  for (std::size_t b = 0; b < bins_; ++b) offsets_[b + 1] += offsets_[b];
  items_.resize(offsets_.back());
  std::vector<std::uint32_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t i = 0; i < lo.size(); ++i) {
    for (std::size_t b = bin(lo[i]); b <= bin(hi[i]); ++b) items_[fill[b]++] = static_cast<std::uint32_t>(i);
  }
}

std::span<const std::uint32_t> IntervalIndex::stab(double x) const {
  if (bins_ == 0 || x < origin_ || x > top_) return {};
  const double t = std::floor((x - origin_) / width_);
  if (!(t >= 0.0)) return {};
  const std::size_t b = std::min(static_cast<std::size_t>(t), bins_ - 1);
  return {items_.data() + offsets_[b], offsets_[b + 1] - offsets_[b]};
}

}  // namespace pinch
