#pragma once

// Brute-force reference implementations, independent of the library's
// closed-form paths. Test-only.

#include <cmath>
#include <vector>

#include "view360/arcs.hpp"
#include "view360/geometry.hpp"
#include "view360/qoe.hpp"

namespace view360::testing {

// Walks the grid cells of viewport a and accumulates how much of each
// cell lies inside viewport b (boundary cells count fractionally). Yaw
// cells are placed by circular offset from b's center; pitch is a plain
// line with no wrap. Valid as geometric ground truth for widths up to
// 180 (wider viewports would also meet behind the viewer, which the
// overlap metric deliberately ignores).
inline double grid_overlap_oracle(const Direction& a, const Direction& b,
                                  const ViewportSpec& vp, double cell_deg = 0.05) {
  const auto axis_fraction = [cell_deg](double a_center, double b_center, double width,
                                        bool circular) {
    const int n = static_cast<int>(std::ceil(width / cell_deg - 1e-12));
    double covered = 0.0;
    for (int k = 0; k < n; ++k) {
      const double lo = -width / 2.0 + k * cell_deg;  // cell in a-local coords
      const double hi = std::min(lo + cell_deg, width / 2.0);
      double off = a_center + (lo + hi) / 2.0 - b_center;
      if (circular) off = normalize_yaw(off);
      const double half = (hi - lo) / 2.0;
      covered += std::max(0.0, std::min(off + half, width / 2.0) -
                                   std::max(off - half, -width / 2.0));
    }
    return covered / width;
  };
  const double fx = axis_fraction(a.yaw_deg, b.yaw_deg, vp.width_deg, true);
  if (vp.is_sliced()) return fx;
  return fx * axis_fraction(a.pitch_deg, b.pitch_deg, *vp.height_deg, false);
}

// 2-D variant for cover boxes: counts cells of box a inside box b.
// Returns the raw overlap area in square degrees.
inline double grid_box_overlap_area(const Arc& a_yaw, double a_plo, double a_phi,
                                    const Arc& b_yaw, double b_plo, double b_phi,
                                    double cell_deg = 0.05) {
  const auto in_arc = [&](double yaw, const Arc& arc) {
    const double rel = normalize_angle_360(yaw - arc.start_deg);
    return rel < arc.length_deg;
  };
  const int nx = static_cast<int>(std::llround(a_yaw.length_deg / cell_deg));
  int in_x = 0;
  for (int k = 0; k < nx; ++k) {
    const double c = a_yaw.start_deg + (k + 0.5) * cell_deg;
    if (in_arc(c, b_yaw)) ++in_x;
  }
  const int ny = static_cast<int>(std::llround((a_phi - a_plo) / cell_deg));
  int in_y = 0;
  for (int k = 0; k < ny; ++k) {
    const double c = a_plo + (k + 0.5) * cell_deg;
    if (c > b_plo && c < b_phi) ++in_y;
  }
  return (in_x * cell_deg) * (in_y * cell_deg);
}

// Boolean array over the circle at 0.1-degree cells. Arc endpoints are
// expected on the cell grid so comparisons are exact at cell
// granularity.
class BooleanCircle {
 public:
  static constexpr double kCellDeg = 0.1;
  static constexpr int kCells = 3600;

  void mark(const Arc& arc) {
    const int start = cell_index(arc.start_deg);
    const int len = length_cells(arc.length_deg);
    for (int k = 0; k < len; ++k) cells_[(start + k) % kCells] = true;
  }

  int marked_cells() const {
    int n = 0;
    for (bool c : cells_) n += c ? 1 : 0;
    return n;
  }

  int cells_in(const Arc& arc) const {
    const int start = cell_index(arc.start_deg);
    const int len = length_cells(arc.length_deg);
    int n = 0;
    for (int k = 0; k < len; ++k) n += cells_[(start + k) % kCells] ? 1 : 0;
    return n;
  }

  static int cell_index(double deg) {
    return static_cast<int>(std::llround(deg / kCellDeg)) % kCells;
  }
  static int length_cells(double deg) {
    return static_cast<int>(std::llround(deg / kCellDeg));
  }

 private:
  std::vector<bool> cells_ = std::vector<bool>(kCells, false);
};

// Multiple-choice knapsack value: with no smoothness coupling the tile
// choices separate, so a plain per-tile budget DP gives the optimum of
// sum_i P_i * u(q_i) subject to the rate budget.
inline double mck_value_oracle(const TileViewProbability& probs, double budget,
                               const QualityLadder& ladder, const UtilityParams& params) {
  const std::vector<double> util = utility_levels(ladder, params);
  const int64_t cap = static_cast<int64_t>(probs.tiles()) * ladder.max_rate();
  const size_t B = static_cast<size_t>(
      std::min(static_cast<int64_t>(std::floor(budget)), cap));
  std::vector<double> dp(B + 1, 0.0);
  constexpr double kNegInf = -1e300;
  for (int i = 0; i < probs.tiles(); ++i) {
    std::vector<double> next(B + 1, kNegInf);
    for (size_t q = 0; q < ladder.levels(); ++q) {
      const int64_t r = ladder.rates[q];
      if (r > static_cast<int64_t>(B)) continue;
      const double gain = probs.probs[static_cast<size_t>(i)] * util[q];
      for (size_t b = static_cast<size_t>(r); b <= B; ++b)
        next[b] = std::max(next[b], dp[b - static_cast<size_t>(r)] + gain);
    }
    dp = std::move(next);
  }
  double best = kNegInf;
  for (double v : dp) best = std::max(best, v);
  return best;
}

}  // namespace view360::testing
