#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>

#include "view360/arcs.hpp"
#include "view360/geometry.hpp"
#include "view360/traces.hpp"

namespace view360 {

// Fixed-duration chunk windows; chunk k spans [k*duration, (k+1)*duration).
struct ChunkGrid {
  int64_t duration_ms;
  int chunk_count;

  int64_t start_ms(int chunk) const { return chunk * duration_ms; }
  int64_t end_ms(int chunk) const { return (chunk + 1) * duration_ms; }
};

inline ChunkGrid make_chunk_grid(int64_t common_duration_ms, int64_t chunk_ms) {
  if (chunk_ms <= 0) throw std::invalid_argument("chunk duration must be > 0");
  const int count = static_cast<int>(common_duration_ms / chunk_ms);
  if (count < 1)
    throw std::invalid_argument("trace shorter than one chunk (" +
                                std::to_string(common_duration_ms) + " ms < " +
                                std::to_string(chunk_ms) + " ms)");
  return ChunkGrid{chunk_ms, count};
}

// Maximum accumulated movement within a chunk, relative to the viewing
// direction at chunk start: left/right along yaw, down/up along pitch.
struct DirectionalExtent {
  double psi_minus = 0.0;
  double psi_plus = 0.0;
  double theta_minus = 0.0;
  double theta_plus = 0.0;
};

// Accumulates 10 ms steps over [start, start+duration]. Each yaw step is
// folded into (-180, 180] before summing, so crossing the seam counts as
// the short way around; the extents are the prefix-sum extremes floored
// at zero. Pitch accumulates without folding.
inline DirectionalExtent chunk_extent(const HeadTrace& trace, int64_t start_ms,
                                      int64_t duration_ms) {
  if (duration_ms <= 0) throw std::invalid_argument("chunk duration must be > 0");
  const int64_t end_ms = start_ms + duration_ms;
  Direction prev = sample_at(trace, start_ms);
  double yaw_sum = 0.0, yaw_min = 0.0, yaw_max = 0.0;
  double pitch_sum = 0.0, pitch_min = 0.0, pitch_max = 0.0;
  int64_t t = start_ms;
  while (t < end_ms) {
    t = std::min(t + kSampleSpacingMs, end_ms);
    const Direction cur = sample_at(trace, t);
    double dyaw = cur.yaw_deg - prev.yaw_deg;
    if (dyaw > 180.0) dyaw -= 360.0;
    if (dyaw <= -180.0) dyaw += 360.0;
    yaw_sum += dyaw;
    yaw_min = std::min(yaw_min, yaw_sum);
    yaw_max = std::max(yaw_max, yaw_sum);
    pitch_sum += cur.pitch_deg - prev.pitch_deg;
    pitch_min = std::min(pitch_min, pitch_sum);
    pitch_max = std::max(pitch_max, pitch_sum);
    prev = cur;
  }
  return DirectionalExtent{-yaw_min, yaw_max, -pitch_min, pitch_max};
}

// Upper bound on the viewing-direction change within the chunk.
inline double direction_change_bound(const DirectionalExtent& e) {
  return std::hypot(e.psi_plus + e.psi_minus, e.theta_plus + e.theta_minus);
}

// Yaw-only variant of the bound.
inline double direction_change_bound_yaw(const DirectionalExtent& e) {
  return e.psi_plus + e.psi_minus;
}

// Bounding box of everything a viewport sweeps during a chunk: the
// viewport anchored at the chunk-start direction, extended by the
// directional extents. The pitch span is clamped to [-90, 90]; the yaw
// arc caps at the full circle.
struct CoverBox {
  Arc yaw_arc;
  std::optional<std::pair<double, double>> pitch_span;  // absent for sliced viewports
  ViewportSpec viewport;

  double pitch_height() const {
    return pitch_span ? pitch_span->second - pitch_span->first : 0.0;
  }
};

struct ChunkCover {
  CoverBox box;
  // Cover area over viewport area: in [1, 360*180/(W*H)], or
  // [1, 360/W] for sliced viewports.
  double normalized_size;
};

inline ChunkCover chunk_cover(const DirectionalExtent& e, const ViewportSpec& vp,
                              const Direction& chunk_start) {
  const double W = vp.width_deg;
  const double yaw_width = std::min(360.0, W + e.psi_minus + e.psi_plus);
  Arc yaw_arc(chunk_start.yaw_deg - W / 2.0 - e.psi_minus, yaw_width);
  if (vp.is_sliced())
    return ChunkCover{CoverBox{yaw_arc, std::nullopt, vp}, yaw_width / W};
  const double H = *vp.height_deg;
  const double lo = std::max(-90.0, chunk_start.pitch_deg - H / 2.0 - e.theta_minus);
  const double hi = std::min(90.0, chunk_start.pitch_deg + H / 2.0 + e.theta_plus);
  const double pitch_extent = std::min(180.0, H + e.theta_minus + e.theta_plus);
  return ChunkCover{CoverBox{yaw_arc, std::make_pair(lo, hi), vp},
                    (yaw_width * pitch_extent) / (W * H)};
}

struct CoverOverlap {
  double rel_to_box;       // fraction of box a covered by box b, in [0, 1]
  double rel_to_viewport;  // same intersection over the viewport area
};

// Intersection of two cover boxes built from the same viewport,
// normalized to user a's box and to the plain viewport.
inline CoverOverlap pairwise_cover_overlap(const CoverBox& a, const CoverBox& b) {
  const double x = arc_intersection_length(a.yaw_arc, b.yaw_arc);
  if (a.viewport.is_sliced() || !a.pitch_span || !b.pitch_span)
    return CoverOverlap{x / a.yaw_arc.length_deg, x / a.viewport.width_deg};
  const double y = std::max(0.0, std::min(a.pitch_span->second, b.pitch_span->second) -
                                     std::max(a.pitch_span->first, b.pitch_span->first));
  const double vp_area = a.viewport.width_deg * *a.viewport.height_deg;
  return CoverOverlap{(x * y) / (a.yaw_arc.length_deg * a.pitch_height()),
                      (x * y) / vp_area};
}

}  // namespace view360
