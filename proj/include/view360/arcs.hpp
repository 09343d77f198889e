#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "view360/geometry.hpp"

namespace view360 {

// Gaps up to this many degrees are treated as adjacency when merging.
inline constexpr double kArcMergeTolerance = 1e-9;

// A yaw arc on the 360-degree circle, half-open [start, start+length).
// start is kept in [0, 360); start+length may exceed 360 for arcs that
// wrap past the seam. length 360 denotes the full circle.
struct Arc {
  double start_deg;
  double length_deg;

  Arc(double start, double length) {
    if (!std::isfinite(start) || !std::isfinite(length))
      throw std::invalid_argument("arc parameters must be finite");
    if (!(length > 0.0) || length > 360.0)
      throw std::invalid_argument("arc length must be in (0, 360]");
    start_deg = normalize_angle_360(start);
    length_deg = length;
  }

  double end_deg() const { return start_deg + length_deg; }
  bool wraps() const { return end_deg() > 360.0; }
};

// Arc of the given width centered on a yaw angle.
inline Arc centered_arc(double center_yaw_deg, double width_deg) {
  return Arc(center_yaw_deg - width_deg / 2.0, width_deg);
}

namespace detail {

// Linear piece of an arc after splitting at the 0/360 seam.
struct Segment {
  double lo;
  double hi;
};

inline void append_segments(const Arc& a, std::vector<Segment>& out) {
  if (a.wraps()) {
    out.push_back({a.start_deg, 360.0});
    out.push_back({0.0, a.end_deg() - 360.0});
  } else {
    out.push_back({a.start_deg, a.end_deg()});
  }
}

inline double segment_overlap(const Segment& a, const Segment& b) {
  return std::max(0.0, std::min(a.hi, b.hi) - std::max(a.lo, b.lo));
}

}  // namespace detail

// Disjoint union of yaw arcs in canonical form: arcs are pairwise
// disjoint, non-adjacent, and ordered by start_deg; at most one arc
// wraps past the seam. The representation of a covered set is unique.
class ArcSet {
 public:
  ArcSet() = default;

  const std::vector<Arc>& arcs() const { return arcs_; }
  bool empty() const { return arcs_.empty(); }

  static ArcSet from_merged_segments(std::vector<detail::Segment> segs) {
    ArcSet set;
    if (segs.empty()) return set;
    std::sort(segs.begin(), segs.end(),
              [](const detail::Segment& a, const detail::Segment& b) { return a.lo < b.lo; });
    std::vector<detail::Segment> merged;
    merged.push_back(segs.front());
    for (size_t i = 1; i < segs.size(); ++i) {
      if (segs[i].lo <= merged.back().hi + kArcMergeTolerance) {
        merged.back().hi = std::max(merged.back().hi, segs[i].hi);
      } else {
        merged.push_back(segs[i]);
      }
    }

    double total = 0.0;
    for (const auto& s : merged) total += s.hi - s.lo;
    if (total >= 360.0 - kArcMergeTolerance) {
      set.arcs_.emplace_back(0.0, 360.0);
      return set;
    }

    // Rejoin the seam: a piece ending at 360 and a piece starting at 0
    // form a single wrapping arc.
    const bool joins = merged.size() >= 2 && merged.front().lo <= kArcMergeTolerance &&
                       merged.back().hi >= 360.0 - kArcMergeTolerance;
    size_t first = 0;
    size_t last = merged.size();
    if (joins) {
      first = 1;
      last = merged.size() - 1;
    }
    for (size_t i = first; i < last; ++i)
      set.arcs_.emplace_back(merged[i].lo, merged[i].hi - merged[i].lo);
    if (joins) {
      const double len = (360.0 - merged.back().lo) + merged.front().hi;
      set.arcs_.emplace_back(merged.back().lo, len);
    }
    return set;
  }

 private:
  std::vector<Arc> arcs_;
};

// Union of a set and one more arc, in canonical form.
inline ArcSet insert(const ArcSet& set, const Arc& arc) {
  std::vector<detail::Segment> segs;
  segs.reserve(set.arcs().size() * 2 + 2);
  for (const auto& a : set.arcs()) detail::append_segments(a, segs);
  detail::append_segments(arc, segs);
  return ArcSet::from_merged_segments(std::move(segs));
}

// Angular length of the intersection of two arcs.
inline double arc_intersection_length(const Arc& a, const Arc& b) {
  std::vector<detail::Segment> sa, sb;
  detail::append_segments(a, sa);
  detail::append_segments(b, sb);
  double total = 0.0;
  for (const auto& x : sa)
    for (const auto& y : sb) total += detail::segment_overlap(x, y);
  return total;
}

// Angular length of (set intersect arc).
inline double intersection_length(const ArcSet& set, const Arc& arc) {
  std::vector<detail::Segment> query;
  detail::append_segments(arc, query);
  double total = 0.0;
  for (const auto& a : set.arcs()) {
    std::vector<detail::Segment> segs;
    detail::append_segments(a, segs);
    for (const auto& s : segs)
      for (const auto& q : query) total += detail::segment_overlap(s, q);
  }
  return total;
}

// Sum of arc lengths, in [0, 360].
inline double total_length(const ArcSet& set) {
  double total = 0.0;
  for (const auto& a : set.arcs()) total += a.length_deg;
  return total;
}

}  // namespace view360
