#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace view360 {

// Folds an angle into [-180, 180).
inline double normalize_yaw(double yaw_deg) {
  double r = std::fmod(yaw_deg + 180.0, 360.0);
  if (r < 0.0) r += 360.0;
  return r - 180.0;
}

// Folds an angle into [0, 360).
inline double normalize_angle_360(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0.0) r += 360.0;
  return r;
}

// A viewing direction. Yaw measures sideways rotation and wraps at
// +-180; pitch measures vertical rotation and is bounded by +-90.
struct Direction {
  double yaw_deg;    // [-180, 180)
  double pitch_deg;  // [-90, 90]

  Direction(double yaw, double pitch) {
    if (!std::isfinite(yaw) || !std::isfinite(pitch))
      throw std::invalid_argument("direction components must be finite");
    if (pitch < -90.0 - 1e-9 || pitch > 90.0 + 1e-9)
      throw std::invalid_argument("pitch out of range [-90, 90]: " + std::to_string(pitch));
    yaw_deg = normalize_yaw(yaw);
    pitch_deg = pitch < -90.0 ? -90.0 : (pitch > 90.0 ? 90.0 : pitch);
  }
};

// Angular extent of a viewport. A missing height means a vertically
// sliced viewport: pitch is ignored and only the yaw arc of width W
// counts.
struct ViewportSpec {
  double width_deg;                  // (0, 360]
  std::optional<double> height_deg;  // (0, 180] when present

  static ViewportSpec rect(double width, double height) {
    validate_width(width);
    if (!(height > 0.0) || height > 180.0)
      throw std::invalid_argument("viewport height must be in (0, 180]");
    return ViewportSpec{width, height};
  }

  static ViewportSpec sliced(double width) {
    validate_width(width);
    return ViewportSpec{width, std::nullopt};
  }

  bool is_sliced() const { return !height_deg.has_value(); }

 private:
  static void validate_width(double width) {
    if (!(width > 0.0) || width > 360.0)
      throw std::invalid_argument("viewport width must be in (0, 360]");
  }
};

// Yaw difference with wraparound, in [0, 180].
inline double yaw_difference(const Direction& a, const Direction& b) {
  const double d = std::fabs(a.yaw_deg - b.yaw_deg);
  return std::min(d, 360.0 - d);
}

// Pitch difference, in [0, 180]. No wraparound.
inline double pitch_difference(const Direction& a, const Direction& b) {
  return std::fabs(a.pitch_deg - b.pitch_deg);
}

// Combined angular difference across yaw and pitch.
inline double angular_difference(const Direction& a, const Direction& b) {
  return std::hypot(yaw_difference(a, b), pitch_difference(a, b));
}

// Fraction of viewport area shared by two users looking at a and b.
// x = max(0, W - min(|dyaw|, 360 - |dyaw|)), y = max(0, H - |dpitch|);
// returns x*y/(W*H), or x/W for a sliced viewport. Pitch overlap past
// +-90 is not credited back around the pole.
inline double viewport_overlap(const Direction& a, const Direction& b,
                               const ViewportSpec& vp) {
  const double x = std::max(0.0, vp.width_deg - yaw_difference(a, b));
  if (vp.is_sliced()) return x / vp.width_deg;
  const double y = std::max(0.0, *vp.height_deg - pitch_difference(a, b));
  return (x * y) / (vp.width_deg * *vp.height_deg);
}

}  // namespace view360
