#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "view360/csv.hpp"
#include "view360/geometry.hpp"
#include "view360/rng.hpp"

namespace view360 {

constexpr int64_t kSampleSpacingMs = 10;

enum class Category { explore, static_focus, moving, rides, misc };

inline const char* category_name(Category c) {
  switch (c) {
    case Category::explore: return "explore";
    case Category::static_focus: return "static";
    case Category::moving: return "moving";
    case Category::rides: return "rides";
    case Category::misc: return "misc";
  }
  return "misc";
}

inline Category category_from_name(std::string_view name) {
  if (name == "explore") return Category::explore;
  if (name == "static") return Category::static_focus;
  if (name == "moving") return Category::moving;
  if (name == "rides") return Category::rides;
  if (name == "misc") return Category::misc;
  throw std::invalid_argument("unknown category: " + std::string(name));
}

// Measured yaw-change standard deviation over a T-second interval, per
// category, for T = 2, 5, 10.
struct CategorySigma {
  double t2_s;
  double t5_s;
  double t10_s;
};

inline CategorySigma category_sigma(Category c) {
  switch (c) {
    case Category::explore: return {50.77, 79.85, 94.09};
    case Category::static_focus: return {35.94, 46.32, 46.93};
    case Category::moving: return {35.77, 48.10, 57.42};
    case Category::rides: return {38.94, 50.02, 52.44};
    case Category::misc: break;
  }
  throw std::invalid_argument("no measured sigma for category misc");
}

class TraceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TraceSample {
  int64_t t_ms;
  Direction direction;
};

// One viewing session: a time-ordered head-movement signal at a nominal
// 10 ms spacing. Irregular spacing is allowed but flagged.
struct HeadTrace {
  std::string session_id;
  std::string video_id;
  Category category = Category::misc;
  std::vector<TraceSample> samples;
  bool has_gaps = false;

  int64_t duration_ms() const { return samples.empty() ? 0 : samples.back().t_ms; }
};

// Sessions of one video. Cross-user analysis is restricted to
// [0, common_duration_ms], the span covered by every session.
struct TraceSet {
  std::string video_id;
  std::vector<HeadTrace> traces;
  int64_t common_duration_ms = 0;
};

inline TraceSet make_trace_set(std::string video_id, std::vector<HeadTrace> traces) {
  if (traces.empty()) throw TraceError("trace set is empty");
  int64_t common = traces.front().duration_ms();
  for (const auto& t : traces) common = std::min(common, t.duration_ms());
  return TraceSet{std::move(video_id), std::move(traces), common};
}

// Parses the trace CSV format: header "t_ms,yaw_deg,pitch_deg", then one
// sample per row. Yaw is normalized into [-180, 180) on ingest.
inline HeadTrace parse_trace(std::istream& in) {
  HeadTrace trace;
  std::string line;
  if (!std::getline(in, line))
    throw TraceError("empty trace file, expected header t_ms,yaw_deg,pitch_deg");
  if (strip_cr(line) != "t_ms,yaw_deg,pitch_deg")
    throw TraceError("bad header, expected t_ms,yaw_deg,pitch_deg, line 1");
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = strip_cr(line);
    if (row.empty()) continue;
    const auto fields = split_csv_row(row);
    int64_t t_ms;
    double yaw, pitch;
    if (fields.size() != 3 || !parse_int64(fields[0], t_ms) ||
        !parse_double(fields[1], yaw) || !parse_double(fields[2], pitch))
      throw TraceError("malformed row, line " + std::to_string(line_no));
    if (!trace.samples.empty() && t_ms <= trace.samples.back().t_ms)
      throw TraceError("non-monotonic timestamp, line " + std::to_string(line_no));
    if (!std::isfinite(pitch) || pitch < -90.0 || pitch > 90.0)
      throw TraceError("pitch out of range, line " + std::to_string(line_no));
    if (!std::isfinite(yaw))
      throw TraceError("malformed row, line " + std::to_string(line_no));
    if (!trace.samples.empty() &&
        t_ms - trace.samples.back().t_ms != kSampleSpacingMs)
      trace.has_gaps = true;
    trace.samples.push_back({t_ms, Direction(yaw, pitch)});
  }
  if (trace.samples.empty()) throw TraceError("trace has no samples");
  return trace;
}

inline void write_trace(std::ostream& out, const HeadTrace& trace) {
  out << "t_ms,yaw_deg,pitch_deg\n";
  for (const auto& s : trace.samples)
    out << s.t_ms << ',' << format_double(s.direction.yaw_deg) << ','
        << format_double(s.direction.pitch_deg) << '\n';
}

// Direction at an arbitrary time, linearly interpolated between the
// bracketing samples. Yaw interpolates along the shorter arc so paths
// crossing the +-180 seam stay continuous.
inline Direction sample_at(const HeadTrace& trace, int64_t t_ms) {
  if (trace.samples.empty()) throw TraceError("trace has no samples");
  const int64_t first = trace.samples.front().t_ms;
  const int64_t last = trace.samples.back().t_ms;
  if (t_ms < first || t_ms > last)
    throw TraceError("sample time " + std::to_string(t_ms) + " outside trace span [" +
                     std::to_string(first) + ", " + std::to_string(last) + "]");
  auto it = std::lower_bound(
      trace.samples.begin(), trace.samples.end(), t_ms,
      [](const TraceSample& s, int64_t t) { return s.t_ms < t; });
  if (it->t_ms == t_ms) return it->direction;
  const TraceSample& hi = *it;
  const TraceSample& lo = *(it - 1);
  const double frac = static_cast<double>(t_ms - lo.t_ms) / static_cast<double>(hi.t_ms - lo.t_ms);
  double dyaw = hi.direction.yaw_deg - lo.direction.yaw_deg;
  if (dyaw > 180.0) dyaw -= 360.0;
  if (dyaw <= -180.0) dyaw += 360.0;
  const double yaw = lo.direction.yaw_deg + frac * dyaw;
  const double pitch =
      lo.direction.pitch_deg + frac * (hi.direction.pitch_deg - lo.direction.pitch_deg);
  return Direction(yaw, pitch);
}

// Gaussian-random-walk session at 10 ms spacing. The per-step deviation
// is sized so the accumulated yaw displacement over 10 s has standard
// deviation sigma_deg; pitch moves at a quarter of the yaw deviation and
// is clamped to its physical range.
inline HeadTrace synthesize_trace(double sigma_deg, int64_t duration_ms, uint64_t seed) {
  if (sigma_deg < 0.0) throw std::invalid_argument("sigma must be >= 0");
  if (duration_ms <= 0) throw std::invalid_argument("duration must be > 0");
  constexpr double kStepsPer10s = 1000.0;
  const double yaw_step_std = sigma_deg / std::sqrt(kStepsPer10s);
  const double pitch_step_std = 0.25 * yaw_step_std;
  Rng rng(seed);
  HeadTrace trace;
  trace.category = Category::misc;
  double yaw = 0.0;
  double pitch = 0.0;
  const int64_t steps = duration_ms / kSampleSpacingMs;
  trace.samples.reserve(static_cast<size_t>(steps) + 1);
  trace.samples.push_back({0, Direction(0.0, 0.0)});
  for (int64_t i = 1; i <= steps; ++i) {
    if (sigma_deg > 0.0) {
      yaw += rng.normal(0.0, yaw_step_std);
      pitch += rng.normal(0.0, pitch_step_std);
      pitch = std::clamp(pitch, -90.0, 90.0);
    }
    trace.samples.push_back({i * kSampleSpacingMs, Direction(yaw, pitch)});
  }
  return trace;
}

// Rotates all yaws so the first sample looks along yaw 0. Preprocessing
// aid for datasets whose yaw origin is not anchored to the video.
inline HeadTrace normalize_start_direction(HeadTrace trace) {
  if (trace.samples.empty()) return trace;
  const double offset = trace.samples.front().direction.yaw_deg;
  for (auto& s : trace.samples)
    s.direction = Direction(s.direction.yaw_deg - offset, s.direction.pitch_deg);
  return trace;
}

// Loads <dir>/<session>.csv files plus the optional meta.csv sidecar
// mapping session_id to category. The directory name is the video id.
inline TraceSet load_trace_set(const std::filesystem::path& dir, bool normalize_start = false) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw TraceError("not a directory: " + dir.string());

  std::map<std::string, Category> categories;
  const fs::path meta_path = dir / "meta.csv";
  if (fs::exists(meta_path)) {
    std::ifstream meta(meta_path);
    std::string line;
    size_t line_no = 0;
    while (std::getline(meta, line)) {
      ++line_no;
      const std::string_view row = strip_cr(line);
      if (row.empty() || (line_no == 1 && row == "session_id,category")) continue;
      const auto fields = split_csv_row(row);
      if (fields.size() != 2)
        throw TraceError("malformed meta row, line " + std::to_string(line_no));
      categories[std::string(fields[0])] = category_from_name(fields[1]);
    }
  }

  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const fs::path& p = entry.path();
    if (p.extension() == ".csv" && p.filename() != "meta.csv") paths.push_back(p);
  }
  std::sort(paths.begin(), paths.end());
  if (paths.empty()) throw TraceError("no trace files in " + dir.string());

  std::vector<HeadTrace> traces;
  traces.reserve(paths.size());
  for (const auto& p : paths) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw TraceError("cannot open " + p.string());
    HeadTrace trace;
    try {
      trace = parse_trace(in);
    } catch (const TraceError& e) {
      throw TraceError(p.string() + ": " + e.what());
    }
    trace.session_id = p.stem().string();
    trace.video_id = dir.filename().string();
    auto it = categories.find(trace.session_id);
    if (it != categories.end()) trace.category = it->second;
    if (normalize_start) trace = normalize_start_direction(std::move(trace));
    traces.push_back(std::move(trace));
  }
  return make_trace_set(dir.filename().string(), std::move(traces));
}

}  // namespace view360
