#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "view360/chunking.hpp"
#include "view360/csv.hpp"
#include "view360/geometry.hpp"
#include "view360/traces.hpp"

namespace view360 {

// Percentile by linear interpolation between order statistics:
// rank h = p*(n-1), value = v[floor(h)] blended toward v[floor(h)+1].
inline double percentile_linear(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("percentile of empty sample");
  if (p <= 0.0) return sorted.front();
  if (p >= 1.0) return sorted.back();
  const double h = p * static_cast<double>(sorted.size() - 1);
  const size_t lo = static_cast<size_t>(h);
  const double frac = h - static_cast<double>(lo);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

struct BoxStats {
  double min = 0.0;
  double p25 = 0.0;
  double median = 0.0;
  double p75 = 0.0;
  double max = 0.0;
  double mean = 0.0;

  static BoxStats from_samples(std::vector<double> samples) {
    if (samples.empty()) throw std::invalid_argument("box stats of empty sample");
    std::sort(samples.begin(), samples.end());
    double sum = 0.0;
    for (double v : samples) sum += v;
    return BoxStats{samples.front(), percentile_linear(samples, 0.25),
                    percentile_linear(samples, 0.5), percentile_linear(samples, 0.75),
                    samples.back(), sum / static_cast<double>(samples.size())};
  }
};

// Empirical CDF: sorted unique values with cumulative fractions.
struct Cdf {
  std::vector<std::pair<double, double>> points;

  static Cdf from_samples(std::vector<double> samples) {
    Cdf cdf;
    if (samples.empty()) return cdf;
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    for (size_t i = 0; i < samples.size(); ++i) {
      if (i + 1 < samples.size() && samples[i + 1] == samples[i]) continue;
      cdf.points.emplace_back(samples[i], (i + 1) / n);
    }
    return cdf;
  }
};

inline void write_cdf_csv(std::ostream& out, const Cdf& cdf) {
  out << "value,cumulative_fraction\n";
  for (const auto& [value, fraction] : cdf.points)
    out << format_double(value) << ',' << format_double(fraction) << '\n';
}

// include_extremes=false leaves the min/max fields empty, for plots
// where the extreme whiskers carry no information.
inline void write_box_stats_csv(std::ostream& out, const std::string& label,
                                const BoxStats& box, bool include_extremes = true,
                                bool header = true) {
  if (header) {
    out << "# percentile rule: linear interpolation between order statistics\n";
    out << "label,min,p25,median,p75,max,mean\n";
  }
  out << label << ',';
  if (include_extremes) out << format_double(box.min);
  out << ',' << format_double(box.p25) << ',' << format_double(box.median) << ','
      << format_double(box.p75) << ',';
  if (include_extremes) out << format_double(box.max);
  out << ',' << format_double(box.mean) << '\n';
}

enum class PairwiseMetric { angle, yaw, pitch, overlap };

inline PairwiseMetric pairwise_metric_from_name(std::string_view name) {
  if (name == "angle") return PairwiseMetric::angle;
  if (name == "yaw") return PairwiseMetric::yaw;
  if (name == "pitch") return PairwiseMetric::pitch;
  if (name == "overlap") return PairwiseMetric::overlap;
  throw std::invalid_argument("unknown metric: " + std::string(name));
}

struct TimelinePoint {
  int64_t t_ms;
  double mean;
  double median;
};

struct PairwiseReport {
  size_t pair_count = 0;
  Cdf all_instants;     // every (pair, instant) value
  Cdf pair_averages;    // one value per pair, averaged over instants
  BoxStats box;         // box-and-whisker summary of the pair averages
  std::vector<TimelinePoint> timeline;  // across pairs, per instant
};

// Enumerates all unordered session pairs at a fixed sampling
// granularity over the common duration.
inline PairwiseReport pairwise_report(const TraceSet& traces, PairwiseMetric metric,
                                      const ViewportSpec& vp, int64_t granularity_ms = 50) {
  const size_t n = traces.traces.size();
  if (n < 2) throw std::invalid_argument("pairwise report needs at least 2 traces");
  if (granularity_ms <= 0) throw std::invalid_argument("granularity must be > 0");

  std::vector<int64_t> times;
  for (int64_t t = 0; t <= traces.common_duration_ms; t += granularity_ms)
    times.push_back(t);

  // One interpolation pass per trace, reused by every pair.
  std::vector<std::vector<Direction>> dirs(n);
  for (size_t s = 0; s < n; ++s) {
    dirs[s].reserve(times.size());
    for (int64_t t : times) dirs[s].push_back(sample_at(traces.traces[s], t));
  }

  const auto eval = [&](const Direction& a, const Direction& b) {
    switch (metric) {
      case PairwiseMetric::angle: return angular_difference(a, b);
      case PairwiseMetric::yaw: return yaw_difference(a, b);
      case PairwiseMetric::pitch: return pitch_difference(a, b);
      case PairwiseMetric::overlap: return viewport_overlap(a, b, vp);
    }
    return 0.0;
  };

  PairwiseReport report;
  report.pair_count = n * (n - 1) / 2;
  std::vector<double> all;
  all.reserve(report.pair_count * times.size());
  std::vector<double> averages;
  averages.reserve(report.pair_count);
  std::vector<std::vector<double>> per_instant(times.size());

  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      double sum = 0.0;
      for (size_t ti = 0; ti < times.size(); ++ti) {
        const double v = eval(dirs[i][ti], dirs[j][ti]);
        all.push_back(v);
        per_instant[ti].push_back(v);
        sum += v;
      }
      averages.push_back(sum / static_cast<double>(times.size()));
    }
  }

  report.timeline.reserve(times.size());
  for (size_t ti = 0; ti < times.size(); ++ti) {
    auto& vals = per_instant[ti];
    std::sort(vals.begin(), vals.end());
    double sum = 0.0;
    for (double v : vals) sum += v;
    report.timeline.push_back(TimelinePoint{times[ti],
                                            sum / static_cast<double>(vals.size()),
                                            percentile_linear(vals, 0.5)});
  }
  report.all_instants = Cdf::from_samples(std::move(all));
  report.box = BoxStats::from_samples(averages);
  report.pair_averages = Cdf::from_samples(std::move(averages));
  return report;
}

struct ChunkReport {
  Cdf bound;            // direction-change bound per (trace, chunk)
  Cdf bound_yaw_only;
  Cdf cover_size;       // normalized per-chunk cover size
  BoxStats cover_box;
  Cdf cover_overlap_rel_box;       // pairwise, normalized to user A's box
  Cdf cover_overlap_rel_viewport;  // pairwise, normalized to the viewport
};

inline ChunkReport chunk_report(const TraceSet& traces, const ViewportSpec& vp,
                                int64_t chunk_ms = 2000) {
  const size_t n = traces.traces.size();
  if (n < 1) throw std::invalid_argument("chunk report needs at least 1 trace");
  const ChunkGrid grid = make_chunk_grid(traces.common_duration_ms, chunk_ms);

  std::vector<std::vector<ChunkCover>> covers(n);
  std::vector<double> bounds, bounds_yaw, sizes;
  for (size_t s = 0; s < n; ++s) {
    covers[s].reserve(static_cast<size_t>(grid.chunk_count));
    for (int c = 0; c < grid.chunk_count; ++c) {
      const auto extent = chunk_extent(traces.traces[s], grid.start_ms(c), chunk_ms);
      bounds.push_back(direction_change_bound(extent));
      bounds_yaw.push_back(direction_change_bound_yaw(extent));
      covers[s].push_back(
          chunk_cover(extent, vp, sample_at(traces.traces[s], grid.start_ms(c))));
      sizes.push_back(covers[s].back().normalized_size);
    }
  }

  ChunkReport report;
  report.bound = Cdf::from_samples(std::move(bounds));
  report.bound_yaw_only = Cdf::from_samples(std::move(bounds_yaw));
  report.cover_box = BoxStats::from_samples(sizes);
  report.cover_size = Cdf::from_samples(std::move(sizes));

  if (n >= 2) {
    std::vector<double> rel_box, rel_vp;
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = i + 1; j < n; ++j) {
        for (int c = 0; c < grid.chunk_count; ++c) {
          const auto ov = pairwise_cover_overlap(covers[i][static_cast<size_t>(c)].box,
                                                 covers[j][static_cast<size_t>(c)].box);
          rel_box.push_back(ov.rel_to_box);
          rel_vp.push_back(ov.rel_to_viewport);
        }
      }
    }
    report.cover_overlap_rel_box = Cdf::from_samples(std::move(rel_box));
    report.cover_overlap_rel_viewport = Cdf::from_samples(std::move(rel_vp));
  }
  return report;
}

// Viewport syntax used on the command line: "WxH" or "Wfull",
// e.g. 120x67.5 or 90full.
inline ViewportSpec parse_viewport_spec(std::string_view text) {
  const size_t x = text.find('x');
  if (x != std::string_view::npos) {
    double w, h;
    if (!parse_double(text.substr(0, x), w) || !parse_double(text.substr(x + 1), h))
      throw std::invalid_argument("bad viewport: " + std::string(text));
    return ViewportSpec::rect(w, h);
  }
  if (text.size() > 4 && text.substr(text.size() - 4) == "full") {
    double w;
    if (!parse_double(text.substr(0, text.size() - 4), w))
      throw std::invalid_argument("bad viewport: " + std::string(text));
    return ViewportSpec::sliced(w);
  }
  throw std::invalid_argument("bad viewport (want WxH or Wfull): " + std::string(text));
}

}  // namespace view360
