#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "view360/arcs.hpp"
#include "view360/chunking.hpp"
#include "view360/csv.hpp"
#include "view360/rng.hpp"
#include "view360/traces.hpp"

namespace view360 {

// Randomized viewing orders over the sessions of one video.
struct OrderingPlan {
  int num_orderings = 1000;
  uint64_t seed = 0;
  int session_count = 0;
};

inline std::vector<int> make_ordering(const OrderingPlan& plan, int ordering_id) {
  std::vector<int> order(static_cast<size_t>(plan.session_count));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(mix_seed(plan.seed, static_cast<uint64_t>(ordering_id)));
  rng.shuffle(order);
  return order;
}

// Overlap of one user's yaw arc with the aggregate cover of the users
// before them in the order, normalized by that user's own arc width.
struct OverlapSample {
  int ordering_id = 0;
  int position = 0;  // number of prior users
  int64_t t_ms = 0;
  double overlap = 0.0;
};

namespace detail {

// Walks one ordered list of yaw arcs: reports each user's overlap with
// the union of all earlier arcs, then adds the user's arc.
inline std::vector<double> aggregate_walk(const std::vector<Arc>& ordered_arcs,
                                          size_t stop_after) {
  std::vector<double> overlaps;
  overlaps.reserve(std::min(ordered_arcs.size(), stop_after));
  ArcSet prior;
  for (size_t i = 0; i < ordered_arcs.size() && i < stop_after; ++i) {
    const Arc& arc = ordered_arcs[i];
    overlaps.push_back(intersection_length(prior, arc) / arc.length_deg);
    if (i + 1 < ordered_arcs.size() && i + 1 < stop_after) prior = insert(prior, arc);
  }
  return overlaps;
}

}  // namespace detail

// Instantaneous viewport arcs at one playback point.
inline std::vector<OverlapSample> aggregate_overlap_instant(
    const std::vector<const HeadTrace*>& ordered_traces, int64_t t_ms,
    const ViewportSpec& vp) {
  if (!vp.is_sliced())
    throw std::invalid_argument("aggregate overlap uses sliced viewports");
  std::vector<Arc> arcs;
  arcs.reserve(ordered_traces.size());
  for (const HeadTrace* t : ordered_traces)
    arcs.push_back(centered_arc(sample_at(*t, t_ms).yaw_deg, vp.width_deg));
  const auto overlaps = detail::aggregate_walk(arcs, arcs.size());
  std::vector<OverlapSample> out(overlaps.size());
  for (size_t i = 0; i < overlaps.size(); ++i)
    out[i] = OverlapSample{0, static_cast<int>(i), t_ms, overlaps[i]};
  return out;
}

// Per-chunk cover arcs instead of instantaneous viewports; overlap is
// normalized by each user's own cover width.
inline std::vector<OverlapSample> aggregate_overlap_chunk(
    const std::vector<const HeadTrace*>& ordered_traces, int64_t chunk_start_ms,
    int64_t chunk_ms, const ViewportSpec& vp) {
  if (!vp.is_sliced())
    throw std::invalid_argument("aggregate overlap uses sliced viewports");
  std::vector<Arc> arcs;
  arcs.reserve(ordered_traces.size());
  for (const HeadTrace* t : ordered_traces) {
    const auto extent = chunk_extent(*t, chunk_start_ms, chunk_ms);
    arcs.push_back(chunk_cover(extent, vp, sample_at(*t, chunk_start_ms)).box.yaw_arc);
  }
  const auto overlaps = detail::aggregate_walk(arcs, arcs.size());
  std::vector<OverlapSample> out(overlaps.size());
  for (size_t i = 0; i < overlaps.size(); ++i)
    out[i] = OverlapSample{0, static_cast<int>(i), chunk_start_ms, overlaps[i]};
  return out;
}

enum class SequenceMode { instant, chunk };

struct SequenceExperimentResult {
  SequenceMode mode = SequenceMode::instant;
  std::vector<int> positions;   // reported prior-user counts
  std::vector<int64_t> times_ms;
  int num_orderings = 0;
  // samples[p][t * num_orderings + o]
  std::vector<std::vector<float>> samples;
  std::vector<std::string> warnings;
};

// Runs the full ordering experiment: every ordering, every playback
// point (or chunk), overlap against the growing prior cover, reported at
// the requested prior-user counts.
inline SequenceExperimentResult run_sequence_experiment(
    const TraceSet& traces, const OrderingPlan& plan, SequenceMode mode,
    const ViewportSpec& vp, int64_t granularity_ms = 50, int64_t chunk_ms = 2000,
    std::vector<int> positions = {1, 2, 4, 8, 16}) {
  if (traces.traces.size() < 2)
    throw std::invalid_argument("sequence experiment needs at least 2 traces");
  if (!vp.is_sliced())
    throw std::invalid_argument("sequence experiment uses sliced viewports");
  if (granularity_ms <= 0) throw std::invalid_argument("granularity must be > 0");

  SequenceExperimentResult result;
  result.mode = mode;
  result.num_orderings = plan.num_orderings;

  const int sessions = static_cast<int>(traces.traces.size());
  OrderingPlan effective = plan;
  effective.session_count = sessions;
  std::sort(positions.begin(), positions.end());
  for (int p : positions) {
    if (p < sessions) {
      result.positions.push_back(p);
    } else {
      result.warnings.push_back("position N=" + std::to_string(p) +
                                " dropped: only " + std::to_string(sessions) +
                                " sessions");
    }
  }
  if (result.positions.empty())
    throw std::invalid_argument("no reportable positions below session count");

  if (mode == SequenceMode::instant) {
    for (int64_t t = 0; t <= traces.common_duration_ms; t += granularity_ms)
      result.times_ms.push_back(t);
  } else {
    const ChunkGrid grid = make_chunk_grid(traces.common_duration_ms, chunk_ms);
    for (int c = 0; c < grid.chunk_count; ++c) result.times_ms.push_back(grid.start_ms(c));
  }

  // Arcs depend only on (trace, time), not the ordering; build once.
  const size_t n_times = result.times_ms.size();
  std::vector<std::vector<Arc>> arcs(static_cast<size_t>(sessions));
  for (int s = 0; s < sessions; ++s) {
    arcs[s].reserve(n_times);
    const HeadTrace& trace = traces.traces[static_cast<size_t>(s)];
    for (size_t ti = 0; ti < n_times; ++ti) {
      if (mode == SequenceMode::instant) {
        arcs[s].push_back(
            centered_arc(sample_at(trace, result.times_ms[ti]).yaw_deg, vp.width_deg));
      } else {
        const auto extent = chunk_extent(trace, result.times_ms[ti], chunk_ms);
        arcs[s].push_back(
            chunk_cover(extent, vp, sample_at(trace, result.times_ms[ti])).box.yaw_arc);
      }
    }
  }

  const size_t max_pos = static_cast<size_t>(result.positions.back());
  const size_t n_orderings = static_cast<size_t>(plan.num_orderings);
  result.samples.assign(result.positions.size(), {});
  for (auto& s : result.samples) s.assign(n_times * n_orderings, 0.0f);

  const auto run_range = [&](size_t o_begin, size_t o_end) {
    std::vector<Arc> ordered;
    for (size_t o = o_begin; o < o_end; ++o) {
      const std::vector<int> order = make_ordering(effective, static_cast<int>(o));
      for (size_t ti = 0; ti < n_times; ++ti) {
        ordered.clear();
        for (size_t i = 0; i <= max_pos; ++i)
          ordered.push_back(arcs[static_cast<size_t>(order[i])][ti]);
        const auto overlaps = detail::aggregate_walk(ordered, max_pos + 1);
        for (size_t pi = 0; pi < result.positions.size(); ++pi)
          result.samples[pi][ti * n_orderings + o] =
              static_cast<float>(overlaps[static_cast<size_t>(result.positions[pi])]);
      }
    }
  };

  const size_t n_threads =
      std::max<size_t>(1, std::min<size_t>(std::thread::hardware_concurrency(), n_orderings));
  if (n_threads == 1) {
    run_range(0, n_orderings);
  } else {
    std::vector<std::thread> workers;
    const size_t per = (n_orderings + n_threads - 1) / n_threads;
    for (size_t w = 0; w < n_threads; ++w) {
      const size_t lo = w * per;
      const size_t hi = std::min(n_orderings, lo + per);
      if (lo < hi) workers.emplace_back(run_range, lo, hi);
    }
    for (auto& t : workers) t.join();
  }
  return result;
}

// Empirical CDF rows as (value, cumulative fraction), duplicates merged.
inline void write_sequence_cdfs(const SequenceExperimentResult& result,
                                const std::filesystem::path& out_dir) {
  for (size_t pi = 0; pi < result.positions.size(); ++pi) {
    std::vector<float> values = result.samples[pi];
    std::sort(values.begin(), values.end());
    auto out = open_output_file(
        (out_dir / ("cdf_N" + std::to_string(result.positions[pi]) + ".csv")).string());
    out << "value,cumulative_fraction\n";
    const double n = static_cast<double>(values.size());
    for (size_t i = 0; i < values.size(); ++i) {
      if (i + 1 < values.size() && values[i + 1] == values[i]) continue;
      out << format_double(values[i]) << ',' << format_double((i + 1) / n) << '\n';
    }
  }
}

inline void write_sequence_timelines(const SequenceExperimentResult& result,
                                     const std::filesystem::path& out_dir) {
  const size_t n_orderings = static_cast<size_t>(result.num_orderings);
  for (size_t pi = 0; pi < result.positions.size(); ++pi) {
    auto out = open_output_file(
        (out_dir / ("timeline_N" + std::to_string(result.positions[pi]) + ".csv")).string());
    out << "t_ms,mean,median\n";
    std::vector<float> cell(n_orderings);
    for (size_t ti = 0; ti < result.times_ms.size(); ++ti) {
      double sum = 0.0;
      for (size_t o = 0; o < n_orderings; ++o) {
        cell[o] = result.samples[pi][ti * n_orderings + o];
        sum += cell[o];
      }
      std::sort(cell.begin(), cell.end());
      const double median = n_orderings % 2 == 1
                                ? cell[n_orderings / 2]
                                : 0.5 * (cell[n_orderings / 2 - 1] + cell[n_orderings / 2]);
      out << result.times_ms[ti] << ',' << format_double(sum / static_cast<double>(n_orderings))
          << ',' << format_double(median) << '\n';
    }
  }
}

}  // namespace view360
