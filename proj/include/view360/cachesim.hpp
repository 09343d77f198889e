#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <unordered_map>
#include <vector>

#include "view360/bandwidth.hpp"
#include "view360/chunking.hpp"
#include "view360/csv.hpp"
#include "view360/qoe.hpp"
#include "view360/rng.hpp"
#include "view360/traces.hpp"

namespace view360 {

struct SimConfig {
  int n_tiles = 6;
  int64_t chunk_ms = 2000;
  double beta = 0.5;
  double f_psi = 1.0;
  double f_n = 1.0;
  double sigma_deg = 0.0;
  QualityLadder ladder = default_quality_ladder();
  UtilityParams utility{};
  BandwidthModel bw;
  int num_sequences = 1000;
  uint64_t seed = 0;
};

struct PositionTally {
  uint64_t object_requests = 0;
  uint64_t object_hits = 0;
  uint64_t bytes_requested = 0;
  uint64_t bytes_hit = 0;

  PositionTally& operator+=(const PositionTally& o) {
    object_requests += o.object_requests;
    object_hits += o.object_hits;
    bytes_requested += o.bytes_requested;
    bytes_hit += o.bytes_hit;
    return *this;
  }
};

struct HitRateRow {
  int position = 0;  // number of prior viewers
  uint64_t object_requests = 0;
  uint64_t object_hits = 0;
  uint64_t bytes_requested = 0;
  uint64_t bytes_hit = 0;
  double object_hit_rate = 0.0;
  double byte_hit_rate = 0.0;
  bool zero_requests = false;
};

struct HitRateCurve {
  std::vector<HitRateRow> rows;
};

inline void write_hit_rate_csv(std::ostream& out, const HitRateCurve& curve) {
  out << "N,object_requests,object_hits,bytes_requested,bytes_hit,"
         "object_hit_rate,byte_hit_rate\n";
  for (const auto& r : curve.rows)
    out << r.position << ',' << r.object_requests << ',' << r.object_hits << ','
        << r.bytes_requested << ',' << r.bytes_hit << ','
        << format_double(r.object_hit_rate) << ',' << format_double(r.byte_hit_rate)
        << '\n';
}

namespace detail {

// Folds an offset into (-180, 180].
inline double fold_offset(double deg) {
  double r = std::fmod(deg + 180.0, 360.0);
  if (r <= 0.0) r += 360.0;
  return r - 180.0;
}

// Everything that is fixed across sequences of one simulation run.
struct SimContext {
  const SimConfig* cfg = nullptr;
  ChunkGrid grid{0, 0};
  std::vector<std::vector<double>> start_yaw;       // [trace][chunk]
  std::vector<TileViewProbability> tile_probs;      // per center tile
  int64_t budget_cap = 0;

  SimContext(const std::vector<const HeadTrace*>& traces, const SimConfig& cfg_in)
      : cfg(&cfg_in) {
    if (traces.size() < 2)
      throw std::invalid_argument("cache simulation needs at least 2 traces");
    if (cfg->n_tiles < 1) throw std::invalid_argument("n_tiles must be >= 1");
    if (!(cfg->f_psi >= 0.0) || !(cfg->f_n >= 0.0))
      throw std::invalid_argument("f_psi and f_n must be >= 0");
    if (!(cfg->sigma_deg >= 0.0)) throw std::invalid_argument("sigma must be >= 0");
    if (!cfg->bw.scaled()) throw std::invalid_argument("bandwidth model is not scaled");
    int64_t common = traces.front()->duration_ms();
    for (const HeadTrace* t : traces) common = std::min(common, t->duration_ms());
    grid = make_chunk_grid(common, cfg->chunk_ms);
    start_yaw.resize(traces.size());
    for (size_t s = 0; s < traces.size(); ++s) {
      start_yaw[s].resize(static_cast<size_t>(grid.chunk_count));
      for (int c = 0; c < grid.chunk_count; ++c)
        start_yaw[s][static_cast<size_t>(c)] =
            sample_at(*traces[s], grid.start_ms(c)).yaw_deg;
    }
    // The optimizer's view-probability input depends only on which tile
    // the predicted direction lands in.
    tile_probs.reserve(static_cast<size_t>(cfg->n_tiles));
    for (int t = 0; t < cfg->n_tiles; ++t)
      tile_probs.push_back(tile_view_probabilities(tile_center(t, cfg->n_tiles),
                                                   cfg->f_n * cfg->sigma_deg, cfg->n_tiles));
    budget_cap = static_cast<int64_t>(cfg->n_tiles) * cfg->ladder.max_rate();
  }
};

// Selections are pure in (center tile, floored budget) for a fixed
// config, so repeated chunk decisions reuse one DP solve.
class SelectionCache {
 public:
  const TileSelection& get(const SimContext& ctx, int center_tile, int64_t budget) {
    const uint64_t key = (static_cast<uint64_t>(center_tile) << 40) |
                         static_cast<uint64_t>(budget);
    auto it = memo_.find(key);
    if (it == memo_.end()) {
      it = memo_
               .emplace(key, optimize_tiles(ctx.tile_probs[static_cast<size_t>(center_tile)],
                                            static_cast<double>(budget), ctx.cfg->beta,
                                            ctx.cfg->ladder, ctx.cfg->utility))
               .first;
    }
    return it->second;
  }

 private:
  std::unordered_map<uint64_t, TileSelection> memo_;
};

inline std::vector<PositionTally> simulate_one(const SimContext& ctx,
                                               const std::vector<int>& order, Rng& rng,
                                               SelectionCache& selections) {
  const SimConfig& cfg = *ctx.cfg;
  const int levels = static_cast<int>(cfg.ladder.levels());
  std::vector<char> cached(static_cast<size_t>(ctx.grid.chunk_count) *
                               static_cast<size_t>(cfg.n_tiles) * static_cast<size_t>(levels),
                           0);
  std::vector<PositionTally> tallies(order.size());
  for (size_t pos = 0; pos < order.size(); ++pos) {
    const auto& yaw_at = ctx.start_yaw[static_cast<size_t>(order[pos])];
    PositionTally& tally = tallies[pos];
    for (int c = 0; c < ctx.grid.chunk_count; ++c) {
      const double capacity = draw(cfg.bw, rng);
      const double offset = fold_offset(cfg.f_psi * cfg.sigma_deg * rng.normal(0.0, 1.0));
      const double predicted = yaw_at[static_cast<size_t>(c)] + offset;
      const int center = containing_tile(predicted, cfg.n_tiles);
      const int64_t budget =
          std::min(static_cast<int64_t>(std::floor(capacity)), ctx.budget_cap);
      const TileSelection& sel = selections.get(ctx, center, budget);
      for (int t = 0; t < cfg.n_tiles; ++t) {
        const int q = sel.quality_index[static_cast<size_t>(t)];
        if (q == 0) continue;
        const uint64_t bytes = static_cast<uint64_t>(cfg.ladder.rates[static_cast<size_t>(q)]);
        tally.object_requests += 1;
        tally.bytes_requested += bytes;
        const size_t key =
            (static_cast<size_t>(c) * static_cast<size_t>(cfg.n_tiles) +
             static_cast<size_t>(t)) *
                static_cast<size_t>(levels) +
            static_cast<size_t>(q);
        if (cached[key]) {
          tally.object_hits += 1;
          tally.bytes_hit += bytes;
        } else {
          cached[key] = 1;
        }
      }
    }
  }
  return tallies;
}

}  // namespace detail

// One viewing sequence against an initially empty cache. Clients request
// the tiles their optimizer selects; a request hits when an earlier
// client already fetched the same (chunk, tile, quality).
inline std::vector<PositionTally> simulate_sequence(
    const std::vector<const HeadTrace*>& ordered_traces, const SimConfig& cfg, Rng& rng) {
  detail::SimContext ctx(ordered_traces, cfg);
  std::vector<int> order(ordered_traces.size());
  std::iota(order.begin(), order.end(), 0);
  detail::SelectionCache selections;
  return detail::simulate_one(ctx, order, rng, selections);
}

// Averages num_sequences random viewing orders into hit-rate curves by
// prior-viewer count.
inline HitRateCurve run_simulation(const TraceSet& traces, const SimConfig& cfg) {
  std::vector<const HeadTrace*> ptrs;
  ptrs.reserve(traces.traces.size());
  for (const auto& t : traces.traces) ptrs.push_back(&t);
  detail::SimContext ctx(ptrs, cfg);
  const size_t sessions = traces.traces.size();
  const size_t n_seq = static_cast<size_t>(cfg.num_sequences);

  std::vector<std::vector<PositionTally>> per_thread;
  const size_t n_threads =
      std::max<size_t>(1, std::min<size_t>(std::thread::hardware_concurrency(), n_seq));
  per_thread.assign(n_threads, std::vector<PositionTally>(sessions));

  const auto run_range = [&](size_t w, size_t lo, size_t hi) {
    detail::SelectionCache selections;
    for (size_t seq = lo; seq < hi; ++seq) {
      Rng rng(mix_seed(cfg.seed, seq));
      std::vector<int> order(sessions);
      std::iota(order.begin(), order.end(), 0);
      rng.shuffle(order);
      const auto tallies = detail::simulate_one(ctx, order, rng, selections);
      for (size_t p = 0; p < sessions; ++p) per_thread[w][p] += tallies[p];
    }
  };

  if (n_threads == 1) {
    run_range(0, 0, n_seq);
  } else {
    std::vector<std::thread> workers;
    const size_t per = (n_seq + n_threads - 1) / n_threads;
    for (size_t w = 0; w < n_threads; ++w) {
      const size_t lo = w * per;
      const size_t hi = std::min(n_seq, lo + per);
      if (lo < hi) workers.emplace_back(run_range, w, lo, hi);
    }
    for (auto& t : workers) t.join();
  }

  HitRateCurve curve;
  curve.rows.resize(sessions);
  for (size_t p = 0; p < sessions; ++p) {
    PositionTally total;
    for (size_t w = 0; w < n_threads; ++w) total += per_thread[w][p];
    HitRateRow& row = curve.rows[p];
    row.position = static_cast<int>(p);
    row.object_requests = total.object_requests;
    row.object_hits = total.object_hits;
    row.bytes_requested = total.bytes_requested;
    row.bytes_hit = total.bytes_hit;
    row.zero_requests = total.object_requests == 0;
    row.object_hit_rate =
        row.zero_requests ? 0.0
                          : static_cast<double>(total.object_hits) /
                                static_cast<double>(total.object_requests);
    row.byte_hit_rate = total.bytes_requested == 0
                            ? 0.0
                            : static_cast<double>(total.bytes_hit) /
                                  static_cast<double>(total.bytes_requested);
  }
  return curve;
}

enum class SweepParam { f_psi, f_n, bw_avg };

// One curve per parameter value, all runs sharing the same seed so the
// underlying randomness is common across values.
inline std::vector<HitRateCurve> sweep(const TraceSet& traces, const SimConfig& cfg,
                                       SweepParam param, const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("sweep needs at least one value");
  std::vector<HitRateCurve> curves;
  curves.reserve(values.size());
  for (double v : values) {
    SimConfig c = cfg;
    switch (param) {
      case SweepParam::f_psi: c.f_psi = v; break;
      case SweepParam::f_n: c.f_n = v; break;
      case SweepParam::bw_avg: c.bw = scale_to_average(c.bw, v); break;
    }
    curves.push_back(run_simulation(traces, c));
  }
  return curves;
}

}  // namespace view360
