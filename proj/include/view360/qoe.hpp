#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "view360/geometry.hpp"

namespace view360 {

// Per-tile encoding rates, ascending; rate 0 means the tile is not
// downloaded.
struct QualityLadder {
  std::vector<int64_t> rates;

  explicit QualityLadder(std::vector<int64_t> r) : rates(std::move(r)) {
    if (rates.empty() || rates.front() != 0)
      throw std::invalid_argument("quality ladder must start at rate 0");
    for (size_t i = 1; i < rates.size(); ++i)
      if (rates[i] <= rates[i - 1])
        throw std::invalid_argument("quality ladder rates must be strictly ascending");
  }

  size_t levels() const { return rates.size(); }
  int64_t max_rate() const { return rates.back(); }
};

// Seven-level ladder observed on an example streaming service.
inline QualityLadder default_quality_ladder() {
  return QualityLadder({0, 144, 268, 625, 1124, 2217, 4198});
}

struct UtilityParams {
  double a = 2.0;
  double b = 10.0;
  double theta = 200.0;

  void validate() const {
    if (!(a > 1.0) || !(b > 0.0) || !(theta > 0.0))
      throw std::invalid_argument("utility params require a > 1, b > 0, theta > 0");
  }
};

namespace detail {

inline double positive_rate_utility(double rate, const UtilityParams& p) {
  return p.b * (std::pow(rate / p.theta, 1.0 - p.a) - 1.0) / (1.0 - p.a);
}

}  // namespace detail

// Utility of one level per rate, in ladder order. Rate 0 carries the
// black-out penalty -u(max rate).
inline std::vector<double> utility_levels(const QualityLadder& ladder,
                                          const UtilityParams& params) {
  params.validate();
  std::vector<double> u(ladder.levels());
  for (size_t q = 1; q < ladder.levels(); ++q)
    u[q] = detail::positive_rate_utility(static_cast<double>(ladder.rates[q]), params);
  u[0] = -u.back();
  return u;
}

inline double utility(const QualityLadder& ladder, const UtilityParams& params,
                      int64_t rate) {
  auto it = std::find(ladder.rates.begin(), ladder.rates.end(), rate);
  if (it == ladder.rates.end())
    throw std::invalid_argument("rate " + std::to_string(rate) + " is not in the ladder");
  return utility_levels(ladder, params)[static_cast<size_t>(it - ladder.rates.begin())];
}

// --- fixed tile grid in video yaw coordinates ---

inline double tile_width_deg(int n_tiles) { return 360.0 / n_tiles; }

inline int containing_tile(double yaw_deg, int n_tiles) {
  const double y = normalize_angle_360(yaw_deg);
  const int k = static_cast<int>(y / tile_width_deg(n_tiles));
  return std::min(k, n_tiles - 1);
}

inline Direction tile_center(int tile, int n_tiles) {
  return Direction((tile + 0.5) * tile_width_deg(n_tiles), 0.0);
}

// Probability that each tile is the one being viewed.
struct TileViewProbability {
  std::vector<double> probs;

  explicit TileViewProbability(std::vector<double> p) : probs(std::move(p)) {
    if (probs.empty()) throw std::invalid_argument("tile probabilities are empty");
    double sum = 0.0;
    for (double v : probs) {
      if (!(v >= 0.0)) throw std::invalid_argument("tile probabilities must be >= 0");
      sum += v;
    }
    if (std::fabs(sum - 1.0) > 1e-9)
      throw std::invalid_argument("tile probabilities must sum to 1");
  }

  int tiles() const { return static_cast<int>(probs.size()); }
};

// Mass of a wrapped normal (mean = predicted yaw, deviation sigma) over
// each tile's fixed arc. sigma 0 collapses to the containing tile; very
// wide deviations flatten to uniform.
inline TileViewProbability tile_view_probabilities(const Direction& predicted_yaw,
                                                   double sigma_deg, int n_tiles) {
  if (n_tiles < 1) throw std::invalid_argument("n_tiles must be >= 1");
  if (sigma_deg < 0.0) throw std::invalid_argument("sigma must be >= 0");
  std::vector<double> probs(n_tiles, 0.0);
  if (sigma_deg == 0.0) {
    probs[containing_tile(predicted_yaw.yaw_deg, n_tiles)] = 1.0;
    return TileViewProbability(std::move(probs));
  }
  // Past ~1.5 turns of deviation the wrapped normal is uniform to well
  // below double precision.
  if (sigma_deg > 600.0) {
    std::fill(probs.begin(), probs.end(), 1.0 / n_tiles);
    return TileViewProbability(std::move(probs));
  }
  const double mu = normalize_angle_360(predicted_yaw.yaw_deg);
  const double w = tile_width_deg(n_tiles);
  const int wraps = static_cast<int>(std::ceil((6.0 * sigma_deg + 360.0) / 360.0));
  auto phi = [&](double x) { return 0.5 * (1.0 + std::erf(x / (sigma_deg * M_SQRT2))); };
  double sum = 0.0;
  for (int k = 0; k < n_tiles; ++k) {
    const double a = k * w - mu;
    const double b = a + w;
    double mass = 0.0;
    for (int j = -wraps; j <= wraps; ++j)
      mass += phi(b + 360.0 * j) - phi(a + 360.0 * j);
    probs[k] = std::max(0.0, mass);
    sum += probs[k];
  }
  for (double& p : probs) p /= sum;
  return TileViewProbability(std::move(probs));
}

// One quality level per tile plus the achieved objective.
struct TileSelection {
  std::vector<int> quality_index;
  double objective_value = 0.0;
  int64_t total_rate = 0;
};

// Objective: expected viewing utility minus the weighted quality jumps
// between neighboring tiles, neighbors wrapping around the circle.
inline double selection_objective(const std::vector<int>& quality_index,
                                  const TileViewProbability& probs, double beta,
                                  const std::vector<double>& util) {
  const int n = probs.tiles();
  double value = 0.0;
  for (int i = 0; i < n; ++i) {
    const int next = (i + 1) % n;
    value += (1.0 - beta) * probs.probs[i] * util[quality_index[i]];
    value -= beta * 0.5 * (probs.probs[i] + probs.probs[next]) *
             std::fabs(util[quality_index[i]] - util[quality_index[next]]);
  }
  return value;
}

namespace detail {

struct OptimizeInputs {
  int n;
  int levels;
  std::vector<double> util;
  const std::vector<int64_t>* rates;
  const std::vector<double>* probs;
  double beta;
  int64_t budget;

  double node(int tile, int q) const {
    return (1.0 - beta) * (*probs)[tile] * util[q];
  }
  // Smoothness term on the edge between tile and tile+1 (mod n), plus
  // the node term of the later tile. Shared by the DP fill and the
  // reconstruction so equal values compare bitwise equal.
  double edge(int tile, int q, int q_next) const {
    return -beta * 0.5 * ((*probs)[tile] + (*probs)[(tile + 1) % n]) *
           std::fabs(util[q] - util[q_next]);
  }
  double step_cost(int tile, int q, int q_next) const {
    return edge(tile, q, q_next) + node((tile + 1) % n, q_next);
  }
};

}  // namespace detail

// Maximizes the tile-quality objective under the byte budget. The
// circular neighbor coupling is closed by enumerating tile 0's quality;
// for each choice a DP over (tile, quality, spent budget) solves the
// remaining chain. Ties resolve to the lexicographically smallest
// quality-index vector.
inline TileSelection optimize_tiles(const TileViewProbability& probs, double budget,
                                    double beta, const QualityLadder& ladder,
                                    const UtilityParams& params) {
  if (!(budget >= 0.0)) throw std::invalid_argument("budget must be >= 0");
  if (!(beta >= 0.0) || beta > 1.0) throw std::invalid_argument("beta must be in [0, 1]");
  const int n = probs.tiles();
  const int levels = static_cast<int>(ladder.levels());
  detail::OptimizeInputs in{n,
                            levels,
                            utility_levels(ladder, params),
                            &ladder.rates,
                            &probs.probs,
                            beta,
                            0};
  // Budgets beyond all-tiles-at-max are equivalent to that cap.
  const double cap = static_cast<double>(n) * static_cast<double>(ladder.max_rate());
  in.budget = static_cast<int64_t>(std::floor(std::min(budget, cap)));
  const auto& rates = ladder.rates;
  const size_t B = static_cast<size_t>(in.budget);

  std::vector<int> best_q;
  if (n == 1) {
    // Self-edge is zero, so this is a plain argmax under the budget.
    double best = -std::numeric_limits<double>::infinity();
    for (int q = 0; q < levels; ++q) {
      if (rates[q] > in.budget) continue;
      const double v = in.node(0, q);
      if (v > best) {
        best = v;
        best_q.assign(1, q);
      }
    }
  } else {
    // value[q*(B+1)+b]: best completion of tiles i+1..n-1 given tile i
    // has quality q and b budget units remain.
    const auto solve_chain = [&](int g, std::vector<std::vector<double>>* tables) {
      std::vector<std::vector<double>> local;
      auto& V = tables ? *tables : local;
      V.assign(static_cast<size_t>(n), {});
      V[n - 1].assign(static_cast<size_t>(levels) * (B + 1), 0.0);
      for (int q = 0; q < levels; ++q) {
        const double base = in.edge(n - 1, q, g);
        std::fill_n(V[n - 1].begin() + static_cast<size_t>(q) * (B + 1), B + 1, base);
      }
      for (int i = n - 2; i >= 0; --i) {
        V[i].assign(static_cast<size_t>(levels) * (B + 1),
                    -std::numeric_limits<double>::infinity());
        for (int q = 0; q < levels; ++q) {
          double* row = V[i].data() + static_cast<size_t>(q) * (B + 1);
          for (int qn = 0; qn < levels; ++qn) {
            const int64_t rq = rates[qn];
            if (rq > in.budget) break;
            const double c = in.step_cost(i, q, qn);
            const double* prev = V[i + 1].data() + static_cast<size_t>(qn) * (B + 1);
            for (size_t b = static_cast<size_t>(rq); b <= B; ++b) {
              const double cand = c + prev[b - rq];
              if (cand > row[b]) row[b] = cand;
            }
          }
        }
      }
      return V[0][static_cast<size_t>(g) * (B + 1) + (B - static_cast<size_t>(rates[g]))];
    };

    int best_g = -1;
    double best_total = -std::numeric_limits<double>::infinity();
    for (int g = 0; g < levels; ++g) {
      if (rates[g] > in.budget) continue;
      const double total = in.node(0, g) + solve_chain(g, nullptr);
      if (total > best_total) {
        best_total = total;
        best_g = g;
      }
    }

    std::vector<std::vector<double>> tables;
    solve_chain(best_g, &tables);
    best_q.assign(static_cast<size_t>(n), 0);
    best_q[0] = best_g;
    size_t b = B - static_cast<size_t>(rates[best_g]);
    int q_cur = best_g;
    for (int i = 0; i + 1 < n; ++i) {
      const double target = tables[i][static_cast<size_t>(q_cur) * (B + 1) + b];
      for (int qn = 0; qn < levels; ++qn) {
        if (rates[qn] > static_cast<int64_t>(b)) continue;
        const double cand =
            in.step_cost(i, q_cur, qn) +
            tables[i + 1][static_cast<size_t>(qn) * (B + 1) + (b - static_cast<size_t>(rates[qn]))];
        if (cand == target) {
          best_q[static_cast<size_t>(i) + 1] = qn;
          b -= static_cast<size_t>(rates[qn]);
          q_cur = qn;
          break;
        }
      }
    }
  }

  TileSelection sel;
  sel.quality_index = best_q;
  sel.objective_value = selection_objective(best_q, probs, beta, in.util);
  for (int q : best_q) sel.total_rate += rates[q];
  return sel;
}

// Brute-force reference: enumerates every quality vector in
// lexicographic order and keeps the first maximizer. Guarded so callers
// cannot accidentally enumerate forever.
inline TileSelection exhaustive_optimize(const TileViewProbability& probs, double budget,
                                         double beta, const QualityLadder& ladder,
                                         const UtilityParams& params) {
  if (!(budget >= 0.0)) throw std::invalid_argument("budget must be >= 0");
  if (!(beta >= 0.0) || beta > 1.0) throw std::invalid_argument("beta must be in [0, 1]");
  const int n = probs.tiles();
  const int levels = static_cast<int>(ladder.levels());
  if (std::pow(static_cast<double>(levels), n) > 1e7)
    throw std::invalid_argument("instance too large for exhaustive enumeration");
  const std::vector<double> util = utility_levels(ladder, params);
  const double cap = static_cast<double>(n) * static_cast<double>(ladder.max_rate());
  const int64_t B = static_cast<int64_t>(std::floor(std::min(budget, cap)));

  std::vector<int> q(static_cast<size_t>(n), 0);
  std::vector<int> best_q;
  double best = -std::numeric_limits<double>::infinity();
  for (;;) {
    int64_t total_rate = 0;
    for (int v : q) total_rate += ladder.rates[v];
    if (total_rate <= B) {
      const double value = selection_objective(q, probs, beta, util);
      if (value > best) {
        best = value;
        best_q = q;
      }
    }
    int i = n - 1;
    while (i >= 0 && q[i] == levels - 1) q[i--] = 0;
    if (i < 0) break;
    ++q[i];
  }

  TileSelection sel;
  sel.quality_index = best_q;
  sel.objective_value = best;
  for (int v : best_q) sel.total_rate += ladder.rates[v];
  return sel;
}

}  // namespace view360
