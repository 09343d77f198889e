#pragma once

#include <cmath>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include "view360/csv.hpp"
#include "view360/qoe.hpp"
#include "view360/rng.hpp"

namespace view360 {

// Capacity distribution P_C(C). Variants: empirical samples from a
// measurement file, the synthetic three-level distribution (avg 40% of
// the time, 2x avg 20%, 0.5x avg 40%), or a constant. All variants are
// rescaled to a common target average before drawing.
struct BandwidthModel {
  enum class Kind { empirical, three_level, constant };

  Kind kind = Kind::constant;
  std::vector<double> samples;  // empirical only, already rescaled
  double target_avg = 0.0;      // > 0 once scaled

  static BandwidthModel empirical(std::vector<double> s) {
    if (s.empty()) throw std::invalid_argument("empirical bandwidth needs samples");
    for (double v : s)
      if (!(v > 0.0)) throw std::invalid_argument("bandwidth samples must be > 0");
    BandwidthModel m;
    m.kind = Kind::empirical;
    m.samples = std::move(s);
    return m;
  }

  static BandwidthModel three_level(double avg = 0.0) {
    BandwidthModel m;
    m.kind = Kind::three_level;
    m.target_avg = avg;
    return m;
  }

  static BandwidthModel constant(double avg = 0.0) {
    BandwidthModel m;
    m.kind = Kind::constant;
    m.target_avg = avg;
    return m;
  }

  bool scaled() const { return target_avg > 0.0; }
};

// One positive decimal per line.
inline std::vector<double> load_samples(std::istream& in) {
  std::vector<double> samples;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = strip_cr(line);
    if (row.empty()) continue;
    double v;
    if (!parse_double(row, v) || !std::isfinite(v))
      throw std::runtime_error("malformed bandwidth sample, line " + std::to_string(line_no));
    if (!(v > 0.0))
      throw std::runtime_error("non-positive bandwidth sample, line " + std::to_string(line_no));
    samples.push_back(v);
  }
  if (samples.empty()) throw std::runtime_error("bandwidth sample file is empty");
  return samples;
}

// Rescales the model so its mean equals target_avg: empirical samples
// are multiplied by target/mean, synthetic variants take the target as
// their parameter.
inline BandwidthModel scale_to_average(BandwidthModel model, double target_avg) {
  if (!(target_avg > 0.0)) throw std::invalid_argument("target average must be > 0");
  if (model.kind == BandwidthModel::Kind::empirical) {
    double mean = 0.0;
    for (double v : model.samples) mean += v;
    mean /= static_cast<double>(model.samples.size());
    const double factor = target_avg / mean;
    for (double& v : model.samples) v *= factor;
  }
  model.target_avg = target_avg;
  return model;
}

inline double draw(const BandwidthModel& model, Rng& rng) {
  if (!model.scaled()) throw std::logic_error("bandwidth model is not scaled");
  switch (model.kind) {
    case BandwidthModel::Kind::constant:
      return model.target_avg;
    case BandwidthModel::Kind::three_level: {
      const double u = rng.uniform();
      if (u < 0.4) return model.target_avg;
      if (u < 0.6) return 2.0 * model.target_avg;
      return 0.5 * model.target_avg;
    }
    case BandwidthModel::Kind::empirical:
      return model.samples[rng.bounded(model.samples.size())];
  }
  return model.target_avg;
}

// Average capacity in units of "all tiles at maximum quality".
inline double normalized_bandwidth(const BandwidthModel& model, const QualityLadder& ladder,
                                   int n_tiles) {
  if (!model.scaled()) throw std::invalid_argument("bandwidth model is not scaled");
  if (n_tiles < 1) throw std::invalid_argument("n_tiles must be >= 1");
  return model.target_avg / (static_cast<double>(ladder.max_rate()) * n_tiles);
}

}  // namespace view360
