#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "view360/sequence.hpp"

using namespace view360;
using Catch::Approx;

namespace {

HeadTrace constant_trace(double yaw, int64_t duration_ms) {
  std::string body;
  for (int64_t t = 0; t <= duration_ms; t += 10)
    body += std::to_string(t) + "," + format_double(yaw) + ",0\n";
  std::istringstream in("t_ms,yaw_deg,pitch_deg\n" + body);
  return parse_trace(in);
}

std::vector<const HeadTrace*> pointers(const std::vector<HeadTrace>& traces) {
  std::vector<const HeadTrace*> out;
  for (const auto& t : traces) out.push_back(&t);
  return out;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("first user always sees an empty prior cover") {
  std::vector<HeadTrace> traces{constant_trace(0, 100), constant_trace(10, 100)};
  const auto samples = aggregate_overlap_instant(pointers(traces), 50, ViewportSpec::sliced(90));
  REQUIRE(samples.size() == 2);
  CHECK(samples[0].position == 0);
  CHECK(samples[0].overlap == 0.0);
}

TEST_CASE("identical directions overlap fully from the second user on") {
  std::vector<HeadTrace> traces;
  for (int i = 0; i < 4; ++i) traces.push_back(constant_trace(25, 100));
  const auto samples = aggregate_overlap_instant(pointers(traces), 0, ViewportSpec::sliced(90));
  for (size_t i = 1; i < samples.size(); ++i) CHECK(samples[i].overlap == Approx(1.0));
}

TEST_CASE("half-shifted viewport overlaps half") {
  std::vector<HeadTrace> traces{constant_trace(0, 100), constant_trace(45, 100)};
  const auto samples = aggregate_overlap_instant(pointers(traces), 0, ViewportSpec::sliced(90));
  CHECK(samples[1].overlap == Approx(0.5));
}

TEST_CASE("full-circle prior cover absorbs any user") {
  // Four users 90 degrees apart with W=90 tile the circle.
  std::vector<HeadTrace> traces{constant_trace(0, 100), constant_trace(90, 100),
                                constant_trace(180, 100), constant_trace(-90, 100),
                                constant_trace(33, 100)};
  const auto samples = aggregate_overlap_instant(pointers(traces), 0, ViewportSpec::sliced(90));
  CHECK(samples[4].overlap == Approx(1.0));
}

TEST_CASE("chunk mode uses per-chunk covers") {
  std::vector<HeadTrace> traces{constant_trace(0, 2000), constant_trace(0, 2000)};
  const auto samples =
      aggregate_overlap_chunk(pointers(traces), 0, 2000, ViewportSpec::sliced(90));
  REQUIRE(samples.size() == 2);
  CHECK(samples[0].overlap == 0.0);
  CHECK(samples[1].overlap == Approx(1.0));
}

TEST_CASE("rect viewports are rejected") {
  std::vector<HeadTrace> traces{constant_trace(0, 100), constant_trace(0, 100)};
  CHECK_THROWS_AS(
      aggregate_overlap_instant(pointers(traces), 0, ViewportSpec::rect(90, 60)),
      std::invalid_argument);
}

TEST_CASE("overlap grows as the prior set grows") {
  // Exact monotonicity: prior users only ever add coverage.
  Rng rng(61);
  for (int trial = 0; trial < 30; ++trial) {
    const Arc user = Arc(rng.uniform() * 360.0, 90.0);
    ArcSet prior;
    double prev = 0.0;
    for (int k = 0; k < 12; ++k) {
      prior = insert(prior, Arc(rng.uniform() * 360.0, 90.0));
      const double overlap = intersection_length(prior, user) / user.length_deg;
      CHECK(overlap >= prev - 1e-12);
      prev = overlap;
    }
  }
}

TEST_CASE("experiment output is deterministic and truncates positions") {
  std::vector<HeadTrace> traces;
  for (int i = 0; i < 4; ++i)
    traces.push_back(synthesize_trace(60.0, 3000, mix_seed(62, i)));
  const TraceSet set = make_trace_set("v", std::move(traces));
  const OrderingPlan plan{10, 7, 4};

  namespace fs = std::filesystem;
  const fs::path dir_a = fs::temp_directory_path() / "view360_seq_a";
  const fs::path dir_b = fs::temp_directory_path() / "view360_seq_b";
  fs::create_directories(dir_a);
  fs::create_directories(dir_b);

  const auto result_a = run_sequence_experiment(set, plan, SequenceMode::instant,
                                                ViewportSpec::sliced(90), 500, 2000,
                                                {1, 2, 4, 8, 16});
  CHECK(result_a.positions == std::vector<int>{1, 2});
  CHECK(result_a.warnings.size() == 3);

  const auto result_b = run_sequence_experiment(set, plan, SequenceMode::instant,
                                                ViewportSpec::sliced(90), 500, 2000,
                                                {1, 2, 4, 8, 16});
  write_sequence_cdfs(result_a, dir_a);
  write_sequence_cdfs(result_b, dir_b);
  write_sequence_timelines(result_a, dir_a);
  write_sequence_timelines(result_b, dir_b);
  for (const char* name : {"cdf_N1.csv", "cdf_N2.csv", "timeline_N1.csv", "timeline_N2.csv"}) {
    const std::string a = slurp(dir_a / name);
    const std::string b = slurp(dir_b / name);
    CHECK(a == b);
    CHECK_FALSE(a.empty());
  }
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
}

TEST_CASE("identical traces give a point-mass CDF at one") {
  std::vector<HeadTrace> traces{constant_trace(10, 1000), constant_trace(10, 1000)};
  const TraceSet set = make_trace_set("v", std::move(traces));
  const auto result = run_sequence_experiment(set, OrderingPlan{5, 1, 2},
                                              SequenceMode::instant,
                                              ViewportSpec::sliced(90), 50, 2000, {1});
  for (float v : result.samples[0]) CHECK(v == 1.0f);
}

TEST_CASE("mean overlap at a position is ordering-invariant in expectation") {
  std::vector<HeadTrace> traces;
  for (int i = 0; i < 8; ++i)
    traces.push_back(synthesize_trace(94.09, 2000, mix_seed(63, i)));
  const TraceSet set = make_trace_set("v", std::move(traces));
  const auto result = run_sequence_experiment(set, OrderingPlan{400, 11, 8},
                                              SequenceMode::instant,
                                              ViewportSpec::sliced(90), 500, 2000, {2});
  // Split the orderings into halves; the mean overlap should agree.
  const size_t n_orderings = 400;
  double first = 0.0, second = 0.0;
  size_t count = 0;
  for (size_t ti = 0; ti < result.times_ms.size(); ++ti) {
    for (size_t o = 0; o < n_orderings; ++o) {
      const double v = result.samples[0][ti * n_orderings + o];
      (o < n_orderings / 2 ? first : second) += v;
      ++count;
    }
  }
  first /= static_cast<double>(count / 2);
  second /= static_cast<double>(count / 2);
  CHECK(first == Approx(second).margin(0.01));
}

TEST_CASE("mean overlap increases with the number of prior users") {
  std::vector<HeadTrace> traces;
  for (int i = 0; i < 32; ++i)
    traces.push_back(synthesize_trace(94.09, 2000, mix_seed(64, i)));
  const TraceSet set = make_trace_set("v", std::move(traces));
  const auto result = run_sequence_experiment(set, OrderingPlan{200, 13, 32},
                                              SequenceMode::instant,
                                              ViewportSpec::sliced(90), 500, 2000,
                                              {1, 2, 4, 8, 16});
  double prev = -1.0;
  for (size_t pi = 0; pi < result.positions.size(); ++pi) {
    double mean = 0.0;
    for (float v : result.samples[pi]) mean += v;
    mean /= static_cast<double>(result.samples[pi].size());
    CHECK(mean > prev);
    prev = mean;
  }
}
