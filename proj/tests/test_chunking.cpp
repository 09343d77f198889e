#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "oracles.hpp"
#include "view360/chunking.hpp"
#include "view360/rng.hpp"

using namespace view360;
using Catch::Approx;

namespace {

HeadTrace trace_from(const std::string& body) {
  std::istringstream in("t_ms,yaw_deg,pitch_deg\n" + body);
  return parse_trace(in);
}

// Straight-line yaw path across the given waypoints, one per 10 ms.
HeadTrace yaw_path(const std::vector<double>& yaws) {
  std::string body;
  int64_t t = 0;
  for (double y : yaws) {
    body += std::to_string(t) + "," + format_double(normalize_yaw(y)) + ",0\n";
    t += 10;
  }
  return trace_from(body);
}

}  // namespace

TEST_CASE("chunk grid fits within the common duration") {
  const ChunkGrid grid = make_chunk_grid(181000, 2000);
  CHECK(grid.chunk_count == 90);
  CHECK(grid.start_ms(89) == 178000);
  CHECK_THROWS_AS(make_chunk_grid(1500, 2000), std::invalid_argument);
}

TEST_CASE("constant direction has zero extent") {
  const HeadTrace t = yaw_path({42, 42, 42, 42, 42});
  const auto e = chunk_extent(t, 0, 40);
  CHECK(e.psi_minus == 0.0);
  CHECK(e.psi_plus == 0.0);
  CHECK(e.theta_minus == 0.0);
  CHECK(e.theta_plus == 0.0);
}

TEST_CASE("extent tracks prefix extremes") {
  // 0 -> +30 -> +20: right reach 30, left reach 10 back from the peak,
  // but never below the start, so psi_minus stays 0 until it dips.
  const HeadTrace up_down = yaw_path({0, 10, 20, 30, 20, 10, 0, -10});
  const auto e = chunk_extent(up_down, 0, 70);
  CHECK(e.psi_plus == Approx(30.0));
  CHECK(e.psi_minus == Approx(10.0));
}

TEST_CASE("yaw deltas fold across the seam") {
  const HeadTrace t = yaw_path({170, -175});
  const auto e = chunk_extent(t, 0, 10);
  CHECK(e.psi_plus == Approx(15.0));
  CHECK(e.psi_minus == Approx(0.0));
}

TEST_CASE("pitch extent accumulates without folding") {
  const HeadTrace t = trace_from("0,0,0\n10,0,30\n20,0,-20\n");
  const auto e = chunk_extent(t, 0, 20);
  CHECK(e.theta_plus == Approx(30.0));
  CHECK(e.theta_minus == Approx(20.0));
}

TEST_CASE("direction change bound") {
  CHECK(direction_change_bound(DirectionalExtent{}) == 0.0);
  CHECK(direction_change_bound(DirectionalExtent{10, 30, 0, 0}) == Approx(40.0));
  CHECK(direction_change_bound(DirectionalExtent{10, 20, 15, 25}) == Approx(50.0));
  CHECK(direction_change_bound_yaw(DirectionalExtent{10, 20, 55, 5}) == Approx(30.0));
}

TEST_CASE("bound dominates the angular change from chunk start") {
  Rng rng(31);
  for (int i = 0; i < 20; ++i) {
    const HeadTrace t = synthesize_trace(94.09, 2000, mix_seed(31, i));
    const auto e = chunk_extent(t, 0, 2000);
    const double bound = direction_change_bound(e);
    // Accumulated (unfolded) coordinates relative to the start.
    double yaw_acc = 0.0;
    Direction prev = sample_at(t, 0);
    for (int64_t ms = 10; ms <= 2000; ms += 10) {
      const Direction cur = sample_at(t, ms);
      double dyaw = cur.yaw_deg - prev.yaw_deg;
      if (dyaw > 180.0) dyaw -= 360.0;
      if (dyaw <= -180.0) dyaw += 360.0;
      yaw_acc += dyaw;
      const double pitch_delta = cur.pitch_deg - sample_at(t, 0).pitch_deg;
      CHECK(std::hypot(yaw_acc, pitch_delta) <= bound + 1e-9);
      prev = cur;
    }
  }
}

TEST_CASE("chunk cover normalization") {
  const Direction start(0, 0);
  const auto vp = ViewportSpec::rect(120, 67.5);
  CHECK(chunk_cover(DirectionalExtent{}, vp, start).normalized_size == Approx(1.0));

  // Saturating both axes hits the area ceiling.
  const DirectionalExtent big{200, 200, 90, 90};
  CHECK(chunk_cover(big, vp, start).normalized_size == Approx(8.0));
  CHECK(chunk_cover(big, ViewportSpec::rect(90, 50.625), start).normalized_size ==
        Approx(14.222222).epsilon(1e-5));
  CHECK(chunk_cover(big, ViewportSpec::sliced(120), start).normalized_size == Approx(3.0));
  CHECK(chunk_cover(big, ViewportSpec::sliced(90), start).normalized_size == Approx(4.0));

  CHECK(chunk_cover(DirectionalExtent{20, 25, 0, 0}, ViewportSpec::sliced(90), start)
            .normalized_size == Approx(1.5));
}

TEST_CASE("cover box contains every sampled direction padded by the viewport") {
  Rng rng(32);
  const auto vp = ViewportSpec::rect(100, 60);
  for (int i = 0; i < 20; ++i) {
    const HeadTrace t = synthesize_trace(94.09, 2000, mix_seed(32, i));
    const auto cover = chunk_cover(chunk_extent(t, 0, 2000), vp, sample_at(t, 0));
    for (int64_t ms = 0; ms <= 2000; ms += 10) {
      const Direction d = sample_at(t, ms);
      for (double edge : {-vp.width_deg / 2.0, vp.width_deg / 2.0}) {
        if (cover.box.yaw_arc.length_deg >= 360.0 - 1e-9) continue;
        const double rel =
            normalize_angle_360(d.yaw_deg + edge - cover.box.yaw_arc.start_deg);
        CHECK(rel <= cover.box.yaw_arc.length_deg + 1e-6);
      }
      const double plo = std::max(-90.0, d.pitch_deg - *vp.height_deg / 2.0);
      const double phi = std::min(90.0, d.pitch_deg + *vp.height_deg / 2.0);
      CHECK(plo >= cover.box.pitch_span->first - 1e-6);
      CHECK(phi <= cover.box.pitch_span->second + 1e-6);
    }
  }
}

TEST_CASE("cover size grows with nested windows") {
  const HeadTrace t = synthesize_trace(94.09, 10000, 33);
  const auto vp = ViewportSpec::rect(120, 67.5);
  double prev = 0.0;
  for (int64_t dur = 200; dur <= 10000; dur += 200) {
    const double size =
        chunk_cover(chunk_extent(t, 0, dur), vp, sample_at(t, 0)).normalized_size;
    CHECK(size >= prev - 1e-12);
    prev = size;
  }
}

TEST_CASE("pairwise cover overlap matches the worked example") {
  const auto vp = ViewportSpec::rect(120, 67.5);
  const CoverBox a{centered_arc(0, 90), std::make_pair(-33.75, 33.75), vp};
  const CoverBox b{centered_arc(45, 120), std::make_pair(-20.0, 47.5), vp};
  const auto ov = pairwise_cover_overlap(a, b);
  CHECK(ov.rel_to_viewport == Approx((60.0 * 53.75) / (120.0 * 67.5)).epsilon(1e-9));
  CHECK(ov.rel_to_box == Approx((60.0 * 53.75) / (90.0 * 67.5)).epsilon(1e-9));

  // Cross-check the intersection area against cell counting.
  const double area = view360::testing::grid_box_overlap_area(
      a.yaw_arc, a.pitch_span->first, a.pitch_span->second, b.yaw_arc,
      b.pitch_span->first, b.pitch_span->second);
  CHECK(area == Approx(60.0 * 53.75).epsilon(2e-3));
}

TEST_CASE("pairwise cover overlap extremes") {
  const auto vp = ViewportSpec::sliced(90);
  const CoverBox a{centered_arc(10, 100), std::nullopt, vp};
  const auto self = pairwise_cover_overlap(a, a);
  CHECK(self.rel_to_box == Approx(1.0));
  CHECK(self.rel_to_viewport == Approx(100.0 / 90.0));

  const CoverBox far{centered_arc(-170, 100), std::nullopt, vp};
  const auto none = pairwise_cover_overlap(a, far);
  CHECK(none.rel_to_box == Approx(0.0).margin(1e-12));
  CHECK(none.rel_to_viewport == Approx(0.0).margin(1e-12));
}
