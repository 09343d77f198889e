#pragma once

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "view360/bandwidth.hpp"
#include "view360/cachesim.hpp"
#include "view360/report.hpp"
#include "view360/sequence.hpp"
#include "view360/traces.hpp"

namespace view360 {

namespace detail {

inline BandwidthModel make_bandwidth_model(const std::string& arg, double avg) {
  BandwidthModel model;
  if (arg == "constant") {
    model = BandwidthModel::constant();
  } else if (arg == "three-level") {
    model = BandwidthModel::three_level();
  } else if (arg.rfind("file:", 0) == 0) {
    const std::string path = arg.substr(5);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open bandwidth file: " + path);
    model = BandwidthModel::empirical(load_samples(in));
  } else {
    throw CLI::ValidationError("--bw", "expected constant, three-level, or file:<path>");
  }
  return scale_to_average(model, avg);
}

inline double resolve_sigma(const std::string& sigma_arg, const TraceSet& traces) {
  if (sigma_arg != "auto") {
    double v;
    if (!parse_double(sigma_arg, v) || v < 0.0)
      throw CLI::ValidationError("--sigma", "expected a non-negative number or auto");
    return v;
  }
  Category category = traces.traces.front().category;
  for (const auto& t : traces.traces)
    if (t.category != category)
      throw std::runtime_error("--sigma auto needs a single-category trace set");
  return category_sigma(category).t10_s;
}

inline std::string session_name(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "s%03d", index);
  return buf;
}

}  // namespace detail

inline int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Cross-user viewing similarity and edge-cache analysis for tiled 360 video"};
  app.require_subcommand(1);

  // ---- gen-traces ----
  auto* gen = app.add_subcommand("gen-traces", "Synthesize random-walk head-movement traces");
  double gen_sigma = 0.0;
  int gen_sessions = 32;
  int64_t gen_duration = 180000;
  uint64_t gen_seed = 0;
  std::string gen_out;
  std::string gen_category = "misc";
  gen->add_option("--sigma", gen_sigma, "10 s yaw-displacement deviation in degrees")->required();
  gen->add_option("--sessions", gen_sessions, "number of sessions")->default_val(32);
  gen->add_option("--duration-ms", gen_duration, "trace duration")->default_val(180000);
  gen->add_option("--seed", gen_seed, "base RNG seed")->required();
  gen->add_option("--out", gen_out, "output directory (one CSV per session)")->required();
  gen->add_option("--category", gen_category, "category written to meta.csv")->default_val("misc");

  // ---- shared ingest options ----
  struct IngestOpts {
    std::string traces_dir;
    bool normalize_start = false;
  };
  const auto add_ingest = [](CLI::App* cmd, IngestOpts& opts) {
    cmd->add_option("--traces", opts.traces_dir, "trace directory (one video)")->required();
    cmd->add_flag("--normalize-start", opts.normalize_start,
                  "rotate each session so its first yaw sample is 0");
  };

  // ---- pairwise ----
  auto* pairwise = app.add_subcommand("pairwise", "Pairwise viewing differences and overlaps");
  IngestOpts pw_in;
  add_ingest(pairwise, pw_in);
  std::string pw_metric = "overlap";
  std::string pw_vp = "120x67.5";
  int64_t pw_granularity = 50;
  std::string pw_out;
  pairwise->add_option("--metric", pw_metric, "angle | yaw | pitch | overlap")
      ->default_val("overlap");
  pairwise->add_option("--vp", pw_vp, "viewport, WxH or Wfull")->default_val("120x67.5");
  pairwise->add_option("--granularity-ms", pw_granularity)->default_val(50);
  pairwise->add_option("--out", pw_out, "output directory")->required();

  // ---- chunk ----
  auto* chunk = app.add_subcommand("chunk", "Per-chunk movement bounds, covers, cover overlaps");
  IngestOpts ck_in;
  add_ingest(chunk, ck_in);
  std::string ck_vp = "120x67.5";
  int64_t ck_chunk_ms = 2000;
  std::string ck_out;
  bool ck_omit_whiskers = false;
  chunk->add_option("--vp", ck_vp, "viewport, WxH or Wfull")->default_val("120x67.5");
  chunk->add_option("--chunk-ms", ck_chunk_ms)->default_val(2000);
  chunk->add_option("--out", ck_out, "output directory")->required();
  chunk->add_flag("--omit-whiskers", ck_omit_whiskers,
                  "leave min/max empty in the cover box stats");

  // ---- sequence ----
  auto* seq = app.add_subcommand("sequence", "Overlap with the aggregate cover of N prior users");
  IngestOpts sq_in;
  add_ingest(seq, sq_in);
  std::string sq_mode = "instant";
  int sq_orderings = 1000;
  uint64_t sq_seed = 0;
  std::string sq_vp = "90full";
  int64_t sq_granularity = 50;
  int64_t sq_chunk_ms = 2000;
  std::vector<int> sq_positions = {1, 2, 4, 8, 16};
  std::string sq_out;
  seq->add_option("--mode", sq_mode, "instant | chunk")->default_val("instant");
  seq->add_option("--orderings", sq_orderings)->default_val(1000);
  seq->add_option("--seed", sq_seed)->required();
  seq->add_option("--vp", sq_vp, "sliced viewport, Wfull")->default_val("90full");
  seq->add_option("--granularity-ms", sq_granularity)->default_val(50);
  seq->add_option("--chunk-ms", sq_chunk_ms)->default_val(2000);
  seq->add_option("--positions", sq_positions, "prior-user counts to report")
      ->delimiter(',');
  seq->add_option("--out", sq_out, "output directory")->required();

  // ---- simulate-cache ----
  auto* sim = app.add_subcommand("simulate-cache", "Edge-cache hit rates vs prior viewers");
  IngestOpts sc_in;
  add_ingest(sim, sc_in);
  std::string sc_bw = "constant";
  double sc_bw_avg = 12000.0;
  double sc_beta = 0.5;
  double sc_f_psi = 1.0;
  double sc_f_n = 1.0;
  std::string sc_sigma = "auto";
  int64_t sc_chunk_ms = 2000;
  int sc_tiles = 6;
  int sc_sequences = 1000;
  uint64_t sc_seed = 0;
  std::string sc_out;
  std::string sc_sweep;
  std::vector<double> sc_sweep_values;
  sim->add_option("--bw", sc_bw, "constant | three-level | file:<path>")->default_val("constant");
  sim->add_option("--bw-avg", sc_bw_avg, "target average capacity")->default_val(12000.0);
  sim->add_option("--beta", sc_beta, "smoothness weight in [0,1]")->required();
  sim->add_option("--f-psi", sc_f_psi, "prediction-error scale")->default_val(1.0);
  sim->add_option("--f-n", sc_f_n, "optimizer uncertainty scale")->default_val(1.0);
  sim->add_option("--sigma", sc_sigma, "deviation in degrees, or auto (per-category 10 s value)")
      ->default_val("auto");
  sim->add_option("--chunks-ms", sc_chunk_ms)->default_val(2000);
  sim->add_option("--tiles", sc_tiles)->default_val(6);
  sim->add_option("--sequences", sc_sequences)->default_val(1000);
  sim->add_option("--seed", sc_seed)->required();
  sim->add_option("--out", sc_out, "output CSV path")->required();
  sim->add_option("--sweep", sc_sweep, "parameter to sweep: f-psi | f-n | bw-avg");
  sim->add_option("--sweep-values", sc_sweep_values, "comma-separated sweep values")
      ->delimiter(',');

  // ---- info ----
  auto* info = app.add_subcommand("info", "Summarize a trace directory");
  IngestOpts in_in;
  add_ingest(info, in_in);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << std::flush;
    return 2;
  }

  namespace fs = std::filesystem;
  try {
    if (gen->parsed()) {
      fs::create_directories(gen_out);
      std::ofstream meta = open_output_file((fs::path(gen_out) / "meta.csv").string());
      meta << "session_id,category\n";
      category_from_name(gen_category);  // validate early
      for (int i = 0; i < gen_sessions; ++i) {
        HeadTrace trace = synthesize_trace(gen_sigma, gen_duration, mix_seed(gen_seed, i));
        const std::string session = detail::session_name(i);
        std::ofstream out = open_output_file((fs::path(gen_out) / (session + ".csv")).string());
        write_trace(out, trace);
        meta << session << ',' << gen_category << '\n';
      }
      std::cout << "wrote " << gen_sessions << " traces to " << gen_out << "\n";
      return 0;
    }

    if (pairwise->parsed()) {
      const TraceSet traces = load_trace_set(pw_in.traces_dir, pw_in.normalize_start);
      const ViewportSpec vp = parse_viewport_spec(pw_vp);
      const PairwiseMetric metric = pairwise_metric_from_name(pw_metric);
      const PairwiseReport report = pairwise_report(traces, metric, vp, pw_granularity);
      fs::create_directories(pw_out);
      const std::string prefix = "pairwise_" + pw_metric + "_";
      {
        auto out = open_output_file((fs::path(pw_out) / (prefix + "cdf_instants.csv")).string());
        write_cdf_csv(out, report.all_instants);
      }
      {
        auto out = open_output_file((fs::path(pw_out) / (prefix + "cdf_pair_avg.csv")).string());
        write_cdf_csv(out, report.pair_averages);
      }
      {
        auto out = open_output_file((fs::path(pw_out) / (prefix + "box.csv")).string());
        write_box_stats_csv(out, traces.video_id, report.box);
      }
      {
        auto out = open_output_file((fs::path(pw_out) / (prefix + "timeline.csv")).string());
        out << "t_ms,mean,median\n";
        for (const auto& p : report.timeline)
          out << p.t_ms << ',' << format_double(p.mean) << ',' << format_double(p.median)
              << '\n';
      }
      std::cout << "pairwise " << pw_metric << ": " << report.pair_count << " pairs, outputs in "
                << pw_out << "\n";
      return 0;
    }

    if (chunk->parsed()) {
      const TraceSet traces = load_trace_set(ck_in.traces_dir, ck_in.normalize_start);
      const ViewportSpec vp = parse_viewport_spec(ck_vp);
      const ChunkReport report = chunk_report(traces, vp, ck_chunk_ms);
      fs::create_directories(ck_out);
      const auto emit_cdf = [&](const std::string& name, const Cdf& cdf) {
        auto out = open_output_file((fs::path(ck_out) / name).string());
        write_cdf_csv(out, cdf);
      };
      emit_cdf("chunk_bound_cdf.csv", report.bound);
      emit_cdf("chunk_bound_yaw_cdf.csv", report.bound_yaw_only);
      emit_cdf("chunk_cover_cdf.csv", report.cover_size);
      emit_cdf("chunk_cover_overlap_relbox_cdf.csv", report.cover_overlap_rel_box);
      emit_cdf("chunk_cover_overlap_relvp_cdf.csv", report.cover_overlap_rel_viewport);
      {
        auto out = open_output_file((fs::path(ck_out) / "chunk_cover_box.csv").string());
        write_box_stats_csv(out, traces.video_id, report.cover_box, !ck_omit_whiskers);
      }
      std::cout << "chunk report (" << ck_chunk_ms << " ms chunks) written to " << ck_out << "\n";
      return 0;
    }

    if (seq->parsed()) {
      const TraceSet traces = load_trace_set(sq_in.traces_dir, sq_in.normalize_start);
      const ViewportSpec vp = parse_viewport_spec(sq_vp);
      SequenceMode mode;
      if (sq_mode == "instant") {
        mode = SequenceMode::instant;
      } else if (sq_mode == "chunk") {
        mode = SequenceMode::chunk;
      } else {
        throw CLI::ValidationError("--mode", "expected instant or chunk");
      }
      OrderingPlan plan{sq_orderings, sq_seed, static_cast<int>(traces.traces.size())};
      const SequenceExperimentResult result = run_sequence_experiment(
          traces, plan, mode, vp, sq_granularity, sq_chunk_ms, sq_positions);
      for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
      fs::create_directories(sq_out);
      write_sequence_cdfs(result, sq_out);
      write_sequence_timelines(result, sq_out);
      std::cout << "sequence " << sq_mode << ": " << plan.num_orderings << " orderings, outputs in "
                << sq_out << "\n";
      return 0;
    }

    if (sim->parsed()) {
      const TraceSet traces = load_trace_set(sc_in.traces_dir, sc_in.normalize_start);
      SimConfig cfg;
      cfg.n_tiles = sc_tiles;
      cfg.chunk_ms = sc_chunk_ms;
      cfg.beta = sc_beta;
      cfg.f_psi = sc_f_psi;
      cfg.f_n = sc_f_n;
      cfg.sigma_deg = detail::resolve_sigma(sc_sigma, traces);
      cfg.bw = detail::make_bandwidth_model(sc_bw, sc_bw_avg);
      cfg.num_sequences = sc_sequences;
      cfg.seed = sc_seed;

      if (sc_sweep.empty()) {
        const HitRateCurve curve = run_simulation(traces, cfg);
        auto out = open_output_file(sc_out);
        write_hit_rate_csv(out, curve);
        std::cout << "simulated " << cfg.num_sequences << " sequences x "
                  << traces.traces.size() << " clients, wrote " << sc_out << "\n";
      } else {
        SweepParam param;
        if (sc_sweep == "f-psi") {
          param = SweepParam::f_psi;
        } else if (sc_sweep == "f-n") {
          param = SweepParam::f_n;
        } else if (sc_sweep == "bw-avg") {
          param = SweepParam::bw_avg;
        } else {
          throw CLI::ValidationError("--sweep", "expected f-psi, f-n, or bw-avg");
        }
        if (sc_sweep_values.empty())
          throw CLI::ValidationError("--sweep-values", "required with --sweep");
        const auto curves = sweep(traces, cfg, param, sc_sweep_values);
        const fs::path base(sc_out);
        for (size_t i = 0; i < curves.size(); ++i) {
          fs::path path = base.parent_path() /
                          (base.stem().string() + "_" + sc_sweep + "_" +
                           format_double(sc_sweep_values[i]) + base.extension().string());
          auto out = open_output_file(path.string());
          write_hit_rate_csv(out, curves[i]);
          std::cout << "wrote " << path.string() << "\n";
        }
      }
      return 0;
    }

    if (info->parsed()) {
      const TraceSet traces = load_trace_set(in_in.traces_dir, in_in.normalize_start);
      std::cout << "video: " << traces.video_id << "\n"
                << "sessions: " << traces.traces.size() << "\n"
                << "common duration: " << traces.common_duration_ms << " ms\n";
      for (const auto& t : traces.traces)
        std::cout << "  " << t.session_id << "  category=" << category_name(t.category)
                  << "  samples=" << t.samples.size() << "  duration=" << t.duration_ms()
                  << " ms" << (t.has_gaps ? "  (irregular spacing)" : "") << "\n";
      return 0;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace view360
