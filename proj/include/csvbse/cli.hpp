#ifndef CSVBSE_CLI_HPP
#define CSVBSE_CLI_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "csvbse/config.hpp"
#include "csvbse/eval.hpp"
#include "csvbse/wav.hpp"

// Batch pipeline driver behind the `csvbse` executable: simulate scenes, run
// extractions, evaluate them, and probe filters spatially. Every artifact
// embeds the configuration it was produced from.
namespace csvbse::cli {

namespace fs = std::filesystem;
using nlohmann::json;

struct GlobalArgs {
  std::optional<unsigned> seed;  // overrides [run] seed when given
  unsigned threads = 1;
  std::string out_dir = ".";
};

namespace detail {

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::IoFailure, "cannot create directory " + dir.string());
}

// Text artifacts are staged next to their target and moved into place whole.
inline void write_text(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) fail(ErrorCode::IoFailure, "cannot write " + tmp.string());
    out << content;
    if (!out) fail(ErrorCode::IoFailure, "short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) fail(ErrorCode::IoFailure, "cannot move " + tmp.string() + " into place");
}

inline void write_wav(const fs::path& path, const Waveform& w) {
  const fs::path tmp = path.string() + ".tmp";
  wav::write(tmp.string(), w, wav::SampleFormat::Float32);
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) fail(ErrorCode::IoFailure, "cannot move " + tmp.string() + " into place");
}

// The configuration text, one '#'-prefixed line each, for CSV artifacts.
inline std::string echo_comment(const config::Ini& ini) {
  std::ostringstream out;
  out << "# config: " << ini.origin() << "\n";
  std::istringstream in(ini.text());
  std::string line;
  while (std::getline(in, line)) out << "# " << line << "\n";
  return out.str();
}

inline std::string csv_table(const std::string& echo, const std::string& header,
                             const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream out;
  out << echo << header << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
  return out.str();
}

inline json complex_matrix_json(const MatrixXcd& m, bool imag) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      row.push_back(imag ? m(r, c).imag() : m(r, c).real());
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Waveform read_wav_checked(const std::string& path, double expect_fs) {
  const Waveform w = wav::read(path);
  if (expect_fs > 0.0 && std::abs(w.sample_rate - expect_fs) > 1e-9)
    fail(ErrorCode::InvalidConfig, path + ": sample rate " + fmt(w.sample_rate) +
                                       " does not match the configured " + fmt(expect_fs) +
                                       " (resampling is not performed)");
  return w;
}

// Shared estimator dispatch. The pilot argument is only consulted by the
// piloted algorithm.
inline algorithms::ExtractionResult run_estimator(const config::RunConfig& rc,
                                                  const stft::SpectralTensor& x,
                                                  const sourcemodel::PilotSignal& pilot,
                                                  Eigen::Index n_samples_out) {
  algorithms::AlgoConfig cfg = rc.algo;
  cfg.threads = rc.threads;
  if (config::is_gradient(rc.algorithm)) return algorithms::bogive_w(x, rc.stft, cfg, n_samples_out);
  if (rc.algorithm == config::AlgorithmName::PilotedBlockAuxIve && !pilot.enabled())
    fail(ErrorCode::InvalidConfig, "piloted_block_auxive needs a pilot signal");
  const sourcemodel::PilotSignal no_pilot;
  return algorithms::block_auxive(
      x, rc.stft, cfg,
      rc.algorithm == config::AlgorithmName::PilotedBlockAuxIve ? pilot : no_pilot, n_samples_out);
}

inline sourcemodel::PilotSignal load_pilot(const config::RunConfig& rc) {
  sourcemodel::PilotSignal p;
  if (!config::needs_pilot(rc.algorithm)) return p;
  if (rc.pilot_text == "oracle")
    fail(ErrorCode::InvalidConfig,
         "pilot = oracle needs ground truth and is only available in evaluate batch mode");
  if (!rc.pilot_text.empty()) {
    p = sourcemodel::pilot_from_text(rc.pilot_text, rc.pilot_delta);
  } else if (!rc.pilot_wav.empty()) {
    p = sourcemodel::pilot_from_waveform(wav::read(rc.pilot_wav), rc.stft, rc.pilot_delta);
  }
  return p;
}

inline unsigned resolve_seed(const config::Ini& ini, const GlobalArgs& args) {
  if (args.seed) return *args.seed;
  return static_cast<unsigned>(ini.get_int("run", "seed", 0));
}

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

inline double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// simulate: build the scene and write the mixture, the per-component images,
// and a manifest describing them.
inline int cmd_simulate(const config::Ini& ini, const GlobalArgs& args) {
  if (ini.has_section("synthetic"))
    fail(ErrorCode::InvalidConfig,
         "synthetic scenes are transform-domain only and have no waveforms; use `evaluate`");
  const simulate::Scenario sc = config::scenario_from(ini);
  const unsigned seed = detail::resolve_seed(ini, args);

  simulate::Rng rng(seed);
  const simulate::GroundTruth gt = simulate::moving_mixture(sc, rng);

  const fs::path out_dir = args.out_dir;
  detail::ensure_dir(out_dir / "images");

  std::vector<std::string> names{"target"};
  for (const auto& section : ini.section_names()) {
    if (section.rfind("source.", 0) != 0) continue;
    std::string n = section.substr(7);
    while (std::find(names.begin(), names.end(), n) != names.end()) n += "_";
    names.push_back(n);
  }
  if (names.size() != gt.images.size())
    fail(ErrorCode::InvalidConfig, "internal: image/name count mismatch");

  json manifest;
  manifest["kind"] = "scene";
  manifest["seed"] = seed;
  manifest["fs"] = sc.fs;
  manifest["n_samples"] = gt.mixture.length();
  manifest["channels"] = gt.mixture.channels();
  manifest["mixture"] = "mixture.wav";
  manifest["config"] = ini.text();
  json images = json::array();
  for (std::size_t i = 0; i < gt.images.size(); ++i) {
    const std::string file = "images/" + names[i] + ".wav";
    detail::write_wav(out_dir / file, gt.images[i]);
    json entry;
    entry["name"] = names[i];
    entry["file"] = file;
    entry["power"] =
        gt.images[i].samples.squaredNorm() / static_cast<double>(gt.images[i].samples.size());
    images.push_back(std::move(entry));
  }
  manifest["images"] = std::move(images);
  detail::write_wav(out_dir / "mixture.wav", gt.mixture);
  detail::write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------------------
// extract: run the configured estimator on a mixture WAV; write the extracted
// source, the filter state, and the per-iteration trace.
inline int cmd_extract(const config::Ini& ini, const GlobalArgs& args) {
  config::RunConfig rc = config::run_config_from(ini);
  rc.threads = args.threads;
  const unsigned seed = detail::resolve_seed(ini, args);

  const std::string input = ini.require_string("io", "input");
  const double expect_fs = ini.get_double("scenario", "fs", 0.0);
  const Waveform mixture = detail::read_wav_checked(input, expect_fs);
  if (mixture.channels() < 2)
    fail(ErrorCode::InvalidConfig, input + ": extraction needs at least 2 channels");

  const stft::SpectralTensor x = stft::analyze(mixture, rc.stft);
  const sourcemodel::PilotSignal pilot = detail::load_pilot(rc);
  const algorithms::ExtractionResult res = detail::run_estimator(rc, x, pilot, mixture.length());

  const fs::path out_dir = args.out_dir;
  detail::ensure_dir(out_dir);
  detail::write_wav(out_dir / "extracted.wav", res.source);

  // per-iteration trace
  {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < res.state.step_trace.size(); ++i) {
      const double contrast =
          i < res.state.contrast_trace.size() ? res.state.contrast_trace[i] : 0.0;
      rows.push_back({std::to_string(i + 1), detail::fmt(contrast),
                      detail::fmt(res.state.step_trace[i])});
    }
    detail::write_text(out_dir / "trace.csv",
                       detail::csv_table(detail::echo_comment(ini), "iter,contrast,step", rows));
  }

  // filter state
  {
    json st;
    st["kind"] = "extraction_state";
    st["algorithm"] = config::algorithm_name(rc.algorithm);
    st["seed"] = seed;
    st["input"] = input;
    st["sample_rate"] = mixture.sample_rate;
    st["n_samples"] = mixture.length();
    st["channels"] = mixture.channels();
    st["ref_channel"] = rc.algo.ref_channel;
    st["stft"] = {{"fft_len", rc.stft.fft_len},
                  {"hop", rc.stft.hop},
                  {"window", stft::window_name(rc.stft.window)}};
    st["blocks"] = rc.algo.n_blocks;
    st["iterations"] = res.state.iterations;
    st["converged"] = res.converged;
    st["wall_time_s"] = res.wall_time_s;
    st["used_ridge"] = res.state.used_ridge;
    st["renormalized_fallback"] = res.state.renormalized_fallback;
    st["w_re"] = detail::complex_matrix_json(res.state.W.w, false);
    st["w_im"] = detail::complex_matrix_json(res.state.W.w, true);
    st["a_re"] = detail::complex_matrix_json(res.state.A.a, false);
    st["a_im"] = detail::complex_matrix_json(res.state.A.a, true);
    json sigma = json::array();
    for (Eigen::Index k = 0; k < res.state.sigma.sigma.rows(); ++k) {
      json row = json::array();
      for (Eigen::Index t = 0; t < res.state.sigma.sigma.cols(); ++t)
        row.push_back(res.state.sigma.sigma(k, t));
      sigma.push_back(std::move(row));
    }
    st["sigma"] = std::move(sigma);
    st["config"] = ini.text();
    detail::write_text(out_dir / "state.json", st.dump(2) + "\n");
  }
  return 0;
}

// ---------------------------------------------------------------------------
// evaluate
namespace detail {

struct MetricsTable {
  std::vector<std::vector<std::string>> rows;
  std::vector<double> isinr, whole, isdr, time;
  std::vector<eval::MetricReport> reports;

  void add(const std::string& label, const std::string& algorithm,
           const eval::MetricReport& rep, bool with_isdr = true) {
    isinr.push_back(rep.isinr_db);
    whole.push_back(rep.isinr_whole_db);
    if (with_isdr) isdr.push_back(rep.isdr_db);
    time.push_back(rep.wall_time_s);
    reports.push_back(rep);
    rows.push_back({label, algorithm, fmt(rep.isinr_db), fmt(rep.isinr_whole_db),
                    with_isdr ? fmt(rep.isdr_db) : "", rep.fail ? "1" : "0",
                    fmt(rep.wall_time_s)});
  }

  void finish(const std::string& algorithm) {
    const double fr = eval::fail_rate(reports);
    rows.push_back({"mean", algorithm, fmt(mean_of(isinr)), fmt(mean_of(whole)),
                    isdr.empty() ? "" : fmt(mean_of(isdr)), fmt(fr), fmt(mean_of(time))});
    rows.push_back({"std", algorithm, fmt(std_of(isinr)), fmt(std_of(whole)),
                    isdr.empty() ? "" : fmt(std_of(isdr)), "", fmt(std_of(time))});
  }
};

inline constexpr const char* kMetricsHeader =
    "seed,algorithm,isinr_db,isinr_whole_db,isdr_db,fail,wall_time_s";

// Tensor-domain report for synthetic scenes: the filter output split into its
// target and background parts, per block and overall; no time-domain SDR.
inline eval::MetricReport synthetic_report(const model::SeparatingVectors& W,
                                           const simulate::SyntheticCsvMixture& mix,
                                           Eigen::Index n_blocks, Eigen::Index ref,
                                           double wall_time_s) {
  const Eigen::Index K = mix.x.n_bins;
  const Eigen::Index N = mix.x.n_frames;
  const auto bounds = model::block_bounds(N, n_blocks);

  // per-frame power of each component, before and after the filter
  VectorXd out_t = VectorXd::Zero(N), out_b = VectorXd::Zero(N);
  VectorXd in_t = VectorXd::Zero(N), in_b = VectorXd::Zero(N);
  for (Eigen::Index k = 0; k < K; ++k) {
    for (Eigen::Index l = 0; l < N; ++l) {
      cd et = 0.0, eb = 0.0;
      for (Eigen::Index i = 0; i < mix.x.n_channels; ++i) {
        et += std::conj(W.w(i, k)) * mix.target.at(k, l, i);
        eb += std::conj(W.w(i, k)) * mix.background.at(k, l, i);
      }
      out_t(l) += std::norm(et);
      out_b(l) += std::norm(eb);
      in_t(l) += std::norm(mix.target.at(k, l, ref));
      in_b(l) += std::norm(mix.background.at(k, l, ref));
    }
  }
  const auto rooted = [](VectorXd v) { return v.cwiseSqrt().eval(); };
  eval::MetricReport rep;
  rep.wall_time_s = wall_time_s;
  rep.isinr_whole_db =
      eval::isinr(rooted(out_t), rooted(out_b), rooted(in_t), rooted(in_b), eval::kMetricCapDb,
                  &rep.capped);
  rep.block_isinr_db.resize(n_blocks);
  for (Eigen::Index t = 0; t < n_blocks; ++t) {
    const Eigen::Index lo = bounds[t];
    const Eigen::Index len = bounds[t + 1] - lo;
    rep.block_isinr_db(t) =
        eval::isinr(rooted(out_t.segment(lo, len)), rooted(out_b.segment(lo, len)),
                    rooted(in_t.segment(lo, len)), rooted(in_b.segment(lo, len)),
                    eval::kMetricCapDb, &rep.capped);
  }
  rep.isinr_db = rep.block_isinr_db.mean();
  rep.fail = rep.isinr_db < -5.0;
  return rep;
}

}  // namespace detail

inline int cmd_evaluate(const config::Ini& ini, const GlobalArgs& args) {
  config::RunConfig rc = config::run_config_from(ini);
  rc.threads = args.threads;
  const unsigned base_seed = detail::resolve_seed(ini, args);
  const fs::path out_dir = args.out_dir;
  detail::ensure_dir(out_dir);

  detail::MetricsTable table;
  const std::string alg = config::algorithm_name(rc.algorithm);

  if (ini.has_section("synthetic")) {
    const config::SyntheticSpec sp = config::synthetic_from(ini);
    if (rc.algo.n_blocks != sp.blocks)
      fail(ErrorCode::InvalidConfig, "[algorithm] blocks must match [synthetic] blocks");
    const long seeds = ini.get_int("evaluate", "seeds", 1);
    if (seeds < 1) fail(ErrorCode::InvalidConfig, "seeds must be >= 1");
    for (long s = 0; s < seeds; ++s) {
      simulate::Rng rng(base_seed + static_cast<unsigned>(s));
      auto mix = simulate::synthetic_csv_mixture(sp.bins, sp.channels, sp.blocks,
                                                 sp.frames_per_block, rng);
      mix.x.sample_rate = 16000.0;  // nominal; no waveform is synthesized
      sourcemodel::PilotSignal pilot;
      if (config::needs_pilot(rc.algorithm)) {
        pilot.o = mix.s_true.colwise().norm().transpose();
        pilot.delta = rc.pilot_delta;
      }
      const auto res = detail::run_estimator(rc, mix.x, pilot, -1);
      table.add(std::to_string(base_seed + static_cast<unsigned>(s)), alg,
                detail::synthetic_report(res.state.W, mix, sp.blocks, rc.algo.ref_channel,
                                         res.wall_time_s),
                /*with_isdr=*/false);
    }
  } else if (ini.has("io", "out_target")) {
    // File mode: all signals given explicitly; one row.
    const double expect_fs = ini.get_double("scenario", "fs", 0.0);
    auto col = [&](const std::string& key, Eigen::Index channel) {
      const Waveform w = detail::read_wav_checked(ini.require_string("io", key), expect_fs);
      if (channel >= w.channels())
        fail(ErrorCode::InvalidConfig, key + ": reference channel out of range");
      return VectorXd(w.samples.col(channel));
    };
    const Eigen::Index ref = rc.algo.ref_channel;
    const VectorXd out_t = col("out_target", 0);
    const VectorXd out_b = col("out_background", 0);
    const VectorXd in_t = col("target_image", ref);
    const VectorXd in_b = col("background_image", ref);
    const VectorXd est = col("estimate", 0);
    const VectorXd mix = col("mixture", ref);
    const Eigen::Index n = in_t.size();
    if (out_t.size() != n || out_b.size() != n || est.size() != n || mix.size() != n)
      fail(ErrorCode::InvalidConfig, "evaluate inputs must share one length");
    const auto bounds =
        eval::block_sample_bounds(n, rc.stft.frames_for(n), rc.algo.n_blocks, rc.stft);
    table.add("file", alg,
              eval::evaluate_extraction(out_t, out_b, in_t, in_b, est, mix, bounds,
                                        rc.stft.fft_len));
  } else {
    // Batch room mode: simulate per seed, extract, project, score.
    const simulate::Scenario sc = config::scenario_from(ini);
    const long seeds = ini.get_int("evaluate", "seeds", 1);
    if (seeds < 1) fail(ErrorCode::InvalidConfig, "seeds must be >= 1");
    for (long s = 0; s < seeds; ++s) {
      simulate::Rng rng(base_seed + static_cast<unsigned>(s));
      const simulate::GroundTruth gt = simulate::moving_mixture(sc, rng);
      const stft::SpectralTensor x = stft::analyze(gt.mixture, rc.stft);

      sourcemodel::PilotSignal pilot;
      if (config::needs_pilot(rc.algorithm)) {
        if (rc.pilot_text == "oracle" || (rc.pilot_text.empty() && rc.pilot_wav.empty())) {
          pilot = sourcemodel::pilot_from_waveform(gt.target_image(), rc.stft, rc.pilot_delta);
        } else {
          pilot = detail::load_pilot(rc);
        }
      }
      const auto res = detail::run_estimator(rc, x, pilot, gt.mixture.length());

      const Eigen::Index ref = rc.algo.ref_channel;
      const VectorXd out_t = eval::project_component(res.state, gt.target_image(), rc.stft, ref);
      const VectorXd out_b =
          eval::project_component(res.state, gt.background_image(), rc.stft, ref);
      const auto bounds = eval::block_sample_bounds(gt.mixture.length(), x.n_frames,
                                                    rc.algo.n_blocks, rc.stft);
      table.add(std::to_string(base_seed + static_cast<unsigned>(s)), alg,
                eval::evaluate_extraction(out_t, out_b, gt.target_image().samples.col(ref),
                                          gt.background_image().samples.col(ref),
                                          res.source.samples.col(0), gt.mixture.samples.col(ref),
                                          bounds, rc.stft.fft_len, res.wall_time_s));
    }
  }

  table.finish(alg);
  detail::write_text(out_dir / "metrics.csv",
                     detail::csv_table(detail::echo_comment(ini), detail::kMetricsHeader,
                                       table.rows));
  return 0;
}

// ---------------------------------------------------------------------------
// attmap: probe a stored separating filter across room positions.
inline int cmd_attmap(const config::Ini& ini, const GlobalArgs& args) {
  const std::string state_path = ini.require_string("io", "state");
  std::ifstream in(state_path, std::ios::binary);
  if (!in) fail(ErrorCode::IoFailure, "cannot open state file " + state_path);
  json st;
  try {
    in >> st;
  } catch (const std::exception& e) {
    fail(ErrorCode::InvalidConfig, state_path + ": not a valid state dump (" + e.what() + ")");
  }

  model::SeparatingVectors W;
  stft::StftConfig cfg;
  double fs = 0.0;
  try {
    const auto& wre = st.at("w_re");
    const auto& wim = st.at("w_im");
    const auto d = static_cast<Eigen::Index>(wre.size());
    const auto K = static_cast<Eigen::Index>(wre.at(0).size());
    W.w.resize(d, K);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index k = 0; k < K; ++k)
        W.w(i, k) = cd(wre.at(i).at(k).get<double>(), wim.at(i).at(k).get<double>());
    cfg.fft_len = st.at("stft").at("fft_len").get<Eigen::Index>();
    cfg.hop = st.at("stft").at("hop").get<Eigen::Index>();
    cfg.window = stft::window_from_name(st.at("stft").at("window").get<std::string>());
    fs = st.at("sample_rate").get<double>();
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidConfig, state_path + ": missing state fields (" + e.what() + ")");
  }

  simulate::RoomSpec room;
  room.dims = ini.get_vec3("room", "dims", room.dims);
  room.t60 = ini.get_double("room", "t60", room.t60);
  room.speed_of_sound = ini.get_double("room", "speed_of_sound", room.speed_of_sound);
  const auto mics = ini.get_vec3_list("mics", "mic");
  if (mics.empty())
    fail(ErrorCode::InvalidConfig, "no microphones ([mics] needs one 'mic = x y z' per channel)");

  eval::GridSpec grid;
  const auto g = ini.get_doubles("attmap", "grid");
  if (g.size() != 6)
    fail(ErrorCode::InvalidConfig, "[attmap] grid must be 'x0 x1 nx y0 y1 ny'");
  grid.x0 = g[0];
  grid.x1 = g[1];
  grid.nx = static_cast<Eigen::Index>(g[2]);
  grid.y0 = g[3];
  grid.y1 = g[4];
  grid.ny = static_cast<Eigen::Index>(g[5]);
  grid.z = ini.get_double("attmap", "z", 1.2);
  const double probe = ini.get_double("attmap", "probe_duration", 1.0);
  const unsigned seed = detail::resolve_seed(ini, args);

  const auto map =
      eval::attenuation_map(W, room, mics, grid, fs, cfg, seed, probe, args.threads);

  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < map.points.size(); ++i)
    rows.push_back({detail::fmt(map.points[i](0)), detail::fmt(map.points[i](1)),
                    detail::fmt(map.points[i](2)),
                    detail::fmt(map.attenuation_db(static_cast<Eigen::Index>(i)))});

  const fs::path out_dir = args.out_dir;
  detail::ensure_dir(out_dir);
  detail::write_text(out_dir / "attmap.csv",
                     detail::csv_table(detail::echo_comment(ini), "x,y,z,attenuation_db", rows));
  return 0;
}

// ---------------------------------------------------------------------------

inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidConfig:
    case ErrorCode::InvalidScenario:
    case ErrorCode::InvalidGeometry:
    case ErrorCode::IoFailure:
    case ErrorCode::TooManyBlocks:
    case ErrorCode::SignalTooShort:
      return 2;
    default:
      return 3;
  }
}

inline int run_command(const std::string& command, const config::Ini& ini,
                       const GlobalArgs& args) {
  if (command == "simulate") return cmd_simulate(ini, args);
  if (command == "extract") return cmd_extract(ini, args);
  if (command == "evaluate") return cmd_evaluate(ini, args);
  if (command == "attmap") return cmd_attmap(ini, args);
  fail(ErrorCode::InvalidConfig, "unknown command '" + command + "'");
}

}  // namespace csvbse::cli

#endif  // CSVBSE_CLI_HPP
