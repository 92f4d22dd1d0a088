#ifndef CSVBSE_EVAL_HPP
#define CSVBSE_EVAL_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "csvbse/algorithms.hpp"
#include "csvbse/common.hpp"
#include "csvbse/model.hpp"
#include "csvbse/simulate.hpp"
#include "csvbse/stft.hpp"

// Extraction quality against ground truth (SINR/SDR improvements, fail rates)
// and spatial selectivity of a separating filter (attenuation maps).
namespace csvbse::eval {

inline constexpr double kMetricCapDb = 80.0;

struct MetricReport {
  double isinr_db = 0.0;        // block-averaged SINR improvement
  double isinr_whole_db = 0.0;  // single-ratio variant over the whole signal
  double isdr_db = 0.0;         // SDR improvement over the unprocessed reference
  bool fail = false;            // isinr_db < -5 dB
  VectorXd block_isinr_db;      // per-block improvement trace
  double wall_time_s = 0.0;
  bool capped = false;
};

namespace detail {

inline double power(const VectorXd& v) {
  return v.size() == 0 ? 0.0 : v.squaredNorm() / static_cast<double>(v.size());
}

inline double capped_ratio_db(double num, double den, double cap, bool* hit = nullptr) {
  double v;
  if (num <= 0.0 && den <= 0.0) v = 0.0;
  else if (den <= 0.0) v = cap;
  else if (num <= 0.0) v = -cap;
  else v = 10.0 * std::log10(num / den);
  if (v > cap || v < -cap) {
    if (hit) *hit = true;
    v = std::clamp(v, -cap, cap);
  }
  return v;
}

inline double median(std::vector<double> v) {
  if (v.empty()) fail(ErrorCode::InvalidConfig, "median of empty set");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace detail

// SINR improvement from the filtered component signals: output SINR measured
// on the filter applied to the target image vs to the background image, input
// SINR on the unprocessed reference channel of the same images.
inline double isinr(const VectorXd& out_target, const VectorXd& out_background,
                    const VectorXd& in_target_ref, const VectorXd& in_background_ref,
                    double cap_db = kMetricCapDb, bool* capped = nullptr) {
  const double sinr_out = detail::capped_ratio_db(detail::power(out_target),
                                                  detail::power(out_background), cap_db, capped);
  const double sinr_in = detail::capped_ratio_db(detail::power(in_target_ref),
                                                 detail::power(in_background_ref), cap_db, capped);
  return std::clamp(sinr_out - sinr_in, -cap_db, cap_db);
}

// Signal-to-distortion ratio after compensating a global integer delay within
// +-max_delay and a least-squares gain: SDR = 10 log10(||s||^2 / ||s - c e_tau||^2)
// maximized over the delay, with c the optimal gain for each tau.
inline double isdr(const VectorXd& estimate, const VectorXd& reference,
                   Eigen::Index max_delay, double cap_db = kMetricCapDb) {
  const Eigen::Index n = std::min(estimate.size(), reference.size());
  if (n < 2) fail(ErrorCode::Undefined, "signals too short for SDR");
  const VectorXd s = reference.head(n);
  const double s2 = s.squaredNorm();
  if (!(s2 > 0.0)) fail(ErrorCode::Undefined, "silent ground truth in SDR");

  double best = -cap_db;
  for (Eigen::Index tau = -max_delay; tau <= max_delay; ++tau) {
    // e shifted by tau relative to s, overlapping region only
    const Eigen::Index lo_s = std::max<Eigen::Index>(0, tau);
    const Eigen::Index lo_e = std::max<Eigen::Index>(0, -tau);
    const Eigen::Index len = n - std::abs(tau);
    if (len < 2) continue;
    const auto ss = s.segment(lo_s, len);
    const auto ee = estimate.segment(lo_e, len);
    const double e2 = ee.squaredNorm();
    if (!(e2 > 0.0)) continue;
    const double cross = ss.dot(ee);
    const double resid = s2 - cross * cross / e2;  // ||s - c*e||^2 at the optimal gain
    const double sdr = detail::capped_ratio_db(s2, std::max(resid, 0.0), cap_db);
    best = std::max(best, sdr);
  }
  return best;
}

// Block boundaries of the block-wise metrics, in samples, derived from the
// frame partition used during extraction.
inline std::vector<Eigen::Index> block_sample_bounds(Eigen::Index n_samples, Eigen::Index n_frames,
                                                     Eigen::Index n_blocks,
                                                     const stft::StftConfig& cfg) {
  const auto frame_bounds = model::block_bounds(n_frames, n_blocks);
  std::vector<Eigen::Index> out(frame_bounds.size());
  for (std::size_t i = 0; i < frame_bounds.size(); ++i)
    out[i] = std::min<Eigen::Index>(n_samples, frame_bounds[i] * cfg.hop);
  out.back() = n_samples;
  return out;
}

// Full report for one extraction: the filter output split into its target and
// background components (obtained by running the same filter over each image),
// compared against the unprocessed reference channel.
inline MetricReport evaluate_extraction(const VectorXd& out_target, const VectorXd& out_background,
                                        const VectorXd& in_target_ref,
                                        const VectorXd& in_background_ref,
                                        const VectorXd& estimate, const VectorXd& mixture_ref,
                                        const std::vector<Eigen::Index>& block_bounds,
                                        Eigen::Index sdr_max_delay, double wall_time_s = 0.0) {
  MetricReport rep;
  rep.wall_time_s = wall_time_s;
  rep.isinr_whole_db =
      isinr(out_target, out_background, in_target_ref, in_background_ref, kMetricCapDb, &rep.capped);

  const auto n_blocks = static_cast<Eigen::Index>(block_bounds.size()) - 1;
  rep.block_isinr_db.resize(n_blocks);
  for (Eigen::Index t = 0; t < n_blocks; ++t) {
    const Eigen::Index lo = block_bounds[t];
    const Eigen::Index len = block_bounds[t + 1] - lo;
    rep.block_isinr_db(t) =
        isinr(out_target.segment(lo, len), out_background.segment(lo, len),
              in_target_ref.segment(lo, len), in_background_ref.segment(lo, len), kMetricCapDb,
              &rep.capped);
  }
  rep.isinr_db = n_blocks > 0 ? rep.block_isinr_db.mean() : rep.isinr_whole_db;
  rep.fail = rep.isinr_db < -5.0;

  const double sdr_est = isdr(estimate, in_target_ref, sdr_max_delay);
  const double sdr_ref = isdr(mixture_ref, in_target_ref, sdr_max_delay);
  rep.isdr_db = std::clamp(sdr_est - sdr_ref, -kMetricCapDb, kMetricCapDb);
  return rep;
}

// Percentage of reports whose block-averaged iSINR improvement is below -5 dB.
inline double fail_rate(const std::vector<MetricReport>& reports) {
  if (reports.empty()) fail(ErrorCode::InvalidConfig, "fail_rate needs at least one report");
  std::size_t fails = 0;
  for (const auto& r : reports) fails += r.fail ? 1 : 0;
  return 100.0 * static_cast<double>(fails) / static_cast<double>(reports.size());
}

// Run the extraction filter over a component image (linearity makes the output
// of the mixture equal the sum of these per-component outputs).
inline VectorXd project_component(const model::ExtractionState& state, const Waveform& image,
                                  const stft::StftConfig& cfg, Eigen::Index ref_channel = 0) {
  const stft::SpectralTensor spec = stft::analyze(image, cfg);
  const Waveform y =
      algorithms::extract_signal(state, spec, cfg, image.length(), ref_channel);
  return y.samples.col(0);
}

struct GridSpec {
  double x0 = 0.0, x1 = 0.0;
  Eigen::Index nx = 1;
  double y0 = 0.0, y1 = 0.0;
  Eigen::Index ny = 1;
  double z = 0.0;

  std::vector<simulate::Vector3d> points() const {
    if (nx < 1 || ny < 1) fail(ErrorCode::InvalidConfig, "grid needs at least one point per axis");
    std::vector<simulate::Vector3d> pts;
    pts.reserve(static_cast<std::size_t>(nx) * ny);
    for (Eigen::Index iy = 0; iy < ny; ++iy)
      for (Eigen::Index ix = 0; ix < nx; ++ix) {
        const double x = nx == 1 ? x0 : x0 + (x1 - x0) * static_cast<double>(ix) / double(nx - 1);
        const double y = ny == 1 ? y0 : y0 + (y1 - y0) * static_cast<double>(iy) / double(ny - 1);
        pts.emplace_back(x, y, z);
      }
    return pts;
  }
};

struct AttenuationMap {
  std::vector<simulate::Vector3d> points;
  VectorXd attenuation_db;  // one entry per point
};

// Gain of the separating filter toward each candidate position: a white-noise
// point source is imaged at the array through the room, filtered per bin with
// the unit-normalized separating vectors, and the output/input power ratio is
// reported in dB. Per-bin normalization makes the map invariant to any global
// or per-bin rescaling of w.
inline AttenuationMap attenuation_map(const model::SeparatingVectors& W,
                                      const simulate::RoomSpec& room,
                                      const std::vector<simulate::Vector3d>& mics,
                                      const std::vector<simulate::Vector3d>& points, double fs,
                                      const stft::StftConfig& cfg, unsigned seed,
                                      double probe_duration = 1.0, unsigned threads = 1) {
  room.validate();
  const auto d = static_cast<Eigen::Index>(mics.size());
  if (W.channels() != d) fail(ErrorCode::InvalidConfig, "filter does not match the microphone count");
  if (W.bins() != cfg.bins()) fail(ErrorCode::InvalidConfig, "filter does not match fft_len");
  for (const auto& p : points)
    if (!room.contains(p)) fail(ErrorCode::InvalidGeometry, "grid point outside room");

  MatrixXcd Wn = W.w;
  for (Eigen::Index k = 0; k < Wn.cols(); ++k) {
    const double nrm = Wn.col(k).norm();
    if (!(nrm > 0.0)) fail(ErrorCode::InvalidConfig, "zero separating vector in attenuation map");
    Wn.col(k) /= nrm;
  }

  const auto n = static_cast<Eigen::Index>(probe_duration * fs);
  simulate::Rng rng(seed);
  const VectorXd probe = simulate::generate_signal(simulate::SignalKind::WhiteNoise, n, fs, rng);

  AttenuationMap map;
  map.points = points;
  map.attenuation_db.resize(static_cast<Eigen::Index>(points.size()));
  parallel_for(points.size(), threads, [&](std::size_t pi) {
    Waveform img;
    img.sample_rate = fs;
    img.samples.resize(n, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      const VectorXd h = simulate::image_method_rir(room, points[pi], mics[i], fs);
      img.samples.col(i) = simulate::fft_convolve(probe, h).head(n);
    }
    const stft::SpectralTensor spec = stft::analyze(img, cfg);
    double p_out = 0.0;
    double p_in = 0.0;
    for (Eigen::Index k = 0; k < spec.n_bins; ++k) {
      const auto X = spec.bin(k);
      p_out += (X * Wn.col(k).conjugate()).squaredNorm();
      p_in += X.squaredNorm();
    }
    p_in /= static_cast<double>(d);  // mean input power across microphones
    map.attenuation_db(static_cast<Eigen::Index>(pi)) =
        detail::capped_ratio_db(p_out, p_in, kMetricCapDb);
  });
  return map;
}

inline AttenuationMap attenuation_map(const model::SeparatingVectors& W,
                                      const simulate::RoomSpec& room,
                                      const std::vector<simulate::Vector3d>& mics,
                                      const GridSpec& grid, double fs, const stft::StftConfig& cfg,
                                      unsigned seed, double probe_duration = 1.0,
                                      unsigned threads = 1) {
  return attenuation_map(W, room, mics, grid.points(), fs, cfg, seed, probe_duration, threads);
}

inline double median_of(const std::vector<double>& values) { return detail::median(values); }

}  // namespace csvbse::eval

#endif  // CSVBSE_EVAL_HPP
