#ifndef CSVBSE_ALGORITHMS_HPP
#define CSVBSE_ALGORITHMS_HPP

#include <chrono>
#include <cmath>
#include <vector>

#include "csvbse/common.hpp"
#include "csvbse/model.hpp"
#include "csvbse/sourcemodel.hpp"
#include "csvbse/stft.hpp"

// The estimators: a gradient scheme and an auxiliary-function scheme for the
// shared separating vector, plus the piloted variant and output rescaling.
namespace csvbse::algorithms {

using model::AuxiliaryMatrices;

enum class InitKind { UnitVector, SteeringVector, Explicit };

struct AlgoConfig {
  Eigen::Index n_blocks = 1;  // T

  // gradient estimator
  int max_iter = 1000;
  double step_size = 0.2;  // mu
  double tol = 1e-4;       // stop when max_k ||delta_k|| drops below

  // auxiliary-function estimator
  int aux_iters = 100;        // fixed iteration count
  double aux_rel_tol = 1e-6;  // optional early stop on max relative w change (0 disables)

  double weight_floor = sourcemodel::kNormFloor;

  InitKind init = InitKind::UnitVector;
  Eigen::Index init_channel = 0;
  VectorXd steering_delays;  // seconds per channel, for InitKind::SteeringVector
  MatrixXcd init_w;          // channels x bins, for InitKind::Explicit

  Eigen::Index ref_channel = 0;
  bool record_trace = true;  // contrast after every iteration
  unsigned threads = 1;
};

struct ExtractionResult {
  model::ExtractionState state;
  Waveform source;  // time-domain estimate of the target's image at ref_channel
  bool converged = false;
  double wall_time_s = 0.0;
};

namespace detail {

inline model::SeparatingVectors initial_w(const stft::SpectralTensor& x, const AlgoConfig& cfg) {
  const Eigen::Index d = x.n_channels;
  const Eigen::Index K = x.n_bins;
  model::SeparatingVectors W;
  switch (cfg.init) {
    case InitKind::UnitVector:
      if (cfg.init_channel < 0 || cfg.init_channel >= d)
        fail(ErrorCode::InvalidConfig, "init channel out of range");
      W.w = MatrixXcd::Zero(d, K);
      W.w.row(cfg.init_channel).setOnes();
      break;
    case InitKind::SteeringVector: {
      if (cfg.steering_delays.size() != d)
        fail(ErrorCode::InvalidConfig, "steering delays must have one entry per channel");
      if (x.sample_rate <= 0.0)
        fail(ErrorCode::InvalidConfig, "steering init needs the tensor's sample rate");
      W.w.resize(d, K);
      const Eigen::Index fft_len = 2 * (K - 1);
      for (Eigen::Index k = 0; k < K; ++k) {
        const double f = x.sample_rate * static_cast<double>(k) / static_cast<double>(fft_len);
        for (Eigen::Index i = 0; i < d; ++i)
          W.w(i, k) = std::polar(1.0 / static_cast<double>(d), -2.0 * M_PI * f *
                                                                   cfg.steering_delays(i));
      }
      break;
    }
    case InitKind::Explicit:
      if (cfg.init_w.rows() != d || cfg.init_w.cols() != K)
        fail(ErrorCode::InvalidConfig, "explicit init has wrong shape");
      W.w = cfg.init_w;
      break;
  }
  return W;
}

// Source estimates for every bin: est(k, l) = w_k^H x_{k,l}.
inline MatrixXcd estimates(const model::SeparatingVectors& W, const stft::SpectralTensor& x) {
  MatrixXcd est(x.n_bins, x.n_frames);
  for (Eigen::Index k = 0; k < x.n_bins; ++k)
    est.row(k) = (x.bin(k) * W.w.col(k).conjugate()).transpose();
  return est;
}

// Divide w by its entry on the given channel; if that entry is (near) zero,
// fall back to the largest-magnitude entry and report it.
inline void pin_first_element(MatrixXcd& w, Eigen::Index channel, bool* fell_back) {
  for (Eigen::Index k = 0; k < w.cols(); ++k) {
    cd pivot = w(channel, k);
    if (std::abs(pivot) < 1e-12 * w.col(k).norm()) {
      Eigen::Index imax;
      w.col(k).cwiseAbs().maxCoeff(&imax);
      pivot = w(imax, k);
      if (fell_back) *fell_back = true;
      if (std::abs(pivot) == 0.0)
        fail(ErrorCode::SingularParameterization, "separating vector collapsed to zero");
    }
    w.col(k) /= pivot;
  }
}

inline double rms(const VectorXd& v) {
  return v.size() == 0 ? 0.0 : std::sqrt(v.squaredNorm() / static_cast<double>(v.size()));
}

// Contrast for the trace. The contrast is not invariant to a per-bin
// rescaling of w (a scale c_k shifts it by -(d-1) log|c_k|^2), so trace values
// are only comparable across iterations and across estimators when evaluated
// in a fixed gauge. Each column of w is normalized to unit norm first; unlike
// a reference-channel pin, this anchor is bounded no matter how the iterate
// rotates, so the trace reflects progress rather than gauge motion.
inline double trace_contrast(const model::SeparatingVectors& W, const stft::SpectralTensor& x,
                             const model::BlockCovariances& blocks) {
  model::SeparatingVectors Wn = W;
  for (Eigen::Index k = 0; k < Wn.w.cols(); ++k) {
    const double n = Wn.w.col(k).norm();
    if (n == 0.0) fail(ErrorCode::SingularParameterization, "separating vector collapsed to zero");
    Wn.w.col(k) /= n;
  }
  return model::contrast(Wn, x, blocks, model::BackgroundTerm::TraceIdentity);
}

// Resolve the pilot for this data: check length and apply the automatic
// scaling that matches its RMS to the RMS of the initial frame norms, so that
// delta = 1 means "pilot as loud as the data term".
inline sourcemodel::PilotSignal resolve_pilot(const sourcemodel::PilotSignal& pilot,
                                              const MatrixXcd& est_init) {
  if (!pilot.enabled()) return pilot;
  if (pilot.o.size() != est_init.cols())
    fail(ErrorCode::InvalidConfig, "pilot length does not match frame count");
  sourcemodel::PilotSignal p = pilot;
  if (p.auto_scale) {
    const double ro = rms(p.o);
    if (ro <= 0.0) fail(ErrorCode::InvalidConfig, "pilot signal is identically zero");
    const VectorXd r0 = sourcemodel::frame_norms(est_init);
    p.o *= rms(r0) / ro;
    p.auto_scale = false;
  }
  return p;
}

}  // namespace detail

// Per-(bin, block) expectation pairing the score with the conjugated estimate:
// nu_k = mean_l phi_k(u_l) * conj(u_{k,l}), evaluated on the scale-normalized
// estimates u of one block (bins x frames).
inline VectorXcd nu(const MatrixXcd& u_block, double floor = sourcemodel::kNormFloor) {
  const Eigen::Index K = u_block.rows();
  const Eigen::Index n = u_block.cols();
  VectorXcd out = VectorXcd::Zero(K);
  for (Eigen::Index l = 0; l < n; ++l) {
    const VectorXcd phi = sourcemodel::score(u_block.col(l), floor);
    out += phi.cwiseProduct(u_block.col(l).conjugate());
  }
  return out / static_cast<double>(n);
}

// Average deviation of the current separating vectors from the estimating
// equation, one column per bin:
//   delta_k = (1/T) sum_t { a_{k,t} - nu_{k,t}^{-1} * mean_l[ conj(phi_k(u_l)) x_{k,l} ] / sigma }
// with u the scale-normalized estimates and a, sigma induced by w. Vanishes
// (up to sampling noise) at separating vectors consistent with the model.
inline MatrixXcd gradient_delta(const model::SeparatingVectors& W, const stft::SpectralTensor& x,
                                const model::BlockCovariances& blocks,
                                double floor = sourcemodel::kNormFloor) {
  const Eigen::Index K = blocks.n_bins;
  const Eigen::Index T = blocks.n_blocks;
  const Eigen::Index d = blocks.n_channels;

  const model::BlockScales sig = model::block_scales(W, blocks);
  MatrixXcd u = detail::estimates(W, x);  // bins x frames, then normalized in place
  for (Eigen::Index t = 0; t < T; ++t)
    for (Eigen::Index k = 0; k < K; ++k) {
      const double s = sig.sigma(k, t);
      if (!(s > 0.0)) fail(ErrorCode::DegenerateCovariance, "zero scale in gradient");
      u.row(k).segment(blocks.block_start(t), blocks.block_len(t)) /= s;
    }

  VectorXd rnorm(x.n_frames);
  for (Eigen::Index l = 0; l < x.n_frames; ++l)
    rnorm(l) = std::max(u.col(l).norm(), floor);

  MatrixXcd delta = MatrixXcd::Zero(d, K);
  VectorXcd escore(d);  // per-(bin, block) accumulator of conj(phi_k(u)) x_{k,l}
  for (Eigen::Index k = 0; k < K; ++k) {
    const auto X = x.bin(k);
    for (Eigen::Index t = 0; t < T; ++t) {
      const Eigen::Index lo = blocks.block_start(t);
      const Eigen::Index len = blocks.block_len(t);
      double nu_acc = 0.0;
      escore.setZero();
      for (Eigen::Index l = lo; l < lo + len; ++l) {
        const cd phi_conj = std::conj(u(k, l)) / rnorm(l);
        nu_acc += std::real(phi_conj * u(k, l));
        escore += phi_conj * X.row(l).transpose();
      }
      const double nu_kt = nu_acc / static_cast<double>(len);
      if (std::abs(nu_kt) < 1e-12)
        fail(ErrorCode::DegenerateNu, "score-estimate correlation vanished");
      const VectorXcd a = model::ogc_mixing_vector(W.w.col(k), blocks.at(k, t));
      delta.col(k) += a - escore / (static_cast<double>(len) * nu_kt * sig.sigma(k, t));
    }
  }
  return delta / static_cast<double>(T);
}

// Per-block scaled target estimate: y_{k,l} = (w_k^H x_{k,l}) * (a_{k,block(l)})_ref,
// the least-squares image of the extracted component on the reference channel.
// Invariant to rescaling of w because a transforms inversely.
inline stft::SpectralTensor rescale_output(const model::ExtractionState& state,
                                           const stft::SpectralTensor& x,
                                           Eigen::Index ref_channel = 0) {
  const Eigen::Index K = x.n_bins;
  const Eigen::Index T = state.A.n_blocks;
  if (state.W.bins() != K || state.W.channels() != x.n_channels)
    fail(ErrorCode::InvalidConfig, "state does not match the spectrogram");
  if (ref_channel < 0 || ref_channel >= x.n_channels)
    fail(ErrorCode::InvalidConfig, "reference channel out of range");
  const auto bounds = model::block_bounds(x.n_frames, T);

  stft::SpectralTensor out;
  out.resize(K, x.n_frames, 1);
  out.sample_rate = x.sample_rate;
  for (Eigen::Index k = 0; k < K; ++k) {
    const VectorXcd est = x.bin(k) * state.W.w.col(k).conjugate();
    for (Eigen::Index t = 0; t < T; ++t) {
      const cd gain = state.A.col(k, t)(ref_channel);
      for (Eigen::Index l = bounds[t]; l < bounds[t + 1]; ++l) out.at(k, l, 0) = est(l) * gain;
    }
  }
  return out;
}

// Inverse-transform the rescaled estimate back to the time domain, padded or
// truncated to the given sample count (the analysis drops tail samples that do
// not fill a frame).
inline Waveform extract_signal(const model::ExtractionState& state, const stft::SpectralTensor& x,
                               const stft::StftConfig& cfg, Eigen::Index n_samples,
                               Eigen::Index ref_channel = 0) {
  const stft::SpectralTensor scaled = rescale_output(state, x, ref_channel);
  Waveform y = stft::synthesize(scaled, cfg);
  if (n_samples > 0 && y.length() != n_samples) {
    MatrixXd padded = MatrixXd::Zero(n_samples, y.channels());
    const Eigen::Index n = std::min(n_samples, y.length());
    padded.topRows(n) = y.samples.topRows(n);
    y.samples.swap(padded);
  }
  return y;
}

// Gradient ascent on the contrast with the mixing vectors re-tied to w by the
// orthogonal constraint each iteration; w is kept on the scale where its entry
// at the reference channel equals one.
//
// n_samples_out: < 0 skips the time-domain synthesis (res.source stays empty,
// for callers that work on bare tensors), 0 synthesizes at the natural length,
// > 0 pads or truncates to exactly that many samples.
inline ExtractionResult bogive_w(const stft::SpectralTensor& x, const stft::StftConfig& stft_cfg,
                                 const AlgoConfig& cfg,
                                 Eigen::Index n_samples_out = -1) {
  const auto t0 = std::chrono::steady_clock::now();
  if (cfg.max_iter < 1) fail(ErrorCode::InvalidConfig, "max_iter must be >= 1");
  if (!(cfg.step_size > 0.0)) fail(ErrorCode::InvalidConfig, "step size must be positive");
  const model::BlockCovariances blocks = model::block_covariances(x, cfg.n_blocks);

  model::ExtractionState st;
  st.W = detail::initial_w(x, cfg);
  detail::pin_first_element(st.W.w, cfg.ref_channel, &st.renormalized_fallback);

  ExtractionResult res;
  for (int it = 0; it < cfg.max_iter; ++it) {
    const MatrixXcd delta = gradient_delta(st.W, x, blocks, cfg.weight_floor);
    double step = 0.0;
    for (Eigen::Index k = 0; k < delta.cols(); ++k) step = std::max(step, delta.col(k).norm());

    st.W.w += cfg.step_size * delta;
    detail::pin_first_element(st.W.w, cfg.ref_channel, &st.renormalized_fallback);
    st.iterations = it + 1;
    st.step_trace.push_back(step);
    if (cfg.record_trace)
      st.contrast_trace.push_back(detail::trace_contrast(st.W, x, blocks));
    if (step < cfg.tol) {
      res.converged = true;
      break;
    }
  }

  st.A = model::induced_mixing_vectors(st.W, blocks);
  st.sigma = model::block_scales(st.W, blocks);
  res.state = std::move(st);
  if (n_samples_out >= 0)
    res.source = extract_signal(res.state, x, stft_cfg, n_samples_out, cfg.ref_channel);
  res.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

// Weighted per-(bin, block) covariances with weights 1/max(r_l, floor), where
// r_l is the per-frame norm of the current estimates, pilot-augmented when one
// is given. The weights are shared across bins (this couples the bins).
inline AuxiliaryMatrices auxiva_weighted_covariances(
    const model::SeparatingVectors& W, const stft::SpectralTensor& x,
    const model::BlockCovariances& blocks, const sourcemodel::PilotSignal& pilot = {},
    double floor = sourcemodel::kNormFloor, unsigned threads = 1) {
  const MatrixXcd est = detail::estimates(W, x);
  const VectorXd r = sourcemodel::frame_norms(est, pilot);

  AuxiliaryMatrices aux;
  aux.n_bins = blocks.n_bins;
  aux.n_blocks = blocks.n_blocks;
  aux.V.resize(static_cast<std::size_t>(blocks.n_bins) * blocks.n_blocks);
  aux.mean_weight.resize(blocks.n_blocks);

  VectorXd inv_r(x.n_frames);
  for (Eigen::Index l = 0; l < x.n_frames; ++l)
    inv_r(l) = sourcemodel::aux_nonlinearity(r(l), floor);
  for (Eigen::Index t = 0; t < blocks.n_blocks; ++t)
    aux.mean_weight(t) =
        r.segment(blocks.block_start(t), blocks.block_len(t)).mean();

  parallel_for(static_cast<std::size_t>(blocks.n_bins), threads, [&](std::size_t ks) {
    const auto k = static_cast<Eigen::Index>(ks);
    const auto X = x.bin(k);
    for (Eigen::Index t = 0; t < blocks.n_blocks; ++t) {
      const Eigen::Index lo = blocks.block_start(t);
      const Eigen::Index len = blocks.block_len(t);
      const auto Xt = X.middleRows(lo, len);
      aux.at(k, t) = (Xt.transpose() * (inv_r.segment(lo, len).asDiagonal() * Xt.conjugate())) /
                     static_cast<double>(len);
    }
  });
  return aux;
}

// One bin's linearized update: solve (sum_t V_t/sigma2_t) w = sum_t
// (w_prev^H V_t w_prev / sigma2_t) a_t, then scale so sum_t w^H V_t w = 1.
// Scalar weights use the pre-update w throughout.
inline VectorXcd solve_w(const VectorXcd& w_prev, const std::vector<MatrixXcd>& V,
                         const std::vector<VectorXcd>& a, const VectorXd& sigma2,
                         bool* used_ridge = nullptr) {
  const Eigen::Index T = static_cast<Eigen::Index>(V.size());
  const Eigen::Index d = w_prev.size();
  if (T < 1 || static_cast<Eigen::Index>(a.size()) != T || sigma2.size() != T)
    fail(ErrorCode::InvalidConfig, "solve_w needs one V, a, sigma2 per block");

  MatrixXcd M = MatrixXcd::Zero(d, d);
  VectorXcd rhs = VectorXcd::Zero(d);
  for (Eigen::Index t = 0; t < T; ++t) {
    if (!(sigma2(t) > 0.0)) fail(ErrorCode::DegenerateCovariance, "nonpositive block scale");
    M += V[t] / sigma2(t);
    const double quad = std::real(w_prev.dot(V[t] * w_prev));
    rhs += (quad / sigma2(t)) * a[t];
  }

  Eigen::LDLT<MatrixXcd> ldlt(M);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    const double ridge = 1e-10 * std::max(std::real(M.trace()), 1e-300) / static_cast<double>(d);
    M += ridge * MatrixXcd::Identity(d, d);
    ldlt.compute(M);
    if (used_ridge) *used_ridge = true;
    if (ldlt.info() != Eigen::Success)
      fail(ErrorCode::SingularAuxSystem, "weighted covariance system is singular");
  }
  VectorXcd w = ldlt.solve(rhs);

  double quad_new = 0.0;
  for (Eigen::Index t = 0; t < T; ++t) quad_new += std::real(w.dot(V[t] * w));
  if (!(quad_new > 0.0)) fail(ErrorCode::SingularAuxSystem, "update collapsed to the null space");
  w /= std::sqrt(quad_new);
  return w;
}

// Auxiliary-function scheme: each iteration refreshes the per-frame weights,
// the weighted covariances, the mixing vectors and scales, and then solves the
// linearized system per bin. Runs aux_iters iterations with an optional early
// stop on the relative change of w.
inline ExtractionResult block_auxive(const stft::SpectralTensor& x,
                                     const stft::StftConfig& stft_cfg, const AlgoConfig& cfg,
                                     const sourcemodel::PilotSignal& pilot = {},
                                     Eigen::Index n_samples_out = -1) {
  const auto t0 = std::chrono::steady_clock::now();
  if (cfg.aux_iters < 1) fail(ErrorCode::InvalidConfig, "aux_iters must be >= 1");
  const model::BlockCovariances blocks = model::block_covariances(x, cfg.n_blocks);
  const Eigen::Index K = blocks.n_bins;
  const Eigen::Index T = blocks.n_blocks;

  model::ExtractionState st;
  st.W = detail::initial_w(x, cfg);
  const sourcemodel::PilotSignal eff_pilot =
      detail::resolve_pilot(pilot, detail::estimates(st.W, x));

  ExtractionResult res;
  std::vector<MatrixXcd> Vk(T);
  std::vector<VectorXcd> ak(T);
  VectorXd s2k(T);
  for (int it = 0; it < cfg.aux_iters; ++it) {
    const AuxiliaryMatrices aux =
        auxiva_weighted_covariances(st.W, x, blocks, eff_pilot, cfg.weight_floor, cfg.threads);
    const model::BlockScales sig = model::block_scales(st.W, blocks);

    MatrixXcd w_next(st.W.w.rows(), K);
    double max_rel = 0.0;
    for (Eigen::Index k = 0; k < K; ++k) {
      for (Eigen::Index t = 0; t < T; ++t) {
        Vk[t] = aux.at(k, t);
        ak[t] = model::ogc_mixing_vector(st.W.w.col(k), blocks.at(k, t));
        const double s2 = sig.sigma(k, t) * sig.sigma(k, t);
        if (!(s2 > 0.0)) fail(ErrorCode::DegenerateCovariance, "zero scale in update");
        s2k(t) = s2;
      }
      w_next.col(k) = solve_w(st.W.w.col(k), Vk, ak, s2k, &st.used_ridge);
      const double base = st.W.w.col(k).norm();
      if (base > 0.0)
        max_rel = std::max(max_rel, (w_next.col(k) - st.W.w.col(k)).norm() / base);
    }
    st.W.w = std::move(w_next);
    st.iterations = it + 1;
    st.step_trace.push_back(max_rel);
    if (cfg.record_trace)
      st.contrast_trace.push_back(detail::trace_contrast(st.W, x, blocks));
    if (cfg.aux_rel_tol > 0.0 && max_rel < cfg.aux_rel_tol) {
      res.converged = true;
      break;
    }
  }

  st.A = model::induced_mixing_vectors(st.W, blocks);
  st.sigma = model::block_scales(st.W, blocks);
  res.state = std::move(st);
  if (n_samples_out >= 0)
    res.source = extract_signal(res.state, x, stft_cfg, n_samples_out, cfg.ref_channel);
  res.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace csvbse::algorithms

#endif  // CSVBSE_ALGORITHMS_HPP
