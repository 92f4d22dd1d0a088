#ifndef CSVBSE_MODEL_HPP
#define CSVBSE_MODEL_HPP

#include <cmath>
#include <string>
#include <vector>

#include "csvbse/common.hpp"
#include "csvbse/stft.hpp"

// Constant-separating-vector model: one separating vector per frequency bin is
// shared across time blocks, while the mixing vector of the target source may
// change from block to block.
namespace csvbse::model {

// One separating vector per bin, stored as columns of a d x K matrix.
struct SeparatingVectors {
  MatrixXcd w;  // channels x bins

  Eigen::Index channels() const { return w.rows(); }
  Eigen::Index bins() const { return w.cols(); }
};

// One mixing vector per (bin, block), stored as columns of a d x (K*T) matrix.
struct MixingVectors {
  MatrixXcd a;  // channels x (bins * blocks)
  Eigen::Index n_blocks = 0;

  void resize(Eigen::Index channels, Eigen::Index bins, Eigen::Index blocks) {
    a.resize(channels, bins * blocks);
    n_blocks = blocks;
  }
  Eigen::Index channels() const { return a.rows(); }
  Eigen::Index bins() const { return n_blocks == 0 ? 0 : a.cols() / n_blocks; }
  auto col(Eigen::Index k, Eigen::Index t) { return a.col(k * n_blocks + t); }
  auto col(Eigen::Index k, Eigen::Index t) const { return a.col(k * n_blocks + t); }
};

// Sample covariance of each (bin, block) cell plus the frame partition that
// produced it. Frames are split into n_blocks equal spans; remainder frames
// join the last block.
struct BlockCovariances {
  std::vector<MatrixXcd> cov;        // n_bins * n_blocks entries, index k * n_blocks + t
  std::vector<Eigen::Index> bounds;  // n_blocks + 1 frame offsets
  Eigen::Index n_bins = 0;
  Eigen::Index n_blocks = 0;
  Eigen::Index n_channels = 0;
  Eigen::Index n_frames = 0;

  const MatrixXcd& at(Eigen::Index k, Eigen::Index t) const { return cov[k * n_blocks + t]; }
  MatrixXcd& at(Eigen::Index k, Eigen::Index t) { return cov[k * n_blocks + t]; }
  Eigen::Index block_start(Eigen::Index t) const { return bounds[t]; }
  Eigen::Index block_len(Eigen::Index t) const { return bounds[t + 1] - bounds[t]; }
  Eigen::Index block_of_frame(Eigen::Index l) const {
    for (Eigen::Index t = n_blocks - 1; t > 0; --t)
      if (l >= bounds[t]) return t;
    return 0;
  }
};

// Per-(bin, block) scale of the extracted source, sigma = sqrt(w^H C w).
struct BlockScales {
  MatrixXd sigma;  // bins x blocks

  Eigen::Index bins() const { return sigma.rows(); }
  Eigen::Index blocks() const { return sigma.cols(); }
};

// Everything an estimator carries between iterations and hands back when done.
struct ExtractionState {
  SeparatingVectors W;
  MixingVectors A;
  BlockScales sigma;
  std::vector<double> contrast_trace;  // one entry per recorded iteration
  std::vector<double> step_trace;      // gradient norm or relative w change
  int iterations = 0;
  bool used_ridge = false;
  bool renormalized_fallback = false;
};

inline std::vector<Eigen::Index> block_bounds(Eigen::Index n_frames, Eigen::Index n_blocks) {
  if (n_blocks < 1) fail(ErrorCode::InvalidConfig, "block count must be >= 1");
  if (n_blocks > n_frames)
    fail(ErrorCode::TooManyBlocks, std::to_string(n_blocks) + " blocks for " +
                                       std::to_string(n_frames) + " frames");
  std::vector<Eigen::Index> bounds(n_blocks + 1);
  const Eigen::Index base = n_frames / n_blocks;
  for (Eigen::Index t = 0; t < n_blocks; ++t) bounds[t] = t * base;
  bounds[n_blocks] = n_frames;  // remainder frames join the last block
  return bounds;
}

inline BlockCovariances block_covariances(const stft::SpectralTensor& x, Eigen::Index n_blocks) {
  BlockCovariances out;
  out.n_bins = x.n_bins;
  out.n_blocks = n_blocks;
  out.n_channels = x.n_channels;
  out.n_frames = x.n_frames;
  out.bounds = block_bounds(x.n_frames, n_blocks);
  out.cov.resize(static_cast<std::size_t>(x.n_bins) * n_blocks);
  for (Eigen::Index k = 0; k < x.n_bins; ++k) {
    const auto X = x.bin(k);  // frames x channels
    for (Eigen::Index t = 0; t < n_blocks; ++t) {
      // rows of Xt are frames, so sum_l x_l x_l^H = Xt^T conj(Xt)
      const auto Xt = X.middleRows(out.block_start(t), out.block_len(t));
      out.at(k, t) = (Xt.transpose() * Xt.conjugate()) / static_cast<double>(out.block_len(t));
    }
  }
  return out;
}

// Mixing vector under the orthogonal constraint: a = C w / (w^H C w). This is
// the choice that makes the background estimate uncorrelated with the source
// estimate, and it keeps w^H a = 1 automatically.
inline VectorXcd ogc_mixing_vector(const VectorXcd& w, const MatrixXcd& C) {
  const VectorXcd y = C * w;
  const double den = std::real(w.dot(y));  // w^H C w
  const double floor = 1e-14 * std::max(0.0, std::real(C.trace())) * w.squaredNorm();
  if (!(den > floor))
    fail(ErrorCode::DegenerateCovariance,
         "w^H C w = " + std::to_string(den) + " is not safely positive");
  return y / den;
}

// (d-1) x d matrix whose rows span the orthogonal complement of the mixing
// vector's image under the parameterization a = [gamma; g]: B = [g, -gamma*I],
// so B a = 0 holds exactly.
inline MatrixXcd blocking_matrix(const VectorXcd& a) {
  const Eigen::Index d = a.size();
  if (d < 2) fail(ErrorCode::InvalidConfig, "blocking matrix needs at least 2 channels");
  const cd gamma = a(0);
  MatrixXcd B = MatrixXcd::Zero(d - 1, d);
  B.col(0) = a.tail(d - 1);
  B.rightCols(d - 1) = -gamma * MatrixXcd::Identity(d - 1, d - 1);
  return B;
}

// Full d x d mixing matrix [a, Q] determined by the mixing vector a and the
// separating vector's background part h (w = [beta; h]):
//   A = [gamma, h^H; g, (g h^H - I)/gamma].
inline MatrixXcd build_mixing_matrix(const VectorXcd& a, const VectorXcd& h) {
  const Eigen::Index d = a.size();
  if (d < 2) fail(ErrorCode::InvalidConfig, "mixing matrix needs at least 2 channels");
  if (h.size() != d - 1) fail(ErrorCode::InvalidConfig, "background part must have d-1 entries");
  const cd gamma = a(0);
  if (std::abs(gamma) == 0.0)
    fail(ErrorCode::SingularParameterization, "first mixing coefficient is zero");
  MatrixXcd A(d, d);
  A(0, 0) = gamma;
  A.row(0).tail(d - 1) = h.adjoint();
  A.col(0).tail(d - 1) = a.tail(d - 1);
  A.bottomRightCorner(d - 1, d - 1) =
      (a.tail(d - 1) * h.adjoint() - MatrixXcd::Identity(d - 1, d - 1)) / gamma;
  return A;
}

// Full d x d demixing matrix [w^H; B]. When w^H a = 1 it is the exact inverse
// of build_mixing_matrix(a, h).
inline MatrixXcd build_demixing_matrix(const VectorXcd& w, const VectorXcd& a) {
  const Eigen::Index d = w.size();
  if (a.size() != d) fail(ErrorCode::InvalidConfig, "w and a must have equal length");
  MatrixXcd W(d, d);
  W.row(0) = w.adjoint();
  W.bottomRows(d - 1) = blocking_matrix(a);
  return W;
}

enum class BackgroundTerm {
  FromData,       // evaluate E[z^H Cz^{-1} z] from the block's samples
  TraceIdentity,  // use the closed form: the term equals d-1 per (bin, block)
};

struct ContrastDiagnostics {
  bool used_ridge = false;
};

// Scale of the extracted source in every (bin, block) cell.
inline BlockScales block_scales(const SeparatingVectors& W, const BlockCovariances& blocks) {
  BlockScales out;
  out.sigma.resize(blocks.n_bins, blocks.n_blocks);
  for (Eigen::Index k = 0; k < blocks.n_bins; ++k) {
    for (Eigen::Index t = 0; t < blocks.n_blocks; ++t) {
      const double v = std::real(W.w.col(k).dot(blocks.at(k, t) * W.w.col(k)));
      out.sigma(k, t) = std::sqrt(std::max(v, 0.0));
    }
  }
  return out;
}

// Mixing vectors induced by W under the orthogonal constraint, one per cell.
inline MixingVectors induced_mixing_vectors(const SeparatingVectors& W,
                                            const BlockCovariances& blocks) {
  MixingVectors out;
  out.resize(blocks.n_channels, blocks.n_bins, blocks.n_blocks);
  for (Eigen::Index k = 0; k < blocks.n_bins; ++k)
    for (Eigen::Index t = 0; t < blocks.n_blocks; ++t)
      out.col(k, t) = ogc_mixing_vector(W.w.col(k), blocks.at(k, t));
  return out;
}

namespace detail {

// mean_l z_l^H Cz^{-1} z_l for one (bin, block), where z = B x and Cz is the
// sample covariance of z over the same frames. Mathematically this is exactly
// d-1; FromData computes it the honest way.
inline double background_quad_mean(const MatrixXcd& B, const stft::SpectralTensor::ConstBinView& X,
                                   Eigen::Index start, Eigen::Index len,
                                   ContrastDiagnostics* diag) {
  const Eigen::Index m = B.rows();
  const MatrixXcd Z = B * X.middleRows(start, len).transpose();  // (d-1) x len
  MatrixXcd Cz = (Z * Z.adjoint()) / static_cast<double>(len);
  Eigen::LDLT<MatrixXcd> ldlt(Cz);
  const double floor = 1e-12 * std::max(std::real(Cz.trace()), 0.0) / static_cast<double>(m);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      ldlt.vectorD().real().minCoeff() <= floor) {
    const double ridge =
        1e-10 * std::max(std::real(Cz.trace()), 1e-300) / static_cast<double>(m);
    Cz += ridge * MatrixXcd::Identity(m, m);
    ldlt.compute(Cz);
    if (diag) diag->used_ridge = true;
    if (ldlt.info() != Eigen::Success)
      fail(ErrorCode::DegenerateCovariance, "background covariance is not factorizable");
  }
  const MatrixXcd S = ldlt.solve(Z);
  return std::real((Z.conjugate().cwiseProduct(S)).sum()) / static_cast<double>(len);
}

}  // namespace detail

// Average log-likelihood of the data under the model, up to an additive
// constant, evaluated at W with mixing vectors and scales induced by the
// orthogonal constraint:
//   (1/T) sum_t { -E[r'] - sum_k log sigma^2 - sum_k E[z^H Cz^{-1} z]
//                 + (d-2) sum_k log |gamma|^2 }
// with r' the per-frame norm of the scale-normalized source estimates.
inline double contrast(const SeparatingVectors& W, const stft::SpectralTensor& x,
                       const BlockCovariances& blocks,
                       BackgroundTerm background = BackgroundTerm::FromData,
                       ContrastDiagnostics* diag = nullptr) {
  const Eigen::Index K = blocks.n_bins;
  const Eigen::Index T = blocks.n_blocks;
  const Eigen::Index d = blocks.n_channels;
  if (W.bins() != K || W.channels() != d)
    fail(ErrorCode::InvalidConfig, "separating vectors do not match the covariance grid");

  const BlockScales sig = block_scales(W, blocks);

  // Per-frame squared norm of the normalized source estimates, summed over bins.
  VectorXd norm2 = VectorXd::Zero(x.n_frames);
  for (Eigen::Index k = 0; k < K; ++k) {
    const auto X = x.bin(k);
    const VectorXcd est = X * W.w.col(k).conjugate();  // frames; est_l = w^H x_l
    for (Eigen::Index t = 0; t < T; ++t) {
      const double s2 = sig.sigma(k, t) * sig.sigma(k, t);
      if (!(s2 > 0.0))
        fail(ErrorCode::DegenerateCovariance, "zero source scale in contrast evaluation");
      const Eigen::Index lo = blocks.block_start(t);
      const Eigen::Index hi = lo + blocks.block_len(t);
      for (Eigen::Index l = lo; l < hi; ++l) norm2(l) += std::norm(est(l)) / s2;
    }
  }

  double total = 0.0;
  for (Eigen::Index t = 0; t < T; ++t) {
    const Eigen::Index lo = blocks.block_start(t);
    const Eigen::Index len = blocks.block_len(t);
    double term_source = 0.0;
    for (Eigen::Index l = lo; l < lo + len; ++l) term_source += std::sqrt(norm2(l));
    term_source /= static_cast<double>(len);

    double term_scales = 0.0;
    double term_background = 0.0;
    double term_det = 0.0;
    for (Eigen::Index k = 0; k < K; ++k) {
      const double s2 = sig.sigma(k, t) * sig.sigma(k, t);
      term_scales += std::log(s2);
      const VectorXcd a = ogc_mixing_vector(W.w.col(k), blocks.at(k, t));
      term_det += static_cast<double>(d - 2) * std::log(std::norm(a(0)));
      if (background == BackgroundTerm::FromData) {
        const MatrixXcd B = blocking_matrix(a);
        term_background += detail::background_quad_mean(B, x.bin(k), lo, len, diag);
      } else {
        term_background += static_cast<double>(d - 1);
      }
    }
    total += -term_source - term_scales - term_background + term_det;
  }
  return total / static_cast<double>(T);
}

// Weighted covariances that majorize the source term of the contrast, plus the
// per-block average of the contact weights. Built by aux_contact_covariances
// (exact tangency) or by an estimator's own weighting rule.
struct AuxiliaryMatrices {
  std::vector<MatrixXcd> V;   // n_bins * n_blocks entries, index k * n_blocks + t
  VectorXd mean_weight;       // per-block average of the weights rho
  Eigen::Index n_bins = 0;
  Eigen::Index n_blocks = 0;

  const MatrixXcd& at(Eigen::Index k, Eigen::Index t) const { return V[k * n_blocks + t]; }
  MatrixXcd& at(Eigen::Index k, Eigen::Index t) { return V[k * n_blocks + t]; }
};

// Contact construction: weights are the per-frame norms of the normalized
// source estimates at W, which makes the quadratic bound touch the contrast
// exactly at W.
inline AuxiliaryMatrices aux_contact_covariances(const SeparatingVectors& W,
                                                 const stft::SpectralTensor& x,
                                                 const BlockCovariances& blocks,
                                                 double weight_floor = 1e-8) {
  const Eigen::Index K = blocks.n_bins;
  const Eigen::Index T = blocks.n_blocks;
  const BlockScales sig = block_scales(W, blocks);

  VectorXd norm2 = VectorXd::Zero(x.n_frames);
  for (Eigen::Index k = 0; k < K; ++k) {
    const auto X = x.bin(k);
    const VectorXcd est = X * W.w.col(k).conjugate();
    for (Eigen::Index t = 0; t < T; ++t) {
      const double s2 = sig.sigma(k, t) * sig.sigma(k, t);
      if (!(s2 > 0.0)) fail(ErrorCode::DegenerateCovariance, "zero source scale in contact weights");
      for (Eigen::Index l = blocks.block_start(t); l < blocks.block_start(t) + blocks.block_len(t);
           ++l)
        norm2(l) += std::norm(est(l)) / s2;
    }
  }

  AuxiliaryMatrices out;
  out.n_bins = K;
  out.n_blocks = T;
  out.V.resize(static_cast<std::size_t>(K) * T);
  out.mean_weight.resize(T);
  VectorXd inv_weight(x.n_frames);
  for (Eigen::Index t = 0; t < T; ++t) {
    const Eigen::Index lo = blocks.block_start(t);
    const Eigen::Index len = blocks.block_len(t);
    double acc = 0.0;
    for (Eigen::Index l = lo; l < lo + len; ++l) {
      const double rho = std::sqrt(norm2(l));
      acc += rho;
      inv_weight(l) = 1.0 / std::max(rho, weight_floor);
    }
    out.mean_weight(t) = acc / static_cast<double>(len);
  }
  for (Eigen::Index k = 0; k < K; ++k) {
    const auto X = x.bin(k);
    for (Eigen::Index t = 0; t < T; ++t) {
      const Eigen::Index lo = blocks.block_start(t);
      const Eigen::Index len = blocks.block_len(t);
      const auto Xt = X.middleRows(lo, len);
      out.at(k, t) = (Xt.transpose() * (inv_weight.segment(lo, len).asDiagonal() * Xt.conjugate())) /
                     static_cast<double>(len);
    }
  }
  return out;
}

// Quadratic lower bound on the contrast induced by the weighted covariances:
// the source term -E[r'] is replaced by -(1/2) sum_k w^H V w / sigma^2 minus
// half the average contact weight; all other terms are carried over verbatim.
// With contact weights the bound meets the contrast exactly at the W used to
// build them, and stays below it elsewhere.
inline double auxiliary_value(const SeparatingVectors& W, const stft::SpectralTensor& x,
                              const BlockCovariances& blocks, const AuxiliaryMatrices& aux,
                              BackgroundTerm background = BackgroundTerm::FromData,
                              ContrastDiagnostics* diag = nullptr) {
  const Eigen::Index K = blocks.n_bins;
  const Eigen::Index T = blocks.n_blocks;
  const Eigen::Index d = blocks.n_channels;
  if (aux.n_bins != K || aux.n_blocks != T)
    fail(ErrorCode::InvalidConfig, "auxiliary matrices do not match the covariance grid");

  const BlockScales sig = block_scales(W, blocks);
  double total = 0.0;
  for (Eigen::Index t = 0; t < T; ++t) {
    const Eigen::Index lo = blocks.block_start(t);
    const Eigen::Index len = blocks.block_len(t);
    double term_quad = 0.0;
    double term_scales = 0.0;
    double term_background = 0.0;
    double term_det = 0.0;
    for (Eigen::Index k = 0; k < K; ++k) {
      const double s2 = sig.sigma(k, t) * sig.sigma(k, t);
      if (!(s2 > 0.0))
        fail(ErrorCode::DegenerateCovariance, "zero source scale in auxiliary value");
      term_quad += std::real(W.w.col(k).dot(aux.at(k, t) * W.w.col(k))) / s2;
      term_scales += std::log(s2);
      const VectorXcd a = ogc_mixing_vector(W.w.col(k), blocks.at(k, t));
      term_det += static_cast<double>(d - 2) * std::log(std::norm(a(0)));
      if (background == BackgroundTerm::FromData) {
        const MatrixXcd B = blocking_matrix(a);
        term_background += detail::background_quad_mean(B, x.bin(k), lo, len, diag);
      } else {
        term_background += static_cast<double>(d - 1);
      }
    }
    total += -0.5 * term_quad - 0.5 * aux.mean_weight(t) - term_scales - term_background + term_det;
  }
  return total / static_cast<double>(T);
}

}  // namespace csvbse::model

#endif  // CSVBSE_MODEL_HPP
