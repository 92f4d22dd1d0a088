#ifndef CSVBSE_SOURCEMODEL_HPP
#define CSVBSE_SOURCEMODEL_HPP

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "csvbse/common.hpp"
#include "csvbse/stft.hpp"

// Non-Gaussian source prior used by all estimators: the bins of one frame are
// jointly distributed as f(s) proportional to exp(-||s||), which models the
// simultaneous activity of a speech-like source across frequencies.
namespace csvbse::sourcemodel {

// Floor applied wherever a frame norm appears in a denominator; silent frames
// would otherwise divide by zero.
inline constexpr double kNormFloor = 1e-8;

// Score function (negative Wirtinger gradient of -log f): phi_k(s) = s_k/||s||.
// Scale-invariant: score(c*s) = score(s) for real c > 0.
inline VectorXcd score(const VectorXcd& s, double floor = kNormFloor) {
  return s / std::max(s.norm(), floor);
}

// Weighting applied to each frame's outer product when building auxiliary
// covariances: phi(r) = 1/r, floored.
inline double aux_nonlinearity(double r, double floor = kNormFloor) {
  return 1.0 / std::max(r, floor);
}

// Optional per-frame auxiliary magnitude that is correlated with the target
// source; it is folded into the frame norms to bias convergence toward that
// source. delta scales its influence; empty samples mean "no pilot".
struct PilotSignal {
  VectorXd o;           // one magnitude per frame, >= 0
  double delta = 1.0;   // influence weight
  bool auto_scale = true;  // rescale o to the RMS of the initial frame norms

  bool enabled() const { return o.size() > 0 && delta > 0.0; }
};

// Per-frame norm of the stacked source estimates, optionally augmented by the
// pilot: r = sqrt(sum_k |shat_k|^2 + delta^2 * o^2).
inline double frame_norm(const VectorXcd& shat) { return shat.norm(); }

inline double frame_norm(const VectorXcd& shat, const PilotSignal& pilot, Eigen::Index frame) {
  if (!pilot.enabled()) return shat.norm();
  const double o = pilot.o(frame);
  return std::sqrt(shat.squaredNorm() + pilot.delta * pilot.delta * o * o);
}

// Vectorized form: est is bins x frames, one column per frame.
inline VectorXd frame_norms(const MatrixXcd& est, const PilotSignal& pilot = {}) {
  VectorXd r(est.cols());
  if (pilot.enabled() && pilot.o.size() != est.cols())
    fail(ErrorCode::InvalidConfig, "pilot length does not match frame count");
  for (Eigen::Index l = 0; l < est.cols(); ++l) {
    double v = est.col(l).squaredNorm();
    if (pilot.enabled()) {
      const double o = pilot.o(l);
      v += pilot.delta * pilot.delta * o * o;
    }
    r(l) = std::sqrt(v);
  }
  return r;
}

// Pilot from a reference signal: the per-frame norm over bins of its
// spectrogram (channel 0 when multichannel).
inline PilotSignal pilot_from_waveform(const Waveform& ref, const stft::StftConfig& cfg,
                                       double delta = 1.0) {
  const stft::SpectralTensor spec = stft::analyze(ref, cfg);
  PilotSignal p;
  p.delta = delta;
  p.o.resize(spec.n_frames);
  for (Eigen::Index l = 0; l < spec.n_frames; ++l) {
    double v = 0.0;
    for (Eigen::Index k = 0; k < spec.n_bins; ++k) v += std::norm(spec.at(k, l, 0));
    p.o(l) = std::sqrt(v);
  }
  return p;
}

// Pilot from a plain-text column of per-frame magnitudes.
inline PilotSignal pilot_from_text(const std::string& path, double delta = 1.0) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoFailure, "cannot open pilot file " + path);
  std::vector<double> vals;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    double v;
    if (ss >> v) vals.push_back(v);
  }
  if (vals.empty()) fail(ErrorCode::InvalidConfig, "pilot file " + path + " holds no values");
  PilotSignal p;
  p.delta = delta;
  p.o = Eigen::Map<VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
  return p;
}

}  // namespace csvbse::sourcemodel

#endif  // CSVBSE_SOURCEMODEL_HPP
