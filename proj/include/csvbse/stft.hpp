#ifndef CSVBSE_STFT_HPP
#define CSVBSE_STFT_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "csvbse/common.hpp"
#include "csvbse/fft.hpp"

namespace csvbse {

// Multichannel time-domain signal; one column per channel.
struct Waveform {
  MatrixXd samples;  // n_samples x n_channels
  double sample_rate = 0.0;

  Eigen::Index length() const { return samples.rows(); }
  Eigen::Index channels() const { return samples.cols(); }
};

namespace stft {

enum class Window { Hamming, Hann, Rectangular };

inline Window window_from_name(const std::string& name) {
  if (name == "hamming") return Window::Hamming;
  if (name == "hann") return Window::Hann;
  if (name == "rect" || name == "rectangular") return Window::Rectangular;
  fail(ErrorCode::InvalidConfig, "unknown window '" + name + "'");
}

inline const char* window_name(Window w) {
  switch (w) {
    case Window::Hamming: return "hamming";
    case Window::Hann: return "hann";
    case Window::Rectangular: return "rect";
  }
  return "?";
}

// Periodic window of the given length (denominator L, not L-1), the sensible
// choice for overlap-add processing.
inline VectorXd make_window(Window type, Eigen::Index len) {
  VectorXd w(len);
  const double step = 2.0 * M_PI / static_cast<double>(len);
  switch (type) {
    case Window::Hamming:
      for (Eigen::Index n = 0; n < len; ++n) w(n) = 0.54 - 0.46 * std::cos(step * n);
      break;
    case Window::Hann:
      for (Eigen::Index n = 0; n < len; ++n) w(n) = 0.5 - 0.5 * std::cos(step * n);
      break;
    case Window::Rectangular:
      w.setOnes();
      break;
  }
  return w;
}

struct StftConfig {
  Eigen::Index fft_len = 512;
  Eigen::Index hop = 128;
  Window window = Window::Hamming;

  void validate() const {
    if (fft_len < 2) fail(ErrorCode::InvalidConfig, "fft_len must be >= 2");
    if (hop < 1 || hop > fft_len) fail(ErrorCode::InvalidConfig, "hop must be in [1, fft_len]");
  }

  Eigen::Index bins() const { return fft_len / 2 + 1; }
  Eigen::Index frames_for(Eigen::Index n_samples) const {
    if (n_samples < fft_len) return 0;
    return (n_samples - fft_len) / hop + 1;
  }
};

// One-sided spectrogram of a multichannel signal. Storage is bin-major with
// the channel index fastest, so the (frames x channels) slab of one bin is a
// contiguous row-major matrix.
struct SpectralTensor {
  Eigen::Index n_bins = 0;
  Eigen::Index n_frames = 0;
  Eigen::Index n_channels = 0;
  double sample_rate = 0.0;
  std::vector<cd> data;

  using BinView = Eigen::Map<Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
  using ConstBinView =
      Eigen::Map<const Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

  void resize(Eigen::Index bins, Eigen::Index frames, Eigen::Index channels) {
    n_bins = bins;
    n_frames = frames;
    n_channels = channels;
    data.assign(static_cast<std::size_t>(bins) * frames * channels, cd(0.0, 0.0));
  }

  cd& at(Eigen::Index k, Eigen::Index l, Eigen::Index i) {
    return data[(static_cast<std::size_t>(k) * n_frames + l) * n_channels + i];
  }
  cd at(Eigen::Index k, Eigen::Index l, Eigen::Index i) const {
    return data[(static_cast<std::size_t>(k) * n_frames + l) * n_channels + i];
  }

  // frames x channels view of one frequency bin
  BinView bin(Eigen::Index k) {
    return BinView(data.data() + static_cast<std::size_t>(k) * n_frames * n_channels, n_frames,
                   n_channels);
  }
  ConstBinView bin(Eigen::Index k) const {
    return ConstBinView(data.data() + static_cast<std::size_t>(k) * n_frames * n_channels,
                        n_frames, n_channels);
  }
};

inline SpectralTensor analyze(const Waveform& x, const StftConfig& cfg) {
  cfg.validate();
  const Eigen::Index len = x.length();
  const Eigen::Index d = x.channels();
  if (d < 1) fail(ErrorCode::InvalidConfig, "signal has no channels");
  if (len < cfg.fft_len)
    fail(ErrorCode::SignalTooShort,
         "need at least " + std::to_string(cfg.fft_len) + " samples, got " + std::to_string(len));

  const Eigen::Index n_frames = cfg.frames_for(len);
  const Eigen::Index n_bins = cfg.bins();
  const VectorXd win = make_window(cfg.window, cfg.fft_len);
  const fft::Plan plan(static_cast<std::size_t>(cfg.fft_len));

  SpectralTensor out;
  out.resize(n_bins, n_frames, d);
  out.sample_rate = x.sample_rate;

  std::vector<cd> buf(static_cast<std::size_t>(cfg.fft_len));
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index l = 0; l < n_frames; ++l) {
      const Eigen::Index start = l * cfg.hop;
      for (Eigen::Index n = 0; n < cfg.fft_len; ++n)
        buf[static_cast<std::size_t>(n)] = cd(x.samples(start + n, i) * win(n), 0.0);
      plan.forward(buf.data());
      for (Eigen::Index k = 0; k < n_bins; ++k) out.at(k, l, i) = buf[static_cast<std::size_t>(k)];
    }
  }
  return out;
}

// Weighted overlap-add inverse: the window is applied on both sides and the
// result divided by the accumulated squared window, which reconstructs the
// interior of the signal exactly for any hop.
inline Waveform synthesize(const SpectralTensor& spec, const StftConfig& cfg) {
  cfg.validate();
  if (spec.n_bins != cfg.bins())
    fail(ErrorCode::InvalidConfig, "spectrogram bin count does not match fft_len");
  if (spec.n_frames < 1) fail(ErrorCode::SignalTooShort, "no frames to synthesize");

  const Eigen::Index d = spec.n_channels;
  const Eigen::Index out_len = (spec.n_frames - 1) * cfg.hop + cfg.fft_len;
  const VectorXd win = make_window(cfg.window, cfg.fft_len);
  const fft::Plan plan(static_cast<std::size_t>(cfg.fft_len));

  Waveform out;
  out.sample_rate = spec.sample_rate;
  out.samples = MatrixXd::Zero(out_len, d);
  VectorXd denom = VectorXd::Zero(out_len);
  for (Eigen::Index l = 0; l < spec.n_frames; ++l)
    denom.segment(l * cfg.hop, cfg.fft_len) += win.cwiseProduct(win);
  const double denom_floor = 1e-12 * denom.maxCoeff();

  std::vector<cd> buf(static_cast<std::size_t>(cfg.fft_len));
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index l = 0; l < spec.n_frames; ++l) {
      for (Eigen::Index k = 0; k < spec.n_bins; ++k)
        buf[static_cast<std::size_t>(k)] = spec.at(k, l, i);
      for (Eigen::Index k = 1; k < cfg.fft_len - spec.n_bins + 1; ++k)
        buf[static_cast<std::size_t>(cfg.fft_len - k)] = std::conj(spec.at(k, l, i));
      plan.inverse(buf.data());
      const Eigen::Index start = l * cfg.hop;
      for (Eigen::Index n = 0; n < cfg.fft_len; ++n)
        out.samples(start + n, i) += buf[static_cast<std::size_t>(n)].real() * win(n);
    }
  }
  for (Eigen::Index n = 0; n < out_len; ++n) {
    const double den = denom(n);
    if (den > denom_floor)
      out.samples.row(n) /= den;
    else
      out.samples.row(n).setZero();
  }
  return out;
}

// Energy of the one-sided tensor with the mirrored bins counted once more,
// i.e. the full-spectrum energy summed over frames and channels.
inline double tensor_energy(const SpectralTensor& spec, const StftConfig& cfg) {
  double total = 0.0;
  for (Eigen::Index k = 0; k < spec.n_bins; ++k) {
    const bool self_conjugate = k == 0 || (cfg.fft_len % 2 == 0 && k == spec.n_bins - 1);
    total += (self_conjugate ? 1.0 : 2.0) * spec.bin(k).squaredNorm();
  }
  return total;
}

// Ratio between full-spectrum tensor energy and time-domain energy for a
// stationary signal: fft_len * sum(win^2) / hop.
inline double parseval_factor(const StftConfig& cfg) {
  const VectorXd win = make_window(cfg.window, cfg.fft_len);
  return static_cast<double>(cfg.fft_len) * win.squaredNorm() / static_cast<double>(cfg.hop);
}

}  // namespace stft
}  // namespace csvbse

#endif  // CSVBSE_STFT_HPP
