#ifndef CSVBSE_SIMULATE_HPP
#define CSVBSE_SIMULATE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "csvbse/common.hpp"
#include "csvbse/fft.hpp"
#include "csvbse/model.hpp"
#include "csvbse/stft.hpp"
#include "csvbse/wav.hpp"

// Ground-truth-known test scenes: shoebox-room impulse responses, moving
// convolutive mixtures, and instantaneous per-bin mixtures that satisfy the
// constant-separating-vector condition exactly.
namespace csvbse::simulate {

using Eigen::Vector3d;
using Rng = std::mt19937_64;

struct RoomSpec {
  Vector3d dims{4.0, 4.0, 2.5};   // meters
  double t60 = 0.1;               // seconds; 0 = anechoic
  double speed_of_sound = 343.0;  // m/s

  void validate() const {
    if (!(dims.minCoeff() > 0.0)) fail(ErrorCode::InvalidGeometry, "room dimensions must be positive");
    if (t60 < 0.0) fail(ErrorCode::InvalidGeometry, "t60 must be nonnegative");
    if (!(speed_of_sound > 0.0)) fail(ErrorCode::InvalidGeometry, "speed of sound must be positive");
  }
  bool contains(const Vector3d& p) const {
    return (p.array() >= 0.0).all() && (p.array() <= dims.array()).all();
  }
};

namespace detail {

// 10-tap windowed-sinc write of an impulse with fractional delay.
inline void add_fractional_impulse(VectorXd& h, double delay, double amplitude) {
  constexpr int kHalf = 5;
  const auto center = static_cast<Eigen::Index>(std::floor(delay));
  for (Eigen::Index n = center - kHalf + 1; n <= center + kHalf; ++n) {
    if (n < 0 || n >= h.size()) continue;
    const double u = static_cast<double>(n) - delay;  // in (-kHalf, kHalf]
    const double sinc = u == 0.0 ? 1.0 : std::sin(M_PI * u) / (M_PI * u);
    const double win = 0.5 + 0.5 * std::cos(M_PI * u / kHalf);  // Hann taper
    h(n) += amplitude * sinc * win;
  }
}

}  // namespace detail

// Mirror-image room impulse response for a rectangular room with uniform wall
// reflectivity derived from t60 (Sabine). Image amplitudes decay as
// beta^reflections / (4 pi distance); arrival delays are written with
// sub-sample precision. Length defaults to t60*fs plus the direct delay.
inline VectorXd image_method_rir(const RoomSpec& room, const Vector3d& src, const Vector3d& mic,
                                 double fs, Eigen::Index n_taps = -1) {
  room.validate();
  if (!room.contains(src)) fail(ErrorCode::InvalidGeometry, "source outside room");
  if (!room.contains(mic)) fail(ErrorCode::InvalidGeometry, "microphone outside room");
  const double dist_direct = (src - mic).norm();
  if (!(dist_direct > 0.0)) fail(ErrorCode::InvalidGeometry, "source and microphone coincide");
  if (!(fs > 0.0)) fail(ErrorCode::InvalidConfig, "sample rate must be positive");

  const double c = room.speed_of_sound;
  if (n_taps <= 0) {
    n_taps = static_cast<Eigen::Index>(std::ceil(room.t60 * fs + dist_direct / c * fs)) + 64;
  }

  double beta = 0.0;
  if (room.t60 > 0.0) {
    const double volume = room.dims.prod();
    const double surface = 2.0 * (room.dims(0) * room.dims(1) + room.dims(0) * room.dims(2) +
                                  room.dims(1) * room.dims(2));
    const double absorption = std::clamp(0.161 * volume / (room.t60 * surface), 0.0, 0.9999);
    beta = std::sqrt(1.0 - absorption);
  }

  VectorXd h = VectorXd::Zero(n_taps);
  const double max_dist = (static_cast<double>(n_taps) / fs) * c;
  if (room.t60 == 0.0 || beta == 0.0) {
    detail::add_fractional_impulse(h, dist_direct / c * fs, 1.0 / (4.0 * M_PI * dist_direct));
    return h;
  }

  std::array<Eigen::Index, 3> n_max;
  for (int axis = 0; axis < 3; ++axis)
    n_max[axis] = static_cast<Eigen::Index>(std::ceil(max_dist / (2.0 * room.dims(axis)))) + 1;

  for (Eigen::Index nx = -n_max[0]; nx <= n_max[0]; ++nx) {
    for (Eigen::Index ny = -n_max[1]; ny <= n_max[1]; ++ny) {
      for (Eigen::Index nz = -n_max[2]; nz <= n_max[2]; ++nz) {
        for (int p = 0; p < 8; ++p) {
          const int px = p & 1, py = (p >> 1) & 1, pz = (p >> 2) & 1;
          const Vector3d img(
              (1 - 2 * px) * src(0) + 2.0 * static_cast<double>(nx) * room.dims(0),
              (1 - 2 * py) * src(1) + 2.0 * static_cast<double>(ny) * room.dims(1),
              (1 - 2 * pz) * src(2) + 2.0 * static_cast<double>(nz) * room.dims(2));
          const double dist = (img - mic).norm();
          if (dist > max_dist || dist <= 0.0) continue;
          const int reflections = std::abs(static_cast<int>(nx) - px) + std::abs(static_cast<int>(nx)) +
                                  std::abs(static_cast<int>(ny) - py) + std::abs(static_cast<int>(ny)) +
                                  std::abs(static_cast<int>(nz) - pz) + std::abs(static_cast<int>(nz));
          const double amp = std::pow(beta, reflections) / (4.0 * M_PI * dist);
          detail::add_fractional_impulse(h, dist / c * fs, amp);
        }
      }
    }
  }
  return h;
}

// Linear convolution via overlap-add FFT blocks; exact up to round-off.
inline VectorXd fft_convolve(const VectorXd& x, const VectorXd& h) {
  if (x.size() == 0 || h.size() == 0) return VectorXd();
  const Eigen::Index out_len = x.size() + h.size() - 1;
  std::size_t fft_len = 1;
  while (fft_len < static_cast<std::size_t>(2 * h.size()) || fft_len < 256) fft_len <<= 1;
  const auto block = static_cast<Eigen::Index>(fft_len) - h.size() + 1;
  const fft::Plan plan(fft_len);

  std::vector<cd> H(fft_len, cd(0.0, 0.0));
  for (Eigen::Index i = 0; i < h.size(); ++i) H[static_cast<std::size_t>(i)] = cd(h(i), 0.0);
  plan.forward(H.data());

  VectorXd y = VectorXd::Zero(out_len);
  std::vector<cd> buf(fft_len);
  for (Eigen::Index start = 0; start < x.size(); start += block) {
    const Eigen::Index len = std::min(block, x.size() - start);
    std::fill(buf.begin(), buf.end(), cd(0.0, 0.0));
    for (Eigen::Index i = 0; i < len; ++i) buf[static_cast<std::size_t>(i)] = cd(x(start + i), 0.0);
    plan.forward(buf.data());
    for (std::size_t i = 0; i < fft_len; ++i) buf[i] *= H[i];
    plan.inverse(buf.data());
    const Eigen::Index copy = std::min(static_cast<Eigen::Index>(fft_len), out_len - start);
    for (Eigen::Index i = 0; i < copy; ++i) y(start + i) += buf[static_cast<std::size_t>(i)].real();
  }
  return y;
}

enum class SignalKind { WhiteNoise, ModulatedNoise, SparseFrames, WavFile };

inline SignalKind signal_kind_from_name(const std::string& name) {
  if (name == "white") return SignalKind::WhiteNoise;
  if (name == "modulated") return SignalKind::ModulatedNoise;
  if (name == "sparse") return SignalKind::SparseFrames;
  if (name == "wav") return SignalKind::WavFile;
  fail(ErrorCode::InvalidConfig, "unknown signal kind '" + name + "'");
}

// i.i.d. frames from the joint density f(s) proportional to exp(-||s||) on
// C^K: radius Gamma(2K, 1), direction uniform on the sphere, scaled to unit
// variance per complex coordinate. Columns are frames.
inline MatrixXcd sample_vector_laplace(Eigen::Index K, Eigen::Index N, Rng& rng) {
  if (K < 1 || N < 1) fail(ErrorCode::InvalidConfig, "need K >= 1 and N >= 1");
  std::gamma_distribution<double> radius(static_cast<double>(2 * K), 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double scale = 1.0 / std::sqrt(2.0 * (2.0 * static_cast<double>(K) + 1.0));
  MatrixXcd s(K, N);
  for (Eigen::Index l = 0; l < N; ++l) {
    VectorXcd dir(K);
    for (Eigen::Index k = 0; k < K; ++k) dir(k) = cd(gauss(rng), gauss(rng));
    const double nrm = dir.norm();
    const double r = radius(rng);
    s.col(l) = dir * (nrm > 0.0 ? scale * r / nrm : 0.0);
  }
  return s;
}

// Dry source material. White noise for interferers/sensors; modulated noise
// (Gaussian carrier with a slowly varying log-normal envelope) as the
// speech-like target surrogate; sparse frames synthesized from the joint
// source density as an alternative surrogate.
inline VectorXd generate_signal(SignalKind kind, Eigen::Index n, double fs, Rng& rng,
                                const std::string& wav_path = "") {
  std::normal_distribution<double> gauss(0.0, 1.0);
  switch (kind) {
    case SignalKind::WhiteNoise: {
      VectorXd x(n);
      for (Eigen::Index i = 0; i < n; ++i) x(i) = gauss(rng);
      return x;
    }
    case SignalKind::ModulatedNoise: {
      // First-order autoregressive log-envelope with ~50 ms correlation time.
      const double rho = std::exp(-1.0 / (0.05 * fs));
      const double drive = std::sqrt(1.0 - rho * rho);
      double v = gauss(rng);
      VectorXd x(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        v = rho * v + drive * gauss(rng);
        x(i) = std::exp(1.2 * v) * gauss(rng);
      }
      return x;
    }
    case SignalKind::SparseFrames: {
      // Jointly sparse spectral frames turned into a waveform.
      stft::StftConfig cfg;
      cfg.fft_len = 512;
      cfg.hop = 256;
      const Eigen::Index frames = std::max<Eigen::Index>(cfg.frames_for(n + cfg.fft_len), 2);
      const MatrixXcd s = sample_vector_laplace(cfg.bins(), frames, rng);
      stft::SpectralTensor spec;
      spec.resize(cfg.bins(), frames, 1);
      spec.sample_rate = fs;
      for (Eigen::Index k = 0; k < cfg.bins(); ++k)
        for (Eigen::Index l = 0; l < frames; ++l) spec.at(k, l, 0) = s(k, l);
      const Waveform w = stft::synthesize(spec, cfg);
      VectorXd x = VectorXd::Zero(n);
      x.head(std::min(n, w.length())) = w.samples.col(0).head(std::min(n, w.length()));
      return x;
    }
    case SignalKind::WavFile: {
      const Waveform w = wav::read(wav_path);
      if (w.length() < n)
        fail(ErrorCode::InvalidScenario, "dry signal " + wav_path + " is shorter than the scene");
      return w.samples.col(0).head(n);
    }
  }
  fail(ErrorCode::InvalidConfig, "unhandled signal kind");
}

// A source trajectory: positions held for given dwells, with neighbouring
// segments crossfaded over a fixed-length window.
struct PathSpec {
  std::vector<Vector3d> waypoints;
  std::vector<double> dwells;          // seconds, one per waypoint
  Eigen::Index crossfade_len = -1;     // samples; -1 = fs/16 at scene build time

  bool moving() const { return waypoints.size() > 1; }
  double total_dwell() const {
    double s = 0.0;
    for (double d : dwells) s += d;
    return s;
  }
};

inline PathSpec static_path(const Vector3d& pos, double dwell) {
  PathSpec p;
  p.waypoints = {pos};
  p.dwells = {dwell};
  return p;
}

inline PathSpec line_path(const Vector3d& start, const Vector3d& end, Eigen::Index n_points,
                          double total_duration) {
  if (n_points < 1) fail(ErrorCode::InvalidScenario, "path needs at least one point");
  PathSpec p;
  for (Eigen::Index i = 0; i < n_points; ++i) {
    const double u = n_points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n_points - 1);
    p.waypoints.push_back(start + u * (end - start));
    p.dwells.push_back(total_duration / static_cast<double>(n_points));
  }
  return p;
}

struct SourceSpec {
  PathSpec path;
  SignalKind kind = SignalKind::WhiteNoise;
  std::string wav_path;
  double level_db = 0.0;  // component image power relative to the target's
};

struct Scenario {
  RoomSpec room;
  double fs = 16000.0;
  double duration = 0.0;  // seconds; 0 = target path total dwell
  std::vector<Vector3d> mics;
  SourceSpec target;
  std::vector<SourceSpec> others;  // interferers and noise sources
  double mixture_rms = 0.05;       // common gain applied to all images
  Eigen::Index rir_taps = -1;      // -1 = auto from t60

  void validate() const {
    room.validate();
    if (mics.size() < 2) fail(ErrorCode::InvalidScenario, "need at least 2 microphones");
    for (const auto& m : mics)
      if (!room.contains(m)) fail(ErrorCode::InvalidGeometry, "microphone outside room");
    auto check_source = [&](const SourceSpec& s) {
      if (s.path.waypoints.empty()) fail(ErrorCode::InvalidScenario, "source has no position");
      if (s.path.waypoints.size() != s.path.dwells.size())
        fail(ErrorCode::InvalidScenario, "waypoint/dwell count mismatch");
      for (double dw : s.path.dwells)
        if (!(dw > 0.0)) fail(ErrorCode::InvalidScenario, "dwell must be positive");
      for (const auto& p : s.path.waypoints)
        if (!room.contains(p)) fail(ErrorCode::InvalidGeometry, "source outside room");
    };
    check_source(target);
    for (const auto& s : others) check_source(s);
    if (!(fs > 0.0)) fail(ErrorCode::InvalidScenario, "sample rate must be positive");
  }

  double effective_duration() const {
    return duration > 0.0 ? duration : target.path.total_dwell();
  }
};

// Per-source spatial images at the microphones plus their exact sum.
struct GroundTruth {
  std::vector<Waveform> images;  // images[0] is the target's
  Waveform mixture;              // sum of images, computed in fixed order

  const Waveform& target_image() const { return images.front(); }
  Waveform background_image() const {
    Waveform bg = images.front();
    bg.samples.setZero();
    for (std::size_t i = 1; i < images.size(); ++i) bg.samples += images[i].samples;
    return bg;
  }
};

// Convolutive scene with a possibly moving target: each path segment is
// convolved with its own impulse response and the segments are crossfaded.
// Component images are scaled to the requested level ratios; the mixture is
// their exact sum.
inline GroundTruth moving_mixture(const Scenario& sc, Rng& rng) {
  sc.validate();
  const double fs = sc.fs;
  const auto n = static_cast<Eigen::Index>(std::llround(sc.effective_duration() * fs));
  if (n < 1) fail(ErrorCode::InvalidScenario, "scene duration is empty");
  const auto d = static_cast<Eigen::Index>(sc.mics.size());

  std::vector<const SourceSpec*> sources;
  sources.push_back(&sc.target);
  for (const auto& s : sc.others) sources.push_back(&s);

  GroundTruth gt;
  for (const SourceSpec* srcp : sources) {
    const SourceSpec& src = *srcp;
    const VectorXd dry = generate_signal(src.kind, n, fs, rng, src.wav_path);

    const auto n_seg = static_cast<Eigen::Index>(src.path.waypoints.size());
    Eigen::Index fade = src.path.crossfade_len;
    if (fade < 0) fade = static_cast<Eigen::Index>(fs / 16.0);

    // Per-sample segment gains: 1 inside, complementary raised-cosine ramps
    // over a fade-length window centred on each internal boundary. The two
    // ramps are ratio-normalized so every sample's gains sum to exactly 1.
    MatrixXd gains = MatrixXd::Zero(n, n_seg);
    const Eigen::Index seg_len = n / n_seg;
    for (Eigen::Index s = 0; s < n_seg; ++s) {
      const Eigen::Index lo = s * seg_len;
      const Eigen::Index hi = s + 1 == n_seg ? n : (s + 1) * seg_len;
      gains.col(s).segment(lo, hi - lo).setOnes();
    }
    if (n_seg > 1 && fade > 1) {
      for (Eigen::Index s = 1; s < n_seg; ++s) {
        const Eigen::Index b = s * seg_len;  // boundary between segments s-1 and s
        for (Eigen::Index m = 0; m < fade; ++m) {
          const Eigen::Index i = b - fade / 2 + m;
          if (i < 0 || i >= n) continue;
          // Rising flank of a periodic Hamming window of length 2*fade.
          const double up_raw =
              0.54 - 0.46 * std::cos(M_PI * static_cast<double>(m) / static_cast<double>(fade));
          const double down_raw = 0.54 - 0.46 * std::cos(M_PI * static_cast<double>(fade - m) /
                                                         static_cast<double>(fade));
          gains(i, s) = up_raw / (up_raw + down_raw);
          gains(i, s - 1) = down_raw / (up_raw + down_raw);
        }
      }
    }

    Waveform img;
    img.sample_rate = fs;
    img.samples = MatrixXd::Zero(n, d);
    for (Eigen::Index s = 0; s < n_seg; ++s) {
      const VectorXd piece = gains.col(s).cwiseProduct(dry);
      for (Eigen::Index i = 0; i < d; ++i) {
        const VectorXd h =
            image_method_rir(sc.room, src.path.waypoints[s], sc.mics[i], fs, sc.rir_taps);
        const VectorXd y = fft_convolve(piece, h);
        img.samples.col(i) += y.head(n);
      }
    }

    const double power = img.samples.squaredNorm() / static_cast<double>(n * d);
    if (!(power > 0.0)) fail(ErrorCode::InvalidScenario, "component image has zero power");
    gt.images.push_back(std::move(img));
  }

  // Scale components so image power ratios match the requested levels
  // (target's level is the 0 dB anchor), then apply one common gain to hit
  // the target mixture RMS.
  const double p0 = gt.images[0].samples.squaredNorm() / static_cast<double>(n * d);
  for (std::size_t si = 0; si < sources.size(); ++si) {
    const double p = gt.images[si].samples.squaredNorm() / static_cast<double>(n * d);
    const double want = p0 * std::pow(10.0, sources[si]->level_db / 10.0);
    gt.images[si].samples *= std::sqrt(want / p);
  }
  Waveform mix;
  mix.sample_rate = fs;
  mix.samples = MatrixXd::Zero(n, d);
  for (const auto& img : gt.images) mix.samples += img.samples;
  double common = 1.0;
  if (sc.mixture_rms > 0.0) {
    const double rms = std::sqrt(mix.samples.squaredNorm() / static_cast<double>(n * d));
    if (rms > 0.0) common = sc.mixture_rms / rms;
  }
  for (auto& img : gt.images) img.samples *= common;
  mix.samples.setZero();
  for (const auto& img : gt.images) mix.samples += img.samples;
  gt.mixture = std::move(mix);
  return gt;
}

// Exact constant-separating-vector mixture in the transform domain: a single
// w_k per bin separates the target in every block even though the mixing
// vectors differ per block.
struct SyntheticCsvMixture {
  stft::SpectralTensor x;
  model::SeparatingVectors w_true;
  model::MixingVectors a_true;
  MatrixXcd s_true;                // bins x frames target frames
  VectorXd block_scale;            // per-block standard deviation drawn for the target
  stft::SpectralTensor target;     // image of the target component
  stft::SpectralTensor background; // image of everything else; x = target + background
};

inline SyntheticCsvMixture synthetic_csv_mixture(Eigen::Index K, Eigen::Index d, Eigen::Index T,
                                                 Eigen::Index N_b, Rng& rng) {
  if (d < 2) fail(ErrorCode::InvalidConfig, "need at least 2 channels");
  if (T < 1 || N_b < 1) fail(ErrorCode::InvalidConfig, "need T >= 1 and N_b >= 1");
  const Eigen::Index N = T * N_b;
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto cnormal = [&] { return cd(gauss(rng), gauss(rng)) / std::sqrt(2.0); };

  SyntheticCsvMixture out;
  out.w_true.w.resize(d, K);
  out.a_true.resize(d, K, T);
  out.s_true = sample_vector_laplace(K, N, rng);

  // Per-block target variance, log-uniform in [0.25, 4].
  out.block_scale.resize(T);
  for (Eigen::Index t = 0; t < T; ++t)
    out.block_scale(t) = std::sqrt(std::exp(std::log(0.25) + unif(rng) * std::log(16.0)));
  for (Eigen::Index t = 0; t < T; ++t)
    out.s_true.middleCols(t * N_b, N_b) *= out.block_scale(t);

  out.x.resize(K, N, d);
  out.target.resize(K, N, d);
  out.background.resize(K, N, d);

  for (Eigen::Index k = 0; k < K; ++k) {
    // Shared separating vector w = [beta; h] with a safely nonzero first entry.
    cd beta;
    do {
      beta = cnormal();
    } while (std::abs(beta) < 0.3);
    VectorXcd h(d - 1);
    for (Eigen::Index i = 0; i < d - 1; ++i) h(i) = 0.7 * cnormal() / std::sqrt(double(d - 1));
    while (h.norm() < 1e-6) {
      for (Eigen::Index i = 0; i < d - 1; ++i) h(i) = 0.7 * cnormal() / std::sqrt(double(d - 1));
    }
    VectorXcd w(d);
    w(0) = beta;
    w.tail(d - 1) = h;
    out.w_true.w.col(k) = w;

    for (Eigen::Index t = 0; t < T; ++t) {
      // Mixing vector a = [gamma; g] satisfying w^H a = 1: draw gamma with
      // log-uniform magnitude and random phase, draw g, then correct g along
      // h to meet the constraint.
      const double mag = std::exp(std::log(0.7) + unif(rng) * std::log(2.0));
      const cd gamma = std::polar(mag, 2.0 * M_PI * unif(rng));
      VectorXcd g(d - 1);
      for (Eigen::Index i = 0; i < d - 1; ++i) g(i) = cnormal();
      const cd deficit = 1.0 - std::conj(beta) * gamma - h.dot(g);  // h^H g
      g += h * (deficit / h.squaredNorm());
      VectorXcd a(d);
      a(0) = gamma;
      a.tail(d - 1) = g;
      out.a_true.col(k, t) = a;

      const MatrixXcd A = model::build_mixing_matrix(a, h);
      for (Eigen::Index l = t * N_b; l < (t + 1) * N_b; ++l) {
        VectorXcd sz(d);
        sz(0) = out.s_true(k, l);
        for (Eigen::Index i = 1; i < d; ++i) sz(i) = cnormal();
        const VectorXcd target_part = a * sz(0);
        VectorXcd rest = A * sz - target_part;
        for (Eigen::Index i = 0; i < d; ++i) {
          out.target.at(k, l, i) = target_part(i);
          out.background.at(k, l, i) = rest(i);
          out.x.at(k, l, i) = target_part(i) + rest(i);
        }
      }
    }
  }
  return out;
}

}  // namespace csvbse::simulate

#endif  // CSVBSE_SIMULATE_HPP
