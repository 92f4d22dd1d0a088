#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <random>

#include "csvbse/fft.hpp"
#include "csvbse/stft.hpp"
#include "csvbse/wav.hpp"

using namespace csvbse;

namespace {

Waveform random_waveform(Eigen::Index n, Eigen::Index channels, unsigned seed,
                         double fs = 16000.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 0.3);
  Waveform x;
  x.sample_rate = fs;
  x.samples.resize(n, channels);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index c = 0; c < channels; ++c) x.samples(i, c) = gauss(rng);
  return x;
}

double interior_error(const Waveform& a, const Waveform& b, Eigen::Index margin) {
  const Eigen::Index n = std::min(a.length(), b.length());
  REQUIRE(n > 2 * margin);
  const auto ai = a.samples.middleRows(margin, n - 2 * margin);
  const auto bi = b.samples.middleRows(margin, n - 2 * margin);
  return (ai - bi).norm() / ai.norm();
}

}  // namespace

TEST_CASE("fft matches a direct DFT and inverts itself") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss;
  for (std::size_t n : {8u, 64u, 12u, 27u}) {  // power-of-two and not
    fft::Plan plan(n);
    std::vector<cd> x(n);
    for (auto& v : x) v = cd(gauss(rng), gauss(rng));

    std::vector<cd> ref(n, cd(0, 0));
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t m = 0; m < n; ++m)
        ref[k] += x[m] * std::polar(1.0, -2.0 * M_PI * double(k * m) / double(n));

    std::vector<cd> y = x;
    plan.forward(y);
    double err = 0.0;
    for (std::size_t k = 0; k < n; ++k) err += std::abs(y[k] - ref[k]);
    REQUIRE(err / double(n) < 1e-10);

    plan.inverse(y);
    double rt = 0.0;
    for (std::size_t k = 0; k < n; ++k) rt += std::abs(y[k] - x[k]);
    REQUIRE(rt / double(n) < 1e-12);
  }
}

TEST_CASE("frame count follows the hop arithmetic") {
  stft::StftConfig cfg;  // 512 / 128
  REQUIRE(cfg.frames_for(16000) == 122);  // 1 s at 16 kHz
  REQUIRE(cfg.frames_for(512) == 1);
  REQUIRE(cfg.frames_for(511) == 0);
  REQUIRE(cfg.bins() == 257);
}

TEST_CASE("analyze rejects bad inputs") {
  stft::StftConfig cfg;
  REQUIRE_THROWS_AS(stft::analyze(random_waveform(100, 1, 1), cfg), Error);
  try {
    stft::analyze(random_waveform(100, 1, 1), cfg);
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::SignalTooShort);
  }
  stft::StftConfig bad;
  bad.hop = 0;
  REQUIRE_THROWS_AS(stft::analyze(random_waveform(4096, 1, 1), bad), Error);
}

TEST_CASE("round trip reconstructs the interior exactly") {
  std::vector<stft::StftConfig> configs;
  {
    stft::StftConfig c;
    configs.push_back(c);  // 512/128 hamming
    c.fft_len = 1024;
    c.hop = 256;
    configs.push_back(c);
    c.fft_len = 512;
    c.hop = 512;  // no overlap
    configs.push_back(c);
    c.hop = 128;
    c.window = stft::Window::Hann;
    configs.push_back(c);
    c.window = stft::Window::Rectangular;
    configs.push_back(c);
  }
  unsigned seed = 11;
  for (const auto& cfg : configs) {
    const Waveform x = random_waveform(8000, 3, seed++);
    const auto spec = stft::analyze(x, cfg);
    const Waveform y = stft::synthesize(spec, cfg);
    REQUIRE(interior_error(x, y, cfg.fft_len) < 1e-10);
  }
}

TEST_CASE("analysis is linear in the signal") {
  stft::StftConfig cfg;
  cfg.fft_len = 256;
  cfg.hop = 64;
  const Waveform a = random_waveform(4000, 2, 21);
  const Waveform b = random_waveform(4000, 2, 22);
  Waveform mix = a;
  mix.samples = 0.7 * a.samples - 1.3 * b.samples;
  const auto Sa = stft::analyze(a, cfg);
  const auto Sb = stft::analyze(b, cfg);
  const auto Sm = stft::analyze(mix, cfg);
  double err = 0.0;
  for (std::size_t i = 0; i < Sm.data.size(); ++i)
    err += std::abs(Sm.data[i] - (0.7 * Sa.data[i] - 1.3 * Sb.data[i]));
  REQUIRE(err / double(Sm.data.size()) < 1e-12);
}

TEST_CASE("a bin-centred tone lands in its bin") {
  stft::StftConfig cfg;
  cfg.window = stft::Window::Rectangular;
  const double fs = 16000.0;
  const Eigen::Index k0 = 32;
  const double f = fs * double(k0) / double(cfg.fft_len);
  Waveform x;
  x.sample_rate = fs;
  x.samples.resize(4096, 1);
  for (Eigen::Index i = 0; i < x.length(); ++i)
    x.samples(i, 0) = std::cos(2.0 * M_PI * f * double(i) / fs);
  const auto spec = stft::analyze(x, cfg);
  double at_k0 = 0.0, rest = 0.0;
  for (Eigen::Index k = 0; k < spec.n_bins; ++k) {
    const double e = spec.bin(k).squaredNorm();
    (k == k0 ? at_k0 : rest) += e;
  }
  REQUIRE(at_k0 > 1e6 * rest);  // rectangular window: exact bin alignment
}

TEST_CASE("tensor energy tracks time-domain energy through the stationary factor") {
  stft::StftConfig cfg;
  const Waveform x = random_waveform(64000, 1, 33);
  const auto spec = stft::analyze(x, cfg);
  const double covered =
      x.samples.col(0).head((spec.n_frames - 1) * cfg.hop + cfg.fft_len).squaredNorm();
  const double ratio = stft::tensor_energy(spec, cfg) / (stft::parseval_factor(cfg) * covered);
  REQUIRE(ratio == Catch::Approx(1.0).margin(0.03));
}

TEST_CASE("windows use the periodic definition") {
  const VectorXd ham = stft::make_window(stft::Window::Hamming, 8);
  REQUIRE(ham(0) == Catch::Approx(0.08));
  REQUIRE(ham(4) == Catch::Approx(1.0));  // peak at L/2 for periodic windows
  const VectorXd hann = stft::make_window(stft::Window::Hann, 8);
  REQUIRE(hann(0) == Catch::Approx(0.0).margin(1e-15));
  REQUIRE(hann(4) == Catch::Approx(1.0));
  REQUIRE(stft::window_from_name("hamming") == stft::Window::Hamming);
  REQUIRE_THROWS_AS(stft::window_from_name("kaiser"), Error);
}

TEST_CASE("wav files survive a write/read cycle") {
  const Waveform x = random_waveform(3000, 2, 44, 16000.0);
  const std::string dir = std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp");

  const std::string f32 = dir + "/csvbse_test_f32.wav";
  wav::write(f32, x, wav::SampleFormat::Float32);
  const Waveform y = wav::read(f32);
  REQUIRE(y.sample_rate == 16000.0);
  REQUIRE(y.length() == x.length());
  REQUIRE(y.channels() == 2);
  REQUIRE((y.samples - x.samples).cwiseAbs().maxCoeff() < 1e-6);  // float32 quantization

  Waveform bounded = x;  // 16-bit output clips beyond full scale
  bounded.samples = bounded.samples.cwiseMax(-0.95).cwiseMin(0.95);
  const std::string p16 = dir + "/csvbse_test_p16.wav";
  wav::write(p16, bounded, wav::SampleFormat::Pcm16);
  const Waveform z = wav::read(p16);
  REQUIRE((z.samples - bounded.samples).cwiseAbs().maxCoeff() < 1e-3);

  std::remove(f32.c_str());
  std::remove(p16.c_str());
  REQUIRE_THROWS_AS(wav::read(dir + "/definitely_missing.wav"), Error);
}
