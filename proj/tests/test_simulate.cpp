#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <random>

#include "csvbse/simulate.hpp"

using namespace csvbse;

namespace {

VectorXd naive_convolve(const VectorXd& x, const VectorXd& h) {
  VectorXd y = VectorXd::Zero(x.size() + h.size() - 1);
  for (Eigen::Index i = 0; i < x.size(); ++i)
    for (Eigen::Index j = 0; j < h.size(); ++j) y(i + j) += x(i) * h(j);
  return y;
}

// Reverberation time from the backward-integrated energy decay, fitted
// between -5 dB and -25 dB.
double schroeder_t60(const VectorXd& h, double fs) {
  VectorXd edc(h.size());
  double acc = 0.0;
  for (Eigen::Index i = h.size() - 1; i >= 0; --i) {
    acc += h(i) * h(i);
    edc(i) = acc;
  }
  const double e0 = edc(0);
  Eigen::Index t5 = -1, t25 = -1;
  for (Eigen::Index i = 0; i < edc.size(); ++i) {
    const double db = 10.0 * std::log10(edc(i) / e0);
    if (t5 < 0 && db <= -5.0) t5 = i;
    if (t25 < 0 && db <= -25.0) {
      t25 = i;
      break;
    }
  }
  REQUIRE(t5 >= 0);
  REQUIRE(t25 > t5);
  return 60.0 / 20.0 * static_cast<double>(t25 - t5) / fs;
}

}  // namespace

TEST_CASE("anechoic response is a single attenuated impulse at the travel delay") {
  simulate::RoomSpec room;
  room.t60 = 0.0;
  const double fs = 16000.0;
  const double dist = 343.0 * 48.0 / fs;  // exactly 48 samples of delay
  const Vector3d src(1.0, 1.0, 1.0);
  const Vector3d mic(1.0 + dist, 1.0, 1.0);
  const VectorXd h = simulate::image_method_rir(room, src, mic, fs);

  const double expect = 1.0 / (4.0 * M_PI * dist);
  REQUIRE(h(48) == Catch::Approx(expect).epsilon(1e-12));
  for (Eigen::Index i = 0; i < h.size(); ++i)
    if (i != 48) REQUIRE(std::abs(h(i)) < 1e-12 * expect);
}

TEST_CASE("direct-path amplitude halves when the distance doubles") {
  simulate::RoomSpec room;
  room.dims = Vector3d(10.0, 10.0, 10.0);
  room.t60 = 0.0;
  const double fs = 16000.0;
  const double d1 = 343.0 * 47.0 / fs;  // 47 and 94 samples of delay exactly
  const Vector3d src(5.0, 5.0, 5.0);
  const VectorXd h1 = simulate::image_method_rir(room, src, src + Vector3d(d1, 0, 0), fs);
  const VectorXd h2 = simulate::image_method_rir(room, src, src + Vector3d(2 * d1, 0, 0), fs);
  REQUIRE(h1.cwiseAbs().maxCoeff() / h2.cwiseAbs().maxCoeff() == Catch::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("reverberant response decays at roughly the requested rate") {
  simulate::RoomSpec room;
  room.dims = Vector3d(5.0, 4.0, 3.0);
  room.t60 = 0.25;
  const double fs = 16000.0;
  const VectorXd h =
      simulate::image_method_rir(room, Vector3d(1.2, 2.5, 1.3), Vector3d(3.8, 1.4, 1.5), fs);
  const double t60 = schroeder_t60(h, fs);
  INFO("fitted decay time " << t60 << " s");
  REQUIRE(t60 > 0.25 * 0.65);
  REQUIRE(t60 < 0.25 * 1.35);
}

TEST_CASE("explicit tap count and geometry checks") {
  simulate::RoomSpec room;
  room.t60 = 0.0;
  REQUIRE(simulate::image_method_rir(room, Vector3d(1, 1, 1), Vector3d(2, 1, 1), 16000.0, 300)
              .size() == 300);
  REQUIRE_THROWS_AS(
      simulate::image_method_rir(room, Vector3d(9, 1, 1), Vector3d(2, 1, 1), 16000.0), Error);
  REQUIRE_THROWS_AS(
      simulate::image_method_rir(room, Vector3d(1, 1, 1), Vector3d(1, 1, 1), 16000.0), Error);
  try {
    simulate::image_method_rir(room, Vector3d(1, 1, -1), Vector3d(2, 1, 1), 16000.0);
    FAIL("expected an error");
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::InvalidGeometry);
  }
}

TEST_CASE("block convolution matches the direct sum") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> gauss;
  SECTION("short filter") {
    VectorXd x(500), h(37);
    for (auto& v : x.reshaped()) v = gauss(rng);
    for (auto& v : h.reshaped()) v = gauss(rng);
    const VectorXd a = simulate::fft_convolve(x, h);
    const VectorXd b = naive_convolve(x, h);
    REQUIRE((a - b).norm() / b.norm() < 1e-12);
  }
  SECTION("filter longer than the signal") {
    VectorXd x(20), h(300);
    for (auto& v : x.reshaped()) v = gauss(rng);
    for (auto& v : h.reshaped()) v = gauss(rng);
    const VectorXd a = simulate::fft_convolve(x, h);
    const VectorXd b = naive_convolve(x, h);
    REQUIRE(a.size() == b.size());
    REQUIRE((a - b).norm() / b.norm() < 1e-12);
  }
}

TEST_CASE("a static scene is a plain convolution of the dry signal") {
  simulate::Scenario sc;
  sc.room.t60 = 0.05;
  sc.fs = 8000.0;
  sc.mics = {Vector3d(2.0, 2.0, 1.2), Vector3d(2.1, 2.0, 1.2)};
  sc.target.path = simulate::static_path(Vector3d(1.0, 2.5, 1.4), 0.5);
  sc.target.kind = simulate::SignalKind::WhiteNoise;
  sc.mixture_rms = 0.0;  // keep the raw image scale

  simulate::Rng rng(300);
  const auto gt = simulate::moving_mixture(sc, rng);
  REQUIRE(gt.images.size() == 1);

  simulate::Rng rng2(300);
  const Eigen::Index n = static_cast<Eigen::Index>(sc.fs * 0.5);
  const VectorXd dry = simulate::generate_signal(simulate::SignalKind::WhiteNoise, n, sc.fs, rng2);
  for (int i = 0; i < 2; ++i) {
    const VectorXd h =
        simulate::image_method_rir(sc.room, sc.target.path.waypoints[0], sc.mics[i], sc.fs);
    const VectorXd want = simulate::fft_convolve(dry, h).head(n);
    REQUIRE((gt.images[0].samples.col(i) - want).norm() < 1e-14 * want.norm());
  }
}

TEST_CASE("a path of identical waypoints behaves like a static source") {
  simulate::Scenario sc;
  sc.room.t60 = 0.05;
  sc.fs = 8000.0;
  sc.mics = {Vector3d(2.0, 2.0, 1.2), Vector3d(2.1, 2.0, 1.2)};
  const Vector3d pos(1.0, 2.5, 1.4);
  sc.target.path.waypoints = {pos, pos, pos};
  sc.target.path.dwells = {0.2, 0.2, 0.2};
  sc.mixture_rms = 0.0;

  simulate::Scenario sc_static = sc;
  sc_static.target.path = simulate::static_path(pos, 0.6);

  simulate::Rng rng1(301), rng2(301);
  const auto moving = simulate::moving_mixture(sc, rng1);
  const auto fixed = simulate::moving_mixture(sc_static, rng2);
  const double rel = (moving.mixture.samples - fixed.mixture.samples).norm() /
                     fixed.mixture.samples.norm();
  REQUIRE(rel < 1e-10);  // crossfade gains sum to one at every sample
}

TEST_CASE("mixture is the exact sum of the component images") {
  simulate::Scenario sc;
  sc.room.t60 = 0.08;
  sc.fs = 8000.0;
  sc.duration = 0.6;
  sc.mics = {Vector3d(2.0, 2.0, 1.2), Vector3d(2.05, 2.0, 1.2), Vector3d(2.10, 2.0, 1.2)};
  sc.target.path = simulate::line_path(Vector3d(1.0, 2.5, 1.4), Vector3d(1.5, 2.8, 1.4), 3, 0.6);
  sc.target.kind = simulate::SignalKind::ModulatedNoise;
  simulate::SourceSpec noise;
  noise.path = simulate::static_path(Vector3d(3.0, 1.0, 1.5), 0.6);
  noise.level_db = -7.0;
  sc.others = {noise};

  simulate::Rng rng(302);
  const auto gt = simulate::moving_mixture(sc, rng);
  REQUIRE(gt.images.size() == 2);

  MatrixXd sum = gt.images[0].samples + gt.images[1].samples;
  REQUIRE((gt.mixture.samples - sum).cwiseAbs().maxCoeff() == 0.0);

  const auto n_d = static_cast<double>(gt.mixture.samples.size());
  const double p0 = gt.images[0].samples.squaredNorm() / n_d;
  const double p1 = gt.images[1].samples.squaredNorm() / n_d;
  REQUIRE(p1 / p0 == Catch::Approx(std::pow(10.0, -0.7)).epsilon(1e-9));
  const double rms = std::sqrt(gt.mixture.samples.squaredNorm() / n_d);
  REQUIRE(rms == Catch::Approx(sc.mixture_rms).epsilon(1e-9));

  const auto bg = gt.background_image();
  REQUIRE((bg.samples - gt.images[1].samples).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("scene generation is deterministic in the seed") {
  simulate::Scenario sc;
  sc.fs = 8000.0;
  sc.duration = 0.4;
  sc.mics = {Vector3d(2.0, 2.0, 1.2), Vector3d(2.1, 2.0, 1.2)};
  sc.target.path = simulate::line_path(Vector3d(1.0, 2.5, 1.4), Vector3d(1.4, 2.5, 1.4), 2, 0.4);
  simulate::Rng a(42), b(42), c(43);
  const auto ga = simulate::moving_mixture(sc, a);
  const auto gb = simulate::moving_mixture(sc, b);
  const auto gc = simulate::moving_mixture(sc, c);
  REQUIRE((ga.mixture.samples - gb.mixture.samples).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE((ga.mixture.samples - gc.mixture.samples).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("scenario validation rejects broken setups") {
  simulate::Scenario sc;
  sc.fs = 8000.0;
  sc.duration = 0.4;
  sc.mics = {Vector3d(2.0, 2.0, 1.2), Vector3d(2.1, 2.0, 1.2)};
  sc.target.path = simulate::static_path(Vector3d(1.0, 2.5, 1.4), 0.4);

  SECTION("source outside the room") {
    sc.target.path.waypoints[0] = Vector3d(7.0, 1.0, 1.0);
    REQUIRE_THROWS_AS(sc.validate(), Error);
  }
  SECTION("single microphone") {
    sc.mics.resize(1);
    REQUIRE_THROWS_AS(sc.validate(), Error);
  }
  SECTION("nonpositive dwell") {
    sc.target.path.dwells[0] = 0.0;
    REQUIRE_THROWS_AS(sc.validate(), Error);
  }
  SECTION("valid setup passes") { REQUIRE_NOTHROW(sc.validate()); }
}

TEST_CASE("line path interpolates between the endpoints") {
  const auto p = simulate::line_path(Vector3d(0, 0, 0), Vector3d(2, 4, 0), 5, 2.5);
  REQUIRE(p.waypoints.size() == 5);
  REQUIRE((p.waypoints.front() - Vector3d(0, 0, 0)).norm() == 0.0);
  REQUIRE((p.waypoints.back() - Vector3d(2, 4, 0)).norm() == 0.0);
  REQUIRE((p.waypoints[2] - Vector3d(1, 2, 0)).norm() < 1e-14);
  REQUIRE(p.total_dwell() == Catch::Approx(2.5));
  REQUIRE(p.moving());
  REQUIRE(!simulate::static_path(Vector3d(1, 1, 1), 1.0).moving());
}

TEST_CASE("jointly sparse frames have the documented radial statistics") {
  const Eigen::Index K = 4, N = 40000;
  simulate::Rng rng(400);
  const MatrixXcd s = simulate::sample_vector_laplace(K, N, rng);

  // mean norm: 2K * scale with scale = 1/sqrt(2(2K+1))
  const double scale = 1.0 / std::sqrt(2.0 * (2.0 * K + 1.0));
  const double expect_norm = 2.0 * K * scale;
  const VectorXd norms = s.colwise().norm();
  const double se = scale * std::sqrt(2.0 * K / static_cast<double>(N));
  REQUIRE(std::abs(norms.mean() - expect_norm) < 3.0 * se);

  // unit variance per complex coordinate
  const double var = s.squaredNorm() / static_cast<double>(K * N);
  REQUIRE(var == Catch::Approx(1.0).margin(0.05));

  // leptokurtic marginals: excess kurtosis 6/(2K+1) = 2/3 at K = 4
  VectorXd re(N);
  for (Eigen::Index l = 0; l < N; ++l) re(l) = s(0, l).real();
  const double m2 = re.squaredNorm() / static_cast<double>(N);
  const double m4 = re.array().pow(4).mean();
  const double excess = m4 / (m2 * m2) - 3.0;
  REQUIRE(excess > 0.35);
  REQUIRE(excess < 1.0);
}

TEST_CASE("dry signal generators") {
  simulate::Rng rng(401);
  SECTION("white noise is stationary with unit variance") {
    const VectorXd x = simulate::generate_signal(simulate::SignalKind::WhiteNoise, 20000, 16000.0, rng);
    REQUIRE(x.squaredNorm() / 20000.0 == Catch::Approx(1.0).margin(0.05));
  }
  SECTION("modulated noise has a strongly varying short-time power") {
    const VectorXd x =
        simulate::generate_signal(simulate::SignalKind::ModulatedNoise, 32000, 16000.0, rng);
    const Eigen::Index chunk = 1600;  // 100 ms
    double pmin = 1e300, pmax = 0.0;
    for (Eigen::Index i = 0; i + chunk <= x.size(); i += chunk) {
      const double p = x.segment(i, chunk).squaredNorm() / static_cast<double>(chunk);
      pmin = std::min(pmin, p);
      pmax = std::max(pmax, p);
    }
    REQUIRE(pmax / pmin > 10.0);
  }
  SECTION("sparse frames are leptokurtic in time") {
    const VectorXd x =
        simulate::generate_signal(simulate::SignalKind::SparseFrames, 32000, 16000.0, rng);
    const double m2 = x.squaredNorm() / static_cast<double>(x.size());
    const double m4 = x.array().pow(4).mean();
    REQUIRE(m4 / (m2 * m2) - 3.0 > 0.3);
  }
  SECTION("wav files are read back and must cover the scene") {
    Waveform w;
    w.sample_rate = 16000.0;
    w.samples = MatrixXd::Random(4000, 1) * 0.4;
    const std::string path = "test_simulate_dry.wav";
    wav::write(path, w, wav::SampleFormat::Float32);
    const VectorXd x =
        simulate::generate_signal(simulate::SignalKind::WavFile, 3000, 16000.0, rng, path);
    REQUIRE((x - w.samples.col(0).head(3000)).cwiseAbs().maxCoeff() < 1e-6);
    REQUIRE_THROWS_AS(
        simulate::generate_signal(simulate::SignalKind::WavFile, 5000, 16000.0, rng, path), Error);
    std::remove(path.c_str());
  }
  SECTION("kind names parse") {
    REQUIRE(simulate::signal_kind_from_name("white") == simulate::SignalKind::WhiteNoise);
    REQUIRE(simulate::signal_kind_from_name("modulated") == simulate::SignalKind::ModulatedNoise);
    REQUIRE(simulate::signal_kind_from_name("sparse") == simulate::SignalKind::SparseFrames);
    REQUIRE(simulate::signal_kind_from_name("wav") == simulate::SignalKind::WavFile);
    REQUIRE_THROWS_AS(simulate::signal_kind_from_name("pink"), Error);
  }
}

TEST_CASE("synthetic transform-domain mixture satisfies the model exactly") {
  simulate::Rng rng(402);
  const Eigen::Index K = 5, d = 3, T = 3, N_b = 60;
  const auto mix = simulate::synthetic_csv_mixture(K, d, T, N_b, rng);
  REQUIRE(mix.x.n_bins == K);
  REQUIRE(mix.x.n_frames == T * N_b);
  REQUIRE(mix.x.n_channels == d);

  for (Eigen::Index k = 0; k < K; ++k) {
    for (Eigen::Index l = 0; l < T * N_b; ++l) {
      cd est = 0.0, bg = 0.0, sum_err = 0.0;
      for (Eigen::Index i = 0; i < d; ++i) {
        est += std::conj(mix.w_true.w(i, k)) * mix.x.at(k, l, i);
        bg += std::conj(mix.w_true.w(i, k)) * mix.background.at(k, l, i);
        sum_err += mix.x.at(k, l, i) - mix.target.at(k, l, i) - mix.background.at(k, l, i);
      }
      REQUIRE(std::abs(est - mix.s_true(k, l)) < 1e-12 * (1.0 + std::abs(mix.s_true(k, l))));
      REQUIRE(std::abs(bg) < 1e-12);
      REQUIRE(std::abs(sum_err) < 1e-13);
    }
    for (Eigen::Index t = 0; t < T; ++t) {
      const cd gain = mix.w_true.w.col(k).dot(mix.a_true.col(k, t));
      REQUIRE(std::abs(gain - cd(1, 0)) < 1e-12);
    }
  }
}

TEST_CASE("synthetic target tracks the drawn per-block scale") {
  simulate::Rng rng(403);
  const Eigen::Index K = 4, T = 3, N_b = 4000;
  const auto mix = simulate::synthetic_csv_mixture(K, 2, T, N_b, rng);
  REQUIRE(mix.block_scale.size() == T);
  for (Eigen::Index t = 0; t < T; ++t) {
    const double p =
        mix.s_true.middleCols(t * N_b, N_b).squaredNorm() / static_cast<double>(K * N_b);
    REQUIRE(std::sqrt(p) == Catch::Approx(mix.block_scale(t)).epsilon(0.1));
  }
}
