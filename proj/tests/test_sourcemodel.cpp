#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <random>

#include "csvbse/sourcemodel.hpp"

using namespace csvbse;

TEST_CASE("score of a basis vector picks that bin") {
  VectorXcd s = VectorXcd::Zero(4);
  s(2) = cd(1, 0);
  const VectorXcd phi = sourcemodel::score(s);
  REQUIRE(std::abs(phi(2) - cd(1, 0)) < 1e-15);
  REQUIRE(std::abs(phi(0)) < 1e-15);
}

TEST_CASE("score ignores positive scaling") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss;
  VectorXcd s(5);
  for (auto i = 0; i < 5; ++i) s(i) = cd(gauss(rng), gauss(rng));
  REQUIRE((sourcemodel::score(3.7 * s) - sourcemodel::score(s)).norm() < 1e-14);
}

TEST_CASE("score is the finite-difference gradient of the frame norm") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> gauss;
  VectorXcd s(3);
  for (auto i = 0; i < 3; ++i) s(i) = cd(gauss(rng), gauss(rng));
  const VectorXcd phi = sourcemodel::score(s);
  const double h = 1e-7;
  for (Eigen::Index k = 0; k < 3; ++k) {
    VectorXcd sp = s, sm = s;
    sp(k) += h;
    sm(k) -= h;
    const double d_re = (sp.norm() - sm.norm()) / (2 * h);
    sp = s;
    sm = s;
    sp(k) += cd(0, h);
    sm(k) -= cd(0, h);
    const double d_im = (sp.norm() - sm.norm()) / (2 * h);
    // gradient along the real/imag axes assembles to s_k/||s||
    REQUIRE(std::abs(cd(d_re, d_im) - phi(k)) < 1e-6);
  }
}

TEST_CASE("auxiliary nonlinearity is the floored reciprocal") {
  REQUIRE(sourcemodel::aux_nonlinearity(2.0) == Catch::Approx(0.5));
  REQUIRE(sourcemodel::aux_nonlinearity(0.0) == Catch::Approx(1e8));
  REQUIRE(sourcemodel::aux_nonlinearity(1.0) >= sourcemodel::aux_nonlinearity(2.0));
}

TEST_CASE("the tangent bound lies below the norm with equality at contact") {
  // -||s|| >= -(phi(r) ||s||^2 + r)/2 for every r > 0, equality at r = ||s||
  for (double norm_s : {0.1, 0.7, 1.0, 3.5}) {
    for (double r : {0.05, 0.3, 1.0, 2.0, 10.0}) {
      const double bound = -(sourcemodel::aux_nonlinearity(r) * norm_s * norm_s + r) / 2.0;
      REQUIRE(-norm_s >= bound - 1e-12);
    }
    const double at_contact =
        -(sourcemodel::aux_nonlinearity(norm_s) * norm_s * norm_s + norm_s) / 2.0;
    REQUIRE(-norm_s == Catch::Approx(at_contact).margin(1e-12));
  }
}

TEST_CASE("frame norms with and without pilot") {
  VectorXcd shat(1);
  shat(0) = cd(3, 4);
  REQUIRE(sourcemodel::frame_norm(shat) == Catch::Approx(5.0));

  sourcemodel::PilotSignal pilot;
  pilot.o = VectorXd::Ones(1);
  pilot.delta = 1.0;
  REQUIRE(sourcemodel::frame_norm(VectorXcd::Zero(2), pilot, 0) == Catch::Approx(1.0));

  sourcemodel::PilotSignal off = pilot;
  off.delta = 0.0;
  const MatrixXcd est = MatrixXcd::Random(4, 6);
  const VectorXd plain = sourcemodel::frame_norms(est);
  sourcemodel::PilotSignal off6 = off;
  off6.o = VectorXd::Ones(6);
  const VectorXd with_off = sourcemodel::frame_norms(est, off6);
  REQUIRE((plain - with_off).norm() == 0.0);  // bitwise identical path
}

TEST_CASE("pilot loaders") {
  const std::string dir = std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp");
  const std::string txt = dir + "/csvbse_pilot.txt";
  {
    std::ofstream out(txt);
    out << "1.0\n2.5\n# not a number line is skipped by parse\n0.25\n";
  }
  const auto p = sourcemodel::pilot_from_text(txt, 0.5);
  REQUIRE(p.o.size() == 3);
  REQUIRE(p.o(1) == Catch::Approx(2.5));
  REQUIRE(p.delta == Catch::Approx(0.5));
  std::remove(txt.c_str());
  REQUIRE_THROWS_AS(sourcemodel::pilot_from_text(dir + "/missing_pilot.txt"), Error);

  // pilot from a waveform equals the per-frame spectral norm
  Waveform w;
  w.sample_rate = 16000;
  w.samples = MatrixXd::Random(2000, 1);
  stft::StftConfig cfg;
  cfg.fft_len = 256;
  cfg.hop = 128;
  const auto pw = sourcemodel::pilot_from_waveform(w, cfg);
  const auto spec = stft::analyze(w, cfg);
  REQUIRE(pw.o.size() == spec.n_frames);
  double v = 0.0;
  for (Eigen::Index k = 0; k < spec.n_bins; ++k) v += std::norm(spec.at(k, 3, 0));
  REQUIRE(pw.o(3) == Catch::Approx(std::sqrt(v)));
}
