#ifndef CSVBSE_FFT_HPP
#define CSVBSE_FFT_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "csvbse/common.hpp"

namespace csvbse::fft {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Precomputed transform for a fixed length. Radix-2 for powers of two,
// direct DFT otherwise; both are exact up to round-off and thread-safe
// once constructed.
class Plan {
 public:
  explicit Plan(std::size_t n) : n_(n), radix2_(is_power_of_two(n)) {
    if (n_ == 0) fail(ErrorCode::InvalidConfig, "fft length must be positive");
    if (radix2_) {
      bitrev_.resize(n_);
      std::size_t log2n = 0;
      while ((std::size_t{1} << log2n) < n_) ++log2n;
      for (std::size_t i = 0; i < n_; ++i) {
        std::size_t r = 0;
        for (std::size_t b = 0; b < log2n; ++b)
          if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (log2n - 1 - b);
        bitrev_[i] = r;
      }
      twiddle_.resize(n_ / 2);
      const double step = -2.0 * M_PI / static_cast<double>(n_);
      for (std::size_t i = 0; i < n_ / 2; ++i)
        twiddle_[i] = std::polar(1.0, step * static_cast<double>(i));
    } else {
      dft_table_.resize(n_ * n_);
      const double step = -2.0 * M_PI / static_cast<double>(n_);
      for (std::size_t r = 0; r < n_; ++r)
        for (std::size_t c = 0; c < n_; ++c)
          dft_table_[r * n_ + c] = std::polar(1.0, step * static_cast<double>((r * c) % n_));
    }
  }

  std::size_t size() const { return n_; }

  // In-place forward transform, X[k] = sum_n x[n] e^{-2*pi*i*n*k/N}.
  void forward(cd* data) const { transform(data, false); }

  // In-place inverse transform including the 1/N factor.
  void inverse(cd* data) const {
    for (std::size_t i = 0; i < n_; ++i) data[i] = std::conj(data[i]);
    transform(data, false);
    const double inv = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < n_; ++i) data[i] = std::conj(data[i]) * inv;
  }

  void forward(std::vector<cd>& data) const {
    check_len(data.size());
    forward(data.data());
  }
  void inverse(std::vector<cd>& data) const {
    check_len(data.size());
    inverse(data.data());
  }

 private:
  void check_len(std::size_t len) const {
    if (len != n_) fail(ErrorCode::InvalidConfig, "fft buffer length mismatch");
  }

  void transform(cd* a, bool /*unused*/) const {
    if (radix2_) {
      for (std::size_t i = 0; i < n_; ++i) {
        std::size_t j = bitrev_[i];
        if (i < j) std::swap(a[i], a[j]);
      }
      for (std::size_t len = 2; len <= n_; len <<= 1) {
        const std::size_t half = len >> 1;
        const std::size_t stride = n_ / len;
        for (std::size_t start = 0; start < n_; start += len) {
          for (std::size_t k = 0; k < half; ++k) {
            const cd w = twiddle_[k * stride];
            const cd u = a[start + k];
            const cd v = a[start + k + half] * w;
            a[start + k] = u + v;
            a[start + k + half] = u - v;
          }
        }
      }
    } else {
      std::vector<cd> out(n_, cd(0.0, 0.0));
      for (std::size_t r = 0; r < n_; ++r) {
        cd acc(0.0, 0.0);
        const cd* row = dft_table_.data() + r * n_;
        for (std::size_t c = 0; c < n_; ++c) acc += row[c] * a[c];
        out[r] = acc;
      }
      for (std::size_t i = 0; i < n_; ++i) a[i] = out[i];
    }
  }

  std::size_t n_;
  bool radix2_;
  std::vector<std::size_t> bitrev_;
  std::vector<cd> twiddle_;
  std::vector<cd> dft_table_;
};

}  // namespace csvbse::fft

#endif  // CSVBSE_FFT_HPP
