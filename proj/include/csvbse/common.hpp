#ifndef CSVBSE_COMMON_HPP
#define CSVBSE_COMMON_HPP

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

namespace csvbse {

using cd = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::Vector3d;
using Eigen::VectorXcd;
using Eigen::VectorXd;

enum class ErrorCode {
  SignalTooShort,
  TooManyBlocks,
  DegenerateCovariance,
  SingularParameterization,
  DegenerateNu,
  SingularAuxSystem,
  InvalidGeometry,
  InvalidScenario,
  InvalidConfig,
  IoFailure,
  Undefined,
};

inline const char* error_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::SignalTooShort: return "SignalTooShort";
    case ErrorCode::TooManyBlocks: return "TooManyBlocks";
    case ErrorCode::DegenerateCovariance: return "DegenerateCovariance";
    case ErrorCode::SingularParameterization: return "SingularParameterization";
    case ErrorCode::DegenerateNu: return "DegenerateNu";
    case ErrorCode::SingularAuxSystem: return "SingularAuxSystem";
    case ErrorCode::InvalidGeometry: return "InvalidGeometry";
    case ErrorCode::InvalidScenario: return "InvalidScenario";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::Undefined: return "Undefined";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(std::string(error_name(code)) + ": " + msg), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

// Chunked parallel map. Each index writes only its own outputs, so results are
// identical for any thread count.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  if (n == 0) return;
  if (threads <= 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  unsigned workers = std::min<std::size_t>(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    std::size_t lo = w * chunk;
    std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

inline unsigned hardware_threads() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1u : n;
}

}  // namespace csvbse

#endif  // CSVBSE_COMMON_HPP
