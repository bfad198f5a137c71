#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace flexmr {

using Index = Eigen::Index;

template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Thrown when an operand's length does not match the declared dimension.
class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown on non-finite intermediates, indefinite preconditioner applications,
/// and failed factorizations.
class NumericalFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Matrix Market ingestion failure, carrying the 1-based source line.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Flop accounting in the dominant-term sense: matrix products are counted
/// exactly (2*nnz per call), vector work is charged at the standard symbolic
/// rates by the routine performing it. Convergence-check products go into a
/// separate bucket so the kernel total stays comparable to the cost models.
struct FlopCounter {
  std::int64_t matvec_calls = 0;
  std::int64_t rmatvec_calls = 0;
  double mv_flops = 0.0;
  double vector_flops = 0.0;
  double check_flops = 0.0;

  void record_matvec(Index nnz) {
    ++matvec_calls;
    mv_flops += 2.0 * static_cast<double>(nnz);
  }
  void record_rmatvec(Index nnz) {
    ++rmatvec_calls;
    mv_flops += 2.0 * static_cast<double>(nnz);
  }
  void record_vector_work(double flops) { vector_flops += flops; }
  void record_check_work(double flops) { check_flops += flops; }

  /// Kernel flops (products + vector work), excluding convergence checks.
  double total() const { return mv_flops + vector_flops; }
};

/// Census of vectors a solver retains across outer iterations, split by
/// dimension class (length m vs length n). Transient inner-solver workspace
/// is not registered here; it lives only within one inner call.
struct StorageAudit {
  Index live_m = 0;
  Index live_n = 0;
  Index peak_m = 0;
  Index peak_n = 0;

  void acquire_m(Index count = 1) {
    live_m += count;
    peak_m = std::max(peak_m, live_m);
  }
  void acquire_n(Index count = 1) {
    live_n += count;
    peak_n = std::max(peak_n, live_n);
  }
  void release_m(Index count = 1) { live_m -= count; }
  void release_n(Index count = 1) { live_n -= count; }
};

}  // namespace flexmr
