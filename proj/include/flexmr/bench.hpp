#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <string>

#include <json.hpp>

#include "flexmr/matrix_market.hpp"
#include "flexmr/solvers.hpp"

namespace flexmr {

/// Uniform(0,1) right-hand side from an mt19937_64 stream keyed by seed.
/// Entry i is ((r >> 11) + 0.5) * 2^-53 for the i-th raw draw r, which keeps
/// every entry strictly inside (0,1) and makes the vector a pure function of
/// (m, seed) on every platform.
template <typename Scalar = double>
DenseVector<Scalar> random_rhs(Index m, std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("random_rhs: m must be >= 1");
  std::mt19937_64 gen(seed);
  DenseVector<Scalar> b(m);
  for (Index i = 0; i < m; ++i) {
    const std::uint64_t r = gen();
    b[i] = static_cast<Scalar>((static_cast<double>(r >> 11) + 0.5) * 0x1p-53);
  }
  return b;
}

struct RhsSpec {
  enum class Kind { from_file, random };
  Kind kind = Kind::random;
  std::string path;
  std::uint64_t seed = 1;
};

struct RunConfig {
  std::string matrix_path;
  RhsSpec rhs;
  SolverMethod method = SolverMethod::lsmr;
  InnerMethod inner_method = InnerMethod::minres;
  Index inner_steps = 8;
  double tol = 1e-12;
  Index max_iterations = 100000;
  Index residual_check_stride = 1;
  double time_budget_seconds = 0.0;
  std::string output_path;  // CSV; the JSON summary lands next to it
  bool timing = false;
};

inline constexpr int kExitConverged = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitMaxIterations = 2;
inline constexpr int kExitBreakdown = 3;

inline int exit_code_for(SolveStatus status) {
  switch (status) {
    case SolveStatus::converged: return kExitConverged;
    case SolveStatus::max_iterations: return kExitMaxIterations;
    case SolveStatus::breakdown:
    case SolveStatus::numerical_fault: return kExitBreakdown;
  }
  return kExitUsage;
}

inline std::string json_path_for(const std::string& csv_path) {
  const std::size_t dot = csv_path.find_last_of('.');
  const std::size_t slash = csv_path.find_last_of("/\\");
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash))
    return csv_path.substr(0, dot) + ".json";
  return csv_path + ".json";
}

/// Writes the per-iteration history as CSV (17 significant digits, loss-free
/// on re-parse) and a JSON summary beside it. The backward-error column is
/// normalized by ||A||_1, matching how convergence plots are drawn.
template <typename Scalar>
void emit_history(const SolveReport<Scalar>& report, const std::string& csv_path) {
  std::ofstream csv(csv_path);
  if (!csv) throw std::runtime_error("emit_history: cannot write " + csv_path);
  csv << "iter,nres,stewart_be_normalized,atr_norm,elapsed_ms,flops\n";
  char line[256];
  for (const HistoryRecord<Scalar>& row : report.history) {
    const double be_norm =
        report.matrix_norm1 == Scalar(0)
            ? 0.0
            : static_cast<double>(row.stewart_be) / static_cast<double>(report.matrix_norm1);
    std::snprintf(line, sizeof(line), "%lld,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  static_cast<long long>(row.iter), static_cast<double>(row.nres), be_norm,
                  static_cast<double>(row.atr_norm), row.elapsed_seconds * 1000.0, row.flops);
    csv << line;
  }
  csv.close();
  if (!csv) throw std::runtime_error("emit_history: write failed for " + csv_path);

  nlohmann::json summary;
  summary["method"] = to_string(report.method);
  summary["status"] = to_string(report.status);
  summary["iterations"] = report.iterations;
  summary["final_nres"] = static_cast<double>(report.final_nres());
  summary["matrix"] = {{"rows", report.rows}, {"cols", report.cols}, {"nnz", report.nnz},
                       {"one_norm", static_cast<double>(report.matrix_norm1)}};
  summary["time_seconds"] = {{"total", report.total_seconds},
                             {"kernel", report.kernel_seconds}};
  summary["flops"] = {{"matvec_calls", report.flops.matvec_calls},
                      {"rmatvec_calls", report.flops.rmatvec_calls},
                      {"mv", report.flops.mv_flops},
                      {"vector", report.flops.vector_flops},
                      {"kernel_total", report.flops.total()},
                      {"convergence_checks", report.flops.check_flops}};
  if (!report.diagnostic.empty()) summary["diagnostic"] = report.diagnostic;

  const std::string jpath = json_path_for(csv_path);
  std::ofstream js(jpath);
  if (!js) throw std::runtime_error("emit_history: cannot write " + jpath);
  js << summary.dump(2) << "\n";
}

/// Fills the model prediction for a finished run so emitters and tests can
/// put measured and predicted counts side by side.
template <typename Scalar>
CostModel cost_model_for(const SolveReport<Scalar>& report, Index inner_steps) {
  CostModel c;
  c.method = report.method;
  c.k = report.iterations;
  c.ell = (report.method == SolverMethod::flsmr || report.method == SolverMethod::fmlsmr)
              ? inner_steps
              : 0;
  c.m = report.rows;
  c.n = report.cols;
  c.nnz = report.nnz;
  return c;
}

/// Loads a right-hand side stored as an m x 1 (or 1 x m) Matrix Market file.
template <typename Scalar = double>
DenseVector<Scalar> load_rhs(const std::string& path, Index expected_rows) {
  SparseMatrix<Scalar> mat = load_matrix_market<Scalar>(path);
  if (mat.cols() != 1 && mat.rows() != 1)
    throw std::runtime_error("rhs file must hold a single vector: " + path);
  DenseMatrix<Scalar> dense = to_dense(mat, mat.rows() * mat.cols() + 1);
  DenseVector<Scalar> b = mat.cols() == 1 ? DenseVector<Scalar>(dense.col(0))
                                          : DenseVector<Scalar>(dense.row(0).transpose());
  if (b.size() != expected_rows)
    throw std::runtime_error("rhs length " + std::to_string(b.size()) +
                             " does not match matrix rows " + std::to_string(expected_rows));
  return b;
}

/// Runs one configured solve end to end: load, solve, emit, map the status
/// to the exit code. I/O and configuration problems return 1 after a line on
/// stderr; solver outcomes map converged/max_iterations/breakdown-or-fault
/// to 0/2/3.
inline int run_benchmark(const RunConfig& cfg, SolveReport<double>* report_out = nullptr,
                         std::ostream& log = std::cerr) {
  SolveReport<double> report;
  try {
    const SparseMatrix<double> a = load_matrix_market<double>(cfg.matrix_path);
    const DenseVector<double> b = cfg.rhs.kind == RhsSpec::Kind::random
                                      ? random_rhs<double>(a.rows(), cfg.rhs.seed)
                                      : load_rhs<double>(cfg.rhs.path, a.rows());

    OuterConfig<double> outer;
    outer.tol = cfg.tol;
    outer.max_iterations = cfg.max_iterations;
    outer.residual_check_stride = cfg.residual_check_stride;
    outer.time_budget_seconds = cfg.time_budget_seconds;
    outer.inner.method = cfg.inner_method;
    outer.inner.steps = cfg.inner_steps;

    switch (cfg.method) {
      case SolverMethod::lsmr: report = lsmr_solve(a, b, outer); break;
      case SolverMethod::mlsmr:
        // Without a caller-provided M the modified method runs with the
        // identity, which reduces it to plain LSMR.
        report = mlsmr_solve(
            a, b,
            [](const DenseVector<double>& p, DenseVector<double>& out) { out = p; }, outer);
        break;
      case SolverMethod::flsmr: report = flsmr_solve(a, b, outer); break;
      case SolverMethod::fmlsmr: report = fmlsmr_solve(a, b, outer); break;
    }

    if (!cfg.output_path.empty()) emit_history(report, cfg.output_path);
    if (cfg.timing) {
      char buf[160];
      std::snprintf(buf, sizeof(buf), "%s: %lld iterations, kernel %.4f s, total %.4f s\n",
                    to_string(report.method), static_cast<long long>(report.iterations),
                    report.kernel_seconds, report.total_seconds);
      std::cout << buf;
    }
  } catch (const std::exception& err) {
    log << "error: " << err.what() << "\n";
    return kExitUsage;
  }
  const int code = exit_code_for(report.status);
  if (report_out) *report_out = std::move(report);
  return code;
}

}  // namespace flexmr
