#pragma once

#include <chrono>
#include <functional>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "flexmr/bidiag.hpp"
#include "flexmr/diagnostics.hpp"
#include "flexmr/inner.hpp"
#include "flexmr/rotations.hpp"

namespace flexmr {

enum class SolveStatus { converged, max_iterations, breakdown, numerical_fault };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iterations: return "max_iterations";
    case SolveStatus::breakdown: return "breakdown";
    case SolveStatus::numerical_fault: return "numerical_fault";
  }
  return "unknown";
}

template <typename Scalar>
struct HistoryRecord {
  Index iter = 0;
  Scalar nres = Scalar(0);
  Scalar stewart_be = Scalar(0);
  Scalar atr_norm = Scalar(0);             // ||A'r_k||_2 (fresh) or its estimate
  Scalar subproblem_residual = Scalar(0);  // |xi_bar_{k+1}|; reduced-problem residual for flsmr
  double elapsed_seconds = 0.0;            // wall clock since solve start, inclusive
  double flops = 0.0;                      // cumulative kernel flops
  bool fresh_residual = true;              // quantities recomputed from r_k = b - A x_k
};

template <typename Scalar>
struct SolveReport {
  SolveStatus status = SolveStatus::max_iterations;
  Index iterations = 0;
  DenseVector<Scalar> x;
  std::vector<HistoryRecord<Scalar>> history;
  std::string diagnostic;

  SolverMethod method = SolverMethod::lsmr;
  Index rows = 0, cols = 0, nnz = 0;
  Scalar matrix_norm1 = Scalar(0);
  Scalar rhs_norm = Scalar(0);
  double total_seconds = 0.0;   // whole solve, residual checks included
  double kernel_seconds = 0.0;  // bidiagonalization + rotations + iterate updates only
  FlopCounter flops;            // kernel buckets; check_flops holds the stopping-test products
  Index peak_m_vectors = 0;     // populated when cfg.audit is set
  Index peak_n_vectors = 0;

  Scalar final_nres() const { return history.empty() ? Scalar(0) : history.back().nres; }
};

template <typename Scalar>
struct OuterConfig {
  Scalar tol = Scalar(1e-12);
  Index max_iterations = 100000;
  InnerSolverConfig<Scalar> inner{};  // consumed by the flexible drivers
  Index residual_check_stride = 1;    // 1 reproduces the per-step stopping test
  Index basis_limit = 0;              // flsmr: cap on retained basis columns, 0 = none
  double time_budget_seconds = 0.0;   // 0 = none
  Scalar breakdown_epsilon = default_breakdown_epsilon<Scalar>();
  StorageAudit* audit = nullptr;

  // Test/diagnostic hooks; both receive the 1-based outer step.
  std::function<void(Index, const DenseVector<Scalar>&)> on_iterate;  // x_k
  std::function<void(Index, const DenseVector<Scalar>&)> on_p_hat;   // p_hat_{k+1} (step 0: p_hat_1)

  void validate() const {
    if (!(tol > Scalar(0))) throw std::invalid_argument("OuterConfig: tol must be > 0");
    if (max_iterations < 1)
      throw std::invalid_argument("OuterConfig: max_iterations must be >= 1");
    if (residual_check_stride < 1)
      throw std::invalid_argument("OuterConfig: residual_check_stride must be >= 1");
  }
};

template <typename Scalar>
struct HessenbergLsResult {
  DenseVector<Scalar> y;
  Scalar residual_norm = Scalar(0);
  bool rank_deficient = false;
};

/// Minimizer of ||rhs_scale e_1 - H y||_2 for a dense (k+1) x k matrix via
/// Givens QR, eliminating below-diagonal entries column by column (only the
/// subdiagonal carries work for Hessenberg input). A rank-deficient reduced
/// matrix yields the minimum-norm minimizer and sets the flag.
template <typename Scalar>
HessenbergLsResult<Scalar> hessenberg_ls_solve(DenseMatrix<Scalar> h, Scalar rhs_scale) {
  const Index rows = h.rows();
  const Index cols = h.cols();
  if (rows != cols + 1)
    throw std::invalid_argument("hessenberg_ls_solve: expected a (k+1) x k matrix");
  DenseVector<Scalar> g = DenseVector<Scalar>::Zero(rows);
  g[0] = rhs_scale;

  for (Index j = 0; j < cols; ++j) {
    for (Index i = j + 1; i < rows; ++i) {
      if (h(i, j) == Scalar(0)) continue;
      const Scalar r = std::hypot(h(j, j), h(i, j));
      const Scalar c = h(j, j) / r;
      const Scalar s = h(i, j) / r;
      for (Index l = j; l < cols; ++l) {
        const Scalar hjl = h(j, l);
        const Scalar hil = h(i, l);
        h(j, l) = c * hjl + s * hil;
        h(i, l) = -s * hjl + c * hil;
      }
      const Scalar gj = g[j];
      const Scalar gi = g[i];
      g[j] = c * gj + s * gi;
      g[i] = -s * gj + c * gi;
    }
  }

  HessenbergLsResult<Scalar> out;
  Scalar max_diag = Scalar(0);
  for (Index j = 0; j < cols; ++j) max_diag = std::max(max_diag, std::abs(h(j, j)));
  const Scalar rank_tol =
      std::numeric_limits<Scalar>::epsilon() * static_cast<Scalar>(rows) * max_diag;

  bool deficient = max_diag == Scalar(0);
  for (Index j = 0; j < cols && !deficient; ++j)
    if (std::abs(h(j, j)) <= rank_tol) deficient = true;

  if (!deficient) {
    out.y.resize(cols);
    for (Index j = cols - 1; j >= 0; --j) {
      Scalar acc = g[j];
      for (Index l = j + 1; l < cols; ++l) acc -= h(j, l) * out.y[l];
      out.y[j] = acc / h(j, j);
    }
    out.residual_norm = std::abs(g[cols]);
    return out;
  }

  out.rank_deficient = true;
  DenseMatrix<Scalar> r_upper = h.topRows(cols).template triangularView<Eigen::Upper>();
  Eigen::CompleteOrthogonalDecomposition<DenseMatrix<Scalar>> cod(r_upper);
  out.y = cod.solve(g.head(cols));
  out.residual_norm =
      std::sqrt((g.head(cols) - r_upper * out.y).squaredNorm() + g[cols] * g[cols]);
  return out;
}

namespace detail {

using SolveClock = std::chrono::steady_clock;

inline double seconds_since(SolveClock::time_point start) {
  return std::chrono::duration<double>(SolveClock::now() - start).count();
}

/// Adapts caller-facing preconditioner callables (p, out) to the internal
/// three-argument form that also receives the driver's flop counter.
template <typename Scalar, typename F>
auto adapt_minv(F&& f) {
  if constexpr (std::is_invocable_v<F&, const DenseVector<Scalar>&, DenseVector<Scalar>&,
                                    FlopCounter*>) {
    return std::forward<F>(f);
  } else {
    return [g = std::forward<F>(f)](const DenseVector<Scalar>& p, DenseVector<Scalar>& out,
                                    FlopCounter*) mutable { g(p, out); };
  }
}

/// Shared outer loop for the merged-recurrence family: plain LSMR (identity
/// preconditioner), MLSMR (fixed SPD M) and FMLSMR (fixed-budget inner
/// solves standing in for M^{-1}). minv has signature (p, out, counter).
template <typename Scalar, typename ApplyMinv>
SolveReport<Scalar> run_merged_driver(const SparseMatrix<Scalar>& a,
                                      const DenseVector<Scalar>& b, ApplyMinv&& minv3,
                                      const OuterConfig<Scalar>& cfg, SolverMethod method) {
  cfg.validate();
  if (b.size() != a.rows()) throw DimensionMismatch("solve: len(b) != nrows");
  const auto start = SolveClock::now();

  SolveReport<Scalar> report;
  report.method = method;
  report.rows = a.rows();
  report.cols = a.cols();
  report.nnz = a.nnz();
  report.matrix_norm1 = one_norm(a);
  report.rhs_norm = b.norm();
  report.x = DenseVector<Scalar>::Zero(a.cols());

  FlopCounter& fl = report.flops;
  StorageAudit* audit = cfg.audit;
  const Scalar a1 = report.matrix_norm1;
  const Scalar bnorm = report.rhs_norm;

  auto minv = [&](const DenseVector<Scalar>& p, DenseVector<Scalar>& out) {
    minv3(p, out, &fl);
  };

  auto finish = [&](SolveStatus status) {
    report.status = status;
    report.total_seconds = seconds_since(start);
    if (audit) {
      report.peak_m_vectors = audit->peak_m;
      report.peak_n_vectors = audit->peak_n;
    }
    return report;
  };

  if (bnorm == Scalar(0)) return finish(SolveStatus::converged);

  auto kernel_mark = SolveClock::now();
  auto kernel_begin = [&] { kernel_mark = SolveClock::now(); };
  auto kernel_end = [&] { report.kernel_seconds += seconds_since(kernel_mark); };

  try {
    kernel_begin();
    BidiagState<Scalar> gk = mgk_init(a, b, minv, &fl, audit);
    kernel_end();

    // ||A'b|| = beta_1 alpha_1 ||p_hat_1||; if it already satisfies the
    // stopping rule, x = 0 is the reported solution.
    const Scalar atb_norm = gk.breakdown ? Scalar(0) : bnorm * gk.alpha * gk.p_hat.norm();
    if (atb_norm <= cfg.tol * a1 * bnorm) return finish(SolveStatus::converged);
    if (gk.breakdown) return finish(SolveStatus::breakdown);

    if (cfg.on_p_hat) cfg.on_p_hat(0, gk.p_hat);

    kernel_begin();
    RotationState<Scalar> rot = lsmr_rotation_init(gk.alpha, gk.beta, gk.v_tilde, audit);
    kernel_end();

    DenseVector<Scalar> rbuf(a.rows());
    DenseVector<Scalar> atr(a.cols());
    if (audit) {
      audit->acquire_m(1);
      audit->acquire_n(1);
    }
    FlopCounter check;
    Scalar last_rnorm = bnorm;

    // Dominant-term vector work per outer step, on top of the rotation
    // update's 6n and whatever the preconditioner application charges.
    const double outer_vec_rate =
        method == SolverMethod::fmlsmr
            ? 6.0 * static_cast<double>(a.cols()) + 2.0 * static_cast<double>(a.rows())
            : 2.0 * static_cast<double>(a.cols()) + 2.0 * static_cast<double>(a.rows());

    for (Index k = 1; k <= cfg.max_iterations; ++k) {
      kernel_begin();
      const BidiagOutcome outcome = mgk_step(a, minv, gk, &fl, cfg.breakdown_epsilon);
      lsmr_rotation_update(rot, gk.alpha, gk.beta,
                           outcome == BidiagOutcome::advanced ? &gk.v_tilde : nullptr, &fl);
      fl.record_vector_work(outer_vec_rate);
      kernel_end();

      if (cfg.on_iterate) cfg.on_iterate(k, rot.x);
      if (cfg.on_p_hat && outcome != BidiagOutcome::breakdown_beta) cfg.on_p_hat(k, gk.p_hat);

      const bool over_budget =
          cfg.time_budget_seconds > 0.0 && seconds_since(start) > cfg.time_budget_seconds;
      const bool terminal =
          outcome != BidiagOutcome::advanced || k == cfg.max_iterations || over_budget;
      const bool do_check = terminal || k % cfg.residual_check_stride == 0;

      HistoryRecord<Scalar> row;
      row.iter = k;
      row.subproblem_residual = std::abs(rot.xi_bar);
      row.fresh_residual = do_check;

      bool converged = false;
      if (do_check) {
        matvec_into(a, rot.x, rbuf, &check);
        rbuf = b - rbuf;
        rmatvec_into(a, rbuf, atr, &check);
        const Scalar atr_norm = atr.norm();
        last_rnorm = rbuf.norm();
        row.atr_norm = atr_norm;
        row.nres = atr_norm / (a1 * (a1 * rot.x.norm() + bnorm));
        row.stewart_be = last_rnorm == Scalar(0) ? Scalar(0) : atr_norm / last_rnorm;
        converged = atr_norm <= cfg.tol * a1 * (bnorm + a1 * rot.x.norm());
      } else {
        // Between checks the subproblem residual stands in for ||A'r||
        // (exact for plain LSMR, the M^{-1}-metric value for MLSMR).
        row.atr_norm = std::abs(rot.xi_bar);
        row.nres = row.atr_norm / (a1 * (a1 * rot.x.norm() + bnorm));
        row.stewart_be = last_rnorm == Scalar(0) ? Scalar(0) : row.atr_norm / last_rnorm;
      }
      row.flops = fl.total();
      row.elapsed_seconds = seconds_since(start);
      report.history.push_back(row);
      report.iterations = k;

      if (converged || terminal) report.x = rot.x;
      if (converged) return finish(SolveStatus::converged);
      if (outcome != BidiagOutcome::advanced) {
        report.diagnostic = "bidiagonalization breakdown at outer step " + std::to_string(k);
        return finish(SolveStatus::breakdown);
      }
      if (over_budget) {
        report.diagnostic = "time budget exceeded at outer step " + std::to_string(k);
        return finish(SolveStatus::max_iterations);
      }
    }
    return finish(SolveStatus::max_iterations);
  } catch (const NumericalFault& fault) {
    report.diagnostic = std::string(fault.what()) + " (outer step " +
                        std::to_string(report.iterations + 1) + ")";
    return finish(SolveStatus::numerical_fault);
  }
}

/// Column of the cached product H = T_{k+1} P_k for the newest P column.
/// t_cols[l] holds rows 0..l of T's column l; p_col holds rows 0..j+1.
template <typename Scalar>
DenseVector<Scalar> product_column(const std::vector<DenseVector<Scalar>>& t_cols,
                                   const DenseVector<Scalar>& p_col) {
  const Index rows = p_col.size();  // j+2 entries for column j
  DenseVector<Scalar> h = DenseVector<Scalar>::Zero(rows);
  const Index have = static_cast<Index>(t_cols.size());
  for (Index l = 0; l < rows && l < have; ++l) {
    const DenseVector<Scalar>& t_col = t_cols[static_cast<std::size_t>(l)];
    const Scalar plj = p_col[l];
    if (plj == Scalar(0)) continue;
    for (Index i = 0; i <= l; ++i) h[i] += t_col[i] * plj;
  }
  return h;
}

/// Outer loop of flexible LSMR. apply_ninv(k, w, z, counter) realizes the
/// runtime preconditioner N_k. Each step appends one z/P column, keeps W/T
/// one column ahead, re-solves the reduced (k+1) x k problem from scratch
/// and forms x_k = Z_k y_k.
template <typename Scalar, typename ApplyNinv>
SolveReport<Scalar> run_flsmr_driver(const SparseMatrix<Scalar>& a,
                                     const DenseVector<Scalar>& b, ApplyNinv&& ninv4,
                                     const OuterConfig<Scalar>& cfg) {
  cfg.validate();
  if (b.size() != a.rows()) throw DimensionMismatch("flsmr_solve: len(b) != nrows");
  const auto start = SolveClock::now();

  SolveReport<Scalar> report;
  report.method = SolverMethod::flsmr;
  report.rows = a.rows();
  report.cols = a.cols();
  report.nnz = a.nnz();
  report.matrix_norm1 = one_norm(a);
  report.rhs_norm = b.norm();
  report.x = DenseVector<Scalar>::Zero(a.cols());

  FlopCounter& fl = report.flops;
  StorageAudit* audit = cfg.audit;
  const Scalar a1 = report.matrix_norm1;
  const Scalar bnorm = report.rhs_norm;

  auto ninv = [&](Index k, const DenseVector<Scalar>& w, DenseVector<Scalar>& z) {
    ninv4(k, w, z, &fl);
  };

  auto finish = [&](SolveStatus status) {
    report.status = status;
    report.total_seconds = seconds_since(start);
    if (audit) {
      report.peak_m_vectors = audit->peak_m;
      report.peak_n_vectors = audit->peak_n;
    }
    return report;
  };

  if (bnorm == Scalar(0)) return finish(SolveStatus::converged);

  auto kernel_mark = SolveClock::now();
  auto kernel_begin = [&] { kernel_mark = SolveClock::now(); };
  auto kernel_end = [&] { report.kernel_seconds += seconds_since(kernel_mark); };

  try {
    kernel_begin();
    FlexibleBasisState<Scalar> st = fgk_init(a, b, cfg.breakdown_epsilon, &fl, audit);
    kernel_end();

    // ||A'b|| = beta_1 t_{1,1}; the zero/near-zero case means x = 0 is done.
    if (bnorm * st.t11 <= cfg.tol * a1 * bnorm) return finish(SolveStatus::converged);
    if (st.breakdown) return finish(SolveStatus::breakdown);

    DenseVector<Scalar> rbuf(a.rows());
    DenseVector<Scalar> atr(a.cols());
    DenseVector<Scalar> x(a.cols());
    if (audit) {
      audit->acquire_m(1);
      audit->acquire_n(2);
    }
    FlopCounter check;
    Scalar last_rnorm = bnorm;
    std::vector<DenseVector<Scalar>> h_cols;  // cached columns of T_{k+1} P_k

    const double m = static_cast<double>(a.rows());
    const double n = static_cast<double>(a.cols());

    const Index iter_cap = cfg.basis_limit > 0
                               ? std::min(cfg.max_iterations, cfg.basis_limit)
                               : cfg.max_iterations;

    for (Index k = 1; k <= iter_cap; ++k) {
      kernel_begin();
      const bool u_ok = detail::fgk_expand_u(a, ninv, st, &fl);
      const bool w_ok = u_ok ? detail::fgk_expand_w(a, st, &fl) : false;
      const bool broke = !u_ok || !w_ok;

      h_cols.push_back(product_column(st.t_cols, st.p_cols.back()));

      // Dense (k+1) x k assembly of the cached product, then Givens QR.
      DenseMatrix<Scalar> h = DenseMatrix<Scalar>::Zero(k + 1, k);
      for (Index j = 0; j < k; ++j)
        h.col(j).head(h_cols[static_cast<std::size_t>(j)].size()) =
            h_cols[static_cast<std::size_t>(j)];
      HessenbergLsResult<Scalar> reduced = hessenberg_ls_solve(h, st.beta1 * st.t11);

      x.setZero();
      for (Index j = 0; j < k; ++j) x += reduced.y[j] * st.z[static_cast<std::size_t>(j)];

      // Growing-basis work at the dominant-term rates of the cost model.
      const double kd = static_cast<double>(k);
      fl.record_vector_work(2.0 * (m + n + 1.0) * (2.0 * kd - 1.0) +
                            (2.0 / 3.0) * (3.0 * kd * kd - 3.0 * kd + 1.0));
      kernel_end();

      if (cfg.on_iterate) cfg.on_iterate(k, x);

      const bool over_budget =
          cfg.time_budget_seconds > 0.0 && seconds_since(start) > cfg.time_budget_seconds;
      const bool terminal = broke || k == iter_cap || over_budget;
      const bool do_check = terminal || k % cfg.residual_check_stride == 0;

      HistoryRecord<Scalar> row;
      row.iter = k;
      row.subproblem_residual = reduced.residual_norm;
      row.fresh_residual = do_check;

      bool converged = false;
      if (do_check) {
        matvec_into(a, x, rbuf, &check);
        rbuf = b - rbuf;
        rmatvec_into(a, rbuf, atr, &check);
        const Scalar atr_norm = atr.norm();
        last_rnorm = rbuf.norm();
        row.atr_norm = atr_norm;
        row.nres = atr_norm / (a1 * (a1 * x.norm() + bnorm));
        row.stewart_be = last_rnorm == Scalar(0) ? Scalar(0) : atr_norm / last_rnorm;
        converged = atr_norm <= cfg.tol * a1 * (bnorm + a1 * x.norm());
      } else {
        // With an orthonormal W basis the reduced-problem residual equals
        // ||A'r_k||, so it serves as the between-checks estimate.
        row.atr_norm = reduced.residual_norm;
        row.nres = row.atr_norm / (a1 * (a1 * x.norm() + bnorm));
        row.stewart_be = last_rnorm == Scalar(0) ? Scalar(0) : row.atr_norm / last_rnorm;
      }
      row.flops = fl.total();
      row.elapsed_seconds = seconds_since(start);
      report.history.push_back(row);
      report.iterations = k;

      if (converged || terminal) report.x = x;
      if (converged) return finish(SolveStatus::converged);
      if (broke) {
        report.diagnostic = "flexible Golub-Kahan breakdown at outer step " + std::to_string(k);
        return finish(SolveStatus::breakdown);
      }
      if (over_budget) {
        report.diagnostic = "time budget exceeded at outer step " + std::to_string(k);
        return finish(SolveStatus::max_iterations);
      }
      if (k == iter_cap && cfg.basis_limit > 0 && iter_cap < cfg.max_iterations)
        report.diagnostic = "basis storage cap reached at " + std::to_string(k) + " columns";
    }
    return finish(SolveStatus::max_iterations);
  } catch (const NumericalFault& fault) {
    report.diagnostic = std::string(fault.what()) + " (outer step " +
                        std::to_string(report.iterations + 1) + ")";
    return finish(SolveStatus::numerical_fault);
  }
}

template <typename Scalar, typename F>
auto adapt_ninv(F&& f) {
  if constexpr (std::is_invocable_v<F&, Index, const DenseVector<Scalar>&,
                                    DenseVector<Scalar>&, FlopCounter*>) {
    return std::forward<F>(f);
  } else if constexpr (std::is_invocable_v<F&, Index, const DenseVector<Scalar>&,
                                           DenseVector<Scalar>&>) {
    return [g = std::forward<F>(f)](Index k, const DenseVector<Scalar>& w,
                                    DenseVector<Scalar>& z, FlopCounter*) mutable {
      g(k, w, z);
    };
  } else {
    // Step-independent preconditioners, e.g. a fixed SPD solver.
    return [g = std::forward<F>(f)](Index, const DenseVector<Scalar>& w,
                                    DenseVector<Scalar>& z, FlopCounter*) mutable { g(w, z); };
  }
}

}  // namespace detail

/// Plain LSMR: the merged driver with the identity preconditioner.
template <typename Scalar>
SolveReport<Scalar> lsmr_solve(const SparseMatrix<Scalar>& a, const DenseVector<Scalar>& b,
                               const OuterConfig<Scalar>& cfg = {}) {
  return detail::run_merged_driver(
      a, b,
      [](const DenseVector<Scalar>& p, DenseVector<Scalar>& out, FlopCounter*) { out = p; },
      cfg, SolverMethod::lsmr);
}

/// Modified LSMR with a caller-supplied fixed SPD inverse application,
/// callable as minv(p, out); one preconditioner solve per outer step. The
/// identity gives plain LSMR.
template <typename Scalar, typename ApplyMinv>
SolveReport<Scalar> mlsmr_solve(const SparseMatrix<Scalar>& a, const DenseVector<Scalar>& b,
                                ApplyMinv&& minv, const OuterConfig<Scalar>& cfg = {}) {
  return detail::run_merged_driver(a, b,
                                   detail::adapt_minv<Scalar>(std::forward<ApplyMinv>(minv)),
                                   cfg, SolverMethod::mlsmr);
}

/// Flexible modified LSMR: every preconditioner application is a fixed-budget
/// inner solve of A'A v = p from a zero guess, so the implicit preconditioner
/// varies from step to step.
template <typename Scalar>
SolveReport<Scalar> fmlsmr_solve(const SparseMatrix<Scalar>& a, const DenseVector<Scalar>& b,
                                 const OuterConfig<Scalar>& cfg) {
  cfg.inner.validate();
  auto minv = [&a, inner = cfg.inner](const DenseVector<Scalar>& p, DenseVector<Scalar>& out,
                                      FlopCounter* fl) { out = inner_solve(a, p, inner, fl); };
  return detail::run_merged_driver(a, b, minv, cfg, SolverMethod::fmlsmr);
}

/// Flexible LSMR with N_k realized by the same fixed-budget inner solve
/// applied to w_k.
template <typename Scalar>
SolveReport<Scalar> flsmr_solve(const SparseMatrix<Scalar>& a, const DenseVector<Scalar>& b,
                                const OuterConfig<Scalar>& cfg) {
  cfg.inner.validate();
  auto ninv = [&a, inner = cfg.inner](Index, const DenseVector<Scalar>& w,
                                      DenseVector<Scalar>& z, FlopCounter* fl) {
    z = inner_solve(a, w, inner, fl);
  };
  return detail::run_flsmr_driver(a, b, ninv, cfg);
}

/// Flexible LSMR with a caller-supplied preconditioner, callable either as
/// ninv(k, w, z) or step-independently as ninv(w, z); a constant SPD solve
/// makes the method comparable with MLSMR over the same search space.
template <typename Scalar, typename ApplyNinv>
SolveReport<Scalar> flsmr_solve(const SparseMatrix<Scalar>& a, const DenseVector<Scalar>& b,
                                ApplyNinv&& ninv, const OuterConfig<Scalar>& cfg) {
  return detail::run_flsmr_driver(a, b,
                                  detail::adapt_ninv<Scalar>(std::forward<ApplyNinv>(ninv)),
                                  cfg);
}

}  // namespace flexmr
