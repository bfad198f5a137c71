#pragma once

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <vector>

#include "flexmr/sparse_matrix.hpp"

namespace flexmr {

enum class InnerMethod { minres, cg };

/// Fixed-budget configuration for the approximate inner solve of
/// (A'A + shift I) v = p. The budget, not a tolerance, is the contract;
/// early exit happens only on an exact Lanczos breakdown or a numerically
/// exact residual.
template <typename Scalar>
struct InnerSolverConfig {
  InnerMethod method = InnerMethod::minres;
  Index steps = 1;
  Scalar shift = Scalar(0);
  bool zero_init = true;  // the only supported mode; kept for the record

  void validate() const {
    if (steps < 1) throw std::invalid_argument("InnerSolverConfig: steps must be >= 1");
    if (!(shift >= Scalar(0)) || !std::isfinite(static_cast<double>(shift)))
      throw std::invalid_argument("InnerSolverConfig: shift must be finite and >= 0");
    if (!zero_init) throw std::invalid_argument("InnerSolverConfig: only zero_init is supported");
  }
};

/// Optional per-call instrumentation for the inner solvers.
template <typename Scalar>
struct InnerStats {
  Index steps_taken = 0;
  bool stagnated = false;
  bool exhausted = false;                 // exact Lanczos/CG breakdown
  std::vector<Scalar> residual_estimates;  // recurrence-based, one per step
};

namespace detail {

/// y = (A'A + shift I) x through one matvec and one rmatvec.
template <typename Scalar>
void normal_apply(const SparseMatrix<Scalar>& a, const DenseVector<Scalar>& x, Scalar shift,
                  DenseVector<Scalar>& tmp_m, DenseVector<Scalar>& y, FlopCounter* flops) {
  matvec_into(a, x, tmp_m, flops);
  rmatvec_into(a, tmp_m, y, flops);
  if (shift != Scalar(0)) y += shift * x;
}

template <typename Scalar>
void check_finite(Scalar value, const char* where) {
  if (!std::isfinite(static_cast<double>(value)))
    throw NumericalFault(std::string(where) + ": non-finite value mid-iteration");
}

}  // namespace detail

/// MINRES on the normal-type system, zero initial guess, exactly cfg.steps
/// Lanczos iterations (2 matrix products each) unless the recurrence breaks
/// down exactly. Symbolic vector work is charged at 8n per step plus the
/// quadratic orthogonalization term.
template <typename Scalar>
DenseVector<Scalar> minres_normal(const SparseMatrix<Scalar>& a, const DenseVector<Scalar>& p,
                                  const InnerSolverConfig<Scalar>& cfg,
                                  FlopCounter* flops = nullptr,
                                  InnerStats<Scalar>* stats = nullptr) {
  cfg.validate();
  if (p.size() != a.cols()) throw DimensionMismatch("minres_normal: len(p) != ncols");
  const Index n = a.cols();
  DenseVector<Scalar> x = DenseVector<Scalar>::Zero(n);

  const Scalar beta1 = p.norm();
  if (beta1 == Scalar(0)) return x;
  const Scalar exact_tol = Scalar(1e-14) * beta1;

  DenseVector<Scalar> v_prev = DenseVector<Scalar>::Zero(n);
  DenseVector<Scalar> v_cur = p / beta1;
  DenseVector<Scalar> y(n);
  DenseVector<Scalar> tmp_m(a.rows());
  DenseVector<Scalar> d = DenseVector<Scalar>::Zero(n);
  DenseVector<Scalar> d1 = DenseVector<Scalar>::Zero(n);
  DenseVector<Scalar> d2 = DenseVector<Scalar>::Zero(n);

  Scalar beta = beta1;
  Scalar cs = Scalar(-1), sn = Scalar(0);
  Scalar dbar = Scalar(0), epsln = Scalar(0);
  Scalar phibar = beta1;

  Index taken = 0;
  for (Index j = 0; j < cfg.steps; ++j) {
    detail::normal_apply(a, v_cur, cfg.shift, tmp_m, y, flops);
    if (j > 0) y -= beta * v_prev;
    const Scalar alpha = v_cur.dot(y);
    detail::check_finite(alpha, "minres_normal");
    y -= alpha * v_cur;
    const Scalar beta_next = y.norm();
    detail::check_finite(beta_next, "minres_normal");

    const Scalar oldeps = epsln;
    const Scalar delta = cs * dbar + sn * alpha;
    const Scalar gbar = sn * dbar - cs * alpha;
    epsln = sn * beta_next;
    dbar = -cs * beta_next;

    Scalar gamma = std::hypot(gbar, beta_next);
    gamma = std::max(gamma, std::numeric_limits<Scalar>::min());
    cs = gbar / gamma;
    sn = beta_next / gamma;
    const Scalar phi = cs * phibar;
    phibar = sn * phibar;

    d2.swap(d1);
    d1.swap(d);
    d = (v_cur - oldeps * d2 - delta * d1) / gamma;
    x += phi * d;
    ++taken;
    if (stats) stats->residual_estimates.push_back(std::abs(phibar));

    if (beta_next <= std::numeric_limits<Scalar>::epsilon() * beta1) {
      if (stats) stats->exhausted = true;
      break;
    }
    if (std::abs(phibar) <= exact_tol) break;
    v_prev.swap(v_cur);
    v_cur = y / beta_next;
    beta = beta_next;
  }
  if (stats) stats->steps_taken = taken;
  if (flops)
    flops->record_vector_work(8.0 * static_cast<double>(taken) * static_cast<double>(n) +
                              4.0 * static_cast<double>(taken) * static_cast<double>(taken));
  return x;
}

/// Conjugate gradients on the same system. Rank-deficient A with zero shift
/// can make a search direction curvature-free; that is reported through
/// stats->stagnated, not as a fault.
template <typename Scalar>
DenseVector<Scalar> cg_normal(const SparseMatrix<Scalar>& a, const DenseVector<Scalar>& p,
                              const InnerSolverConfig<Scalar>& cfg, FlopCounter* flops = nullptr,
                              InnerStats<Scalar>* stats = nullptr) {
  cfg.validate();
  if (p.size() != a.cols()) throw DimensionMismatch("cg_normal: len(p) != ncols");
  const Index n = a.cols();
  DenseVector<Scalar> x = DenseVector<Scalar>::Zero(n);
  const Scalar pnorm = p.norm();
  if (pnorm == Scalar(0)) return x;
  const Scalar exact_tol = Scalar(1e-14) * pnorm;

  DenseVector<Scalar> r = p;
  DenseVector<Scalar> d = p;
  DenseVector<Scalar> q(n);
  DenseVector<Scalar> tmp_m(a.rows());
  Scalar rr = r.squaredNorm();

  Index taken = 0;
  for (Index j = 0; j < cfg.steps; ++j) {
    detail::normal_apply(a, d, cfg.shift, tmp_m, q, flops);
    const Scalar dq = d.dot(q);
    detail::check_finite(dq, "cg_normal");
    if (dq <= Scalar(0)) {
      if (stats) stats->stagnated = true;
      break;
    }
    const Scalar step = rr / dq;
    x += step * d;
    r -= step * q;
    const Scalar rr_next = r.squaredNorm();
    detail::check_finite(rr_next, "cg_normal");
    ++taken;
    if (stats) stats->residual_estimates.push_back(std::sqrt(rr_next));
    if (std::sqrt(rr_next) <= exact_tol) {
      if (stats) stats->exhausted = true;
      break;
    }
    d = r + (rr_next / rr) * d;
    rr = rr_next;
  }
  if (stats) stats->steps_taken = taken;
  if (flops)
    flops->record_vector_work(8.0 * static_cast<double>(taken) * static_cast<double>(n) +
                              4.0 * static_cast<double>(taken) * static_cast<double>(taken));
  return x;
}

template <typename Scalar>
DenseVector<Scalar> inner_solve(const SparseMatrix<Scalar>& a, const DenseVector<Scalar>& p,
                                const InnerSolverConfig<Scalar>& cfg,
                                FlopCounter* flops = nullptr,
                                InnerStats<Scalar>* stats = nullptr) {
  return cfg.method == InnerMethod::minres ? minres_normal(a, p, cfg, flops, stats)
                                           : cg_normal(a, p, cfg, flops, stats);
}

/// Dense SPD solve behind a one-time Cholesky factorization. Construct once
/// per M and reuse; the callable form plugs directly into the solvers.
template <typename Scalar>
class FixedSpdSolver {
 public:
  explicit FixedSpdSolver(DenseMatrix<Scalar> m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) throw std::invalid_argument("FixedSpdSolver: M must be square");
    const Scalar scale = std::max(m_.cwiseAbs().maxCoeff(), Scalar(1));
    if ((m_ - m_.transpose()).cwiseAbs().maxCoeff() > Scalar(1e-12) * scale)
      throw NumericalFault("FixedSpdSolver: M is not symmetric");
    llt_.compute(m_);
    if (llt_.info() != Eigen::Success)
      throw NumericalFault("FixedSpdSolver: Cholesky failed, M is not positive definite");
  }

  const DenseMatrix<Scalar>& matrix() const { return m_; }

  DenseVector<Scalar> solve(const DenseVector<Scalar>& p) const {
    if (p.size() != m_.rows()) throw DimensionMismatch("FixedSpdSolver: length mismatch");
    return llt_.solve(p);
  }

  void operator()(const DenseVector<Scalar>& p, DenseVector<Scalar>& out) const {
    out = solve(p);
  }

 private:
  DenseMatrix<Scalar> m_;
  Eigen::LLT<DenseMatrix<Scalar>> llt_;
};

/// One-shot convenience; prefer FixedSpdSolver when the same M is applied
/// repeatedly.
template <typename Scalar>
DenseVector<Scalar> apply_fixed_spd(const DenseMatrix<Scalar>& m, const DenseVector<Scalar>& p) {
  return FixedSpdSolver<Scalar>(m).solve(p);
}

/// Identity preconditioner; turns the merged drivers into plain LSMR.
template <typename Scalar>
struct IdentityPreconditioner {
  void operator()(const DenseVector<Scalar>& p, DenseVector<Scalar>& out) const { out = p; }
};

}  // namespace flexmr
