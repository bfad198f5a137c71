#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <vector>

#include "flexmr/sparse_matrix.hpp"

namespace flexmr {

template <typename Scalar>
Scalar default_breakdown_epsilon() {
  return std::sqrt(std::numeric_limits<Scalar>::epsilon());
}

enum class BidiagOutcome { advanced, breakdown_beta, breakdown_alpha };

/// Dense right preconditioner for oracle runs: any nonsingular L together
/// with M = L'L. Production paths never form L; this exists so the merged
/// process can be cross-checked against the explicit two-solve process.
template <typename Scalar>
class TestPreconditioner {
 public:
  static TestPreconditioner from_factor(DenseMatrix<Scalar> l) {
    return TestPreconditioner(std::move(l));
  }

  /// Uses the upper Cholesky factor, so M = L'L holds exactly in structure.
  static TestPreconditioner from_spd(const DenseMatrix<Scalar>& m) {
    check_symmetric(m);
    Eigen::LLT<DenseMatrix<Scalar>> llt(m);
    if (llt.info() != Eigen::Success)
      throw NumericalFault("TestPreconditioner: Cholesky of M failed, matrix is not SPD");
    return TestPreconditioner(DenseMatrix<Scalar>(llt.matrixU()));
  }

  const DenseMatrix<Scalar>& factor() const { return l_; }
  const DenseMatrix<Scalar>& metric() const { return m_; }

  DenseVector<Scalar> solve_l(const DenseVector<Scalar>& x) const { return lu_l_.solve(x); }
  DenseVector<Scalar> solve_lt(const DenseVector<Scalar>& x) const { return lu_lt_.solve(x); }
  DenseVector<Scalar> solve_m(const DenseVector<Scalar>& x) const {
    return solve_l(solve_lt(x));
  }

 private:
  explicit TestPreconditioner(DenseMatrix<Scalar> l)
      : l_(std::move(l)), m_(l_.transpose() * l_), lu_l_(l_), lu_lt_(l_.transpose()) {
    if (l_.rows() != l_.cols())
      throw std::invalid_argument("TestPreconditioner: L must be square");
    if (!lu_l_.isInvertible())
      throw NumericalFault("TestPreconditioner: singular L");
    Eigen::LLT<DenseMatrix<Scalar>> llt(m_);
    if (llt.info() != Eigen::Success)
      throw NumericalFault("TestPreconditioner: Cholesky of M = L'L failed");
  }

  static void check_symmetric(const DenseMatrix<Scalar>& m) {
    const Scalar scale = m.cwiseAbs().maxCoeff();
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > Scalar(1e-12) * std::max(scale, Scalar(1)))
      throw NumericalFault("TestPreconditioner: M is not symmetric");
  }

  DenseMatrix<Scalar> l_;
  DenseMatrix<Scalar> m_;
  Eigen::FullPivLU<DenseMatrix<Scalar>> lu_l_;
  Eigen::FullPivLU<DenseMatrix<Scalar>> lu_lt_;
};

/// State of the explicit two-solve Golub-Kahan process on A L^{-1}.
template <typename Scalar>
struct GkExplicitState {
  DenseVector<Scalar> u;  // length m, unit norm
  DenseVector<Scalar> v;  // length n, unit norm (preconditioned-space basis)
  Scalar alpha = Scalar(0);
  Scalar beta = Scalar(0);
  Index step = 0;
  bool breakdown = false;
};

template <typename Scalar>
GkExplicitState<Scalar> gk_explicit_init(const SparseMatrix<Scalar>& a,
                                         const TestPreconditioner<Scalar>& pre,
                                         const DenseVector<Scalar>& b) {
  if (b.size() != a.rows()) throw DimensionMismatch("gk_explicit_init: len(b) != nrows");
  GkExplicitState<Scalar> st;
  st.beta = b.norm();
  if (st.beta == Scalar(0)) {
    st.breakdown = true;
    return st;
  }
  st.u = b / st.beta;
  DenseVector<Scalar> u_hat = pre.solve_lt(rmatvec(a, st.u));
  st.alpha = u_hat.norm();
  if (st.alpha == Scalar(0)) {
    st.breakdown = true;
    return st;
  }
  st.v = u_hat / st.alpha;
  return st;
}

/// One pass of the loop body: two triangular/dense solves with L and L',
/// producing (u_{k+1}, v_{k+1}, alpha_{k+1}, beta_{k+1}). Breakdown is a
/// terminal status, not a fault.
template <typename Scalar>
BidiagOutcome gk_explicit_step(const SparseMatrix<Scalar>& a,
                               const TestPreconditioner<Scalar>& pre,
                               GkExplicitState<Scalar>& st,
                               Scalar epsilon = default_breakdown_epsilon<Scalar>()) {
  if (st.breakdown) throw std::logic_error("gk_explicit_step: process already broke down");
  DenseVector<Scalar> v_tilde = pre.solve_l(st.v);
  DenseVector<Scalar> w = matvec(a, v_tilde);
  const Scalar w_norm = w.norm();
  w -= st.alpha * st.u;
  const Scalar beta_next = w.norm();
  if (beta_next <= epsilon * w_norm) {
    st.breakdown = true;
    st.beta = Scalar(0);
    st.alpha = Scalar(0);
    return BidiagOutcome::breakdown_beta;
  }
  st.u = w / beta_next;
  DenseVector<Scalar> u_hat = pre.solve_lt(rmatvec(a, st.u));
  const Scalar u_hat_norm = u_hat.norm();
  u_hat -= beta_next * st.v;
  const Scalar alpha_next = u_hat.norm();
  if (alpha_next <= epsilon * u_hat_norm) {
    st.breakdown = true;
    st.beta = beta_next;
    st.alpha = Scalar(0);
    return BidiagOutcome::breakdown_alpha;
  }
  st.v = u_hat / alpha_next;
  st.alpha = alpha_next;
  st.beta = beta_next;
  ++st.step;
  return BidiagOutcome::advanced;
}

/// State of the merged one-solve-per-step preconditioned Golub-Kahan
/// recurrence. p_hat tracks the normalized image M v_tilde, so each step
/// needs a single application of M^{-1}. The two workspace members keep the
/// per-step allocation footprint fixed.
template <typename Scalar>
struct BidiagState {
  DenseVector<Scalar> u;        // length m, unit norm
  DenseVector<Scalar> v_tilde;  // length n
  DenseVector<Scalar> p_hat;    // length n
  Scalar alpha = Scalar(0);
  Scalar beta = Scalar(0);
  Index step = 0;
  bool breakdown = false;

  DenseVector<Scalar> work_m;  // holds A v_tilde, then the new u
  DenseVector<Scalar> work_n;  // holds A'u, then the unnormalized p
};

/// Runs the start-up half of the merged process: beta_1, u_1, p_1, v_1,
/// alpha_1. apply_minv(p, out) must apply a fixed SPD inverse.
template <typename Scalar, typename ApplyMinv>
BidiagState<Scalar> mgk_init(const SparseMatrix<Scalar>& a, const DenseVector<Scalar>& b,
                             ApplyMinv&& apply_minv, FlopCounter* flops = nullptr,
                             StorageAudit* audit = nullptr) {
  if (b.size() != a.rows()) throw DimensionMismatch("mgk_init: len(b) != nrows");
  BidiagState<Scalar> st;
  st.u.resize(a.rows());
  st.work_m.resize(a.rows());
  st.v_tilde.resize(a.cols());
  st.p_hat.resize(a.cols());
  st.work_n.resize(a.cols());
  if (audit) {
    audit->acquire_m(2);
    audit->acquire_n(3);
  }
  st.beta = b.norm();
  if (st.beta == Scalar(0)) {
    st.breakdown = true;
    return st;
  }
  st.u = b / st.beta;
  rmatvec_into(a, st.u, st.work_n, flops);
  if (st.work_n.norm() == Scalar(0)) {
    st.breakdown = true;
    return st;
  }
  apply_minv(st.work_n, st.v_tilde);
  const Scalar gram = st.v_tilde.dot(st.work_n);
  if (gram < Scalar(0))
    throw NumericalFault("mgk_init: <v, p> < 0, preconditioner application is not SPD");
  st.alpha = std::sqrt(gram);
  if (st.alpha == Scalar(0) || !std::isfinite(static_cast<double>(st.alpha))) {
    st.breakdown = true;
    return st;
  }
  st.p_hat = st.work_n / st.alpha;
  st.v_tilde /= st.alpha;
  return st;
}

/// One merged step with exactly one inner solve:
///   beta u_next = A v - alpha u,  p = A'u_next - beta p_hat,
///   v_next = M^{-1} p,  alpha_next = sqrt(<v_next, p>),
/// then v_next and p_hat are rescaled by alpha_next.
///
/// Breakdown scales: the beta test uses ||A v||_2 as in the explicit
/// process; the alpha test uses ||A'u_next||_2, since the M^{-1}-weighted
/// norm of the raw vector would cost a second solve per step.
template <typename Scalar, typename ApplyMinv>
BidiagOutcome mgk_step(const SparseMatrix<Scalar>& a, ApplyMinv&& apply_minv,
                       BidiagState<Scalar>& st, FlopCounter* flops = nullptr,
                       Scalar epsilon = default_breakdown_epsilon<Scalar>()) {
  if (st.breakdown) throw std::logic_error("mgk_step: process already broke down");

  matvec_into(a, st.v_tilde, st.work_m, flops);
  const Scalar w_norm = st.work_m.norm();
  st.work_m -= st.alpha * st.u;
  const Scalar beta_next = st.work_m.norm();
  if (!std::isfinite(static_cast<double>(beta_next)))
    throw NumericalFault("mgk_step: non-finite beta");
  if (beta_next <= epsilon * w_norm) {
    st.breakdown = true;
    st.beta = Scalar(0);
    st.alpha = Scalar(0);
    return BidiagOutcome::breakdown_beta;
  }
  st.u = st.work_m / beta_next;

  rmatvec_into(a, st.u, st.work_n, flops);
  const Scalar raw_norm = st.work_n.norm();
  st.work_n -= beta_next * st.p_hat;
  if (st.work_n.norm() <= epsilon * raw_norm) {
    st.breakdown = true;
    st.beta = beta_next;
    st.alpha = Scalar(0);
    return BidiagOutcome::breakdown_alpha;
  }
  apply_minv(st.work_n, st.v_tilde);
  const Scalar gram = st.v_tilde.dot(st.work_n);
  if (!std::isfinite(static_cast<double>(gram)))
    throw NumericalFault("mgk_step: non-finite <v, p>");
  if (gram < Scalar(0))
    throw NumericalFault("mgk_step: <v, p> < 0, preconditioner application is not SPD");
  const Scalar alpha_next = std::sqrt(gram);
  if (alpha_next <= Scalar(0)) {
    st.breakdown = true;
    st.beta = beta_next;
    st.alpha = Scalar(0);
    return BidiagOutcome::breakdown_alpha;
  }
  st.p_hat = st.work_n / alpha_next;
  st.v_tilde /= alpha_next;
  st.alpha = alpha_next;
  st.beta = beta_next;
  ++st.step;
  return BidiagOutcome::advanced;
}

/// Rebuilds the (k+1) x k lower-bidiagonal factor from recorded
/// (alpha, beta) streams: alphas on the diagonal, betas below it.
/// alphas holds alpha_1..alpha_k, betas holds beta_2..beta_{k+1}.
template <typename Scalar>
DenseMatrix<Scalar> bidiagonal_from_streams(const std::vector<Scalar>& alphas,
                                            const std::vector<Scalar>& betas) {
  const Index k = static_cast<Index>(alphas.size());
  DenseMatrix<Scalar> b = DenseMatrix<Scalar>::Zero(k + 1, k);
  for (Index j = 0; j < k; ++j) {
    b(j, j) = alphas[static_cast<std::size_t>(j)];
    b(j + 1, j) = betas[static_cast<std::size_t>(j)];
  }
  return b;
}

/// Growing bases and coefficient matrices of the flexible Golub-Kahan
/// process. The invariant kept between steps: after k completed steps the
/// state holds Z_k, P_k of size (k+1) x k, and the one-column-ahead
/// W_{k+1}, T_{k+1} of size (k+1) x (k+1), so both factorization relations
/// A Z_k = U_{k+1} P_k and A' U_{k+1} = W_{k+1} T_{k+1} are closed.
template <typename Scalar>
struct FlexibleBasisState {
  std::vector<DenseVector<Scalar>> u_tilde;  // orthonormal, length m each
  std::vector<DenseVector<Scalar>> w;        // orthonormal, length n each
  std::vector<DenseVector<Scalar>> z;        // length n each
  std::vector<DenseVector<Scalar>> t_cols;   // column j holds rows 0..j
  std::vector<DenseVector<Scalar>> p_cols;   // column j holds rows 0..j+1

  Scalar beta1 = Scalar(0);  // ||b||
  Scalar t11 = Scalar(0);
  Index steps = 0;  // completed full steps (= z.size() when ahead)
  bool breakdown = false;
  BidiagOutcome last_outcome = BidiagOutcome::advanced;
  Scalar epsilon = default_breakdown_epsilon<Scalar>();
  StorageAudit* audit = nullptr;

  DenseMatrix<Scalar> t_matrix() const {
    const Index k = static_cast<Index>(t_cols.size());
    DenseMatrix<Scalar> t = DenseMatrix<Scalar>::Zero(k, k);
    for (Index j = 0; j < k; ++j)
      t.col(j).head(t_cols[static_cast<std::size_t>(j)].size()) =
          t_cols[static_cast<std::size_t>(j)];
    return t;
  }

  DenseMatrix<Scalar> p_matrix() const {
    const Index k = static_cast<Index>(p_cols.size());
    DenseMatrix<Scalar> p = DenseMatrix<Scalar>::Zero(k + 1, k);
    for (Index j = 0; j < k; ++j)
      p.col(j).head(p_cols[static_cast<std::size_t>(j)].size()) =
          p_cols[static_cast<std::size_t>(j)];
    return p;
  }

  DenseMatrix<Scalar> z_matrix() const { return stack(z); }
  DenseMatrix<Scalar> u_matrix() const { return stack(u_tilde); }
  DenseMatrix<Scalar> w_matrix() const { return stack(w); }

 private:
  static DenseMatrix<Scalar> stack(const std::vector<DenseVector<Scalar>>& cols) {
    if (cols.empty()) return DenseMatrix<Scalar>();
    DenseMatrix<Scalar> m(cols.front().size(), static_cast<Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) m.col(static_cast<Index>(j)) = cols[j];
    return m;
  }
};

namespace detail {

/// First half of a flexible step: v = A'u_j, single-pass Gram-Schmidt
/// against W exactly as the loop prescribes (coefficients taken against the
/// updated vector), new column of T, new w.
template <typename Scalar>
bool fgk_expand_w(const SparseMatrix<Scalar>& a, FlexibleBasisState<Scalar>& st,
                  FlopCounter* flops = nullptr) {
  const std::size_t j = st.w.size();  // building w_{j+1}, 0-based column j of T
  DenseVector<Scalar> v = rmatvec(a, st.u_tilde[j], flops);
  const Scalar xi = v.norm();
  DenseVector<Scalar> t_col(j + 1);
  for (std::size_t i = 0; i < j; ++i) {
    const Scalar coeff = v.dot(st.w[i]);
    v -= coeff * st.w[i];
    t_col[static_cast<Index>(i)] = coeff;
  }
  const Scalar diag = v.norm();
  if (diag <= st.epsilon * xi) {
    t_col[static_cast<Index>(j)] = Scalar(0);
    st.t_cols.push_back(std::move(t_col));
    st.breakdown = true;
    st.last_outcome = BidiagOutcome::breakdown_alpha;
    return false;
  }
  t_col[static_cast<Index>(j)] = diag;
  st.t_cols.push_back(std::move(t_col));
  st.w.push_back(v / diag);
  if (st.audit) st.audit->acquire_n();
  if (st.w.size() == 1) st.t11 = diag;
  return true;
}

/// Second half: solve N_j z_j = w_j, v = A z_j, Gram-Schmidt against the
/// u basis, new column of P, new u.
template <typename Scalar, typename ApplyNinv>
bool fgk_expand_u(const SparseMatrix<Scalar>& a, ApplyNinv&& apply_ninv,
                  FlexibleBasisState<Scalar>& st, FlopCounter* flops = nullptr) {
  const std::size_t j = st.z.size();  // building z_{j+1}, 0-based column j of P
  DenseVector<Scalar> zj(a.cols());
  apply_ninv(static_cast<Index>(j) + 1, st.w[j], zj);
  DenseVector<Scalar> v = matvec(a, zj, flops);
  st.z.push_back(std::move(zj));
  if (st.audit) st.audit->acquire_n();
  const Scalar xi = v.norm();
  DenseVector<Scalar> p_col(j + 2);
  for (std::size_t i = 0; i <= j; ++i) {
    const Scalar coeff = v.dot(st.u_tilde[i]);
    v -= coeff * st.u_tilde[i];
    p_col[static_cast<Index>(i)] = coeff;
  }
  const Scalar diag = v.norm();
  if (diag <= st.epsilon * xi) {
    p_col[static_cast<Index>(j) + 1] = Scalar(0);
    st.p_cols.push_back(std::move(p_col));
    st.breakdown = true;
    st.last_outcome = BidiagOutcome::breakdown_beta;
    return false;
  }
  p_col[static_cast<Index>(j) + 1] = diag;
  st.p_cols.push_back(std::move(p_col));
  st.u_tilde.push_back(v / diag);
  if (st.audit) st.audit->acquire_m();
  return true;
}

}  // namespace detail

/// Starts the flexible process: u_1 = b/||b||, then the first W/T column so
/// the state is one column ahead (see FlexibleBasisState).
template <typename Scalar>
FlexibleBasisState<Scalar> fgk_init(const SparseMatrix<Scalar>& a, const DenseVector<Scalar>& b,
                                    Scalar epsilon = default_breakdown_epsilon<Scalar>(),
                                    FlopCounter* flops = nullptr,
                                    StorageAudit* audit = nullptr) {
  if (b.size() != a.rows()) throw DimensionMismatch("fgk_init: len(b) != nrows");
  FlexibleBasisState<Scalar> st;
  st.epsilon = epsilon;
  st.audit = audit;
  st.beta1 = b.norm();
  if (st.beta1 == Scalar(0)) {
    st.breakdown = true;
    return st;
  }
  st.u_tilde.push_back(b / st.beta1);
  if (audit) audit->acquire_m();
  detail::fgk_expand_w(a, st, flops);
  return st;
}

/// One full flexible step: new z/P column from the runtime preconditioner,
/// then the next W/T column. apply_ninv(k, w, z) may change from call to
/// call. Returns false on breakdown.
template <typename Scalar, typename ApplyNinv>
bool fgk_step(const SparseMatrix<Scalar>& a, ApplyNinv&& apply_ninv,
              FlexibleBasisState<Scalar>& st, FlopCounter* flops = nullptr) {
  if (st.breakdown) throw std::logic_error("fgk_step: process already broke down");
  if (!detail::fgk_expand_u(a, apply_ninv, st, flops)) return false;
  if (!detail::fgk_expand_w(a, st, flops)) {
    st.steps += 1;  // the z/P column is complete, only the lookahead failed
    return false;
  }
  st.steps += 1;
  return true;
}

}  // namespace flexmr
