#pragma once

#include <cmath>
#include <limits>
#include <utility>

#include "flexmr/sparse_matrix.hpp"

namespace flexmr {

enum class SolverMethod { lsmr, mlsmr, flsmr, fmlsmr };

inline const char* to_string(SolverMethod m) {
  switch (m) {
    case SolverMethod::lsmr: return "lsmr";
    case SolverMethod::mlsmr: return "mlsmr";
    case SolverMethod::flsmr: return "flsmr";
    case SolverMethod::fmlsmr: return "fmlsmr";
  }
  return "unknown";
}

/// Normalized residual of the normal equation:
///   ||A'(Ax - b)||_2 / (||A||_1 (||A||_1 ||x||_2 + ||b||_2)).
template <typename Scalar>
Scalar nres(const SparseMatrix<Scalar>& a, const DenseVector<Scalar>& x,
            const DenseVector<Scalar>& b, Scalar a_norm1) {
  if (x.size() != a.cols() || b.size() != a.rows())
    throw DimensionMismatch("nres: operand lengths do not match A");
  const Scalar denom = a_norm1 * (a_norm1 * x.norm() + b.norm());
  if (denom == Scalar(0)) throw NumericalFault("nres: undefined, A (or A and b) is zero");
  DenseVector<Scalar> r = matvec(a, x);
  r -= b;
  return rmatvec(a, r).norm() / denom;
}

/// Computable backward-error estimate ||A'r||_2 / ||r||_2, the spectral norm
/// of the rank-one perturbation -r r'A / ||r||_2^2. Returns 0 for r = 0, the
/// consistent-system limit.
template <typename Scalar>
Scalar stewart_backward_error(const SparseMatrix<Scalar>& a, const DenseVector<Scalar>& x,
                              const DenseVector<Scalar>& b) {
  if (x.size() != a.cols() || b.size() != a.rows())
    throw DimensionMismatch("stewart_backward_error: operand lengths do not match A");
  DenseVector<Scalar> r = b - matvec(a, x);
  const Scalar rnorm = r.norm();
  if (rnorm == Scalar(0)) return Scalar(0);
  return rmatvec(a, r).norm() / rnorm;
}

/// Singular values of a dense matrix by one-sided Jacobi orthogonalization,
/// descending. Chosen over faster bidiagonalization schemes for its high
/// relative accuracy on the smallest singular value.
template <typename Scalar>
DenseVector<Scalar> jacobi_singular_values(DenseMatrix<Scalar> a, int max_sweeps = 60) {
  if (a.rows() < a.cols()) a = DenseMatrix<Scalar>(a.transpose());
  const Index q = a.cols();
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (Index i = 0; i + 1 < q; ++i) {
      for (Index j = i + 1; j < q; ++j) {
        const Scalar gii = a.col(i).squaredNorm();
        const Scalar gjj = a.col(j).squaredNorm();
        const Scalar gij = a.col(i).dot(a.col(j));
        if (std::abs(gij) <= eps * std::sqrt(gii * gjj)) continue;
        rotated = true;
        const Scalar tau = (gjj - gii) / (Scalar(2) * gij);
        const Scalar t = (tau >= Scalar(0) ? Scalar(1) : Scalar(-1)) /
                         (std::abs(tau) + std::hypot(Scalar(1), tau));
        const Scalar c = Scalar(1) / std::hypot(Scalar(1), t);
        const Scalar s = c * t;
        for (Index row = 0; row < a.rows(); ++row) {
          const Scalar ai = a(row, i);
          const Scalar aj = a(row, j);
          a(row, i) = c * ai - s * aj;
          a(row, j) = s * ai + c * aj;
        }
      }
    }
    if (!rotated) break;
  }

  DenseVector<Scalar> sigma(q);
  for (Index i = 0; i < q; ++i) sigma[i] = a.col(i).norm();
  std::sort(sigma.data(), sigma.data() + q, std::greater<Scalar>());
  return sigma;
}

inline constexpr Index kDefaultBackwardErrorCap = 2000;

/// Optimal least-squares backward error: the smallest singular value of the
/// m x (n+m) block [A, (||r||/||x||)(I - r r'/||r||^2)], evaluated densely.
template <typename Scalar>
Scalar optimal_backward_error(const SparseMatrix<Scalar>& a, const DenseVector<Scalar>& x,
                              const DenseVector<Scalar>& b,
                              Index dense_cap = kDefaultBackwardErrorCap) {
  if (x.size() != a.cols() || b.size() != a.rows())
    throw DimensionMismatch("optimal_backward_error: operand lengths do not match A");
  if (a.rows() + a.cols() > dense_cap)
    throw std::length_error("optimal_backward_error: m+n exceeds the dense cap");
  if (x.norm() == Scalar(0))
    throw std::invalid_argument("optimal_backward_error: undefined for x = 0");

  const Index m = a.rows();
  const Index n = a.cols();
  DenseVector<Scalar> r = b - matvec(a, x);
  const Scalar rnorm = r.norm();
  if (rnorm == Scalar(0)) return Scalar(0);
  const Scalar eta = rnorm / x.norm();

  DenseMatrix<Scalar> block(m, n + m);
  block.leftCols(n) = to_dense(a, m * n + 1);
  block.rightCols(m) = eta * (DenseMatrix<Scalar>::Identity(m, m) -
                              (r * r.transpose()) / (rnorm * rnorm));
  const DenseVector<Scalar> sigma = jacobi_singular_values(std::move(block));
  return sigma[sigma.size() - 1];
}

/// Dimensions and counts the dominant-term cost formulas are built from.
struct CostModel {
  SolverMethod method = SolverMethod::lsmr;
  Index k = 0;    // outer iterations
  Index ell = 0;  // inner steps per outer iteration (flexible methods)
  Index m = 0;
  Index n = 0;
  Index nnz = 0;

  void validate() const {
    if (k < 0 || ell < 0 || m < 0 || n < 0 || nnz < 0)
      throw std::invalid_argument("CostModel: counts must be >= 0");
  }
};

/// Dominant-term flop count after k outer iterations, with one matrix
/// product costed at MV = 2 nnz. The mlsmr method maps to the lsmr row:
/// its extra cost is the caller's M-solve, which the model does not price.
inline double flop_model(const CostModel& c) {
  c.validate();
  const double mv = 2.0 * static_cast<double>(c.nnz);
  const double k = static_cast<double>(c.k);
  const double ell = static_cast<double>(c.ell);
  const double m = static_cast<double>(c.m);
  const double n = static_cast<double>(c.n);
  switch (c.method) {
    case SolverMethod::lsmr:
    case SolverMethod::mlsmr:
      return 2.0 * k * mv + (8.0 * n + 2.0 * m) * k;
    case SolverMethod::flsmr:
      return (2.0 * ell + 4.0) * k * mv + 8.0 * k * ell * n + 4.0 * k * ell * ell +
             (2.0 / 3.0) * k * k * k + 2.0 * (m + n + 1.0) * k * k;
    case SolverMethod::fmlsmr:
      return (2.0 * ell + 4.0) * k * mv + 8.0 * k * ell * n + 4.0 * k * ell * ell +
             (12.0 * n + 2.0 * m) * k;
  }
  return 0.0;
}

struct StorageModel {
  Index m_vectors = 0;
  Index n_vectors = 0;
  bool basis_matrices = false;  // T_{k+1}, P_{k+1} retained
};

/// Retained-vector counts at the k-th iteration. Only the flexible
/// Golub-Kahan method keeps growing bases and coefficient matrices.
inline StorageModel storage_model(const CostModel& c) {
  c.validate();
  switch (c.method) {
    case SolverMethod::lsmr:
    case SolverMethod::mlsmr:
      return {3, 5, false};
    case SolverMethod::flsmr:
      return {c.k + 4, c.k + 3, true};
    case SolverMethod::fmlsmr:
      return {3, 7, false};
  }
  return {};
}

}  // namespace flexmr
