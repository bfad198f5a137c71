#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/SVD>

#include "flexmr/diagnostics.hpp"
#include "flexmr/solvers.hpp"
#include "test_support.hpp"

using namespace flexmr;

namespace {

DenseVector<double> dense_ls_solve(const DenseMatrix<double>& a, const DenseVector<double>& b) {
  return a.colPivHouseholderQr().solve(b);
}

}  // namespace

TEST_CASE("nres evaluates the normalized residual") {
  SparseMatrix<double> eye = SparseMatrix<double>::identity(3);
  DenseVector<double> b = DenseVector<double>::Unit(3, 0);
  CHECK(nres(eye, DenseVector<double>(DenseVector<double>::Zero(3)), b, 1.0) ==
        doctest::Approx(1.0));

  SparseMatrix<double> a = testsup::random_sparse(8, 5, 0.6, 1);
  DenseVector<double> rhs = testsup::random_vector(8, 2);
  const DenseMatrix<double> ad = to_dense(a);
  const DenseVector<double> ls = dense_ls_solve(ad, rhs);
  CHECK(nres(a, ls, rhs, one_norm(a)) <= 1e-14);

  const DenseVector<double> x = testsup::random_vector(5, 3);
  const double a1 = one_norm(a);
  const double expected = (ad.transpose() * (ad * x - rhs)).norm() /
                          (a1 * (a1 * x.norm() + rhs.norm()));
  CHECK(nres(a, x, rhs, a1) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("stewart backward error") {
  DenseMatrix<double> column(2, 1);
  column << 1, 0;
  SparseMatrix<double> a = SparseMatrix<double>::from_dense(column);
  DenseVector<double> b(2);
  b << 0, 1;
  DenseVector<double> x(1);
  x << 0;
  CHECK(stewart_backward_error(a, x, b) == 0.0);  // r orthogonal to the range

  SparseMatrix<double> r10 = testsup::random_sparse(10, 4, 0.6, 4);
  DenseVector<double> rhs = testsup::random_vector(10, 5);
  const DenseMatrix<double> ad = to_dense(r10);
  CHECK(stewart_backward_error(r10, dense_ls_solve(ad, rhs), rhs) <= 1e-13);

  // The rank-one perturbation E = -r r'A/||r||^2 makes x an exact solution
  // of the perturbed normal equation.
  const DenseVector<double> x4 = testsup::random_vector(4, 6);
  const DenseVector<double> r = rhs - ad * x4;
  const DenseMatrix<double> e = -(r * (r.transpose() * ad)) / r.squaredNorm();
  CHECK(std::abs(stewart_backward_error(r10, x4, rhs) -
                 e.jacobiSvd().singularValues()[0]) <= 1e-12);
  const DenseMatrix<double> pert = ad + e;
  CHECK((pert.transpose() * (rhs - pert * x4)).norm() <= 1e-12 * one_norm(r10));
}

TEST_CASE("one-sided Jacobi singular values match the library oracle") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    auto gen = testsup::rng(seed);
    const Index m = 3 + static_cast<Index>(gen() % 12);
    const Index n = 3 + static_cast<Index>(gen() % 12);
    DenseMatrix<double> a = seed % 3 == 0
                                ? testsup::random_rank_deficient(m, n, std::min(m, n) / 2 + 1,
                                                                 700 + seed)
                                : testsup::random_dense(m, n, 700 + seed);
    const DenseVector<double> ours = jacobi_singular_values(a);
    const DenseVector<double> expected =
        Eigen::JacobiSVD<DenseMatrix<double>>(a).singularValues();
    REQUIRE(ours.size() == expected.size());
    for (Index i = 0; i < ours.size(); ++i)
      CHECK(std::abs(ours[i] - expected[i]) <= 1e-12 * expected[0]);
  }
}

TEST_CASE("optimal backward error") {
  SparseMatrix<double> a = testsup::random_sparse(10, 4, 0.7, 7);
  DenseVector<double> b = testsup::random_vector(10, 8);
  const DenseMatrix<double> ad = to_dense(a);

  SUBCASE("vanishes at the least-squares solution") {
    CHECK(optimal_backward_error(a, dense_ls_solve(ad, b), b) <= 1e-12);
  }

  SUBCASE("matches a brute-force dense SVD of the augmented block") {
    const DenseVector<double> x = testsup::random_vector(4, 9);
    const DenseVector<double> r = b - ad * x;
    DenseMatrix<double> block(10, 14);
    block.leftCols(4) = ad;
    block.rightCols(10) =
        (r.norm() / x.norm()) * (DenseMatrix<double>::Identity(10, 10) -
                                 (r * r.transpose()) / r.squaredNorm());
    const DenseVector<double> sv = Eigen::JacobiSVD<DenseMatrix<double>>(block).singularValues();
    CHECK(std::abs(optimal_backward_error(a, x, b) - sv[sv.size() - 1]) <= 1e-10);
  }

  SUBCASE("never exceeds the Stewart estimate") {
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
      auto gen = testsup::rng(seed);
      const Index m = 4 + static_cast<Index>(gen() % 12);
      const Index n = 2 + static_cast<Index>(gen() % (m - 1));
      SparseMatrix<double> mat = testsup::random_sparse(m, n, 0.6, 800 + seed);
      DenseVector<double> rhs = testsup::random_vector(m, 900 + seed);
      DenseVector<double> x = testsup::random_vector(n, 1000 + seed);
      CHECK(optimal_backward_error(mat, x, rhs) <=
            stewart_backward_error(mat, x, rhs) * (1.0 + 1e-12));
    }
  }

  SUBCASE("signals the undefined and capped cases") {
    DenseVector<double> zero = DenseVector<double>::Zero(4);
    CHECK_THROWS_AS((void)optimal_backward_error(a, zero, b), std::invalid_argument);
    DenseVector<double> x = testsup::random_vector(4, 10);
    CHECK_THROWS_AS((void)optimal_backward_error(a, x, b, 10), std::length_error);
  }
}

TEST_CASE("flop model reproduces the cost table") {
  CostModel c;
  c.method = SolverMethod::lsmr;
  c.k = 1;
  c.m = c.n = 1;
  c.nnz = 1;
  CHECK(flop_model(c) == 14.0);  // 2*1*(2*1) + (8+2)*1

  // The ell = 0 collapse of the flexible-modified row.
  for (Index k : {1, 7, 50}) {
    CostModel f;
    f.method = SolverMethod::fmlsmr;
    f.k = k;
    f.ell = 0;
    f.m = 11;
    f.n = 6;
    f.nnz = 23;
    const double mv = 2.0 * f.nnz;
    CHECK(flop_model(f) == doctest::Approx(4.0 * k * mv + (12.0 * 6 + 2.0 * 11) * k));
  }

  // Same inner budget: the flexible-modified variant is cheaper than the
  // growing-basis one at scale.
  CostModel big;
  big.k = 100;
  big.ell = 8;
  big.m = big.n = 10000;
  big.nnz = 50000;
  big.method = SolverMethod::fmlsmr;
  const double fm = flop_model(big);
  big.method = SolverMethod::flsmr;
  const double fl = flop_model(big);
  CHECK(fm < fl);

  // Full symbolic substitution of every row.
  CostModel s;
  s.k = 13;
  s.ell = 5;
  s.m = 29;
  s.n = 17;
  s.nnz = 97;
  const double mv = 2.0 * 97, k = 13, ell = 5, m = 29, n = 17;
  s.method = SolverMethod::lsmr;
  CHECK(flop_model(s) == doctest::Approx(2 * k * mv + (8 * n + 2 * m) * k));
  s.method = SolverMethod::flsmr;
  CHECK(flop_model(s) == doctest::Approx((2 * ell + 4) * k * mv + 8 * k * ell * n +
                                         4 * k * ell * ell + (2.0 / 3.0) * k * k * k +
                                         2 * (m + n + 1) * k * k));
  s.method = SolverMethod::fmlsmr;
  CHECK(flop_model(s) == doctest::Approx((2 * ell + 4) * k * mv + 8 * k * ell * n +
                                         4 * k * ell * ell + (12 * n + 2 * m) * k));
}

TEST_CASE("storage model reproduces the table") {
  CostModel c;
  c.k = 10;
  c.method = SolverMethod::lsmr;
  StorageModel s = storage_model(c);
  CHECK(s.m_vectors == 3);
  CHECK(s.n_vectors == 5);
  CHECK(!s.basis_matrices);

  c.method = SolverMethod::flsmr;
  s = storage_model(c);
  CHECK(s.m_vectors == 14);
  CHECK(s.n_vectors == 13);
  CHECK(s.basis_matrices);

  c.method = SolverMethod::fmlsmr;
  c.k = 12345;  // independent of k
  s = storage_model(c);
  CHECK(s.m_vectors == 3);
  CHECK(s.n_vectors == 7);
  CHECK(!s.basis_matrices);
}

TEST_CASE("recorded kernel flops track the model within the dominant-term slack") {
  SparseMatrix<double> a = testsup::grid_gradient_matrix(26, 26);
  DenseVector<double> b = testsup::random_vector(a.rows(), 11);
  const Index k = 25;

  auto check_against_model = [&](const SolveReport<double>& report, Index ell) {
    REQUIRE(report.iterations >= 20);
    CostModel c;
    c.method = report.method;
    c.k = report.iterations;
    c.ell = ell;
    c.m = a.rows();
    c.n = a.cols();
    c.nnz = a.nnz();
    const double predicted = flop_model(c);
    CHECK(std::abs(report.flops.total() - predicted) <= 0.10 * predicted);
  };

  OuterConfig<double> cfg;
  cfg.max_iterations = k;
  check_against_model(lsmr_solve(a, b, cfg), 0);

  cfg.inner.steps = 8;
  check_against_model(fmlsmr_solve(a, b, cfg), 8);
  check_against_model(flsmr_solve(a, b, cfg), 8);
}

TEST_CASE("storage audit: constant working set for the merged driver") {
  SparseMatrix<double> a = testsup::grid_gradient_matrix(14, 14);
  DenseVector<double> b = testsup::random_vector(a.rows(), 12);
  for (Index cap : {20, 60}) {
    StorageAudit audit;
    OuterConfig<double> cfg;
    cfg.max_iterations = cap;
    cfg.inner.steps = 4;
    cfg.audit = &audit;
    SolveReport<double> report = fmlsmr_solve(a, b, cfg);
    CHECK(report.peak_m_vectors == 3);
    CHECK(report.peak_n_vectors == 7);
  }
}

TEST_CASE("storage audit: the flexible basis grows linearly") {
  SparseMatrix<double> a = testsup::grid_gradient_matrix(14, 14);
  DenseVector<double> b = testsup::random_vector(a.rows(), 13);
  Index peaks[2];
  const Index caps[2] = {10, 20};
  for (int i = 0; i < 2; ++i) {
    StorageAudit audit;
    OuterConfig<double> cfg;
    cfg.max_iterations = caps[i];
    cfg.inner.steps = 2;
    cfg.audit = &audit;
    SolveReport<double> report = flsmr_solve(a, b, cfg);
    REQUIRE(report.iterations == caps[i]);
    peaks[i] = audit.peak_m + audit.peak_n;
  }
  // Ten further steps retain one m-vector and two n-vectors each.
  CHECK(peaks[1] - peaks[0] == 3 * (caps[1] - caps[0]));
}
