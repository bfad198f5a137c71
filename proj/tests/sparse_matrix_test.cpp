#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "flexmr/matrix_market.hpp"
#include "flexmr/sparse_matrix.hpp"
#include "test_support.hpp"

using namespace flexmr;

TEST_CASE("coordinate general parsing") {
  const std::string text =
      "%%MatrixMarket matrix coordinate real general\n"
      "% survey data\n"
      "3 2 2\n"
      "1 1 1.0\n"
      "3 2 -2.0\n";
  SparseMatrix<double> a = parse_matrix_market(text);
  CHECK(a.rows() == 3);
  CHECK(a.cols() == 2);
  CHECK(a.nnz() == 2);
  DenseMatrix<double> d = to_dense(a);
  CHECK(d(0, 0) == 1.0);
  CHECK(d(2, 1) == -2.0);
  CHECK(d(1, 0) == 0.0);
}

TEST_CASE("symmetric storage expands to both triangles") {
  const std::string text =
      "%%MatrixMarket matrix coordinate real symmetric\n"
      "2 2 2\n"
      "1 1 2.0\n"
      "2 1 3.0\n";
  SparseMatrix<double> a = parse_matrix_market(text);
  DenseMatrix<double> d = to_dense(a);
  CHECK(d(0, 0) == 2.0);
  CHECK(d(1, 0) == 3.0);
  CHECK(d(0, 1) == 3.0);
  CHECK(d(1, 1) == 0.0);
  CHECK(a.nnz() == 3);
}

TEST_CASE("array format loads dense columns") {
  const std::string text =
      "%%MatrixMarket matrix array real general\n"
      "3 1\n"
      "1.5\n"
      "0.0\n"
      "-2.5\n";
  SparseMatrix<double> a = parse_matrix_market(text);
  CHECK(a.rows() == 3);
  CHECK(a.cols() == 1);
  CHECK(a.nnz() == 3);  // explicit zeros are stored entries
  DenseMatrix<double> d = to_dense(a);
  CHECK(d(0, 0) == 1.5);
  CHECK(d(1, 0) == 0.0);
  CHECK(d(2, 0) == -2.5);
}

TEST_CASE("duplicate coordinate entries are summed") {
  const std::string text =
      "%%MatrixMarket matrix coordinate real general\n"
      "2 2 3\n"
      "1 1 1.0\n"
      "1 1 2.5\n"
      "2 2 1.0\n";
  SparseMatrix<double> a = parse_matrix_market(text);
  CHECK(a.nnz() == 2);
  CHECK(to_dense(a)(0, 0) == 3.5);
}

TEST_CASE("parse failures carry line numbers") {
  auto line_of = [](const std::string& text) -> std::size_t {
    try {
      parse_matrix_market(text);
    } catch (const ParseError& err) {
      return err.line();
    }
    return 0;
  };
  CHECK(line_of("%%NotMarket matrix coordinate real general\n1 1 1\n1 1 1.0\n") == 1);
  CHECK(line_of("%%MatrixMarket matrix coordinate complex general\n1 1 1\n") == 1);
  CHECK(line_of("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n") == 3);
  CHECK(line_of("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 abc\n") == 3);
  CHECK(line_of("%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 1.0\n") == 3);
}

TEST_CASE("parsing is deterministic") {
  const std::string text =
      "%%MatrixMarket matrix coordinate real general\n"
      "4 3 5\n"
      "4 1 0.25\n"
      "1 3 -1.0\n"
      "2 2 0.5\n"
      "1 1 1.0\n"
      "3 3 2.0\n";
  SparseMatrix<double> a = parse_matrix_market(text);
  SparseMatrix<double> b = parse_matrix_market(text);
  CHECK(a.row_offsets() == b.row_offsets());
  CHECK(a.col_indices() == b.col_indices());
  CHECK(a.values() == b.values());
}

TEST_CASE("well1850 dimensions" * doctest::description("needs the published matrix file")) {
  const std::string path = testsup::data_file("well1850.mtx");
  if (path.empty()) {
    MESSAGE("well1850.mtx not present, skipping");
    return;
  }
  SparseMatrix<double> a = load_matrix_market(path);
  CHECK(a.rows() == 1850);
  CHECK(a.cols() == 712);
  CHECK(a.nnz() == 8755);
}

TEST_CASE("matvec basics and dense oracle") {
  SparseMatrix<double> eye = SparseMatrix<double>::identity(3);
  DenseVector<double> x(3);
  x << 1, 2, 3;
  CHECK(matvec(eye, x).isApprox(x));

  DenseMatrix<double> small(2, 2);
  small << 1, 2, 0, 3;
  SparseMatrix<double> a = SparseMatrix<double>::from_dense(small);
  DenseVector<double> ones = DenseVector<double>::Ones(2);
  DenseVector<double> y = matvec(a, ones);
  CHECK(y[0] == 3.0);
  CHECK(y[1] == 3.0);

  SparseMatrix<double> r = testsup::random_sparse(7, 5, 0.4, 42);
  DenseMatrix<double> rd = to_dense(r);
  DenseVector<double> v = testsup::random_vector(5, 7);
  CHECK((matvec(r, v) - rd * v).cwiseAbs().maxCoeff() <= 1e-14);

  DenseVector<double> wrong(4);
  CHECK_THROWS_AS((void)matvec(r, wrong), DimensionMismatch);
}

TEST_CASE("rmatvec basics and transpose oracle") {
  SparseMatrix<double> eye = SparseMatrix<double>::identity(3);
  DenseVector<double> y(3);
  y << 4, 5, 6;
  CHECK(rmatvec(eye, y).isApprox(y));

  DenseMatrix<double> small(2, 2);
  small << 1, 2, 0, 3;
  SparseMatrix<double> a = SparseMatrix<double>::from_dense(small);
  DenseVector<double> ones = DenseVector<double>::Ones(2);
  DenseVector<double> z = rmatvec(a, ones);
  CHECK(z[0] == 1.0);
  CHECK(z[1] == 5.0);

  SparseMatrix<double> r = testsup::random_sparse(7, 5, 0.4, 43);
  SparseMatrix<double> rt = SparseMatrix<double>::from_dense(to_dense(r).transpose());
  DenseVector<double> w = testsup::random_vector(7, 9);
  CHECK((rmatvec(r, w) - matvec(rt, w)).cwiseAbs().maxCoeff() <= 1e-14);

  DenseVector<double> wrong(5);
  CHECK_THROWS_AS((void)rmatvec(r, wrong), DimensionMismatch);
}

TEST_CASE("one_norm") {
  DenseMatrix<double> small(2, 2);
  small << 1, -2, 0, 3;
  CHECK(one_norm(SparseMatrix<double>::from_dense(small)) == 5.0);
  CHECK(one_norm(SparseMatrix<double>::identity(6)) == 1.0);

  SparseMatrix<double> r = testsup::random_sparse(6, 4, 0.5, 44);
  DenseMatrix<double> rd = to_dense(r);
  double expected = 0.0;
  for (Index j = 0; j < rd.cols(); ++j) {
    double colsum = 0.0;
    for (Index i = 0; i < rd.rows(); ++i) colsum += std::abs(rd(i, j));
    expected = std::max(expected, colsum);
  }
  CHECK(one_norm(r) == expected);
}

TEST_CASE("to_dense round trip and cap") {
  SparseMatrix<double> a = testsup::random_sparse(8, 6, 0.3, 45);
  DenseMatrix<double> d = to_dense(a);
  SparseMatrix<double> back = SparseMatrix<double>::from_dense(d);
  CHECK(to_dense(back).isApprox(d));

  CHECK(to_dense(SparseMatrix<double>::identity(2))
            .isApprox(DenseMatrix<double>::Identity(2, 2)));
  CHECK_THROWS_AS((void)to_dense(a, 10), std::length_error);
}

TEST_CASE("matvec/rmatvec adjointness property") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto gen = testsup::rng(seed);
    const Index m = 2 + static_cast<Index>(gen() % 20);
    const Index n = 1 + static_cast<Index>(gen() % 15);
    SparseMatrix<double> a = testsup::random_sparse(m, n, 0.35, seed * 7 + 1);
    DenseVector<double> x = testsup::random_vector(n, seed * 11 + 2);
    DenseVector<double> y = testsup::random_vector(m, seed * 13 + 3);
    const double lhs = matvec(a, x).dot(y);
    const double rhs = x.dot(rmatvec(a, y));
    CHECK(std::abs(lhs - rhs) <= 1e-12 * one_norm(a) * x.norm() * y.norm());
  }
}

TEST_CASE("flop counter records 2k nnz over k products") {
  SparseMatrix<double> a = testsup::random_sparse(9, 7, 0.4, 46);
  DenseVector<double> x = testsup::random_vector(7, 1);
  DenseVector<double> y = testsup::random_vector(9, 2);
  FlopCounter fl;
  for (int k = 0; k < 5; ++k) (void)matvec(a, x, &fl);
  CHECK(fl.matvec_calls == 5);
  CHECK(fl.mv_flops == 2.0 * 5 * a.nnz());
  for (int k = 0; k < 3; ++k) (void)rmatvec(a, y, &fl);
  CHECK(fl.rmatvec_calls == 3);
  CHECK(fl.mv_flops == 2.0 * 8 * a.nnz());
}

TEST_CASE("construction rejects invalid structure") {
  CHECK_THROWS(SparseMatrix<double>(2, 2, {0, 1}, {0}, {1.0}));          // offsets too short
  CHECK_THROWS(SparseMatrix<double>(2, 2, {0, 1, 1}, {3}, {1.0}));       // column range
  CHECK_THROWS(SparseMatrix<double>(1, 3, {0, 2}, {1, 1}, {1.0, 2.0}));  // non-increasing
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS(SparseMatrix<double>(1, 1, {0, 1}, {0}, {nan}));
}
