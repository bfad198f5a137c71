#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "flexmr/core.hpp"

namespace flexmr {

/// Immutable real m-by-n matrix in compressed sparse row form. Both matvec
/// and rmatvec run off the same storage (rmatvec as a scatter over rows), so
/// no column-compressed copy is ever materialized.
template <typename Scalar>
class SparseMatrix {
 public:
  struct Triplet {
    Index row;
    Index col;
    Scalar value;
  };

  SparseMatrix() = default;

  SparseMatrix(Index rows, Index cols, std::vector<Index> row_offsets,
               std::vector<Index> col_indices, std::vector<Scalar> values)
      : rows_(rows),
        cols_(cols),
        row_offsets_(std::move(row_offsets)),
        col_indices_(std::move(col_indices)),
        values_(std::move(values)) {
    validate();
  }

  /// Builds CSR from coordinate entries. Entries may arrive in any order;
  /// duplicates are summed. Explicit zeros are kept.
  static SparseMatrix from_triplets(Index rows, Index cols, std::vector<Triplet> entries) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("from_triplets: negative dimension");
    for (const Triplet& t : entries) {
      if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
        throw std::invalid_argument("from_triplets: index out of range");
    }
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    std::vector<Index> offsets(static_cast<std::size_t>(rows) + 1, 0);
    std::vector<Index> cols_out;
    std::vector<Scalar> vals_out;
    cols_out.reserve(entries.size());
    vals_out.reserve(entries.size());
    for (std::size_t i = 0; i < entries.size();) {
      std::size_t j = i + 1;
      Scalar sum = entries[i].value;
      while (j < entries.size() && entries[j].row == entries[i].row &&
             entries[j].col == entries[i].col) {
        sum += entries[j].value;
        ++j;
      }
      cols_out.push_back(entries[i].col);
      vals_out.push_back(sum);
      ++offsets[static_cast<std::size_t>(entries[i].row) + 1];
      i = j;
    }
    for (Index r = 0; r < rows; ++r) offsets[r + 1] += offsets[r];
    return SparseMatrix(rows, cols, std::move(offsets), std::move(cols_out), std::move(vals_out));
  }

  /// CSR copy of a dense matrix, dropping exact zeros.
  static SparseMatrix from_dense(const DenseMatrix<Scalar>& dense) {
    std::vector<Triplet> entries;
    for (Index i = 0; i < dense.rows(); ++i)
      for (Index j = 0; j < dense.cols(); ++j)
        if (dense(i, j) != Scalar(0)) entries.push_back({i, j, dense(i, j)});
    return from_triplets(dense.rows(), dense.cols(), std::move(entries));
  }

  static SparseMatrix identity(Index n) {
    std::vector<Index> offsets(static_cast<std::size_t>(n) + 1);
    std::vector<Index> cols(static_cast<std::size_t>(n));
    std::vector<Scalar> vals(static_cast<std::size_t>(n), Scalar(1));
    for (Index i = 0; i <= n; ++i) offsets[i] = i;
    for (Index i = 0; i < n; ++i) cols[i] = i;
    return SparseMatrix(n, n, std::move(offsets), std::move(cols), std::move(vals));
  }

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index nnz() const { return static_cast<Index>(values_.size()); }

  const std::vector<Index>& row_offsets() const { return row_offsets_; }
  const std::vector<Index>& col_indices() const { return col_indices_; }
  const std::vector<Scalar>& values() const { return values_; }

 private:
  void validate() const {
    if (rows_ < 0 || cols_ < 0) throw std::invalid_argument("SparseMatrix: negative dimension");
    if (row_offsets_.size() != static_cast<std::size_t>(rows_) + 1)
      throw std::invalid_argument("SparseMatrix: row_offsets length must be nrows+1");
    if (row_offsets_.front() != 0 ||
        row_offsets_.back() != static_cast<Index>(values_.size()) ||
        col_indices_.size() != values_.size())
      throw std::invalid_argument("SparseMatrix: offset/array sizes disagree");
    for (Index r = 0; r < rows_; ++r) {
      if (row_offsets_[r] > row_offsets_[r + 1])
        throw std::invalid_argument("SparseMatrix: row_offsets must be non-decreasing");
      for (Index k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
        if (col_indices_[k] < 0 || col_indices_[k] >= cols_)
          throw std::invalid_argument("SparseMatrix: column index out of range");
        if (k > row_offsets_[r] && col_indices_[k - 1] >= col_indices_[k])
          throw std::invalid_argument("SparseMatrix: columns must be strictly increasing per row");
        if (!std::isfinite(static_cast<double>(values_[k])))
          throw std::invalid_argument("SparseMatrix: non-finite stored value");
      }
    }
  }

  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Index> row_offsets_{0};
  std::vector<Index> col_indices_;
  std::vector<Scalar> values_;
};

/// y = A x. Cost recorded as one matvec (2*nnz flops).
template <typename Scalar>
void matvec_into(const SparseMatrix<Scalar>& a, const DenseVector<Scalar>& x,
                 DenseVector<Scalar>& y, FlopCounter* flops = nullptr) {
  if (x.size() != a.cols()) throw DimensionMismatch("matvec: len(x) != ncols");
  y.resize(a.rows());
  const auto& offs = a.row_offsets();
  const auto& cols = a.col_indices();
  const auto& vals = a.values();
  for (Index r = 0; r < a.rows(); ++r) {
    Scalar acc(0);
    for (Index k = offs[r]; k < offs[r + 1]; ++k) acc += vals[k] * x[cols[k]];
    y[r] = acc;
  }
  if (flops) flops->record_matvec(a.nnz());
}

template <typename Scalar>
DenseVector<Scalar> matvec(const SparseMatrix<Scalar>& a, const DenseVector<Scalar>& x,
                           FlopCounter* flops = nullptr) {
  DenseVector<Scalar> y;
  matvec_into(a, x, y, flops);
  return y;
}

/// z = A' y without materializing the transpose: rows of A scatter into z.
template <typename Scalar>
void rmatvec_into(const SparseMatrix<Scalar>& a, const DenseVector<Scalar>& y,
                  DenseVector<Scalar>& z, FlopCounter* flops = nullptr) {
  if (y.size() != a.rows()) throw DimensionMismatch("rmatvec: len(y) != nrows");
  z.resize(a.cols());
  z.setZero();
  const auto& offs = a.row_offsets();
  const auto& cols = a.col_indices();
  const auto& vals = a.values();
  for (Index r = 0; r < a.rows(); ++r) {
    const Scalar yr = y[r];
    for (Index k = offs[r]; k < offs[r + 1]; ++k) z[cols[k]] += vals[k] * yr;
  }
  if (flops) flops->record_rmatvec(a.nnz());
}

template <typename Scalar>
DenseVector<Scalar> rmatvec(const SparseMatrix<Scalar>& a, const DenseVector<Scalar>& y,
                            FlopCounter* flops = nullptr) {
  DenseVector<Scalar> z;
  rmatvec_into(a, y, z, flops);
  return z;
}

/// Matrix l1 norm: max column sum of absolute values.
template <typename Scalar>
Scalar one_norm(const SparseMatrix<Scalar>& a) {
  DenseVector<Scalar> colsum = DenseVector<Scalar>::Zero(a.cols());
  const auto& offs = a.row_offsets();
  const auto& cols = a.col_indices();
  const auto& vals = a.values();
  for (Index r = 0; r < a.rows(); ++r)
    for (Index k = offs[r]; k < offs[r + 1]; ++k)
      colsum[cols[k]] += std::abs(vals[k]);
  return a.cols() == 0 ? Scalar(0) : colsum.maxCoeff();
}

inline constexpr Index kDefaultDenseCap = 1000000;

template <typename Scalar>
DenseMatrix<Scalar> to_dense(const SparseMatrix<Scalar>& a, Index entry_cap = kDefaultDenseCap) {
  if (a.rows() * a.cols() > entry_cap)
    throw std::length_error("to_dense: nrows*ncols exceeds the dense cap");
  DenseMatrix<Scalar> d = DenseMatrix<Scalar>::Zero(a.rows(), a.cols());
  const auto& offs = a.row_offsets();
  const auto& cols = a.col_indices();
  const auto& vals = a.values();
  for (Index r = 0; r < a.rows(); ++r)
    for (Index k = offs[r]; k < offs[r + 1]; ++k) d(r, cols[k]) = vals[k];
  return d;
}

}  // namespace flexmr
