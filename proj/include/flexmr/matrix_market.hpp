#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "flexmr/sparse_matrix.hpp"

namespace flexmr {

namespace detail {

inline std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

inline bool parse_index(const std::string& tok, Index& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  long long v = 0;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) return false;
  out = static_cast<Index>(v);
  return true;
}

inline bool parse_real(const std::string& tok, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(tok, &pos);
    return pos == tok.size();
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace detail

/// Parses Matrix Market "coordinate real" (general or symmetric) and
/// "array real general" streams into CSR. Indices are 1-based in the file,
/// '%' starts a comment, blank lines are ignored. Symmetric storage is
/// expanded to both triangles and duplicate coordinate entries are summed.
template <typename Scalar = double>
SparseMatrix<Scalar> parse_matrix_market(std::istream& in) {
  using Triplet = typename SparseMatrix<Scalar>::Triplet;

  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw ParseError(1, "empty input, missing %%MatrixMarket header");
  ++lineno;

  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (detail::lower(banner) != "%%matrixmarket")
    throw ParseError(lineno, "malformed header, expected %%MatrixMarket banner");
  object = detail::lower(object);
  format = detail::lower(format);
  field = detail::lower(field);
  symmetry = detail::lower(symmetry);
  if (object != "matrix") throw ParseError(lineno, "unsupported object '" + object + "'");
  if (format != "coordinate" && format != "array")
    throw ParseError(lineno, "unsupported format '" + format + "'");
  if (field != "real")
    throw ParseError(lineno, "unsupported field '" + field + "', only real is accepted");
  const bool symmetric = symmetry == "symmetric";
  if (!symmetric && symmetry != "general")
    throw ParseError(lineno, "unsupported symmetry '" + symmetry + "'");
  if (format == "array" && symmetric)
    throw ParseError(lineno, "array symmetric storage is not supported");

  auto next_data_line = [&](std::string& out) -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      std::size_t i = 0;
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      if (i == line.size() || line[i] == '%') continue;
      out = line;
      return true;
    }
    return false;
  };

  std::string data;
  if (!next_data_line(data)) throw ParseError(lineno, "missing size line");

  std::istringstream size_line(data);
  Index nrows = -1, ncols = -1;
  std::string tok_r, tok_c;
  size_line >> tok_r >> tok_c;
  if (!detail::parse_index(tok_r, nrows) || !detail::parse_index(tok_c, ncols) || nrows < 0 ||
      ncols < 0)
    throw ParseError(lineno, "malformed size line");

  if (format == "coordinate") {
    std::string tok_nnz;
    size_line >> tok_nnz;
    Index nnz = -1;
    if (!detail::parse_index(tok_nnz, nnz) || nnz < 0)
      throw ParseError(lineno, "malformed size line, missing entry count");

    std::vector<Triplet> entries;
    entries.reserve(static_cast<std::size_t>(symmetric ? 2 * nnz : nnz));
    for (Index e = 0; e < nnz; ++e) {
      if (!next_data_line(data))
        throw ParseError(lineno, "truncated entry list, expected " + std::to_string(nnz) +
                                     " entries but found " + std::to_string(e));
      std::istringstream entry(data);
      std::string ti, tj, tv;
      entry >> ti >> tj >> tv;
      Index i = 0, j = 0;
      double v = 0.0;
      if (!detail::parse_index(ti, i) || !detail::parse_index(tj, j))
        throw ParseError(lineno, "malformed coordinate entry");
      if (tv.empty() || !detail::parse_real(tv, v))
        throw ParseError(lineno, "non-real value field");
      if (i < 1 || i > nrows || j < 1 || j > ncols)
        throw ParseError(lineno, "index out of range: (" + std::to_string(i) + ", " +
                                     std::to_string(j) + ")");
      entries.push_back({i - 1, j - 1, static_cast<Scalar>(v)});
      if (symmetric && i != j) entries.push_back({j - 1, i - 1, static_cast<Scalar>(v)});
    }
    return SparseMatrix<Scalar>::from_triplets(nrows, ncols, std::move(entries));
  }

  // Array format: column-major dense values, all kept as stored entries.
  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(nrows) * static_cast<std::size_t>(ncols));
  for (Index j = 0; j < ncols; ++j) {
    for (Index i = 0; i < nrows; ++i) {
      if (!next_data_line(data)) throw ParseError(lineno, "truncated array value list");
      std::istringstream entry(data);
      std::string tv;
      entry >> tv;
      double v = 0.0;
      if (!detail::parse_real(tv, v)) throw ParseError(lineno, "non-real value field");
      entries.push_back({i, j, static_cast<Scalar>(v)});
    }
  }
  return SparseMatrix<Scalar>::from_triplets(nrows, ncols, std::move(entries));
}

template <typename Scalar = double>
SparseMatrix<Scalar> parse_matrix_market(const std::string& text) {
  std::istringstream in(text);
  return parse_matrix_market<Scalar>(in);
}

template <typename Scalar = double>
SparseMatrix<Scalar> load_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open matrix file: " + path);
  return parse_matrix_market<Scalar>(in);
}

}  // namespace flexmr
