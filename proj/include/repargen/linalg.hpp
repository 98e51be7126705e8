#pragma once

#include <cstddef>
#include <vector>

#include "repargen/polynomial.hpp"

namespace repargen {

using Vector = std::vector<Rational>;
using Matrix = std::vector<Vector>;

struct Rref {
  Matrix rows;  // nonzero rows of the reduced row echelon form
  std::vector<std::size_t> pivots;
  std::size_t rank() const { return pivots.size(); }
};

Rref rref(Matrix m, std::size_t cols);

// Canonical nullspace basis: one vector per free column f with entry 1 at f,
// 0 at the other free columns and -R[p][f] at each pivot column p.
std::vector<Vector> nullspace(const Rref& r, std::size_t cols);
std::vector<Vector> nullspace(const Matrix& m, std::size_t cols);

std::size_t rank(const Matrix& m, std::size_t cols);

// Row echelon form that grows one row at a time; add_row reports whether the
// row was independent of the rows already present.
class IncrementalEchelon {
 public:
  explicit IncrementalEchelon(std::size_t cols) : cols_(cols), pivot_row_(cols, npos) {}
  bool add_row(Vector row);
  std::size_t rank() const { return rows_.size(); }
  std::size_t cols() const { return cols_; }
  Matrix rows() const { return rows_; }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t cols_;
  Matrix rows_;
  std::vector<std::size_t> pivot_row_;
};

// Sparse homogeneous system over Q (rows are sorted by column index).
struct SparseSystem {
  std::size_t cols = 0;
  std::vector<SparseRow> rows;
};

// Nullspace of a sparse system, returned as sparse vectors in the same
// canonical convention as nullspace(). Rows with a single nonzero are
// propagated first; the remainder is reduced with leftmost pivots.
std::vector<SparseRow> sparse_nullspace(const SparseSystem& s);

}  // namespace repargen
