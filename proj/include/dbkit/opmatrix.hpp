#pragma once

// Matrix algebra over the fraction field of operator polynomials, plus
// module reduction (Hermite form) used for weak-equality tests.

#include <optional>
#include <string>
#include <vector>

#include "dbkit/opalg.hpp"

namespace dbkit {

class OpMatrix {
 public:
  OpMatrix() = default;
  OpMatrix(int nvars, size_t rows, size_t cols);

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  int nvars() const { return nvars_; }

  OpRat& at(size_t i, size_t j) { return a_[i * cols_ + j]; }
  const OpRat& at(size_t i, size_t j) const { return a_[i * cols_ + j]; }
  void set(size_t i, size_t j, const OpPoly& p) { a_[i * cols_ + j] = OpRat::of(p); }

  std::vector<std::string> row_labels, col_labels;

  bool operator==(const OpMatrix& o) const;

  static OpMatrix identity(int nvars, size_t n);
  OpMatrix operator*(const OpMatrix& o) const;  // kernel composition = entrywise op product
  OpMatrix substitute(int var, Int p, Int q) const;

  bool all_polynomial() const;

 private:
  int nvars_ = 0;
  size_t rows_ = 0, cols_ = 0;
  std::vector<OpRat> a_;
};

// Exact determinant over the fraction field; zero exactly when singular.
OpRat mat_det(const OpMatrix& m);

// Inverse with respect to kernel composition; throws SingularMatrix.
OpMatrix mat_inverse(const OpMatrix& m);

// Basis of the left kernel { v : v^T M = 0 }, entries cleared to polynomials,
// deterministic pivot order, first nonzero entry sign-positive.
std::vector<std::vector<OpPoly>> mat_left_kernel(const OpMatrix& m);

// Row module over the operator-polynomial ring, kept in echelon (Hermite) form.
// Rows are coefficient vectors over a fixed coordinate index set.
class HermiteBasis {
 public:
  HermiteBasis(int nvars, size_t width) : nvars_(nvars), width_(width) {}

  void add_row(const std::vector<OpPoly>& row);

  // Residual of v modulo the module; zero vector iff v is a member.
  std::vector<OpPoly> reduce(const std::vector<OpPoly>& v) const;
  bool contains(const std::vector<OpPoly>& v) const;

  size_t width() const { return width_; }

 private:
  int leftmost(const std::vector<OpPoly>& v) const;
  int nvars_;
  size_t width_;
  std::vector<std::vector<OpPoly>> pivots_;  // pivot column -> row, kept sorted by column
  std::vector<int> pivot_col_;
};

std::vector<OpPoly> hermite_reduce(const std::vector<OpPoly>& v,
                                   const std::vector<std::vector<OpPoly>>& basis, int nvars);

}  // namespace dbkit
