#include "dbkit/opmatrix.hpp"

#include <algorithm>

namespace dbkit {

OpMatrix::OpMatrix(int nvars, size_t rows, size_t cols)
    : row_labels(rows), col_labels(cols), nvars_(nvars), rows_(rows), cols_(cols) {
  a_.assign(rows * cols, OpRat(nvars));
}

bool OpMatrix::operator==(const OpMatrix& o) const {
  return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
}

OpMatrix OpMatrix::identity(int nvars, size_t n) {
  OpMatrix m(nvars, n, n);
  for (size_t i = 0; i < n; ++i) m.set(i, i, OpPoly::constant(nvars, 1));
  return m;
}

OpMatrix OpMatrix::operator*(const OpMatrix& o) const {
  if (cols_ != o.rows_) throw InternalError("matrix shape mismatch");
  OpMatrix r(nvars_, rows_, o.cols_);
  for (size_t i = 0; i < rows_; ++i)
    for (size_t j = 0; j < o.cols_; ++j) {
      OpRat s(nvars_);
      for (size_t k = 0; k < cols_; ++k) s = s + at(i, k) * o.at(k, j);
      r.at(i, j) = s;
    }
  return r;
}

OpMatrix OpMatrix::substitute(int var, Int p, Int q) const {
  OpMatrix r = *this;
  for (auto& x : r.a_) x = x.substitute(var, p, q);
  return r;
}

bool OpMatrix::all_polynomial() const {
  return std::all_of(a_.begin(), a_.end(), [](const OpRat& x) { return x.is_polynomial(); });
}

OpRat mat_det(const OpMatrix& m) {
  if (m.rows() != m.cols()) throw InternalError("determinant of non-square matrix");
  size_t n = m.rows();
  OpMatrix w = m;
  OpRat det = OpRat::of(OpPoly::constant(m.nvars(), 1));
  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    while (piv < n && w.at(piv, col).is_zero()) ++piv;
    if (piv == n) return OpRat(m.nvars());
    if (piv != col) {
      for (size_t j = 0; j < n; ++j) std::swap(w.at(piv, j), w.at(col, j));
      det = -det;
    }
    det = det * w.at(col, col);
    OpRat inv = w.at(col, col).inverse();
    for (size_t i = col + 1; i < n; ++i) {
      if (w.at(i, col).is_zero()) continue;
      OpRat f = w.at(i, col) * inv;
      for (size_t j = col; j < n; ++j) w.at(i, j) = w.at(i, j) - f * w.at(col, j);
    }
  }
  return det;
}

OpMatrix mat_inverse(const OpMatrix& m) {
  if (m.rows() != m.cols()) throw InternalError("inverse of non-square matrix");
  size_t n = m.rows();
  OpMatrix w = m;
  OpMatrix inv = OpMatrix::identity(m.nvars(), n);
  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    while (piv < n && w.at(piv, col).is_zero()) ++piv;
    if (piv == n) throw SingularMatrix("no pivot in column " + std::to_string(col + 1));
    if (piv != col)
      for (size_t j = 0; j < n; ++j) {
        std::swap(w.at(piv, j), w.at(col, j));
        std::swap(inv.at(piv, j), inv.at(col, j));
      }
    OpRat f = w.at(col, col).inverse();
    for (size_t j = 0; j < n; ++j) {
      w.at(col, j) = w.at(col, j) * f;
      inv.at(col, j) = inv.at(col, j) * f;
    }
    for (size_t i = 0; i < n; ++i) {
      if (i == col || w.at(i, col).is_zero()) continue;
      OpRat g = w.at(i, col);
      for (size_t j = 0; j < n; ++j) {
        w.at(i, j) = w.at(i, j) - g * w.at(col, j);
        inv.at(i, j) = inv.at(i, j) - g * inv.at(col, j);
      }
    }
  }
  inv.row_labels = m.row_labels;
  inv.col_labels = m.col_labels;
  return inv;
}

namespace {

// Deterministic normalization of a kernel vector: clear D-denominators, strip
// the common D-factor, make coefficients polynomial in the parameters and
// collectively primitive, and point the first nonzero entry positive.
std::vector<OpPoly> normalize_kernel_vector(std::vector<OpRat> v, int nvars) {
  OpPoly lcm = OpPoly::constant(nvars, 1);
  for (auto& x : v) {
    if (x.is_zero()) continue;
    OpPoly g = OpPoly::gcd(lcm, x.den());
    lcm = OpPoly::divmod(lcm * x.den(), g).first;
  }
  std::vector<OpPoly> w;
  w.reserve(v.size());
  for (auto& x : v) w.push_back((x * OpRat::of(lcm)).as_polynomial());
  OpPoly g(nvars);
  for (auto& x : w) g = OpPoly::gcd(g, x);
  if (g.degree() > 0)
    for (auto& x : w) x = OpPoly::divmod(x, g).first;
  // parameter-content normalization: lcm of denominators over gcd of numerators
  ParamPoly pden = ParamPoly::constant(nvars, 1);
  ParamPoly pnum(nvars);
  for (auto& x : w)
    for (auto& c : x.coeffs()) {
      if (c.is_zero()) continue;
      ParamPoly dg = ParamPoly::gcd(pden, c.den());
      pden = (pden * c.den()).divide_exact(dg);
      pnum = ParamPoly::gcd(pnum, c.num());
    }
  if (!pnum.is_zero()) {
    ParamRat scale(pden, pnum);
    for (auto& x : w) x = x * scale;
  }
  for (auto& x : w) {
    if (x.is_zero()) continue;
    int k = 0;
    while (x.coeff(k).is_zero()) ++k;
    if (x.coeff(k).sign() < 0)
      for (auto& y : w) y = -y;
    break;
  }
  return w;
}

}  // namespace

std::vector<std::vector<OpPoly>> mat_left_kernel(const OpMatrix& m) {
  // left kernel of M = right kernel of M^T
  size_t n = m.rows();  // unknowns
  size_t neq = m.cols();
  OpMatrix w(m.nvars(), neq, n);
  for (size_t i = 0; i < neq; ++i)
    for (size_t j = 0; j < n; ++j) w.at(i, j) = m.at(j, i);
  // reduced row echelon
  std::vector<int> pivot_of_col(n, -1);
  size_t r = 0;
  for (size_t col = 0; col < n && r < neq; ++col) {
    size_t piv = r;
    while (piv < neq && w.at(piv, col).is_zero()) ++piv;
    if (piv == neq) continue;
    if (piv != r)
      for (size_t j = 0; j < n; ++j) std::swap(w.at(piv, j), w.at(r, j));
    OpRat f = w.at(r, col).inverse();
    for (size_t j = 0; j < n; ++j) w.at(r, j) = w.at(r, j) * f;
    for (size_t i = 0; i < neq; ++i) {
      if (i == r || w.at(i, col).is_zero()) continue;
      OpRat g = w.at(i, col);
      for (size_t j = 0; j < n; ++j) w.at(i, j) = w.at(i, j) - g * w.at(r, j);
    }
    pivot_of_col[col] = static_cast<int>(r);
    ++r;
  }
  std::vector<std::vector<OpPoly>> basis;
  for (size_t free = 0; free < n; ++free) {
    if (pivot_of_col[free] >= 0) continue;
    std::vector<OpRat> v(n, OpRat(m.nvars()));
    v[free] = OpRat::of(OpPoly::constant(m.nvars(), 1));
    for (size_t col = 0; col < n; ++col)
      if (pivot_of_col[col] >= 0) v[col] = -w.at(pivot_of_col[col], free);
    basis.push_back(normalize_kernel_vector(std::move(v), m.nvars()));
  }
  return basis;
}

int HermiteBasis::leftmost(const std::vector<OpPoly>& v) const {
  for (size_t i = 0; i < v.size(); ++i)
    if (!v[i].is_zero()) return static_cast<int>(i);
  return -1;
}

void HermiteBasis::add_row(const std::vector<OpPoly>& row) {
  if (row.size() != width_) throw InternalError("row width mismatch");
  std::vector<std::vector<OpPoly>> queue{row};
  while (!queue.empty()) {
    std::vector<OpPoly> r = std::move(queue.back());
    queue.pop_back();
    for (;;) {
      int c = leftmost(r);
      if (c < 0) break;
      auto it = std::lower_bound(pivot_col_.begin(), pivot_col_.end(), c);
      size_t pos = static_cast<size_t>(it - pivot_col_.begin());
      if (it == pivot_col_.end() || *it != c) {
        // new pivot; make it monic for determinism
        ParamRat inv = r[c].lead().inverse();
        for (auto& x : r) x = x * inv;
        pivot_col_.insert(it, c);
        pivots_.insert(pivots_.begin() + pos, std::move(r));
        break;
      }
      std::vector<OpPoly>& p = pivots_[pos];
      auto [q, rem] = OpPoly::divmod(r[c], p[c]);
      if (!q.is_zero())
        for (size_t j = 0; j < width_; ++j) r[j] = r[j] - q * p[j];
      if (rem.is_zero()) continue;  // leftmost column advanced
      // deg rem < deg pivot: combine to the gcd, requeue the displaced rows
      OpPoly g, s, t;
      OpPoly::xgcd(p[c], r[c], g, s, t);
      std::vector<OpPoly> merged(width_, OpPoly(nvars_));
      for (size_t j = 0; j < width_; ++j) merged[j] = s * p[j] + t * r[j];
      OpPoly fp = OpPoly::divmod(p[c], g).first;
      OpPoly fr = OpPoly::divmod(r[c], g).first;
      std::vector<OpPoly> oldp = p;
      for (size_t j = 0; j < width_; ++j) {
        oldp[j] = oldp[j] - fp * merged[j];
        r[j] = r[j] - fr * merged[j];
      }
      pivots_[pos] = std::move(merged);
      queue.push_back(std::move(oldp));
      // continue reducing r (its leftmost column advanced past c)
    }
  }
}

std::vector<OpPoly> HermiteBasis::reduce(const std::vector<OpPoly>& v) const {
  std::vector<OpPoly> r = v;
  for (;;) {
    int c = leftmost(r);
    if (c < 0) return r;
    auto it = std::lower_bound(pivot_col_.begin(), pivot_col_.end(), c);
    if (it == pivot_col_.end() || *it != c) return r;
    const std::vector<OpPoly>& p = pivots_[it - pivot_col_.begin()];
    auto [q, rem] = OpPoly::divmod(r[c], p[c]);
    for (size_t j = 0; j < width_; ++j) r[j] = r[j] - q * p[j];
    if (!rem.is_zero()) return r;  // not a member; partially reduced
  }
}

bool HermiteBasis::contains(const std::vector<OpPoly>& v) const {
  auto r = reduce(v);
  return leftmost(r) < 0;
}

std::vector<OpPoly> hermite_reduce(const std::vector<OpPoly>& v,
                                   const std::vector<std::vector<OpPoly>>& basis, int nvars) {
  if (basis.empty()) return v;
  HermiteBasis h(nvars, v.size());
  for (auto& row : basis) h.add_row(row);
  return h.reduce(v);
}

}  // namespace dbkit
