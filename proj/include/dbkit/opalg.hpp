#pragma once

// Polynomials and rational functions in the spatial-derivative symbol D.
// An OpPoly with coefficients c0..cn stands for the distributional kernel
//   sum_k c_k d_y^k delta(y - x),
// and composition of two such kernels multiplies the polynomials.

#include <complex>
#include <string>
#include <vector>

#include "dbkit/exact.hpp"

namespace dbkit {

class OpPoly {
 public:
  OpPoly() = default;
  explicit OpPoly(int nvars) : nvars_(nvars) {}
  OpPoly(int nvars, std::vector<ParamRat> coeffs);
  static OpPoly constant(int nvars, const ParamRat& c);
  static OpPoly constant(int nvars, Int p, Int q = 1);
  static OpPoly d(int nvars, int power = 1);  // D^power

  int nvars() const { return nvars_; }
  bool is_zero() const { return c_.empty(); }
  int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for zero
  ParamRat coeff(int k) const;
  const std::vector<ParamRat>& coeffs() const { return c_; }
  const ParamRat& lead() const;

  OpPoly operator+(const OpPoly& o) const;
  OpPoly operator-(const OpPoly& o) const;
  OpPoly operator-() const;
  OpPoly operator*(const OpPoly& o) const;
  OpPoly operator*(const ParamRat& s) const;

  bool operator==(const OpPoly& o) const { return nvars_ == o.nvars_ && c_ == o.c_; }
  bool operator!=(const OpPoly& o) const { return !(*this == o); }
  bool operator<(const OpPoly& o) const;

  // D -> -D, the transpose under integration by parts.
  OpPoly adjoint() const;

  bool has_constant_term() const { return !is_zero() && !c_[0].is_zero(); }
  bool divisible_by_d() const { return is_zero() || c_[0].is_zero(); }

  OpPoly substitute(int var, Int p, Int q) const;
  std::complex<double> eval(const std::vector<double>& params, std::complex<double> symbol) const;

  // (quotient, remainder) with deg rem < deg divisor; coefficients are a field.
  static std::pair<OpPoly, OpPoly> divmod(const OpPoly& a, const OpPoly& b);
  static OpPoly gcd(const OpPoly& a, const OpPoly& b);  // monic
  static void xgcd(const OpPoly& a, const OpPoly& b, OpPoly& g, OpPoly& s, OpPoly& t);

  std::string str(const std::vector<std::string>& names) const;         // polynomial in D
  std::string kernel_str(const std::vector<std::string>& names) const;  // delta-kernel rendering

 private:
  void trim();
  int nvars_ = 0;
  std::vector<ParamRat> c_;
};

// Reduced fraction num/den of OpPoly, den monic and nonzero.
class OpRat {
 public:
  OpRat() = default;
  explicit OpRat(int nvars);
  OpRat(const OpPoly& n, const OpPoly& d);
  static OpRat of(const OpPoly& p);

  int nvars() const { return num_.nvars(); }
  bool is_zero() const { return num_.is_zero(); }
  bool is_polynomial() const { return den_.degree() == 0; }
  OpPoly as_polynomial() const;  // requires is_polynomial()

  const OpPoly& num() const { return num_; }
  const OpPoly& den() const { return den_; }

  OpRat operator+(const OpRat& o) const;
  OpRat operator-(const OpRat& o) const;
  OpRat operator-() const;
  OpRat operator*(const OpRat& o) const;
  OpRat operator/(const OpRat& o) const;
  OpRat inverse() const;

  bool operator==(const OpRat& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator!=(const OpRat& o) const { return !(*this == o); }

  OpRat adjoint() const;
  OpRat substitute(int var, Int p, Int q) const;

  std::string str(const std::vector<std::string>& names) const;
  std::string kernel_str(const std::vector<std::string>& names) const;

 private:
  void reduce();
  OpPoly num_, den_;
};

}  // namespace dbkit
