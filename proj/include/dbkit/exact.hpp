#pragma once

// Exact arithmetic over the fraction field of integer polynomials in the
// declared model parameters.  No floating point enters this layer.

#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "dbkit/bigint.hpp"
#include "dbkit/errors.hpp"

namespace dbkit {

using Int = long long;

Int checked_add(Int a, Int b);
Int checked_mul(Int a, Int b);
Int checked_neg(Int a);
Int int_gcd(Int a, Int b);

// Exponent vector, one entry per declared parameter.
using Expo = std::vector<int>;

// Graded-lex ordering on exponent vectors (total degree first).
struct ExpoLess {
  bool operator()(const Expo& a, const Expo& b) const;
};

// Sparse multivariate polynomial with integer coefficients.
// All polynomials in one computation share the same variable count.
class ParamPoly {
 public:
  ParamPoly() : nvars_(0) {}
  explicit ParamPoly(int nvars) : nvars_(nvars) {}
  static ParamPoly constant(int nvars, const BigInt& c);
  static ParamPoly variable(int nvars, int idx);

  int nvars() const { return nvars_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  const BigInt& constant_value() const;  // requires is_constant() or zero
  int total_degree() const;
  int degree_in(int var) const;

  ParamPoly operator+(const ParamPoly& o) const;
  ParamPoly operator-(const ParamPoly& o) const;
  ParamPoly operator-() const;
  ParamPoly operator*(const ParamPoly& o) const;
  ParamPoly pow(int n) const;

  bool operator==(const ParamPoly& o) const { return nvars_ == o.nvars_ && terms_ == o.terms_; }
  bool operator!=(const ParamPoly& o) const { return !(*this == o); }
  bool operator<(const ParamPoly& o) const { return terms_ < o.terms_; }

  // Sign of the leading (graded-lex greatest) coefficient; 0 for the zero poly.
  int lead_sign() const;
  BigInt content() const;  // gcd of coefficients, nonnegative

  // Exact division; throws InternalError if the division is not exact.
  ParamPoly divide_exact(const ParamPoly& d) const;

  static ParamPoly gcd(const ParamPoly& a, const ParamPoly& b);

  ParamPoly substitute(int var, Int num, Int den) const;  // returns poly * den^deg
  double eval(const std::vector<double>& vals) const;

  std::string str(const std::vector<std::string>& names) const;

  const std::map<Expo, BigInt, ExpoLess>& terms() const { return terms_; }
  void add_term(const Expo& e, const BigInt& c);

 private:
  int nvars_;
  std::map<Expo, BigInt, ExpoLess> terms_;
  friend class ParamRat;
};

// Reduced fraction of two ParamPoly, denominator sign-normalized and never zero.
class ParamRat {
 public:
  ParamRat() : num_(0), den_(ParamPoly::constant(0, 1)) {}
  explicit ParamRat(int nvars) : num_(nvars), den_(ParamPoly::constant(nvars, 1)) {}
  ParamRat(const ParamPoly& n, const ParamPoly& d);
  static ParamRat constant(int nvars, Int p, Int q = 1);
  static ParamRat variable(int nvars, int idx);
  static ParamRat of(const ParamPoly& p);

  int nvars() const { return num_.nvars(); }
  bool is_zero() const { return num_.is_zero(); }
  bool is_one() const;
  bool is_constant() const { return num_.is_constant() && den_.is_constant(); }

  ParamRat operator+(const ParamRat& o) const;
  ParamRat operator-(const ParamRat& o) const;
  ParamRat operator-() const;
  ParamRat operator*(const ParamRat& o) const;
  ParamRat operator/(const ParamRat& o) const;
  ParamRat inverse() const;

  bool operator==(const ParamRat& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator!=(const ParamRat& o) const { return !(*this == o); }
  bool operator<(const ParamRat& o) const;

  int sign() const { return num_.lead_sign(); }

  const ParamPoly& num() const { return num_; }
  const ParamPoly& den() const { return den_; }

  ParamRat substitute(int var, Int num, Int den) const;
  double eval(const std::vector<double>& vals) const;

  std::string str(const std::vector<std::string>& names) const;

 private:
  void reduce();
  ParamPoly num_, den_;
};

}  // namespace dbkit
