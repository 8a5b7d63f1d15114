#include "dbkit/exact.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dbkit {

Int checked_add(Int a, Int b) {
  Int r;
  if (__builtin_add_overflow(a, b, &r)) throw OverflowError("add");
  return r;
}

Int checked_mul(Int a, Int b) {
  Int r;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("mul");
  return r;
}

Int checked_neg(Int a) {
  if (a == std::numeric_limits<Int>::min()) throw OverflowError("neg");
  return -a;
}

Int int_gcd(Int a, Int b) {
  if (a < 0) a = checked_neg(a);
  if (b < 0) b = checked_neg(b);
  while (b) {
    Int t = a % b;
    a = b;
    b = t;
  }
  return a;
}

bool ExpoLess::operator()(const Expo& a, const Expo& b) const {
  int da = 0, db = 0;
  for (int x : a) da += x;
  for (int x : b) db += x;
  if (da != db) return da < db;
  return a < b;  // lex tiebreak
}

ParamPoly ParamPoly::constant(int nvars, const BigInt& c) {
  ParamPoly p(nvars);
  if (!c.is_zero()) p.terms_[Expo(nvars, 0)] = c;
  return p;
}

ParamPoly ParamPoly::variable(int nvars, int idx) {
  ParamPoly p(nvars);
  Expo e(nvars, 0);
  e[idx] = 1;
  p.terms_[e] = BigInt(1);
  return p;
}

bool ParamPoly::is_constant() const {
  if (terms_.empty()) return true;
  if (terms_.size() > 1) return false;
  const Expo& e = terms_.begin()->first;
  return std::all_of(e.begin(), e.end(), [](int x) { return x == 0; });
}

const BigInt& ParamPoly::constant_value() const {
  static const BigInt zero(0);
  if (terms_.empty()) return zero;
  if (!is_constant()) throw InternalError("constant_value on non-constant poly");
  return terms_.begin()->second;
}

int ParamPoly::total_degree() const {
  int d = -1;
  for (auto& [e, c] : terms_) {
    int s = 0;
    for (int x : e) s += x;
    d = std::max(d, s);
  }
  return d;
}

int ParamPoly::degree_in(int var) const {
  int d = 0;
  for (auto& [e, c] : terms_) d = std::max(d, e[var]);
  return d;
}

void ParamPoly::add_term(const Expo& e, const BigInt& c) {
  if (c.is_zero()) return;
  auto it = terms_.find(e);
  if (it == terms_.end()) {
    terms_.emplace(e, c);
  } else {
    it->second = it->second + c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

ParamPoly ParamPoly::operator+(const ParamPoly& o) const {
  if (nvars_ != o.nvars_) throw InternalError("parameter context mismatch");
  ParamPoly r = *this;
  for (auto& [e, c] : o.terms_) r.add_term(e, c);
  return r;
}

ParamPoly ParamPoly::operator-(const ParamPoly& o) const { return *this + (-o); }

ParamPoly ParamPoly::operator-() const {
  ParamPoly r(nvars_);
  for (auto& [e, c] : terms_) r.terms_[e] = -c;
  return r;
}

ParamPoly ParamPoly::operator*(const ParamPoly& o) const {
  if (nvars_ != o.nvars_) throw InternalError("parameter context mismatch");
  ParamPoly r(nvars_);
  for (auto& [e1, c1] : terms_)
    for (auto& [e2, c2] : o.terms_) {
      Expo e(nvars_);
      for (int i = 0; i < nvars_; ++i) e[i] = e1[i] + e2[i];
      r.add_term(e, c1 * c2);
    }
  return r;
}

ParamPoly ParamPoly::pow(int n) const {
  if (n < 0) throw InternalError("negative power on polynomial");
  ParamPoly r = constant(nvars_, 1);
  for (int i = 0; i < n; ++i) r = r * (*this);
  return r;
}

int ParamPoly::lead_sign() const {
  if (terms_.empty()) return 0;
  return terms_.rbegin()->second.sign();
}

BigInt ParamPoly::content() const {
  BigInt g(0);
  for (auto& [e, c] : terms_) g = BigInt::gcd(g, c);
  return g;
}

namespace {

// View of a poly as univariate in `var` with ParamPoly coefficients.
std::map<int, ParamPoly> as_univariate(const ParamPoly& p, int var) {
  std::map<int, ParamPoly> out;
  for (auto& [e, c] : p.terms()) {
    Expo r = e;
    int d = r[var];
    r[var] = 0;
    auto it = out.find(d);
    if (it == out.end()) it = out.emplace(d, ParamPoly(p.nvars())).first;
    it->second.add_term(r, c);
  }
  return out;
}

ParamPoly from_univariate(const std::map<int, ParamPoly>& u, int var, int nvars) {
  ParamPoly out(nvars);
  for (auto& [d, coef] : u)
    for (auto& [e, c] : coef.terms()) {
      Expo r = e;
      r[var] += d;
      out.add_term(r, c);
    }
  return out;
}

int main_variable(const ParamPoly& a, const ParamPoly& b) {
  for (int v = a.nvars() - 1; v >= 0; --v)
    if (a.degree_in(v) > 0 || b.degree_in(v) > 0) return v;
  return -1;
}

}  // namespace

ParamPoly ParamPoly::divide_exact(const ParamPoly& d) const {
  if (d.is_zero()) throw DivideByZero("polynomial division");
  if (is_zero()) return ParamPoly(nvars_);
  if (d.is_constant()) {
    const BigInt& dc = d.constant_value();
    ParamPoly r(nvars_);
    for (auto& [e, c] : terms_) {
      BigInt q, rem;
      BigInt::divmod(c, dc, q, rem);
      if (!rem.is_zero()) throw InternalError("inexact constant division");
      r.terms_[e] = q;
    }
    return r;
  }
  int var = main_variable(*this, d);
  auto ud = as_univariate(d, var);
  int degd = ud.rbegin()->first;
  const ParamPoly& lcd = ud.rbegin()->second;
  std::map<int, ParamPoly> q;
  ParamPoly rem = *this;
  while (!rem.is_zero()) {
    auto ur = as_univariate(rem, var);
    int degr = ur.rbegin()->first;
    if (degr < degd) throw InternalError("inexact polynomial division");
    ParamPoly qc = ur.rbegin()->second.divide_exact(lcd);
    Expo shift(nvars_, 0);
    shift[var] = degr - degd;
    ParamPoly mono(nvars_);
    mono.add_term(shift, 1);
    q[degr - degd] = qc;
    rem = rem - qc * mono * d;
  }
  return from_univariate(q, var, nvars_);
}

namespace {

// Pseudo-remainder of a by b in variable var.
ParamPoly pseudo_rem(const ParamPoly& a, const ParamPoly& b, int var) {
  auto ub = as_univariate(b, var);
  int db = ub.rbegin()->first;
  ParamPoly lcb = ub.rbegin()->second;
  ParamPoly r = a;
  while (!r.is_zero() && r.degree_in(var) >= db) {
    auto ur = as_univariate(r, var);
    int dr = ur.rbegin()->first;
    if (dr < db) break;
    ParamPoly lcr = ur.rbegin()->second;
    Expo shift(a.nvars(), 0);
    shift[var] = dr - db;
    ParamPoly mono(a.nvars());
    mono.add_term(shift, 1);
    r = r * lcb - lcr * mono * b;
  }
  return r;
}

ParamPoly poly_content_in(const ParamPoly& p, int var) {
  auto u = as_univariate(p, var);
  ParamPoly g(p.nvars());
  for (auto& [d, c] : u) g = ParamPoly::gcd(g, c);
  return g;
}

}  // namespace

ParamPoly ParamPoly::gcd(const ParamPoly& a, const ParamPoly& b) {
  auto norm = [](const ParamPoly& p) { return p.lead_sign() < 0 ? -p : p; };
  if (a.is_zero()) return norm(b);
  if (b.is_zero()) return norm(a);
  if (a.is_constant() && b.is_constant())
    return constant(a.nvars(), BigInt::gcd(a.constant_value(), b.constant_value()));
  int var = main_variable(a, b);
  if (a.degree_in(var) == 0 || b.degree_in(var) == 0) {
    const ParamPoly& flat = a.degree_in(var) == 0 ? a : b;
    const ParamPoly& other = a.degree_in(var) == 0 ? b : a;
    return gcd(flat, poly_content_in(other, var));
  }
  ParamPoly ca = poly_content_in(a, var);
  ParamPoly cb = poly_content_in(b, var);
  ParamPoly pa = a.divide_exact(ca);
  ParamPoly pb = b.divide_exact(cb);
  ParamPoly cg = gcd(ca, cb);
  // primitive pseudo-remainder sequence
  ParamPoly u = pa, v = pb;
  if (u.degree_in(var) < v.degree_in(var)) std::swap(u, v);
  while (!v.is_zero() && v.degree_in(var) > 0) {
    ParamPoly r = pseudo_rem(u, v, var);
    u = v;
    if (r.is_zero()) {
      v = ParamPoly(a.nvars());
    } else {
      v = r.divide_exact(poly_content_in(r, var));
    }
  }
  if (!v.is_zero()) return norm(cg);  // degree dropped to zero: coprime in var
  ParamPoly g = u.divide_exact(poly_content_in(u, var));
  return norm(cg * g);
}

ParamPoly ParamPoly::substitute(int var, Int num, Int den) const {
  int maxdeg = degree_in(var);
  ParamPoly out(nvars_);
  BigInt bn(num), bd(den);
  for (auto& [e, c] : terms_) {
    Expo r = e;
    int d = r[var];
    r[var] = 0;
    BigInt f = c;
    for (int i = 0; i < d; ++i) f = f * bn;
    for (int i = 0; i < maxdeg - d; ++i) f = f * bd;
    out.add_term(r, f);
  }
  return out;
}

double ParamPoly::eval(const std::vector<double>& vals) const {
  double s = 0;
  for (auto& [e, c] : terms_) {
    double t = c.to_double();
    for (int i = 0; i < nvars_; ++i)
      for (int k = 0; k < e[i]; ++k) t *= vals[i];
    s += t;
  }
  return s;
}

std::string ParamPoly::str(const std::vector<std::string>& names) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const BigInt& c = it->second;
    const Expo& e = it->first;
    bool unit_exp = std::all_of(e.begin(), e.end(), [](int x) { return x == 0; });
    if (first) {
      if (c.sign() < 0) os << "-";
    } else {
      os << (c.sign() < 0 ? " - " : " + ");
    }
    BigInt ac = c.abs();
    bool printed_num = false;
    if (ac != BigInt(1) || unit_exp) {
      os << ac.str();
      printed_num = true;
    }
    for (int i = 0; i < nvars_; ++i) {
      if (e[i] == 0) continue;
      if (printed_num) os << "*";
      os << names[i];
      if (e[i] > 1) os << "^" << e[i];
      printed_num = true;
    }
    first = false;
  }
  return os.str();
}

ParamRat::ParamRat(const ParamPoly& n, const ParamPoly& d) : num_(n), den_(d) {
  if (den_.is_zero()) throw DivideByZero("rational function");
  reduce();
}

ParamRat ParamRat::constant(int nvars, Int p, Int q) {
  return ParamRat(ParamPoly::constant(nvars, p), ParamPoly::constant(nvars, q));
}

ParamRat ParamRat::variable(int nvars, int idx) {
  return ParamRat(ParamPoly::variable(nvars, idx), ParamPoly::constant(nvars, 1));
}

ParamRat ParamRat::of(const ParamPoly& p) {
  return ParamRat(p, ParamPoly::constant(p.nvars(), 1));
}

void ParamRat::reduce() {
  if (num_.is_zero()) {
    den_ = ParamPoly::constant(num_.nvars(), 1);
    return;
  }
  ParamPoly g = ParamPoly::gcd(num_, den_);
  if (!g.is_constant() || g.constant_value() != BigInt(1)) {
    num_ = num_.divide_exact(g);
    den_ = den_.divide_exact(g);
  }
  if (den_.lead_sign() < 0) {
    num_ = -num_;
    den_ = -den_;
  }
}

bool ParamRat::is_one() const {
  return num_.is_constant() && den_.is_constant() && num_.constant_value() == BigInt(1) &&
         den_.constant_value() == BigInt(1);
}

ParamRat ParamRat::operator+(const ParamRat& o) const {
  return ParamRat(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}

ParamRat ParamRat::operator-(const ParamRat& o) const {
  return ParamRat(num_ * o.den_ - o.num_ * den_, den_ * o.den_);
}

ParamRat ParamRat::operator-() const { return ParamRat(-num_, den_); }

ParamRat ParamRat::operator*(const ParamRat& o) const {
  return ParamRat(num_ * o.num_, den_ * o.den_);
}

ParamRat ParamRat::operator/(const ParamRat& o) const {
  if (o.is_zero()) throw DivideByZero("rational function division");
  return ParamRat(num_ * o.den_, den_ * o.num_);
}

ParamRat ParamRat::inverse() const {
  if (is_zero()) throw DivideByZero("inverse of zero");
  return ParamRat(den_, num_);
}

bool ParamRat::operator<(const ParamRat& o) const {
  if (num_ < o.num_) return true;
  if (o.num_ < num_) return false;
  return den_ < o.den_;
}

ParamRat ParamRat::substitute(int var, Int p, Int q) const {
  if (q == 0) throw DivideByZero("substitution value");
  int dn = num_.degree_in(var), dd = den_.degree_in(var);
  ParamPoly n = num_.substitute(var, p, q);
  ParamPoly d = den_.substitute(var, p, q);
  // rebalance the dropped den^deg factors
  BigInt qn(1), bq(q);
  for (int i = 0; i < std::abs(dn - dd); ++i) qn = qn * bq;
  if (dn > dd)
    d = d * ParamPoly::constant(nvars(), qn);
  else if (dd > dn)
    n = n * ParamPoly::constant(nvars(), qn);
  return ParamRat(n, d);
}

double ParamRat::eval(const std::vector<double>& vals) const {
  double d = den_.eval(vals);
  if (d == 0) throw DomainError("parameter binding hits a pole");
  return num_.eval(vals) / d;
}

std::string ParamRat::str(const std::vector<std::string>& names) const {
  std::string n = num_.str(names);
  if (den_.is_constant() && den_.constant_value() == BigInt(1)) return n;
  std::string d = den_.str(names);
  bool nsimple = num_.terms().size() <= 1;
  bool dsimple = den_.terms().size() == 1 && den_.is_constant();
  std::string out = nsimple ? n : "(" + n + ")";
  out += "/";
  out += dsimple ? d : "(" + d + ")";
  return out;
}

}  // namespace dbkit
