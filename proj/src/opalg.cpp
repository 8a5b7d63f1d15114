#include "dbkit/opalg.hpp"

#include <sstream>

namespace dbkit {

OpPoly::OpPoly(int nvars, std::vector<ParamRat> coeffs) : nvars_(nvars), c_(std::move(coeffs)) {
  trim();
}

void OpPoly::trim() {
  while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
}

OpPoly OpPoly::constant(int nvars, const ParamRat& c) {
  OpPoly p(nvars);
  if (!c.is_zero()) p.c_ = {c};
  return p;
}

OpPoly OpPoly::constant(int nvars, Int p, Int q) {
  return constant(nvars, ParamRat::constant(nvars, p, q));
}

OpPoly OpPoly::d(int nvars, int power) {
  OpPoly p(nvars);
  p.c_.assign(power + 1, ParamRat(nvars));
  p.c_[power] = ParamRat::constant(nvars, 1);
  return p;
}

ParamRat OpPoly::coeff(int k) const {
  if (k < 0 || k >= static_cast<int>(c_.size())) return ParamRat(nvars_);
  return c_[k];
}

const ParamRat& OpPoly::lead() const {
  if (is_zero()) throw InternalError("lead of zero operator polynomial");
  return c_.back();
}

OpPoly OpPoly::operator+(const OpPoly& o) const {
  if (nvars_ != o.nvars_) throw InternalError("parameter context mismatch");
  OpPoly r(nvars_);
  r.c_.assign(std::max(c_.size(), o.c_.size()), ParamRat(nvars_));
  for (size_t i = 0; i < c_.size(); ++i) r.c_[i] = c_[i];
  for (size_t i = 0; i < o.c_.size(); ++i) r.c_[i] = r.c_[i] + o.c_[i];
  r.trim();
  return r;
}

OpPoly OpPoly::operator-(const OpPoly& o) const { return *this + (-o); }

OpPoly OpPoly::operator-() const {
  OpPoly r = *this;
  for (auto& x : r.c_) x = -x;
  return r;
}

OpPoly OpPoly::operator*(const OpPoly& o) const {
  if (nvars_ != o.nvars_) throw InternalError("parameter context mismatch");
  if (is_zero() || o.is_zero()) return OpPoly(nvars_);
  OpPoly r(nvars_);
  r.c_.assign(c_.size() + o.c_.size() - 1, ParamRat(nvars_));
  for (size_t i = 0; i < c_.size(); ++i)
    for (size_t j = 0; j < o.c_.size(); ++j) r.c_[i + j] = r.c_[i + j] + c_[i] * o.c_[j];
  r.trim();
  return r;
}

OpPoly OpPoly::operator*(const ParamRat& s) const {
  OpPoly r = *this;
  for (auto& x : r.c_) x = x * s;
  r.trim();
  return r;
}

bool OpPoly::operator<(const OpPoly& o) const {
  if (c_.size() != o.c_.size()) return c_.size() < o.c_.size();
  for (size_t i = 0; i < c_.size(); ++i) {
    if (c_[i] < o.c_[i]) return true;
    if (o.c_[i] < c_[i]) return false;
  }
  return false;
}

OpPoly OpPoly::adjoint() const {
  OpPoly r = *this;
  for (size_t i = 1; i < r.c_.size(); i += 2) r.c_[i] = -r.c_[i];
  return r;
}

OpPoly OpPoly::substitute(int var, Int p, Int q) const {
  OpPoly r(nvars_);
  r.c_.reserve(c_.size());
  for (auto& x : c_) r.c_.push_back(x.substitute(var, p, q));
  r.trim();
  return r;
}

std::complex<double> OpPoly::eval(const std::vector<double>& params,
                                  std::complex<double> symbol) const {
  std::complex<double> s = 0;
  for (int k = degree(); k >= 0; --k) s = s * symbol + c_[k].eval(params);
  return s;
}

std::pair<OpPoly, OpPoly> OpPoly::divmod(const OpPoly& a, const OpPoly& b) {
  if (b.is_zero()) throw DivideByZero("operator polynomial division");
  OpPoly q(a.nvars_), r = a;
  q.c_.assign(std::max<int>(0, a.degree() - b.degree() + 1), ParamRat(a.nvars_));
  ParamRat lb = b.lead();
  while (!r.is_zero() && r.degree() >= b.degree()) {
    int k = r.degree() - b.degree();
    ParamRat f = r.lead() / lb;
    q.c_[k] = q.c_[k] + f;
    OpPoly shift = OpPoly::d(a.nvars_, k);
    if (k == 0) shift = OpPoly::constant(a.nvars_, 1);
    r = r - (b * shift) * f;
  }
  q.trim();
  return {q, r};
}

OpPoly OpPoly::gcd(const OpPoly& a, const OpPoly& b) {
  OpPoly u = a, v = b;
  while (!v.is_zero()) {
    OpPoly r = divmod(u, v).second;
    u = v;
    v = r;
  }
  if (u.is_zero()) return u;
  return u * u.lead().inverse();  // monic
}

void OpPoly::xgcd(const OpPoly& a, const OpPoly& b, OpPoly& g, OpPoly& s, OpPoly& t) {
  int nv = a.nvars_;
  OpPoly r0 = a, r1 = b;
  OpPoly s0 = OpPoly::constant(nv, 1), s1(nv);
  OpPoly t0(nv), t1 = OpPoly::constant(nv, 1);
  while (!r1.is_zero()) {
    auto [q, r] = divmod(r0, r1);
    OpPoly s2 = s0 - q * s1, t2 = t0 - q * t1;
    r0 = r1; r1 = r;
    s0 = s1; s1 = s2;
    t0 = t1; t1 = t2;
  }
  if (!r0.is_zero()) {
    ParamRat inv = r0.lead().inverse();
    r0 = r0 * inv;
    s0 = s0 * inv;
    t0 = t0 * inv;
  }
  g = r0; s = s0; t = t0;
}

namespace {
bool needs_parens(const std::string& s) { return s.find_first_of("+ ") != std::string::npos; }
}  // namespace

std::string OpPoly::str(const std::vector<std::string>& names) const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int k = degree(); k >= 0; --k) {
    if (c_[k].is_zero()) continue;
    std::string cs = c_[k].str(names);
    if (!first) {
      if (!cs.empty() && cs[0] == '-') {
        os << " - ";
        cs = cs.substr(1);
      } else {
        os << " + ";
      }
    }
    if (k == 0) {
      os << cs;
    } else {
      if (cs == "1") {
        // bare power of D
      } else if (cs == "-1") {
        os << "-";
      } else {
        os << (needs_parens(cs) ? "(" + cs + ")" : cs) << "*";
      }
      os << "D";
      if (k > 1) os << "^" << k;
    }
    first = false;
  }
  return os.str();
}

std::string OpPoly::kernel_str(const std::vector<std::string>& names) const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int k = degree(); k >= 0; --k) {
    if (c_[k].is_zero()) continue;
    std::string cs = c_[k].str(names);
    if (!first) {
      if (!cs.empty() && cs[0] == '-') {
        os << " - ";
        cs = cs.substr(1);
      } else {
        os << " + ";
      }
    }
    if (cs == "1") {
      // unit coefficient
    } else if (cs == "-1") {
      os << "-";
    } else {
      os << (needs_parens(cs) ? "(" + cs + ")" : cs) << " ";
    }
    if (k == 0)
      os << "delta(y-x)";
    else if (k == 1)
      os << "d_y delta(y-x)";
    else
      os << "d_y^" << k << " delta(y-x)";
    first = false;
  }
  return os.str();
}

OpRat::OpRat(int nvars) : num_(nvars), den_(OpPoly::constant(nvars, 1)) {}

OpRat::OpRat(const OpPoly& n, const OpPoly& d) : num_(n), den_(d) {
  if (den_.is_zero()) throw DivideByZero("operator kernel fraction");
  reduce();
}

OpRat OpRat::of(const OpPoly& p) { return OpRat(p, OpPoly::constant(p.nvars(), 1)); }

void OpRat::reduce() {
  if (num_.is_zero()) {
    den_ = OpPoly::constant(num_.nvars(), 1);
    return;
  }
  OpPoly g = OpPoly::gcd(num_, den_);
  if (g.degree() > 0) {
    num_ = OpPoly::divmod(num_, g).first;
    den_ = OpPoly::divmod(den_, g).first;
  }
  ParamRat inv = den_.lead().inverse();
  num_ = num_ * inv;
  den_ = den_ * inv;
}

OpPoly OpRat::as_polynomial() const {
  if (!is_polynomial()) throw InternalError("nonlocal kernel where a local one was required");
  if (is_zero()) return num_;
  return num_ * den_.coeff(0).inverse();
}

OpRat OpRat::operator+(const OpRat& o) const {
  return OpRat(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}

OpRat OpRat::operator-(const OpRat& o) const {
  return OpRat(num_ * o.den_ - o.num_ * den_, den_ * o.den_);
}

OpRat OpRat::operator-() const {
  OpRat r = *this;
  r.num_ = -r.num_;
  return r;
}

OpRat OpRat::operator*(const OpRat& o) const { return OpRat(num_ * o.num_, den_ * o.den_); }

OpRat OpRat::operator/(const OpRat& o) const {
  if (o.is_zero()) throw DivideByZero("operator kernel division");
  return OpRat(num_ * o.den_, den_ * o.num_);
}

OpRat OpRat::inverse() const {
  if (is_zero()) throw DivideByZero("inverse of zero kernel");
  return OpRat(den_, num_);
}

OpRat OpRat::adjoint() const { return OpRat(num_.adjoint(), den_.adjoint()); }

OpRat OpRat::substitute(int var, Int p, Int q) const {
  return OpRat(num_.substitute(var, p, q), den_.substitute(var, p, q));
}

std::string OpRat::str(const std::vector<std::string>& names) const {
  if (is_polynomial()) return as_polynomial().str(names);
  return "(" + num_.str(names) + ")/(" + den_.str(names) + ")";
}

std::string OpRat::kernel_str(const std::vector<std::string>& names) const {
  if (is_polynomial()) return as_polynomial().kernel_str(names);
  return "(" + num_.str(names) + ")/(" + den_.str(names) + ") applied to delta(y-x)";
}

}  // namespace dbkit
