#include "dbkit/model.hpp"

#include <algorithm>
#include <sstream>

namespace dbkit {

void ModelIR::add_term(Atom a, Atom b, const ParamRat& c) {
  if (c.is_zero()) return;
  if (b < a) std::swap(a, b);
  auto key = AtomPair{a, b};
  auto it = lagrangian.find(key);
  if (it == lagrangian.end()) {
    lagrangian.emplace(key, c);
  } else {
    it->second = it->second + c;
    if (it->second.is_zero()) lagrangian.erase(it);
  }
}

ParamRat ModelIR::coeff(Atom a, Atom b) const {
  if (b < a) std::swap(a, b);
  auto it = lagrangian.find(AtomPair{a, b});
  return it == lagrangian.end() ? ParamRat(nvars()) : it->second;
}

ModelIR ModelIR::bind_parameter(const std::string& pname, Int p, Int q) const {
  auto it = std::find(params.begin(), params.end(), pname);
  if (it == params.end()) throw SemanticError("unknown parameter '" + pname + "'");
  int var = static_cast<int>(it - params.begin());
  ModelIR out;
  out.name = name;
  out.fields = fields;
  out.params = params;
  out.params.erase(out.params.begin() + var);
  // substitute, then drop the eliminated exponent slot
  for (auto& [key, c] : lagrangian) {
    ParamRat s = c.substitute(var, p, q);
    ParamPoly nn(out.nvars()), nd(out.nvars());
    for (auto& [e, cc] : s.num().terms()) {
      Expo r(e);
      r.erase(r.begin() + var);
      nn.add_term(r, cc);
    }
    for (auto& [e, cc] : s.den().terms()) {
      Expo r(e);
      r.erase(r.begin() + var);
      nd.add_term(r, cc);
    }
    ParamRat reduced(nn, nd);
    if (!reduced.is_zero()) {
      auto key2 = key;
      auto it2 = out.lagrangian.find(key2);
      if (it2 == out.lagrangian.end())
        out.lagrangian.emplace(key2, reduced);
      else
        it2->second = it2->second + reduced;
    }
  }
  return out;
}

std::string ModelIR::atom_str(const Atom& a) const {
  switch (a.tag) {
    case Atom::Val: return fields[a.field];
    case Atom::Dt: return "dt(" + fields[a.field] + ")";
    case Atom::Dx: return "dx(" + fields[a.field] + ")";
  }
  return {};
}

CoordSystem::CoordSystem(std::vector<std::string> params, std::vector<std::string> fields,
                         int nmultipliers)
    : params_(std::move(params)), nf_(static_cast<int>(fields.size())), nm_(nmultipliers) {
  names_ = fields;
  for (auto& f : fields) names_.push_back("p_" + f);
  for (int k = 0; k < nm_; ++k) names_.push_back("lambda_" + std::to_string(k));
  for (int k = 0; k < nm_; ++k) names_.push_back("p_lambda_" + std::to_string(k));
}

bool CoordSystem::is_position(int idx) const {
  if (idx < nf_) return true;
  if (idx < 2 * nf_) return false;
  return idx < 2 * nf_ + nm_;
}

int CoordSystem::conjugate(int idx) const {
  if (idx < nf_) return idx + nf_;
  if (idx < 2 * nf_) return idx - nf_;
  if (idx < 2 * nf_ + nm_) return idx + nm_;
  return idx - nm_;
}

std::optional<int> CoordSystem::index_of(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<int>(it - names_.begin());
}

OpPoly PhaseDensity::coeff(int idx) const {
  auto it = c_.find(idx);
  return it == c_.end() ? OpPoly(cs_ ? cs_->nvars() : 0) : it->second;
}

void PhaseDensity::add(int idx, const OpPoly& p) {
  if (p.is_zero()) return;
  auto it = c_.find(idx);
  if (it == c_.end()) {
    c_.emplace(idx, p);
  } else {
    it->second = it->second + p;
    if (it->second.is_zero()) c_.erase(it);
  }
}

void PhaseDensity::set(int idx, const OpPoly& p) {
  c_.erase(idx);
  if (!p.is_zero()) c_.emplace(idx, p);
}

PhaseDensity PhaseDensity::operator+(const PhaseDensity& o) const {
  PhaseDensity r = *this;
  for (auto& [i, p] : o.c_) r.add(i, p);
  return r;
}

PhaseDensity PhaseDensity::operator-(const PhaseDensity& o) const { return *this + (-o); }

PhaseDensity PhaseDensity::operator-() const {
  PhaseDensity r = *this;
  for (auto& [i, p] : r.c_) p = -p;
  return r;
}

PhaseDensity PhaseDensity::operator*(const ParamRat& s) const {
  PhaseDensity r(cs_);
  if (s.is_zero()) return r;
  for (auto& [i, p] : c_) r.c_.emplace(i, p * s);
  return r;
}

PhaseDensity PhaseDensity::apply(const OpPoly& op) const {
  PhaseDensity r(cs_);
  if (op.is_zero()) return r;
  for (auto& [i, p] : c_) {
    OpPoly q = op * p;
    if (!q.is_zero()) r.c_.emplace(i, q);
  }
  return r;
}

bool PhaseDensity::involves_multipliers() const {
  for (auto& [i, p] : c_)
    if (cs_->is_multiplier_sector(i)) return true;
  return false;
}

std::vector<OpPoly> PhaseDensity::row(int width) const {
  std::vector<OpPoly> r(width, OpPoly(cs_->nvars()));
  for (auto& [i, p] : c_)
    if (i < width) r[i] = p;
  return r;
}

PhaseDensity PhaseDensity::sign_normalized() const {
  if (c_.empty()) return *this;
  const OpPoly& first = c_.begin()->second;
  if (first.lead().sign() < 0) return -(*this);
  return *this;
}

std::string PhaseDensity::str() const {
  if (c_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto& [i, p] : c_) {
    // render coefficient polynomial term by term: c*D^k z -> c * dx^k(z)
    for (int k = 0; k <= p.degree(); ++k) {
      ParamRat c = p.coeff(k);
      if (c.is_zero()) continue;
      std::string cs = c.str(cs_->params());
      bool neg = !cs.empty() && cs[0] == '-';
      if (neg) cs = cs.substr(1);
      os << (first ? (neg ? "-" : "") : (neg ? " - " : " + "));
      if (cs != "1") os << (cs.find_first_of("+ ") != std::string::npos ? "(" + cs + ")" : cs) << "*";
      std::string z = cs_->name(i);
      if (k == 0)
        os << z;
      else if (k == 1)
        os << "dx(" << z << ")";
      else
        os << "dx^" << k << "(" << z << ")";
      first = false;
    }
  }
  return os.str();
}

}  // namespace dbkit
