#pragma once

// Model intermediate representation and phase-space value types.
//
// Conventions fixed throughout: metric diag(+,-), eps^{01} = +1, and the
// canonical bracket {q(y), p(x)} = delta(y-x).  Field variables are the
// covariant components (A_0, A_1 for a vector field).

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dbkit/opalg.hpp"

namespace dbkit {

// A first-order field symbol: the field itself or one of its first derivatives.
struct Atom {
  int field = 0;
  enum Tag { Val = 0, Dt = 1, Dx = 2 } tag = Val;
  auto operator<=>(const Atom&) const = default;
};

using AtomPair = std::pair<Atom, Atom>;  // kept sorted

// Validated model: declared parameters, fields, and an exactly quadratic
// first-order Lagrangian density with parameter-rational coefficients.
struct ModelIR {
  std::string name;  // preset or file stem, informational
  std::vector<std::string> params;
  std::vector<std::string> fields;
  std::map<AtomPair, ParamRat> lagrangian;  // coeff of atom*atom (unordered pair)

  int nvars() const { return static_cast<int>(params.size()); }
  int nfields() const { return static_cast<int>(fields.size()); }

  void add_term(Atom a, Atom b, const ParamRat& c);
  ParamRat coeff(Atom a, Atom b) const;  // 0 if absent

  bool operator==(const ModelIR& o) const {
    return params == o.params && fields == o.fields && lagrangian == o.lagrangian;
  }

  // Bind a parameter to an exact rational; removes it from the symbol list.
  ModelIR bind_parameter(const std::string& name, Int p, Int q) const;

  std::string atom_str(const Atom& a) const;
};

// Phase-space coordinate layout: fields, their momenta, then Lagrange
// multipliers and their (trivial) momenta.
class CoordSystem {
 public:
  CoordSystem() = default;
  CoordSystem(std::vector<std::string> params, std::vector<std::string> fields, int nmultipliers);

  int nfields() const { return nf_; }
  int nmult() const { return nm_; }
  int ncoords() const { return 2 * nf_ + 2 * nm_; }
  int ncanonical() const { return 2 * nf_; }  // excludes multiplier pairs
  int nvars() const { return static_cast<int>(params_.size()); }

  int field(int i) const { return i; }
  int momentum(int i) const { return nf_ + i; }
  int multiplier(int k) const { return 2 * nf_ + k; }
  int multiplier_momentum(int k) const { return 2 * nf_ + nm_ + k; }

  bool is_position(int idx) const;  // field or multiplier (the "q" of its pair)
  bool is_multiplier_sector(int idx) const { return idx >= 2 * nf_; }
  int conjugate(int idx) const;

  const std::string& name(int idx) const { return names_[idx]; }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<std::string>& params() const { return params_; }
  std::optional<int> index_of(const std::string& name) const;

  bool operator==(const CoordSystem& o) const {
    return params_ == o.params_ && names_ == o.names_ && nf_ == o.nf_ && nm_ == o.nm_;
  }

 private:
  std::vector<std::string> params_;
  std::vector<std::string> names_;
  int nf_ = 0, nm_ = 0;
};

// Linear local functional F(y) = sum_i c_i(D) z_i(y) over phase coordinates.
class PhaseDensity {
 public:
  PhaseDensity() = default;
  explicit PhaseDensity(const CoordSystem* cs) : cs_(cs) {}

  const CoordSystem* coords() const { return cs_; }
  bool is_zero() const { return c_.empty(); }
  const std::map<int, OpPoly>& terms() const { return c_; }

  OpPoly coeff(int idx) const;
  void add(int idx, const OpPoly& p);
  void set(int idx, const OpPoly& p);

  PhaseDensity operator+(const PhaseDensity& o) const;
  PhaseDensity operator-(const PhaseDensity& o) const;
  PhaseDensity operator-() const;
  PhaseDensity operator*(const ParamRat& s) const;
  PhaseDensity apply(const OpPoly& op) const;  // left-multiply every coefficient

  bool operator==(const PhaseDensity& o) const { return c_ == o.c_; }
  bool operator!=(const PhaseDensity& o) const { return !(*this == o); }

  bool involves_multipliers() const;
  std::vector<OpPoly> row(int width) const;  // dense coefficient row

  // First nonzero coordinate in canonical order scaled to positive leading sign.
  PhaseDensity sign_normalized() const;

  std::string str() const;

 private:
  const CoordSystem* cs_ = nullptr;
  std::map<int, OpPoly> c_;  // zero coefficients omitted
};

}  // namespace dbkit
