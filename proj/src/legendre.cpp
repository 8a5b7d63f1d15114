#include "dbkit/legendre.hpp"

#include <algorithm>

namespace dbkit {

void QuadHamiltonian::add_term(int i, int j, const OpPoly& c) {
  if (c.is_zero()) return;
  auto upd = [&](int a, int b, const OpPoly& p) {
    auto key = std::make_pair(a, b);
    auto it = k_.find(key);
    if (it == k_.end()) {
      k_.emplace(key, p);
    } else {
      it->second = it->second + p;
      if (it->second.is_zero()) k_.erase(it);
    }
  };
  // half into each symmetric slot so that H = (1/2) z^T K z reproduces the term
  upd(i, j, c);
  upd(j, i, c.adjoint());
}

void QuadHamiltonian::add_quad(int i, int mi, int j, int mj, const ParamRat& c) {
  if (c.is_zero()) return;
  // integral (D^mi z_i)(D^mj z_j) = integral z_i (-1)^mi D^(mi+mj) z_j
  OpPoly p = OpPoly::d(cs_->nvars(), mi + mj);
  if (mi + mj == 0) p = OpPoly::constant(cs_->nvars(), 1);
  ParamRat s = c;
  if (mi % 2) s = -s;
  add_term(i, j, p * s);
}

void QuadHamiltonian::add_product(const PhaseDensity& f, const PhaseDensity& g,
                                  const ParamRat& scale) {
  if (scale.is_zero()) return;
  for (auto& [zi, ci] : f.terms())
    for (auto& [zj, cj] : g.terms())
      for (int m = 0; m <= ci.degree(); ++m) {
        if (ci.coeff(m).is_zero()) continue;
        for (int n = 0; n <= cj.degree(); ++n) {
          if (cj.coeff(n).is_zero()) continue;
          add_quad(zi, m, zj, n, ci.coeff(m) * cj.coeff(n) * scale);
        }
      }
}

OpPoly QuadHamiltonian::entry(int i, int j) const {
  auto it = k_.find(std::make_pair(i, j));
  return it == k_.end() ? OpPoly(cs_->nvars()) : it->second;
}

PhaseDensity QuadHamiltonian::variational_derivative(int idx) const {
  PhaseDensity d(cs_);
  for (auto& [key, p] : k_)
    if (key.first == idx) d.add(key.second, p);
  return d;
}

bool QuadHamiltonian::self_adjoint() const {
  for (auto& [key, p] : k_)
    if (entry(key.second, key.first) != p.adjoint()) return false;
  return true;
}

namespace {

// Velocity/field split of the quadratic Lagrangian:
//   L = 1/2 v^T W v + sum_i v_i b_i + V0
struct VelocitySplit {
  std::vector<std::vector<ParamRat>> w;
  std::vector<PhaseDensity> b;
  std::vector<std::tuple<int, int, int, int, ParamRat>> v0;  // (i, mi, j, mj, c)
};

VelocitySplit split_lagrangian(const ModelIR& m, const CoordSystem& cs) {
  int nf = m.nfields();
  int nv = m.nvars();
  VelocitySplit s;
  s.w.assign(nf, std::vector<ParamRat>(nf, ParamRat(nv)));
  s.b.assign(nf, PhaseDensity(&cs));
  auto dpow = [](const Atom& a) { return a.tag == Atom::Dx ? 1 : 0; };
  for (auto& [key, c] : m.lagrangian) {
    const Atom &a = key.first, &b = key.second;
    bool va = a.tag == Atom::Dt, vb = b.tag == Atom::Dt;
    if (va && vb) {
      if (a.field == b.field) {
        s.w[a.field][a.field] = s.w[a.field][a.field] + c + c;
      } else {
        s.w[a.field][b.field] = s.w[a.field][b.field] + c;
        s.w[b.field][a.field] = s.w[b.field][a.field] + c;
      }
    } else if (va || vb) {
      const Atom& vel = va ? a : b;
      const Atom& fld = va ? b : a;
      OpPoly p = dpow(fld) ? OpPoly::d(nv, 1) : OpPoly::constant(nv, 1);
      s.b[vel.field].add(fld.field, p * c);
    } else {
      s.v0.emplace_back(a.field, dpow(a), b.field, dpow(b), c);
    }
  }
  return s;
}

// Reduced row echelon over the exact parameter field; returns pivot columns.
std::vector<int> rref(std::vector<std::vector<ParamRat>>& m) {
  size_t rows = m.size();
  size_t cols = rows ? m[0].size() : 0;
  std::vector<int> pivots;
  size_t r = 0;
  for (size_t c = 0; c < cols && r < rows; ++c) {
    size_t piv = r;
    while (piv < rows && m[piv][c].is_zero()) ++piv;
    if (piv == rows) continue;
    std::swap(m[piv], m[r]);
    ParamRat inv = m[r][c].inverse();
    for (auto& x : m[r]) x = x * inv;
    for (size_t i = 0; i < rows; ++i) {
      if (i == r || m[i][c].is_zero()) continue;
      ParamRat f = m[i][c];
      for (size_t j = 0; j < cols; ++j) m[i][j] = m[i][j] - f * m[r][j];
    }
    pivots.push_back(static_cast<int>(c));
    ++r;
  }
  return pivots;
}

}  // namespace

LegendreData legendre_transform(const ModelIR& m) {
  int nf = m.nfields();
  int nv = m.nvars();

  // First pass to size the multiplier block: rank of the velocity Hessian.
  CoordSystem probe(m.params, m.fields, 0);
  VelocitySplit sp = split_lagrangian(m, probe);
  auto wcopy = sp.w;
  std::vector<int> pivots = rref(wcopy);
  int nprim = nf - static_cast<int>(pivots.size());

  LegendreData out;
  out.coords = std::make_shared<const CoordSystem>(m.params, m.fields, nprim);
  const CoordSystem& cs = *out.coords;
  sp = split_lagrangian(m, cs);
  out.hessian = sp.w;

  out.momenta.resize(nf);
  for (int i = 0; i < nf; ++i) {
    out.momenta[i].velocity_coeffs = sp.w[i];
    out.momenta[i].field_part = sp.b[i];
  }

  // Null-space basis of W in reduced-echelon form drives the primary set.
  wcopy = sp.w;
  pivots = rref(wcopy);
  std::vector<bool> is_pivot(nf, false);
  for (int p : pivots) is_pivot[p] = true;
  for (int free = 0; free < nf; ++free) {
    if (is_pivot[free]) continue;
    std::vector<ParamRat> null(nf, ParamRat(nv));
    null[free] = ParamRat::constant(nv, 1);
    for (size_t r = 0; r < pivots.size(); ++r) null[pivots[r]] = -wcopy[r][free];
    PhaseDensity c(&cs);
    for (int i = 0; i < nf; ++i) {
      if (null[i].is_zero()) continue;
      c.add(cs.momentum(i), OpPoly::constant(nv, null[i]));
      c = c - sp.b[i] * null[i];
    }
    out.primaries.push_back(c);
  }

  // Solve the invertible velocity block: v_P = W_PP^{-1} (pi_P - b_P).
  int np = static_cast<int>(pivots.size());
  std::vector<std::vector<ParamRat>> aug(np, std::vector<ParamRat>(2 * np, ParamRat(nv)));
  for (int r = 0; r < np; ++r) {
    for (int c = 0; c < np; ++c) aug[r][c] = sp.w[pivots[r]][pivots[c]];
    aug[r][np + r] = ParamRat::constant(nv, 1);
  }
  if (rref(aug).size() != static_cast<size_t>(np))
    throw InternalError("velocity block not invertible");
  std::vector<PhaseDensity> vel(nf, PhaseDensity(&cs));  // null directions stay zero
  for (int r = 0; r < np; ++r) {
    PhaseDensity v(&cs);
    for (int c = 0; c < np; ++c) {
      ParamRat inv_rc = aug[r][np + c];
      if (inv_rc.is_zero()) continue;
      v.add(cs.momentum(pivots[c]), OpPoly::constant(nv, inv_rc));
      v = v - sp.b[pivots[c]] * inv_rc;
    }
    vel[pivots[r]] = v;
  }

  // H = sum_i pi_i v_i - 1/2 v^T W v - sum_i v_i b_i - V0
  QuadHamiltonian H(&cs);
  ParamRat one = ParamRat::constant(nv, 1);
  ParamRat half = ParamRat::constant(nv, 1, 2);
  for (int i = 0; i < nf; ++i) {
    if (vel[i].is_zero()) continue;
    PhaseDensity pi_i(&cs);
    pi_i.add(cs.momentum(i), OpPoly::constant(nv, 1));
    H.add_product(pi_i, vel[i], one);
    H.add_product(vel[i], sp.b[i], -one);
  }
  for (int i = 0; i < nf; ++i)
    for (int j = 0; j < nf; ++j) {
      if (sp.w[i][j].is_zero() || vel[i].is_zero() || vel[j].is_zero()) continue;
      H.add_product(vel[i], vel[j], -half * sp.w[i][j]);
    }
  for (auto& [i, mi, j, mj, c] : sp.v0) H.add_quad(i, mi, j, mj, -c);

  for (auto& [key, p] : H.kernel())
    if (cs.is_multiplier_sector(key.first) || cs.is_multiplier_sector(key.second))
      throw InternalError("velocity elimination left a multiplier term");
  if (!H.self_adjoint()) throw InternalError("Hamiltonian kernel lost self-adjointness");

  out.canonical = H;
  out.extended = H;
  for (size_t k = 0; k < out.primaries.size(); ++k) {
    int lam = cs.multiplier(static_cast<int>(k));
    for (auto& [z, c] : out.primaries[k].terms()) out.extended.add_term(lam, z, c);
    out.extended.multiplier_couplings.emplace_back(lam, out.primaries[k]);
  }
  return out;
}

std::map<int, PhaseDensity> hamilton_equations(const QuadHamiltonian& h) {
  const CoordSystem& cs = *h.coords();
  std::map<int, PhaseDensity> eq;
  for (int i = 0; i < cs.ncoords(); ++i) {
    int conj = cs.conjugate(i);
    PhaseDensity d = h.variational_derivative(conj);
    eq[i] = cs.is_position(i) ? d : -d;
  }
  return eq;
}

}  // namespace dbkit
