#include "dbkit/verifier.hpp"

#include <algorithm>
#include <cmath>

namespace dbkit {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

uint64_t Rng::next() {
  uint64_t z = (s_ += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double Rng::uniform() {
  return 2.0 * (static_cast<double>(next() >> 11) * 0x1.0p-53) - 1.0;
}

// ---------------------------------------------------------------- ansatz

namespace {

// sigma = cos(w t - k x), h = cos(k (x - t)); phi = sigma - h; the vector
// potential components follow in closed form, so every derivative below is
// analytic.
struct PlaneWave {
  double a, e, k, w, m2, as, ah;
  double c0, c1;  // A^0 = c0 sin(u), A^1 = c1 sin(u)

  explicit PlaneWave(const PlaneWaveConfig& cfg)
      : a(cfg.a), e(cfg.e), k(cfg.k), as(cfg.amp_sigma), ah(cfg.amp_h) {
    m2 = a * a * e * e / (a - 1.0);
    w = std::sqrt(k * k + m2);
    c0 = (w + (a - 1.0) * k) / (a * e) * as;
    c1 = (k + (a - 1.0) * w) / (a * e) * as;
  }

  double u(double t, double x) const { return w * t - k * x; }
  double v(double t, double x) const { return k * (x - t); }

  double sigma(double t, double x) const { return as * std::cos(u(t, x)); }
  double h(double t, double x) const { return ah * std::cos(v(t, x)); }
  double phi(double t, double x) const { return sigma(t, x) - h(t, x); }

  // first derivatives
  double phi_t(double t, double x) const {
    return -as * w * std::sin(u(t, x)) - ah * k * std::sin(v(t, x));
  }
  double phi_x(double t, double x) const {
    return as * k * std::sin(u(t, x)) + ah * k * std::sin(v(t, x));
  }
  double phi_tt(double t, double x) const {
    return -as * w * w * std::cos(u(t, x)) + ah * k * k * std::cos(v(t, x));
  }
  double phi_xx(double t, double x) const {
    return -as * k * k * std::cos(u(t, x)) + ah * k * k * std::cos(v(t, x));
  }

  // covariant components A_0 = A^0, A_1 = -A^1
  double a0(double t, double x) const { return c0 * std::sin(u(t, x)); }
  double a1(double t, double x) const { return -c1 * std::sin(u(t, x)); }
  double a0_t(double t, double x) const { return c0 * w * std::cos(u(t, x)); }
  double a0_x(double t, double x) const { return -c0 * k * std::cos(u(t, x)); }
  double a1_t(double t, double x) const { return -c1 * w * std::cos(u(t, x)); }
  double a1_x(double t, double x) const { return c1 * k * std::cos(u(t, x)); }

  // F = eps^{mu nu} d_mu A_nu = d_t A_1 - d_x A_0
  double f(double t, double x) const { return (c0 * k - c1 * w) * std::cos(u(t, x)); }
  double f_tt(double t, double x) const {
    return -(c0 * k - c1 * w) * w * w * std::cos(u(t, x));
  }
  double f_xx(double t, double x) const {
    return -(c0 * k - c1 * w) * k * k * std::cos(u(t, x));
  }
};

}  // namespace

AnsatzReport verify_ansatz(const PlaneWaveConfig& cfg, int nt, int nx, double tmax, double xmax,
                           double rel_tol) {
  if (cfg.a <= 1.0)
    throw DomainError("mass formula requires a > 1 (pole at a = 1)");
  if (cfg.e == 0.0) throw DomainError("coupling e must be nonzero");
  PlaneWave pw(cfg);

  AnsatzReport rep;
  rep.m2 = pw.m2;
  rep.omega = pw.w;
  double scale = 0;
  double r_scalar = 0, r_vector = 0, r_kg = 0, r_ident = 0;
  for (int it = 0; it <= nt; ++it)
    for (int ix = 0; ix <= nx; ++ix) {
      double t = tmax * it / nt, x = xmax * ix / nx;
      double a0 = pw.a0(t, x), a1 = pw.a1(t, x), phi = pw.phi(t, x);
      scale = std::max({scale, std::abs(a0), std::abs(a1), std::abs(phi), std::abs(pw.f(t, x))});

      // scalar equation: box phi + e (g - eps)^{mu nu} d_mu A_nu = 0
      double div_a = pw.a0_t(t, x) - pw.a1_x(t, x) - pw.a1_t(t, x) + pw.a0_x(t, x);
      r_scalar = std::max(r_scalar, std::abs(pw.phi_tt(t, x) - pw.phi_xx(t, x) + cfg.e * div_a));

      // vector equation: d_mu F^{mu nu} + e (g - eps)^{mu nu} d_mu phi + a e^2 A^nu = 0,
      // with d_mu F^{mu 0} = d_x F_{01} and d_mu F^{mu 1} = -d_t F_{01}
      double C = pw.c0 * pw.k - pw.c1 * pw.w;  // F_{01} = C cos(u)
      double f01_x = C * pw.k * std::sin(pw.u(t, x));
      double f01_t = -C * pw.w * std::sin(pw.u(t, x));
      double res0 =
          f01_x + cfg.e * (pw.phi_t(t, x) + pw.phi_x(t, x)) + cfg.a * cfg.e * cfg.e * a0;
      double res1 =
          -f01_t - cfg.e * (pw.phi_t(t, x) + pw.phi_x(t, x)) + cfg.a * cfg.e * cfg.e * (-a1);
      r_vector = std::max({r_vector, std::abs(res0), std::abs(res1)});

      // (box + m^2) F
      r_kg = std::max(r_kg, std::abs(pw.f_tt(t, x) - pw.f_xx(t, x) + pw.m2 * pw.f(t, x)));

      // F = -a e (phi + h)
      r_ident = std::max(
          r_ident, std::abs(pw.f(t, x) + cfg.a * cfg.e * (pw.phi(t, x) + pw.h(t, x))));
    }
  if (scale == 0) scale = 1;
  rep.res_scalar_eq = r_scalar / scale;
  rep.res_vector_eq = r_vector / scale;
  rep.res_kg_f = r_kg / std::max(scale, rep.m2 * scale);
  rep.res_f_identity = r_ident / scale;
  rep.field_scale = scale;
  rep.pass = rep.res_scalar_eq < rel_tol && rep.res_vector_eq < rel_tol &&
             rep.res_kg_f < rel_tol && rep.res_f_identity < rel_tol;

  auto rec = [&](const std::string& name, double val) {
    CheckRecord r;
    r.check = name;
    r.model = "plane-wave";
    r.params = "a=" + std::to_string(cfg.a) + " e=" + std::to_string(cfg.e) +
               " k=" + std::to_string(cfg.k);
    r.value = val;
    r.tolerance = rel_tol;
    r.pass = val < rel_tol;
    rep.records.push_back(r);
  };
  rec("scalar-field-equation", rep.res_scalar_eq);
  rec("vector-field-equation", rep.res_vector_eq);
  rec("klein-gordon-of-F", rep.res_kg_f);
  rec("F-identity", rep.res_f_identity);
  return rep;
}

// ---------------------------------------------------------------- grid ops

std::vector<double> central_diff(const std::vector<double>& v, double dx) {
  int n = static_cast<int>(v.size());
  std::vector<double> r(n);
  for (int j = 0; j < n; ++j) r[j] = (v[(j + 1) % n] - v[(j + n - 1) % n]) / (2 * dx);
  return r;
}

namespace {

std::vector<double> central_diff_transpose(const std::vector<double>& v, double dx) {
  int n = static_cast<int>(v.size());
  std::vector<double> r(n);
  for (int j = 0; j < n; ++j) r[j] = (v[(j + n - 1) % n] - v[(j + 1) % n]) / (2 * dx);
  return r;
}

using CVec = std::vector<std::complex<double>>;

CVec central_diff_c(const CVec& v, double dx) {
  int n = static_cast<int>(v.size());
  CVec r(n);
  for (int j = 0; j < n; ++j) r[j] = (v[(j + 1) % n] - v[(j + n - 1) % n]) / (2 * dx);
  return r;
}

CVec central_diff_transpose_c(const CVec& v, double dx) {
  int n = static_cast<int>(v.size());
  CVec r(n);
  for (int j = 0; j < n; ++j) r[j] = (v[(j + n - 1) % n] - v[(j + 1) % n]) / (2 * dx);
  return r;
}

template <typename V>
V apply_op_generic(const OpPoly& p, const V& v, const std::vector<double>& params, double dx,
                   bool transpose) {
  V acc(v.size(), typename V::value_type(0));
  V power = v;
  for (int k = 0; k <= p.degree(); ++k) {
    double c = p.coeff(k).eval(params);
    if (c != 0)
      for (size_t j = 0; j < v.size(); ++j) acc[j] += c * power[j];
    if (k < p.degree()) {
      if constexpr (std::is_same_v<V, CVec>) {
        power = transpose ? central_diff_transpose_c(power, dx) : central_diff_c(power, dx);
      } else {
        power = transpose ? central_diff_transpose(power, dx) : central_diff(power, dx);
      }
    }
  }
  return acc;
}

std::vector<double> random_band_limited(int n, double dx, Rng& rng, int kmax) {
  double len = n * dx;
  std::vector<double> f(n, 0.0);
  for (int k = 1; k <= kmax; ++k) {
    double a = rng.uniform() / k, b = rng.uniform() / k;
    for (int j = 0; j < n; ++j) {
      double x = 2 * kPi * k * (j * dx) / len;
      f[j] += a * std::cos(x) + b * std::sin(x);
    }
  }
  return f;
}

// gradient of F[f] = h sum_j f_j F_j with respect to coordinate z, divided by h:
// returns sum_k c_k (D^T)^k f for each coordinate present in the density
std::vector<std::pair<int, std::vector<double>>> functional_gradients(
    const PhaseDensity& den, const std::vector<double>& f, const std::vector<double>& params,
    double dx) {
  std::vector<std::pair<int, std::vector<double>>> out;
  for (auto& [z, c] : den.terms())
    out.emplace_back(z, apply_op_generic(c, f, params, dx, /*transpose=*/true));
  return out;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

std::vector<double> apply_op(const OpPoly& p, const std::vector<double>& v,
                             const std::vector<double>& params, double dx) {
  return apply_op_generic(p, v, params, dx, /*transpose=*/false);
}

OracleResult smeared_bracket_oracle(const PhaseDensity& fden, const PhaseDensity& gden,
                                    const std::vector<double>& params, int n, uint64_t seed,
                                    double rel_tol) {
  const CoordSystem& cs = *fden.coords();
  double dx = 2 * kPi / n;
  Rng rng(seed);
  std::vector<double> f = random_band_limited(n, dx, rng, 8);
  std::vector<double> g = random_band_limited(n, dx, rng, 8);

  // numeric side: sum_j [dF/dq_j dG/dp_j - dF/dp_j dG/dq_j] / h, gradients taken
  // of the discretized functionals (the common factor h of both gradients and
  // the 1/h of the lattice bracket combine to a single factor h)
  auto gf = functional_gradients(fden, f, params, dx);
  auto gg = functional_gradients(gden, g, params, dx);
  double num = 0;
  for (auto& [zi, dfi] : gf) {
    int conj = cs.conjugate(zi);
    for (auto& [zj, dgj] : gg) {
      if (zj != conj) continue;
      double s = dot(dfi, dgj) * dx;
      num += cs.is_position(zi) ? s : -s;
    }
  }

  // symbolic side: kernel k(D) smeared, integral (k(-D) f) g
  OpPoly kernel = poisson_bracket(fden, gden);
  std::vector<double> kf = apply_op(kernel.adjoint(), f, params, dx);
  double sym = dot(kf, g) * dx;

  OracleResult res;
  res.numeric = num;
  res.symbolic = sym;
  res.error = std::abs(num - sym) / std::max({1.0, std::abs(num), std::abs(sym)});
  res.pass = res.error <= rel_tol;
  return res;
}

namespace {

// Gauss solve for a small complex system; returns false if singular.
bool solve_complex(std::vector<CVec>& m, CVec& rhs) {
  int n = static_cast<int>(m.size());
  for (int c = 0; c < n; ++c) {
    int piv = c;
    double best = 0;
    for (int i = c; i < n; ++i) {
      double mag = std::abs(m[i][c]);
      if (mag > best) {
        best = mag;
        piv = i;
      }
    }
    if (best < 1e-12) return false;
    std::swap(m[piv], m[c]);
    std::swap(rhs[piv], rhs[c]);
    std::complex<double> inv = 1.0 / m[c][c];
    for (int j = c; j < n; ++j) m[c][j] *= inv;
    rhs[c] *= inv;
    for (int i = 0; i < n; ++i) {
      if (i == c || m[i][c] == std::complex<double>(0)) continue;
      std::complex<double> f = m[i][c];
      for (int j = c; j < n; ++j) m[i][j] -= f * m[c][j];
      rhs[i] -= f * rhs[c];
    }
  }
  return true;
}

// {Phi_{s,u}, G[w]} for a complex smearing w of constraint t:
//   sum_pairs [ c^s_q(D) grad_p - c^s_q(D) grad_q ]_u / h
// with the lattice bracket {q_j, p_m} = delta_jm / h.
CVec point_bracket_with_smeared(const PhaseDensity& cons_s, const PhaseDensity& cons_t,
                                const CVec& w, const std::vector<double>& params, double dx) {
  const CoordSystem& cs = *cons_s.coords();
  int n = static_cast<int>(w.size());
  // gradient of G[w] wrt z: c^t_z(D)^T w (point functionals carry no h)
  std::map<int, CVec> grad;
  for (auto& [z, c] : cons_t.terms())
    grad[z] = apply_op_generic(c, w, params, dx, /*transpose=*/true);
  CVec out(n, 0.0);
  for (auto& [z, c] : cons_s.terms()) {
    int conj = cs.conjugate(z);
    auto it = grad.find(conj);
    if (it == grad.end()) continue;
    CVec term = apply_op_generic(c, it->second, params, dx, /*transpose=*/false);
    double sign = (cs.is_position(z) ? 1.0 : -1.0) / dx;
    for (int j = 0; j < n; ++j) out[j] += sign * term[j];
  }
  return out;
}

}  // namespace

OracleResult smeared_dirac_oracle(const ConstraintSet& cset, int zi, int zj, const OpRat& symbolic,
                                  const std::vector<double>& params, int n, uint64_t seed,
                                  double rel_tol) {
  const CoordSystem& cs = *cset.coords;
  double dx = 2 * kPi / n;
  int kmax = 8;
  Rng rng(seed);
  std::vector<double> f = random_band_limited(n, dx, rng, kmax);
  std::vector<double> g = random_band_limited(n, dx, rng, kmax);
  PhaseDensity fden = coordinate_density(cs, zi);
  PhaseDensity gden = coordinate_density(cs, zj);

  // plain canonical bracket of the smeared functionals
  OracleResult canon = smeared_bracket_oracle(fden, gden, params, n, seed, 1.0);
  double num = canon.numeric;

  size_t S = cset.constraints.size();
  if (S > 0) {
    // rho_s(u) = {F[f], Phi_{s,u}},  gamma_s(u) = {Phi_{s,u}, G[g]}
    std::vector<std::vector<double>> rho(S), gamma(S);
    for (size_t s = 0; s < S; ++s) {
      const PhaseDensity& cons = cset.constraints[s].density;
      auto gf = functional_gradients(fden, f, params, dx);
      auto gg = functional_gradients(gden, g, params, dx);
      std::vector<double> r(n, 0.0), c(n, 0.0);
      for (auto& [z, cc] : cons.terms()) {
        int conj = cs.conjugate(z);
        // {Phi_su, F} = sum_pairs [c^s_q(D) gradF_p - c^s_p(D) gradF_q]_u
        for (auto& [zf, df] : gf)
          if (zf == conj) {
            auto t = apply_op_generic(cc, df, params, dx, false);
            double sign = cs.is_position(z) ? 1.0 : -1.0;
            for (int j = 0; j < n; ++j) r[j] += sign * t[j];
          }
        for (auto& [zg, dg] : gg)
          if (zg == conj) {
            auto t = apply_op_generic(cc, dg, params, dx, false);
            double sign = cs.is_position(z) ? 1.0 : -1.0;
            for (int j = 0; j < n; ++j) c[j] += sign * t[j];
          }
      }
      // r currently holds {Phi_su, F}; rho wants {F, Phi_su}
      for (int j = 0; j < n; ++j) r[j] = -r[j];
      rho[s] = std::move(r);
      gamma[s] = std::move(c);
    }

    // per-mode solve of Delta x = gamma over the active band
    std::vector<int> modes;
    for (int m = 1; m <= kmax; ++m) {
      modes.push_back(m);
      modes.push_back(n - m);
    }
    std::vector<std::vector<double>> x(S, std::vector<double>(n, 0.0));
    for (int m : modes) {
      double theta = 2 * kPi * m / n;
      CVec wv(n);
      for (int j = 0; j < n; ++j) wv[j] = std::exp(std::complex<double>(0, theta * j));
      // numeric Delta-hat(m): column t is {Phi_{s,u}, sum_v w(v) Phi_{t,v}} at u=0
      std::vector<CVec> dh(S, CVec(S));
      for (size_t t = 0; t < S; ++t)
        for (size_t s = 0; s < S; ++s) {
          CVec col = point_bracket_with_smeared(cset.constraints[s].density,
                                                cset.constraints[t].density, wv, params, dx);
          dh[s][t] = col[0];
        }
      // gamma-hat(m)
      CVec rh(S);
      for (size_t s = 0; s < S; ++s) {
        std::complex<double> acc = 0;
        for (int j = 0; j < n; ++j)
          acc += gamma[s][j] * std::exp(std::complex<double>(0, -theta * j));
        rh[s] = acc;
      }
      bool trivial = true;
      for (auto& v : rh)
        if (std::abs(v) > 1e-9 * n) trivial = false;
      if (trivial) continue;
      if (!solve_complex(dh, rh))
        throw SingularMatrix("lattice bracket matrix singular at an active mode");
      for (size_t s = 0; s < S; ++s)
        for (int j = 0; j < n; ++j)
          x[s][j] += std::real(rh[s] * std::exp(std::complex<double>(0, theta * j))) / n;
    }
    double corr = 0;
    for (size_t s = 0; s < S; ++s) corr += dot(rho[s], x[s]);
    num -= corr;
  }

  // symbolic side
  OpPoly kern = symbolic.is_polynomial() ? symbolic.as_polynomial()
                                         : throw InternalError("nonlocal Dirac kernel in oracle");
  std::vector<double> kf = apply_op(kern.adjoint(), f, params, dx);
  double sym = dot(kf, g) * dx;

  OracleResult res;
  res.numeric = num;
  res.symbolic = sym;
  res.error = std::abs(num - sym) / std::max({1.0, std::abs(num), std::abs(sym)});
  res.pass = res.error <= rel_tol;
  return res;
}

// ---------------------------------------------------------------- lattice

namespace {

// Orthogonal projection of a complex coordinate vector onto the null space of
// the constraint symbol matrix at one Fourier mode.  C zhat = 0 means zhat is
// orthogonal (Hermitian inner product) to the conjugated rows of C.
void project_mode(std::vector<CVec>& rows, CVec& zhat) {
  for (auto& r : rows)
    for (auto& v : r) v = std::conj(v);
  // modified Gram-Schmidt on the rows, then subtract row components
  std::vector<CVec> basis;
  for (auto row : rows) {
    for (auto& b : basis) {
      std::complex<double> ip = 0;
      for (size_t i = 0; i < row.size(); ++i) ip += std::conj(b[i]) * row[i];
      for (size_t i = 0; i < row.size(); ++i) row[i] -= ip * b[i];
    }
    double nrm = 0;
    for (auto& v : row) nrm += std::norm(v);
    nrm = std::sqrt(nrm);
    if (nrm > 1e-12) {
      for (auto& v : row) v /= nrm;
      basis.push_back(row);
    }
  }
  for (auto& b : basis) {
    std::complex<double> ip = 0;
    for (size_t i = 0; i < zhat.size(); ++i) ip += std::conj(b[i]) * zhat[i];
    for (size_t i = 0; i < zhat.size(); ++i) zhat[i] -= ip * b[i];
  }
}

struct CompiledEq {
  int coord;
  std::vector<std::pair<int, OpPoly>> terms;  // coordinate or multiplier -> operator
};

struct CompiledSystem {
  const ConstraintSet* cs;
  std::vector<double> params;
  double dx;
  std::vector<CompiledEq> eqs;            // one per canonical coordinate
  std::vector<int> lambda_coords;         // multiplier coordinate indices
  double free_multiplier;

  std::vector<std::vector<double>> multiplier_arrays(
      const std::vector<std::vector<double>>& z) const {
    const CoordSystem& co = *cs->coords;
    int n = static_cast<int>(z[0].size());
    std::vector<std::vector<double>> lam(co.nmult());
    for (int k = 0; k < co.nmult(); ++k) {
      const MultiplierInfo& mi = cs->multipliers[k];
      if (mi.status == MultiplierInfo::Determined && mi.pointwise) {
        std::vector<double> acc(n, 0.0);
        for (auto& [zc, op] : mi.expression.terms()) {
          if (co.is_multiplier_sector(zc))
            throw InternalError("multiplier expression references a multiplier");
          auto t = apply_op(op, z[zc], params, dx);
          for (int j = 0; j < n; ++j) acc[j] += t[j];
        }
        lam[k] = std::move(acc);
      } else {
        lam[k].assign(n, free_multiplier);
      }
    }
    return lam;
  }

  std::vector<std::vector<double>> rhs(const std::vector<std::vector<double>>& z) const {
    const CoordSystem& co = *cs->coords;
    int n = static_cast<int>(z[0].size());
    auto lam = multiplier_arrays(z);
    std::vector<std::vector<double>> out(co.ncanonical(), std::vector<double>(n, 0.0));
    for (auto& eq : eqs) {
      std::vector<double>& acc = out[eq.coord];
      for (auto& [zc, op] : eq.terms) {
        const std::vector<double>* src;
        if (co.is_multiplier_sector(zc)) {
          int k = zc - 2 * co.nfields();
          if (k >= co.nmult()) continue;  // p_lambda never feeds canonical equations
          src = &lam[k];
        } else {
          src = &z[zc];
        }
        auto t = apply_op(op, *src, params, dx);
        for (int j = 0; j < n; ++j) acc[j] += t[j];
      }
    }
    return out;
  }
};

CompiledSystem compile_system(const ConstraintSet& cs, const std::vector<double>& params,
                              double dx, double free_multiplier) {
  CompiledSystem sys;
  sys.cs = &cs;
  sys.params = params;
  sys.dx = dx;
  sys.free_multiplier = free_multiplier;
  const CoordSystem& co = *cs.coords;
  auto eqs = hamilton_equations(cs.legendre.extended);
  for (int i = 0; i < co.ncanonical(); ++i) {
    CompiledEq ce;
    ce.coord = i;
    for (auto& [z, op] : eqs[i].terms()) ce.terms.emplace_back(z, op);
    sys.eqs.push_back(std::move(ce));
  }
  return sys;
}

double hamiltonian_value(const ConstraintSet& cs, const std::vector<double>& params, double dx,
                         const std::vector<std::vector<double>>& z) {
  const QuadHamiltonian& H = cs.legendre.canonical;
  double acc = 0;
  for (auto& [key, op] : H.kernel()) {
    auto t = apply_op(op, z[key.second], params, dx);
    acc += 0.5 * dot(z[key.first], t) * dx;
  }
  return acc;
}

std::vector<double> constraint_values_max(const ConstraintSet& cs,
                                          const std::vector<double>& params, double dx,
                                          const std::vector<std::vector<double>>& z) {
  std::vector<double> out;
  int n = static_cast<int>(z[0].size());
  for (auto& c : cs.constraints) {
    std::vector<double> acc(n, 0.0);
    for (auto& [zc, op] : c.density.terms()) {
      auto t = apply_op(op, z[zc], params, dx);
      for (int j = 0; j < n; ++j) acc[j] += t[j];
    }
    double m = 0;
    for (double v : acc) m = std::max(m, std::abs(v));
    out.push_back(m);
  }
  return out;
}

}  // namespace

LatticeState project_initial_state(const ConstraintSet& cs, const std::vector<double>& params,
                                   int n, double dx, uint64_t seed, int kmax) {
  const CoordSystem& co = *cs.coords;
  int nc = co.ncanonical();
  Rng rng(seed);
  LatticeState st;
  st.n = n;
  st.dx = dx;
  st.z.assign(nc, std::vector<double>(n, 0.0));

  for (int m = 0; m <= kmax; ++m) {
    double theta = 2 * kPi * m / n;
    std::complex<double> sigma(0, std::sin(theta) / dx);  // lattice symbol of D
    // constraint symbol matrix at this mode
    std::vector<CVec> rows;
    for (auto& c : cs.constraints) {
      CVec row(nc, 0.0);
      for (auto& [z, op] : c.density.terms()) row[z] = op.eval(params, sigma);
      rows.push_back(std::move(row));
    }
    CVec zhat(nc);
    for (int i = 0; i < nc; ++i)
      zhat[i] = std::complex<double>(rng.uniform(), m == 0 ? 0.0 : rng.uniform()) /
                (1.0 + m);
    project_mode(rows, zhat);
    for (int i = 0; i < nc; ++i) {
      if (zhat[i] == std::complex<double>(0)) continue;
      for (int j = 0; j < n; ++j) {
        double ph = theta * j;
        st.z[i][j] += (m == 0 ? 0.5 : 1.0) *
                      2.0 * (std::real(zhat[i]) * std::cos(ph) - std::imag(zhat[i]) * std::sin(ph));
      }
    }
  }
  return st;
}

EvolveReport evolve_lattice(const ConstraintSet& cs, const std::vector<double>& params,
                            const LatticeState& init, double dt, int steps,
                            double free_multiplier) {
  const CoordSystem& co = *cs.coords;
  int n = init.n;
  double dx = init.dx;
  EvolveReport rep;
  rep.cfl_warning = dt > 0.5 * dx;

  // reject initial data off the constraint surface
  double scale = 1e-12;
  for (auto& arr : init.z)
    for (double v : arr) scale = std::max(scale, std::abs(v));
  auto cv0 = constraint_values_max(cs, params, dx, init.z);
  for (double v : cv0)
    if (v > 1e-12 * std::max(1.0, scale))
      throw DomainError("initial data violates the constraints beyond 1e-12");

  CompiledSystem sys = compile_system(cs, params, dx, free_multiplier);

  std::vector<std::vector<double>> z = init.z;
  std::vector<std::vector<double>> zprev;
  rep.constraint_drift.assign(cs.constraints.size(), 0.0);
  rep.energy_initial = hamiltonian_value(cs, params, dx, z);
  double e0 = rep.energy_initial;

  int iphi = -1, ia0 = -1, ia1 = -1;
  {
    auto f = co.index_of("phi");
    auto g0 = co.index_of("A0");
    auto g1 = co.index_of("A1");
    if (f && g0 && g1 && *f < co.nfields() && *g0 < co.nfields() && *g1 < co.nfields()) {
      iphi = *f;
      ia0 = *g0;
      ia1 = *g1;
      rep.has_current_check = true;
    }
  }

  auto step_rk4 = [&](std::vector<std::vector<double>>& state) {
    auto k1 = sys.rhs(state);
    auto add = [&](const std::vector<std::vector<double>>& base,
                   const std::vector<std::vector<double>>& dir, double s) {
      auto out = base;
      for (size_t i = 0; i < out.size(); ++i)
        for (int j = 0; j < n; ++j) out[i][j] += s * dir[i][j];
      return out;
    };
    auto k2 = sys.rhs(add(state, k1, dt / 2));
    auto k3 = sys.rhs(add(state, k2, dt / 2));
    auto k4 = sys.rhs(add(state, k3, dt));
    for (size_t i = 0; i < state.size(); ++i)
      for (int j = 0; j < n; ++j)
        state[i][j] += dt / 6 * (k1[i][j] + 2 * k2[i][j] + 2 * k3[i][j] + k4[i][j]);
  };

  for (int s = 0; s < steps; ++s) {
    auto zc = z;
    step_rk4(z);

    if (rep.has_current_check && !zprev.empty()) {
      // matter-side current divergence at the previous midpoint:
      //   phi_tt (time FD) - D^2 phi + A0_dot - D A1
      auto rhs_mid = sys.rhs(zc);
      std::vector<double> d2phi = central_diff(central_diff(zc[iphi], dx), dx);
      std::vector<double> da1 = central_diff(zc[ia1], dx);
      double mx = 0;
      for (int j = 0; j < n; ++j) {
        double phitt = (z[iphi][j] - 2 * zc[iphi][j] + zprev[iphi][j]) / (dt * dt);
        double div = phitt - d2phi[j] + rhs_mid[ia0][j] - da1[j];
        mx = std::max(mx, std::abs(div));
      }
      rep.max_current_div = std::max(rep.max_current_div, mx);
    }
    zprev = std::move(zc);

    if (s % 10 == 9 || s + 1 == steps) {
      auto cv = constraint_values_max(cs, params, dx, z);
      for (size_t i = 0; i < cv.size(); ++i)
        rep.constraint_drift[i] = std::max(rep.constraint_drift[i], cv[i]);
      double e = hamiltonian_value(cs, params, dx, z);
      rep.rel_energy_drift =
          std::max(rep.rel_energy_drift, std::abs(e - e0) / std::max(1.0, std::abs(e0)));
    }
  }
  for (double v : rep.constraint_drift) rep.max_constraint_drift = std::max(rep.max_constraint_drift, v);
  for (auto& arr : z)
    for (double v : arr) rep.field_scale = std::max(rep.field_scale, std::abs(v));
  if (rep.has_current_check) rep.max_current_div /= std::max(1.0, rep.field_scale);
  return rep;
}

double hamiltonian_gradient_check(const ConstraintSet& cs, const std::vector<double>& params,
                                  const LatticeState& state, double free_multiplier, uint64_t seed,
                                  int samples) {
  const CoordSystem& co = *cs.coords;
  int n = state.n;
  double dx = state.dx;
  CompiledSystem sys = compile_system(cs, params, dx, free_multiplier);
  auto lam = sys.multiplier_arrays(state.z);
  auto rhs = sys.rhs(state.z);

  // extended H with the multiplier arrays frozen
  auto h_ext = [&](const std::vector<std::vector<double>>& z) {
    double acc = hamiltonian_value(cs, params, dx, z);
    for (int k = 0; k < co.nmult(); ++k) {
      const PhaseDensity& prim = cs.legendre.primaries[k];
      std::vector<double> val(n, 0.0);
      for (auto& [zc, op] : prim.terms()) {
        auto t = apply_op(op, z[zc], params, dx);
        for (int j = 0; j < n; ++j) val[j] += t[j];
      }
      acc += dot(lam[k], val) * dx;
    }
    return acc;
  };

  Rng rng(seed);
  double worst = 0;
  double eps = 1e-6;
  for (int s = 0; s < samples; ++s) {
    int i = static_cast<int>(rng.next() % static_cast<uint64_t>(co.ncanonical()));
    int j = static_cast<int>(rng.next() % static_cast<uint64_t>(n));
    auto zp = state.z, zm = state.z;
    zp[i][j] += eps;
    zm[i][j] -= eps;
    double fd = (h_ext(zp) - h_ext(zm)) / (2 * eps * dx);
    int conj = co.conjugate(i);
    double analytic = co.is_position(i) ? -rhs[conj][j] : rhs[conj][j];
    // z_i is position: pdot = -dH/dq; z_i momentum: qdot = +dH/dp
    double err = std::abs(fd - analytic) / std::max(1.0, std::abs(analytic));
    worst = std::max(worst, err);
  }
  return worst;
}

}  // namespace dbkit
