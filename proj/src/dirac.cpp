#include "dbkit/dirac.hpp"

#include <algorithm>
#include <sstream>

namespace dbkit {

OpPoly poisson_bracket(const PhaseDensity& f, const PhaseDensity& g) {
  if (f.coords() != g.coords() || !f.coords())
    throw InternalError("bracket of densities over different coordinate sets");
  const CoordSystem& cs = *f.coords();
  OpPoly k(cs.nvars());
  for (auto& [i, fc] : f.terms()) {
    if (!cs.is_position(i)) continue;
    OpPoly gp = g.coeff(cs.conjugate(i));
    if (!gp.is_zero()) k = k + fc * gp.adjoint();
  }
  for (auto& [i, fc] : f.terms()) {
    if (cs.is_position(i)) continue;
    OpPoly gq = g.coeff(cs.conjugate(i));
    if (!gq.is_zero()) k = k - fc * gq.adjoint();
  }
  return k;
}

PhaseDensity bracket_with_hamiltonian(const PhaseDensity& f, const QuadHamiltonian& h) {
  const CoordSystem& cs = *h.coords();
  PhaseDensity r(&cs);
  for (auto& [i, c] : f.terms()) {
    PhaseDensity dh = h.variational_derivative(cs.conjugate(i));
    if (dh.is_zero()) continue;
    r = cs.is_position(i) ? r + dh.apply(c) : r - dh.apply(c);
  }
  return r;
}

int ConstraintSet::find(const std::string& name) const {
  for (size_t i = 0; i < constraints.size(); ++i)
    if (constraints[i].name == name) return static_cast<int>(i);
  return -1;
}

std::vector<std::vector<OpPoly>> ConstraintSet::constraint_rows() const {
  std::vector<std::vector<OpPoly>> rows;
  rows.reserve(constraints.size());
  for (auto& c : constraints) rows.push_back(c.density.row(coords->ncanonical()));
  return rows;
}

namespace {

// Replace determined multipliers by their expressions until none remain
// (expressions may reference multipliers determined later in the scan).
PhaseDensity substitute_multipliers(PhaseDensity expr, const ConstraintSet& cs) {
  const CoordSystem& co = *cs.coords;
  for (int round = 0; round <= co.nmult(); ++round) {
    bool changed = false;
    for (int k = 0; k < co.nmult(); ++k) {
      if (cs.multipliers[k].status != MultiplierInfo::Determined || !cs.multipliers[k].pointwise)
        continue;
      int lam = co.multiplier(k);
      OpPoly u = expr.coeff(lam);
      if (u.is_zero()) continue;
      expr.set(lam, OpPoly(co.nvars()));
      expr = expr + cs.multipliers[k].expression.apply(u);
      changed = true;
    }
    if (!changed) break;
  }
  return expr;
}

}  // namespace

ConstraintSet consistency_closure(const ModelIR& m) {
  ConstraintSet cs;
  cs.legendre = legendre_transform(m);
  cs.coords = cs.legendre.coords;
  const CoordSystem& co = *cs.coords;
  cs.multipliers.assign(co.nmult(), MultiplierInfo{});

  for (size_t k = 0; k < cs.legendre.primaries.size(); ++k)
    cs.constraints.push_back(Constraint{"C" + std::to_string(k + 1), Constraint::Primary,
                                        cs.legendre.primaries[k]});

  const size_t bound = 4 * static_cast<size_t>(co.ncoords());
  HermiteBasis module(co.nvars(), co.ncanonical());
  for (auto& c : cs.constraints) module.add_row(c.density.row(co.ncanonical()));

  for (size_t idx = 0; idx < cs.constraints.size(); ++idx) {
    if (cs.constraints.size() > bound) {
      std::ostringstream os;
      os << "chain";
      for (auto& c : cs.constraints) os << " " << c.name;
      throw NonTermination(os.str());
    }
    PhaseDensity expr = bracket_with_hamiltonian(cs.constraints[idx].density, cs.legendre.extended);
    expr = substitute_multipliers(expr, cs);

    bool consumed = false;
    for (int k = 0; k < co.nmult() && !consumed; ++k) {
      int lam = co.multiplier(k);
      OpPoly u = expr.coeff(lam);
      if (u.is_zero() || cs.multipliers[k].status == MultiplierInfo::Determined) continue;
      if (u.has_constant_term()) {
        // invertible dependence: the equation determines the multiplier
        PhaseDensity rest = expr;
        rest.set(lam, OpPoly(co.nvars()));
        MultiplierInfo info;
        info.status = MultiplierInfo::Determined;
        info.u = u;
        if (u.degree() == 0) {
          info.pointwise = true;
          info.expression = rest * (-u.coeff(0).inverse());
        } else {
          // formally invertible operator coefficient; no pointwise solve
          info.expression = PhaseDensity(&co);
        }
        cs.multipliers[k] = info;
        consumed = true;
      } else {
        // pure-derivative dependence: u = D * (...); record the
        // spatially-constant condition and keep the phase remainder
        if (cs.multipliers[k].status == MultiplierInfo::Undetermined) {
          MultiplierInfo info;
          info.status = MultiplierInfo::SpatiallyConstant;
          info.u = u;
          cs.multipliers[k] = info;
        }
        expr.set(lam, OpPoly(co.nvars()));
      }
    }
    if (consumed) continue;

    if (expr.involves_multipliers())
      throw InternalError("consistency residue still references a multiplier");
    if (expr.is_zero()) continue;
    if (module.contains(expr.row(co.ncanonical()))) continue;

    Constraint nc;
    nc.provenance = Constraint::Secondary;
    nc.density = expr.sign_normalized();
    nc.name = "C" + std::to_string(cs.constraints.size() + 1);
    module.add_row(nc.density.row(co.ncanonical()));
    cs.constraints.push_back(std::move(nc));
  }

  // closure check: every consistency residual must now vanish weakly
  cs.closed = true;
  for (auto& c : cs.constraints) {
    PhaseDensity expr = bracket_with_hamiltonian(c.density, cs.legendre.extended);
    expr = substitute_multipliers(expr, cs);
    for (int k = 0; k < co.nmult(); ++k) {
      if (cs.multipliers[k].status == MultiplierInfo::SpatiallyConstant ||
          (cs.multipliers[k].status == MultiplierInfo::Determined &&
           cs.multipliers[k].u.degree() > 0))
        expr.set(co.multiplier(k), OpPoly(co.nvars()));
      else if (cs.multipliers[k].status == MultiplierInfo::Undetermined &&
               !expr.coeff(co.multiplier(k)).is_zero())
        cs.closed = false;  // an undetermined multiplier still enters; not closed
    }
    if (expr.involves_multipliers()) continue;
    if (!expr.is_zero() && !module.contains(expr.row(co.ncanonical()))) cs.closed = false;
  }
  if (!cs.closed) throw InternalError("consistency loop terminated without closing");
  return cs;
}

void classify(ConstraintSet& cs) {
  const CoordSystem& co = *cs.coords;
  size_t n = cs.constraints.size();
  OpMatrix delta(co.nvars(), n, n);
  for (size_t i = 0; i < n; ++i) {
    delta.row_labels[i] = cs.constraints[i].name;
    delta.col_labels[i] = cs.constraints[i].name;
  }
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      delta.set(i, j, poisson_bracket(cs.constraints[i].density, cs.constraints[j].density));
  cs.delta = delta;
  cs.first_class_basis = mat_left_kernel(delta);
  cs.second_class_rank = static_cast<int>(n - cs.first_class_basis.size());
  cs.classified = true;
}

ConstraintSet add_gauge_fixing(const ConstraintSet& cs, const GaugeSpec& g) {
  if (!cs.classified) throw InternalError("gauge fixing requires a classified constraint set");
  if (g.sources.empty()) return cs;
  ConstraintSet out = cs;
  int gi = 0;
  for (auto& src : g.sources) {
    PhaseDensity d = parse_phase_density(src, *out.coords);
    out.constraints.push_back(Constraint{"G" + std::to_string(++gi), Constraint::Gauge, d});
  }
  classify(out);
  if (!out.first_class_basis.empty()) {
    std::ostringstream os;
    for (size_t v = 0; v < out.first_class_basis.size(); ++v) {
      if (v) os << "; ";
      bool first = true;
      for (size_t i = 0; i < out.constraints.size(); ++i) {
        const OpPoly& c = out.first_class_basis[v][i];
        if (c.is_zero()) continue;
        if (!first) os << " + ";
        std::string cp = c.str(out.coords->params());
        if (cp != "1") os << "(" << cp << ")*";
        os << out.constraints[i].name;
        first = false;
      }
    }
    throw GaugeIncomplete(os.str());
  }
  return out;
}

PhaseDensity coordinate_density(const CoordSystem& cs, int idx) {
  PhaseDensity d(&cs);
  d.add(idx, OpPoly::constant(cs.nvars(), 1));
  return d;
}

DiracEvaluator::DiracEvaluator(const ConstraintSet& cs) : cs_(cs) {
  if (!cs.classified) throw InternalError("Dirac brackets require a classified constraint set");
  if (!cs.first_class_basis.empty())
    throw SingularMatrix("first-class content remains; bracket matrix is not invertible");
  if (!cs.constraints.empty()) inv_ = mat_inverse(cs.delta);
}

OpRat DiracEvaluator::bracket(const PhaseDensity& u, const PhaseDensity& v) const {
  size_t n = cs_.constraints.size();
  OpRat out = OpRat::of(poisson_bracket(u, v));
  if (n == 0) return out;
  std::vector<OpPoly> r(n), c(n);
  for (size_t s = 0; s < n; ++s) {
    r[s] = poisson_bracket(u, cs_.constraints[s].density);
    c[s] = poisson_bracket(cs_.constraints[s].density, v);
  }
  for (size_t s = 0; s < n; ++s) {
    if (r[s].is_zero()) continue;
    for (size_t t = 0; t < n; ++t) {
      if (c[t].is_zero() || inv_.at(s, t).is_zero()) continue;
      out = out - OpRat::of(r[s]) * inv_.at(s, t) * OpRat::of(c[t]);
    }
  }
  return out;
}

OpRat DiracEvaluator::bracket_coords(int i, int j) const {
  const CoordSystem& co = *cs_.coords;
  return bracket(coordinate_density(co, i), coordinate_density(co, j));
}

OpRat dirac_bracket(const PhaseDensity& u, const PhaseDensity& v, const ConstraintSet& cs) {
  DiracEvaluator ev(cs);
  return ev.bracket(u, v);
}

BracketReport commutator_report(const ConstraintSet& cs) {
  DiracEvaluator ev(cs);
  const CoordSystem& co = *cs.coords;
  BracketReport rep;
  for (int i = 0; i < co.ncanonical(); ++i)
    for (int j = i; j < co.ncanonical(); ++j) {
      OpRat k = ev.bracket_coords(i, j);
      if (!k.is_zero()) rep.entries.push_back(BracketEntry{i, j, k});
    }
  return rep;
}

}  // namespace dbkit
