#include "dbkit/report.hpp"

#include <sstream>

namespace dbkit {

using nlohmann::ordered_json;

namespace {

std::vector<std::string> ledger_refs_for(const std::string& preset, bool gauged) {
  if (preset == "jr-symbolic")
    return {"symbolic-primary-bracket", "hamiltonian-stray-momentum-term",
            "a0-pi-commutator-rows", "derivative-index-conventions"};
  if (preset == "jr-wz" && !gauged) return {"multiplier-condition", "first-class-count"};
  if (preset == "jr-wz-gaugefixed" || (preset == "jr-wz" && gauged))
    return {"gauge-condition-sign", "gauge-matrix-shape", "theta-commutators",
            "multiplier-condition"};
  return {};
}

const char* provenance_str(Constraint::Provenance p) {
  switch (p) {
    case Constraint::Primary: return "primary";
    case Constraint::Secondary: return "secondary";
    case Constraint::Gauge: return "gauge";
  }
  return "?";
}

}  // namespace

AnalysisReport analyze_model(const ModelIR& m, const GaugeSpec& gauge,
                             const std::vector<std::pair<std::string, std::string>>& bindings) {
  AnalysisReport rep;
  rep.model_name = m.name;
  rep.model = m;
  rep.bindings = bindings;
  rep.cset = consistency_closure(m);
  classify(rep.cset);
  if (!gauge.sources.empty()) {
    rep.cset = add_gauge_fixing(rep.cset, gauge);
    rep.gauged = true;
  }
  if (rep.cset.first_class_basis.empty()) {
    DiracEvaluator ev(rep.cset);
    if (!rep.cset.constraints.empty()) rep.delta_inverse = ev.delta_inverse();
    rep.commutators = commutator_report(rep.cset);
  }
  rep.ledger_refs = ledger_refs_for(m.name, rep.gauged);
  return rep;
}

ordered_json oppoly_json(const OpPoly& p, const std::vector<std::string>& params) {
  ordered_json coeffs = ordered_json::array();
  for (int k = 0; k <= p.degree(); ++k) coeffs.push_back(p.coeff(k).str(params));
  if (p.is_zero()) coeffs.push_back("0");
  return ordered_json{{"coeffs", coeffs}, {"var", "D"}};
}

ordered_json oprat_json(const OpRat& r, const std::vector<std::string>& params) {
  if (r.is_polynomial()) return oppoly_json(r.as_polynomial(), params);
  return ordered_json{{"num", oppoly_json(r.num(), params)},
                      {"den", oppoly_json(r.den(), params)}};
}

ordered_json density_json(const PhaseDensity& d) {
  ordered_json out = ordered_json::object();
  const CoordSystem& cs = *d.coords();
  for (auto& [i, p] : d.terms()) out[cs.name(i)] = oppoly_json(p, cs.params());
  return out;
}

ordered_json report_json(const AnalysisReport& rep) {
  const CoordSystem& co = *rep.cset.coords;
  const auto& params = co.params();
  ordered_json j;
  j["schema"] = 1;
  j["model"] = {{"name", rep.model_name}, {"fields", rep.model.fields},
                {"params", rep.model.params}};
  ordered_json bj = ordered_json::object();
  for (auto& [k, v] : rep.bindings) bj[k] = v;
  j["model"]["bindings"] = bj;

  ordered_json momenta = ordered_json::object();
  for (int i = 0; i < co.nfields(); ++i) {
    const Momentum& mom = rep.cset.legendre.momenta[i];
    ordered_json vels = ordered_json::object();
    for (int k = 0; k < co.nfields(); ++k)
      if (!mom.velocity_coeffs[k].is_zero())
        vels["dt(" + co.name(k) + ")"] = mom.velocity_coeffs[k].str(params);
    momenta[co.name(co.momentum(i))] = {{"velocities", vels},
                                        {"fields", density_json(mom.field_part)}};
  }
  j["momenta"] = momenta;

  ordered_json kernel = ordered_json::array();
  for (auto& [key, p] : rep.cset.legendre.canonical.kernel())
    kernel.push_back({{"i", co.name(key.first)},
                      {"j", co.name(key.second)},
                      {"op", oppoly_json(p, params)}});
  j["hamiltonian"] = {{"kernel", kernel}};

  ordered_json cj = ordered_json::array();
  for (auto& c : rep.cset.constraints)
    cj.push_back({{"name", c.name},
                  {"provenance", provenance_str(c.provenance)},
                  {"density", density_json(c.density)}});
  j["constraints"] = cj;

  ordered_json mj = ordered_json::array();
  for (int k = 0; k < co.nmult(); ++k) {
    const MultiplierInfo& mi = rep.cset.multipliers[k];
    ordered_json e = {{"name", co.name(co.multiplier(k))}};
    switch (mi.status) {
      case MultiplierInfo::Undetermined:
        e["status"] = "undetermined";
        break;
      case MultiplierInfo::SpatiallyConstant:
        e["status"] = "spatially-constant";
        break;
      case MultiplierInfo::Determined:
        e["status"] = "determined";
        if (mi.pointwise)
          e["expression"] = density_json(mi.expression);
        else
          e["relation"] = oppoly_json(mi.u, params);
        break;
    }
    mj.push_back(e);
  }
  j["multipliers"] = mj;

  ordered_json dj;
  dj["labels"] = ordered_json::array();
  for (auto& l : rep.cset.delta.row_labels) dj["labels"].push_back(l);
  ordered_json rowsj = ordered_json::array();
  for (size_t i = 0; i < rep.cset.delta.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (size_t jj = 0; jj < rep.cset.delta.cols(); ++jj)
      row.push_back(oprat_json(rep.cset.delta.at(i, jj), params));
    rowsj.push_back(row);
  }
  dj["entries"] = rowsj;
  j["delta"] = dj;

  ordered_json fc = ordered_json::array();
  for (auto& v : rep.cset.first_class_basis) {
    ordered_json vj = ordered_json::array();
    for (auto& p : v) vj.push_back(oppoly_json(p, params));
    fc.push_back(vj);
  }
  j["classification"] = {{"first_class_dimension", rep.cset.first_class_basis.size()},
                         {"second_class_rank", rep.cset.second_class_rank},
                         {"first_class_basis", fc},
                         {"fully_second_class", rep.cset.first_class_basis.empty()}};

  if (rep.delta_inverse) {
    ordered_json inv = ordered_json::array();
    for (size_t i = 0; i < rep.delta_inverse->rows(); ++i) {
      ordered_json row = ordered_json::array();
      for (size_t jj = 0; jj < rep.delta_inverse->cols(); ++jj)
        row.push_back(oprat_json(rep.delta_inverse->at(i, jj), params));
      inv.push_back(row);
    }
    j["delta_inverse"] = inv;
  } else {
    j["delta_inverse"] = nullptr;
  }

  if (rep.commutators) {
    ordered_json tj = ordered_json::array();
    for (auto& e : rep.commutators->entries)
      tj.push_back({{"a", co.name(e.i)}, {"b", co.name(e.j)},
                    {"kernel", oprat_json(e.kernel, params)}});
    j["commutators"] = tj;
  } else {
    j["commutators"] = nullptr;
  }

  j["ledger"] = rep.ledger_refs;
  return j;
}

std::string report_text(const AnalysisReport& rep) {
  const CoordSystem& co = *rep.cset.coords;
  const auto& params = co.params();
  std::ostringstream os;
  os << "model: " << rep.model_name;
  if (!rep.bindings.empty()) {
    os << " [";
    for (size_t i = 0; i < rep.bindings.size(); ++i)
      os << (i ? ", " : "") << rep.bindings[i].first << "=" << rep.bindings[i].second;
    os << "]";
  }
  os << "\nfields:";
  for (auto& f : rep.model.fields) os << " " << f;
  os << "\n\nmomenta:\n";
  for (int i = 0; i < co.nfields(); ++i) {
    const Momentum& mom = rep.cset.legendre.momenta[i];
    os << "  " << co.name(co.momentum(i)) << " =";
    bool any = false;
    for (int k = 0; k < co.nfields(); ++k)
      if (!mom.velocity_coeffs[k].is_zero()) {
        std::string c = mom.velocity_coeffs[k].str(params);
        os << (any ? " + " : " ");
        if (c != "1") os << c << "*";
        os << "dt(" << co.name(k) << ")";
        any = true;
      }
    if (!mom.field_part.is_zero()) {
      std::string fp = mom.field_part.str();
      if (any && !fp.empty() && fp[0] == '-')
        os << " - " << fp.substr(1);
      else
        os << (any ? " + " : " ") << fp;
      any = true;
    }
    if (!any) os << " 0";
    os << "\n";
  }

  os << "\nconstraints:\n";
  for (auto& c : rep.cset.constraints)
    os << "  " << c.name << " (" << provenance_str(c.provenance) << "): " << c.density.str()
       << " ~ 0\n";

  os << "\nmultipliers:\n";
  for (int k = 0; k < co.nmult(); ++k) {
    const MultiplierInfo& mi = rep.cset.multipliers[k];
    os << "  " << co.name(co.multiplier(k)) << ": ";
    switch (mi.status) {
      case MultiplierInfo::Undetermined: os << "undetermined (gauge freedom)"; break;
      case MultiplierInfo::SpatiallyConstant: os << "spatially-constant condition recorded"; break;
      case MultiplierInfo::Determined:
        os << "determined";
        if (mi.pointwise) os << " = " << mi.expression.str();
        break;
    }
    os << "\n";
  }

  os << "\nbracket matrix delta(y,x):\n";
  for (size_t i = 0; i < rep.cset.delta.rows(); ++i) {
    os << "  [" << rep.cset.delta.row_labels[i] << "]";
    for (size_t j = 0; j < rep.cset.delta.cols(); ++j)
      os << "  " << rep.cset.delta.at(i, j).kernel_str(params);
    os << "\n";
  }

  if (rep.cset.first_class_basis.empty()) {
    os << "\nclassification: fully second class (rank " << rep.cset.second_class_rank << ")\n";
  } else {
    os << "\nclassification: first-class directions remain (kernel dimension "
       << rep.cset.first_class_basis.size() << ", second-class rank "
       << rep.cset.second_class_rank << ")\n";
    for (auto& v : rep.cset.first_class_basis) {
      os << "  kernel vector:";
      for (size_t i = 0; i < v.size(); ++i) {
        if (v[i].is_zero()) continue;
        std::string c = v[i].str(params);
        os << " ";
        if (c != "1") os << "(" << c << ")*";
        os << rep.cset.constraints[i].name;
      }
      os << "\n";
    }
  }

  if (rep.delta_inverse) {
    os << "\ninverse bracket matrix:\n";
    for (size_t i = 0; i < rep.delta_inverse->rows(); ++i) {
      os << "  [" << rep.cset.delta.row_labels[i] << "]";
      for (size_t j = 0; j < rep.delta_inverse->cols(); ++j)
        os << "  " << rep.delta_inverse->at(i, j).kernel_str(params);
      os << "\n";
    }
  }

  if (rep.commutators) {
    os << "\nnonvanishing equal-time commutators (i times kernel):\n";
    for (auto& e : rep.commutators->entries)
      os << "  [" << co.name(e.i) << "(y), " << co.name(e.j) << "(x)] = i ("
         << e.kernel.kernel_str(params) << ")\n";
  }

  if (!rep.ledger_refs.empty()) {
    os << "\nsee docs/discrepancies.md:";
    for (auto& r : rep.ledger_refs) os << " " << r;
    os << "\n";
  }
  return os.str();
}

}  // namespace dbkit
