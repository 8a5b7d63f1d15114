#pragma once

// Analysis pipeline driver and report rendering (text and JSON, schema 1).

#include <optional>
#include <string>
#include <vector>

#include "dbkit/dirac.hpp"

#include "json.hpp"

namespace dbkit {

struct AnalysisReport {
  std::string model_name;
  std::vector<std::pair<std::string, std::string>> bindings;  // applied parameter values
  ModelIR model;                                              // after binding
  ConstraintSet cset;                                         // closed + classified (+ gauge)
  bool gauged = false;
  std::optional<OpMatrix> delta_inverse;   // present when fully second class
  std::optional<BracketReport> commutators;
  std::vector<std::string> ledger_refs;    // ids into docs/discrepancies.md
};

// Full pipeline: legendre -> consistency closure -> classify -> optional gauge
// -> Dirac bracket table when the final set is fully second class.
AnalysisReport analyze_model(const ModelIR& m, const GaugeSpec& gauge,
                             const std::vector<std::pair<std::string, std::string>>& bindings = {});

nlohmann::ordered_json report_json(const AnalysisReport& rep);
std::string report_text(const AnalysisReport& rep);

nlohmann::ordered_json oppoly_json(const OpPoly& p, const std::vector<std::string>& params);
nlohmann::ordered_json oprat_json(const OpRat& r, const std::vector<std::string>& params);
nlohmann::ordered_json density_json(const PhaseDensity& d);

}  // namespace dbkit
