#pragma once

// The constraint engine: Poisson brackets of local densities, the
// consistency loop, first/second-class classification, gauge fixing,
// and Dirac brackets.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dbkit/frontend.hpp"
#include "dbkit/legendre.hpp"
#include "dbkit/opmatrix.hpp"

namespace dbkit {

// {F(y), G(x)} as a kernel on delta(y-x), using {q(y),p(x)} = delta(y-x)
// and d_x delta(y-x) = -d_y delta(y-x).
OpPoly poisson_bracket(const PhaseDensity& f, const PhaseDensity& g);

// {F(y), H} as a linear density; multiplier couplings of H contribute
// lambda-coordinate terms.
PhaseDensity bracket_with_hamiltonian(const PhaseDensity& f, const QuadHamiltonian& h);

struct Constraint {
  enum Provenance { Primary, Secondary, Gauge };
  std::string name;
  Provenance provenance;
  PhaseDensity density;
};

struct MultiplierInfo {
  enum Status { Undetermined, Determined, SpatiallyConstant };
  Status status = Undetermined;
  // Determined with pointwise=true: lambda = expression (strong solve).
  // Determined with pointwise=false: only the operator relation u(D) lambda = -rest holds.
  bool pointwise = false;
  PhaseDensity expression;
  OpPoly u;  // coefficient operator the multiplier appeared through
};

struct ConstraintSet {
  std::shared_ptr<const CoordSystem> coords;
  LegendreData legendre;
  std::vector<Constraint> constraints;
  std::vector<MultiplierInfo> multipliers;  // one per primary
  bool closed = false;

  // classification data (filled by classify)
  bool classified = false;
  OpMatrix delta;
  std::vector<std::vector<OpPoly>> first_class_basis;
  int second_class_rank = 0;

  int find(const std::string& name) const;
  std::vector<std::vector<OpPoly>> constraint_rows() const;
};

ConstraintSet consistency_closure(const ModelIR& m);
void classify(ConstraintSet& cs);
ConstraintSet add_gauge_fixing(const ConstraintSet& cs, const GaugeSpec& g);

// Caches the inverse bracket matrix of a fully second-class set.
class DiracEvaluator {
 public:
  explicit DiracEvaluator(const ConstraintSet& cs);
  OpRat bracket(const PhaseDensity& u, const PhaseDensity& v) const;
  OpRat bracket_coords(int i, int j) const;
  const OpMatrix& delta_inverse() const { return inv_; }

 private:
  const ConstraintSet& cs_;
  OpMatrix inv_;
};

OpRat dirac_bracket(const PhaseDensity& u, const PhaseDensity& v, const ConstraintSet& cs);

struct BracketEntry {
  int i, j;        // canonical coordinate indices, i <= j
  OpRat kernel;    // [z_i(y), z_j(x)]_D
};

struct BracketReport {
  std::vector<BracketEntry> entries;  // nonvanishing only
};

BracketReport commutator_report(const ConstraintSet& cs);

PhaseDensity coordinate_density(const CoordSystem& cs, int idx);

}  // namespace dbkit
