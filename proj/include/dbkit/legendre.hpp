#pragma once

// Legendre transform for quadratic first-order Lagrangians: canonical
// momenta, primary constraints from the singular velocity Hessian, the
// canonical and extended Hamiltonians, and Hamilton's equations.

#include <map>
#include <memory>
#include <vector>

#include "dbkit/model.hpp"

namespace dbkit {

// pi_i = sum_j W_ij * v_j + field_part_i
struct Momentum {
  std::vector<ParamRat> velocity_coeffs;  // row of the velocity Hessian
  PhaseDensity field_part;                // velocity-free remainder (field coordinates only)
};

// H = (1/2) integral z^T K(D) z with the self-adjointness K_ij(D) = K_ji(-D).
// Multiplier couplings enter K through the lambda coordinates, so the same
// kernel drives both H and H_E.
class QuadHamiltonian {
 public:
  QuadHamiltonian() = default;
  explicit QuadHamiltonian(const CoordSystem* cs) : cs_(cs) {}

  const CoordSystem* coords() const { return cs_; }
  const std::map<std::pair<int, int>, OpPoly>& kernel() const { return k_; }

  // integral z_i c(D) z_j, symmetrized into the kernel
  void add_term(int i, int j, const OpPoly& c);
  // integral (D^mi z_i)(D^mj z_j) scaled by c
  void add_quad(int i, int mi, int j, int mj, const ParamRat& c);
  // integral of the product of two linear densities
  void add_product(const PhaseDensity& f, const PhaseDensity& g, const ParamRat& scale);

  OpPoly entry(int i, int j) const;
  PhaseDensity variational_derivative(int idx) const;  // dH/dz_idx
  bool self_adjoint() const;

  bool operator==(const QuadHamiltonian& o) const { return k_ == o.k_; }

  std::vector<std::pair<int, PhaseDensity>> multiplier_couplings;  // (lambda coord, primary)

 private:
  const CoordSystem* cs_ = nullptr;
  std::map<std::pair<int, int>, OpPoly> k_;
};

struct LegendreData {
  // shared so that densities can hold stable pointers across copies/moves
  std::shared_ptr<const CoordSystem> coords;
  std::vector<Momentum> momenta;      // one per field
  std::vector<std::vector<ParamRat>> hessian;
  std::vector<PhaseDensity> primaries;
  QuadHamiltonian canonical;          // no multiplier couplings
  QuadHamiltonian extended;           // canonical + lambda couplings
};

LegendreData legendre_transform(const ModelIR& m);

// z_dot for every coordinate (multipliers evolve trivially).
std::map<int, PhaseDensity> hamilton_equations(const QuadHamiltonian& h);

}  // namespace dbkit
