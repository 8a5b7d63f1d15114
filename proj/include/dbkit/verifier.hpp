#pragma once

// Floating-point cross checks for the symbolic engine: plane-wave solution
// verification, smeared-bracket oracles on a periodic grid, and lattice
// integration of the emitted Hamilton equations.

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "dbkit/dirac.hpp"

namespace dbkit {

// splitmix64-based generator; deterministic across platforms.
class Rng {
 public:
  explicit Rng(uint64_t seed) : s_(seed) {}
  uint64_t next();
  double uniform();  // [-1, 1)
 private:
  uint64_t s_;
};

struct CheckRecord {
  std::string check;
  std::string model;
  std::string params;
  double value = 0;
  double tolerance = 0;
  bool pass = false;
};

// ---- plane-wave verification of the closed-form solution structure ----

struct PlaneWaveConfig {
  double a = 2.0;
  double e = 1.0;
  double k = 0.7;
  double amp_sigma = 1.0;
  double amp_h = 1.0;
};

struct AnsatzReport {
  double m2 = 0, omega = 0;
  double res_scalar_eq = 0;   // scalar field equation residual (max-norm)
  double res_vector_eq = 0;   // vector field equation residual (both components)
  double res_kg_f = 0;        // (box + m^2) F
  double res_f_identity = 0;  // F + a e (phi + h)
  double field_scale = 1;
  bool pass = false;
  std::vector<CheckRecord> records;
};

AnsatzReport verify_ansatz(const PlaneWaveConfig& cfg, int nt = 48, int nx = 48,
                           double tmax = 6.0, double xmax = 6.0, double rel_tol = 1e-10);

// ---- smeared-bracket oracle ----

struct OracleResult {
  double numeric = 0;
  double symbolic = 0;
  double error = 0;
  bool pass = false;
};

// Canonical bracket of the discretized smeared functionals F[f], G[g] against
// the symbolic kernel smeared with the same test functions.
OracleResult smeared_bracket_oracle(const PhaseDensity& f, const PhaseDensity& g,
                                    const std::vector<double>& params, int n, uint64_t seed,
                                    double rel_tol);

// Finite-dimensional Dirac bracket on the lattice (band-limited smearing,
// per-mode inversion of the numeric constraint matrix) against a symbolic kernel.
OracleResult smeared_dirac_oracle(const ConstraintSet& cs, int zi, int zj, const OpRat& symbolic,
                                  const std::vector<double>& params, int n, uint64_t seed,
                                  double rel_tol);

// ---- lattice evolution ----

struct LatticeState {
  int n = 0;
  double dx = 0;
  double t = 0;
  std::vector<std::vector<double>> z;  // one array per canonical coordinate
};

struct EvolveReport {
  std::vector<double> constraint_drift;  // max |C_s| over the run, per constraint
  double max_constraint_drift = 0;
  double rel_energy_drift = 0;
  double max_current_div = 0;  // only for models with fields phi, A0, A1
  bool has_current_check = false;
  double field_scale = 1;
  bool cfl_warning = false;
  double energy_initial = 0;
};

// Random band-limited state projected onto the lattice constraint surface.
LatticeState project_initial_state(const ConstraintSet& cs, const std::vector<double>& params,
                                   int n, double dx, uint64_t seed, int kmax = 8);

EvolveReport evolve_lattice(const ConstraintSet& cs, const std::vector<double>& params,
                            const LatticeState& init, double dt, int steps,
                            double free_multiplier = 0.0);

// Max relative error between the compiled equations of motion and central
// finite differences of the discretized Hamiltonian (multipliers frozen).
double hamiltonian_gradient_check(const ConstraintSet& cs, const std::vector<double>& params,
                                  const LatticeState& state, double free_multiplier = 0.0,
                                  uint64_t seed = 7, int samples = 64);

// grid helpers shared with tests
std::vector<double> central_diff(const std::vector<double>& v, double dx);
std::vector<double> apply_op(const OpPoly& p, const std::vector<double>& v,
                             const std::vector<double>& params, double dx);

}  // namespace dbkit
