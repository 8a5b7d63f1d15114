#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "dbkit/frontend.hpp"
#include "dbkit/legendre.hpp"

using namespace dbkit;

namespace {

PhaseDensity density(const CoordSystem& cs,
                     const std::vector<std::pair<std::string, OpPoly>>& terms) {
  PhaseDensity d(&cs);
  for (auto& [name, op] : terms) {
    auto idx = cs.index_of(name);
    REQUIRE(idx.has_value());
    d.add(*idx, op);
  }
  return d;
}

}  // namespace

TEST_CASE("canonical momenta of the symbolic model") {
  ModelIR m = preset_model("jr-symbolic").model;
  LegendreData ld = legendre_transform(m);
  const CoordSystem& cs = *ld.coords;
  int nv = 2;
  ParamRat e = ParamRat::variable(nv, 1);

  // p_A0 = 0
  CHECK(ld.momenta[1].field_part.is_zero());
  for (auto& w : ld.momenta[1].velocity_coeffs) CHECK(w.is_zero());

  // p_A1 = dt(A1) - dx(A0)
  CHECK(ld.momenta[2].velocity_coeffs[2] == ParamRat::constant(nv, 1));
  CHECK(ld.momenta[2].field_part == density(cs, {{"A0", -OpPoly::d(nv)}}));

  // p_phi = dt(phi) + e (A0 - A1)
  CHECK(ld.momenta[0].velocity_coeffs[0] == ParamRat::constant(nv, 1));
  CHECK(ld.momenta[0].field_part ==
        density(cs, {{"A0", OpPoly::constant(nv, e)}, {"A1", OpPoly::constant(nv, -e)}}));
}

TEST_CASE("velocity-free momentum of the gauge-invariant model") {
  ModelIR m = preset_model("jr-wz").model;
  LegendreData ld = legendre_transform(m);
  const CoordSystem& cs = *ld.coords;
  // p_theta = A1 + dx(phi)
  for (auto& w : ld.momenta[3].velocity_coeffs) CHECK(w.is_zero());
  CHECK(ld.momenta[3].field_part ==
        density(cs, {{"A1", OpPoly::constant(0, 1)}, {"phi", OpPoly::d(0)}}));
}

TEST_CASE("free scalar has an invertible Hessian and no primaries") {
  ModelIR m = parse_model("fields phi; L = 1/2*dt(phi)^2 - 1/2*dx(phi)^2;");
  LegendreData ld = legendre_transform(m);
  CHECK(ld.primaries.empty());
  CHECK(ld.coords->nmult() == 0);
  CHECK(ld.momenta[0].velocity_coeffs[0] == ParamRat::constant(0, 1));
  CHECK(ld.momenta[0].field_part.is_zero());
}

TEST_CASE("primary constraints from the Hessian null space") {
  {
    LegendreData ld = legendre_transform(preset_model("jr-symbolic").model);
    const CoordSystem& cs = *ld.coords;
    REQUIRE(ld.primaries.size() == 1);
    CHECK(ld.primaries[0] == density(cs, {{"p_A0", OpPoly::constant(2, 1)}}));
  }
  {
    LegendreData ld = legendre_transform(preset_model("jr-wz").model);
    const CoordSystem& cs = *ld.coords;
    REQUIRE(ld.primaries.size() == 2);
    CHECK(ld.primaries[0] == density(cs, {{"p_A0", OpPoly::constant(0, 1)}}));
    CHECK(ld.primaries[1] == density(cs, {{"p_theta", OpPoly::constant(0, 1)},
                                          {"A1", OpPoly::constant(0, -1)},
                                          {"phi", -OpPoly::d(0)}}));
  }
}

TEST_CASE("canonical Hamiltonian of the a=1 model") {
  LegendreData ld = legendre_transform(preset_model("jr-a1").model);
  const CoordSystem& cs = *ld.coords;
  auto idx = [&](const char* n) { return *cs.index_of(n); };
  int phi = idx("phi"), A0 = idx("A0"), A1 = idx("A1");
  int ppi = idx("p_phi"), p1 = idx("p_A1");

  // H = 1/2 p^2 + 1/2 p1^2 + 1/2 phi'^2 + p1 A0' + (p + phi' + A1)(A1 - A0)
  QuadHamiltonian expect(&cs);
  ParamRat half = ParamRat::constant(0, 1, 2), one = ParamRat::constant(0, 1);
  expect.add_quad(ppi, 0, ppi, 0, half);
  expect.add_quad(p1, 0, p1, 0, half);
  expect.add_quad(phi, 1, phi, 1, half);
  expect.add_quad(p1, 0, A0, 1, one);
  PhaseDensity lhs = density(cs, {{"p_phi", OpPoly::constant(0, 1)},
                                  {"phi", OpPoly::d(0)},
                                  {"A1", OpPoly::constant(0, 1)}});
  PhaseDensity rhs = density(cs, {{"A1", OpPoly::constant(0, 1)},
                                  {"A0", OpPoly::constant(0, -1)}});
  expect.add_product(lhs, rhs, one);

  CHECK(ld.canonical == expect);
  CHECK(ld.canonical.self_adjoint());
}

TEST_CASE("canonical Hamiltonian of the gauge-invariant model") {
  LegendreData ld = legendre_transform(preset_model("jr-wz").model);
  const CoordSystem& cs = *ld.coords;
  auto idx = [&](const char* n) { return *cs.index_of(n); };
  int phi = idx("phi"), A0 = idx("A0"), A1 = idx("A1"), th = idx("theta");
  int ppi = idx("p_phi"), p1 = idx("p_A1");

  // H = 1/2(p^2 + p1^2) + 1/2(phi'^2 + th'^2) + p1 A0'
  //     + (p + phi' + A1 + th')(A1 - A0) + th' A0 + p th'
  QuadHamiltonian expect(&cs);
  ParamRat half = ParamRat::constant(0, 1, 2), one = ParamRat::constant(0, 1);
  expect.add_quad(ppi, 0, ppi, 0, half);
  expect.add_quad(p1, 0, p1, 0, half);
  expect.add_quad(phi, 1, phi, 1, half);
  expect.add_quad(th, 1, th, 1, half);
  expect.add_quad(p1, 0, A0, 1, one);
  PhaseDensity lhs = density(cs, {{"p_phi", OpPoly::constant(0, 1)},
                                  {"phi", OpPoly::d(0)},
                                  {"A1", OpPoly::constant(0, 1)},
                                  {"theta", OpPoly::d(0)}});
  PhaseDensity rhs = density(cs, {{"A1", OpPoly::constant(0, 1)},
                                  {"A0", OpPoly::constant(0, -1)}});
  expect.add_product(lhs, rhs, one);
  expect.add_quad(th, 1, A0, 0, one);
  expect.add_quad(ppi, 0, th, 1, one);

  CHECK(ld.canonical == expect);
  CHECK(ld.canonical.self_adjoint());
}

TEST_CASE("free scalar Hamiltonian") {
  LegendreData ld =
      legendre_transform(parse_model("fields phi; L = 1/2*dt(phi)^2 - 1/2*dx(phi)^2;"));
  const CoordSystem& cs = *ld.coords;
  QuadHamiltonian expect(&cs);
  ParamRat half = ParamRat::constant(0, 1, 2);
  expect.add_quad(1, 0, 1, 0, half);  // p^2/2
  expect.add_quad(0, 1, 0, 1, half);  // phi'^2/2
  CHECK(ld.canonical == expect);
}

TEST_CASE("symbolic model at a=1, e=1 gives the a=1 Hamiltonian term for term") {
  ModelIR bound =
      preset_model("jr-symbolic").model.bind_parameter("a", 1, 1).bind_parameter("e", 1, 1);
  LegendreData lb = legendre_transform(bound);
  LegendreData la = legendre_transform(preset_model("jr-a1").model);
  CHECK(lb.canonical == la.canonical);
}

TEST_CASE("Hamilton equations of the extended gauge-invariant Hamiltonian") {
  LegendreData ld = legendre_transform(preset_model("jr-wz").model);
  const CoordSystem& cs = *ld.coords;
  auto eqs = hamilton_equations(ld.extended);
  auto idx = [&](const char* n) { return *cs.index_of(n); };
  OpPoly one = OpPoly::constant(0, 1), D = OpPoly::d(0);

  // dphi/dt = p + A1 - A0 + theta'
  CHECK(eqs[idx("phi")] == density(cs, {{"p_phi", one}, {"A1", one}, {"A0", -one}, {"theta", D}}));
  // dp_A0/dt = p1' + p + phi' + A1
  CHECK(eqs[idx("p_A0")] ==
        density(cs, {{"p_A1", D}, {"p_phi", one}, {"phi", D}, {"A1", one}}));
  // dA1/dt = p1 + A0'
  CHECK(eqs[idx("A1")] == density(cs, {{"p_A1", one}, {"A0", D}}));
  // dA0/dt = lambda_0, dtheta/dt = lambda_1
  CHECK(eqs[idx("A0")] == density(cs, {{"lambda_0", one}}));
  CHECK(eqs[idx("theta")] == density(cs, {{"lambda_1", one}}));
  // -dp/dt = -phi'' - A1' + A0' + lambda_1'
  CHECK(eqs[idx("p_phi")] == density(cs, {{"phi", D * D},
                                          {"A1", D},
                                          {"A0", -D},
                                          {"lambda_1", -D}}));
  // -dp_theta/dt = -theta'' - A1' - p'
  CHECK(eqs[idx("p_theta")] == density(cs, {{"theta", D * D}, {"A1", D}, {"p_phi", D}}));
  // -dp_A1/dt = p + phi' + 2 A1 + theta' - A0 - lambda_1
  CHECK(eqs[idx("p_A1")] == density(cs, {{"p_phi", -one},
                                         {"phi", -D},
                                         {"A1", -one - one},
                                         {"theta", -D},
                                         {"A0", one},
                                         {"lambda_1", one}}));
  // multipliers evolve trivially; their momenta pick up the primaries
  CHECK(eqs[idx("lambda_0")].is_zero());
  CHECK(eqs[idx("p_lambda_0")] == density(cs, {{"p_A0", -one}}));
  CHECK(eqs[idx("p_lambda_1")] ==
        density(cs, {{"p_theta", -one}, {"A1", one}, {"phi", D}}));
}

TEST_CASE("free scalar Hamilton equations") {
  LegendreData ld =
      legendre_transform(parse_model("fields phi; L = 1/2*dt(phi)^2 - 1/2*dx(phi)^2;"));
  const CoordSystem& cs = *ld.coords;
  auto eqs = hamilton_equations(ld.extended);
  CHECK(eqs[0] == density(cs, {{"p_phi", OpPoly::constant(0, 1)}}));
  CHECK(eqs[1] == density(cs, {{"phi", OpPoly::d(0, 2)}}));
}

TEST_CASE("Legendre round trip on the unconstrained block") {
  for (auto& name : preset_names()) {
    ModelIR m = preset_model(name).model;
    LegendreData ld = legendre_transform(m);
    const CoordSystem& cs = *ld.coords;
    auto eqs = hamilton_equations(ld.extended);
    for (int i = 0; i < cs.nfields(); ++i) {
      bool pivot = false;
      for (auto& w : ld.momenta[i].velocity_coeffs)
        if (!w.is_zero()) pivot = true;
      if (!pivot) continue;
      // sum_j W_ij qdot_j + b_i must reproduce pi_i
      PhaseDensity acc = ld.momenta[i].field_part;
      for (int j = 0; j < cs.nfields(); ++j) {
        if (ld.momenta[i].velocity_coeffs[j].is_zero()) continue;
        acc = acc + eqs[j] * ld.momenta[i].velocity_coeffs[j];
      }
      PhaseDensity pi(&cs);
      pi.add(cs.momentum(i), OpPoly::constant(cs.nvars(), 1));
      CHECK(acc == pi);
    }
  }
}

TEST_CASE("kernel self-adjointness holds for every generated Hamiltonian") {
  for (auto& name : preset_names()) {
    LegendreData ld = legendre_transform(preset_model(name).model);
    CHECK(ld.canonical.self_adjoint());
    CHECK(ld.extended.self_adjoint());
  }
}
