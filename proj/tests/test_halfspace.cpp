#include "doctest.h"
#include "wkbnls/cases.hpp"
#include "wkbnls/criteria.hpp"
#include "wkbnls/halfspace.hpp"
#include "wkbnls/layer.hpp"

#include <cmath>
#include <stdexcept>

using namespace wkbnls;
using cd = std::complex<double>;

namespace {

Eigen::ArrayXd expZ(const ZGrid& zg, double rate) { return (-rate * zg.nodes()).exp(); }

OrderData rest_state(const Grid& g) { return {ComplexField::Ones(g.size()), RealField::Zero(g.size())}; }

}  // namespace

TEST_CASE("Z-grid quadrature and differentiation") {
  ZGrid zg;
  CHECK(zg.nodes()[0] == 0.0);
  CHECK(zg.nodes()[zg.size() - 1] == doctest::Approx(36.0));
  Eigen::ArrayXd f = expZ(zg, 2.0);
  CHECK(zg.integrate(f) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK((zg.derivative(f) + 2.0 * f).abs().maxCoeff() <= 1e-10);
  CHECK(zg.wall_derivative(f) == doctest::Approx(-2.0).epsilon(1e-11));
  Eigen::ArrayXd cum = zg.cumulative(f), tail = zg.tail(f);
  CHECK(((cum + tail) - 0.5).abs().maxCoeff() <= 1e-13);
  CHECK((tail - 0.5 * f).abs().maxCoeff() <= 1e-13);
  CHECK(zg.interpolate(f, 0.37) == doctest::Approx(std::exp(-0.74)).epsilon(1e-12));
  CHECK(zg.interpolate(f, 40.0) == 0.0);
}

TEST_CASE("first amplitude layer in closed form") {
  ZGrid zg;
  BoundaryLayerProfile p = layer_A1(zg, 1.0, 1.0);
  CHECK((p.values - 0.5 * expZ(zg, 2.0)).abs().maxCoeff() <= 1e-15);
  CHECK(p.wall_slope == doctest::Approx(-1.0).epsilon(1e-12));

  BoundaryLayerProfile flat = layer_A1(zg, 1.3, 0.0);
  CHECK(flat.values.abs().maxCoeff() == 0.0);
  CHECK(std::isinf(flat.gamma));

  BoundaryLayerProfile q = layer_A1(zg, 2.0, 0.4);
  CHECK(q.values[0] == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(q.gamma == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("layer ODE solutions") {
  ZGrid zg;
  const double g = 0.7, ab = 1.3;
  BoundaryLayerProfile h = layer_ode_solve(zg, ab, Eigen::ArrayXd::Zero(zg.size()), -g);
  CHECK((h.values - g / (2.0 * ab) * expZ(zg, 2.0 * ab)).abs().maxCoeff() <= 1e-12);
  CHECK((h.values - layer_A1(zg, ab, g).values).abs().maxCoeff() <= 1e-12);

  BoundaryLayerProfile s = layer_ode_solve(zg, 1.0, expZ(zg, 3.0), 0.0);
  Eigen::ArrayXd exact = -0.3 * expZ(zg, 2.0) + 0.2 * expZ(zg, 3.0);
  CHECK((s.values - exact).abs().maxCoeff() <= 1e-12);
  CHECK(s.values[0] == doctest::Approx(-0.1).epsilon(1e-12));
  CHECK(layer_ode_residual(zg, 1.0, s.values, expZ(zg, 3.0)) <= 1e-8);

  BoundaryLayerProfile z = layer_ode_solve(zg, 1.0, Eigen::ArrayXd::Zero(zg.size()), 0.0);
  CHECK(z.values.abs().maxCoeff() == 0.0);

  CHECK_THROWS(layer_ode_solve(zg, 1.0, Eigen::ArrayXd::Ones(zg.size()), 0.0));
  CHECK_THROWS(layer_ode_solve(zg, 0.0, expZ(zg, 3.0), 0.0));
}

TEST_CASE("phase layer solutions") {
  ZGrid zg;
  PhaseLayer zero = layer_phase_solve(zg, 1.0, Eigen::ArrayXd::Zero(zg.size()));
  CHECK(zero.phi.values.abs().maxCoeff() == 0.0);
  CHECK(zero.wall_velocity == 0.0);

  PhaseLayer p = layer_phase_solve(zg, 1.0, expZ(zg, 1.0));
  // Phi' = -int_Z^inf e^{-s} ds = -e^{-Z} and Phi(inf) = 0 give Phi = e^{-Z}
  CHECK((p.phi.values - expZ(zg, 1.0)).abs().maxCoeff() <= 1e-12);
  CHECK(p.wall_velocity == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS(layer_phase_solve(zg, 1.0, Eigen::ArrayXd::Ones(zg.size())));
}

TEST_CASE("sponge and interior window") {
  Grid g = Grid::half_line(256, 16.0);
  RealField z = g.coordinate(0);
  CHECK(sponge_start(g) == doctest::Approx(14.0));
  RealField s = sponge_profile(g, 10.0);
  RealField w = interior_window(g);
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (z[i] < 14.0) CHECK(s[i] == 0.0);
    if (z[i] <= 12.0) CHECK(w[i] == 1.0);
    if (z[i] >= 14.0) CHECK(w[i] == 0.0);
    CHECK(w[i] >= 0.0);
    CHECK(w[i] <= 1.0);
  }
  CHECK(s.maxCoeff() <= 10.0);
  CHECK(s.maxCoeff() > 9.0);
}

TEST_CASE("limit system on the half-line") {
  Grid g = Grid::half_line(512, 16.0);
  auto times = uniform_times(1.5, 0.01);
  LimitRun rest = solve_limit_euler_halfline(g, rest_state(g), times, HalfspaceConfig{});
  for (std::size_t n = 0; n < times.size(); n += 50) {
    OrderFields o = rest.series.at(n);
    CHECK((o.a.real() - 1.0).abs().maxCoeff() <= 1e-14);
    CHECK(o.u[0].abs().maxCoeff() <= 1e-14);
  }

  RealField z = g.coordinate(0);
  OrderData pulse{(1.0 + 0.1 * (-(z * z)).exp()).cast<cd>().eval(), RealField::Zero(g.size())};
  LimitRun run = solve_limit_euler_halfline(g, pulse, times, HalfspaceConfig{});
  for (double w : run.wall_velocity) CHECK(w <= 1e-10);
  for (double m : run.mass) CHECK(std::abs(m - run.mass[0]) <= 1e-6);
}

TEST_CASE("gp-wall phase datum integrates the velocity") {
  CaseSpec spec = make_case("gp-wall");
  Grid g = spec.grid();
  RealField z = g.coordinate(0);
  auto data = spec.initial(2);
  RealField a0 = data[0].a.real();
  RealField u0 = -2.0 * (a0 - 1.0);
  RealField phi_z = spectral_derivative(g, data[0].phi, 0, 1, Parity::Even);
  CHECK((phi_z - u0).abs().maxCoeff() <= 1e-10);
  CHECK(std::abs(evaluate_derivative_at(g, data[0].phi, 0.0, 0)) <= 1e-12);
  // wall-constant near z = 0
  RealField a_z = spectral_derivative(g, a0, 0, 1, Parity::Even);
  for (Eigen::Index i = 0; i < z.size() && z[i] < 0.5; ++i) CHECK(std::abs(a_z[i]) <= 1e-12);
  CHECK(data[1].a.abs().maxCoeff() > 0.0);
}

TEST_CASE("ground state expansion is exact") {
  Grid g = Grid::half_line(256, 16.0);
  HalfspaceExpansion e = build_halfspace(g, 2, {rest_state(g), OrderData{ComplexField::Zero(256), RealField::Zero(256)}},
                                         0.5);
  for (int k = 1; k <= 2; ++k) {
    CHECK(e.max_abs_A(k) == 0.0);
    CHECK(e.max_abs_phi(k) == 0.0);
  }
  HalfspaceAssembly as = assemble_halfspace(e, 0.1);
  for (const auto& a : as.a) CHECK((a - 1.0).abs().maxCoeff() <= 1e-13);
  for (double r : as.neumann_residual) CHECK(r <= 1e-12);
  HalfspaceResidual r = halfspace_residual(e, 0.1, 0);
  CHECK(r.sup_total <= 1e-10);
  CHECK(r.sup_layer == 0.0);
}

TEST_CASE("modulated quantity on the half-line") {
  Grid g = Grid::half_line(64, 8.0);
  RealField ones = RealField::Ones(64), zero = RealField::Zero(64);
  CHECK(n_plus(g, ComplexField::Zero(64), ones, zero, 0.1, 10.0) == 0.0);
  const double w = 0.3, K = 10.0, eps = 0.1;
  double expect = 0.5 * (4.0 * w * w + 2.0 * K * eps * eps * w * w) * 8.0;
  CHECK(n_plus(g, ComplexField::Constant(64, w), ones, zero, eps, K) == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("flat-wall case has vanishing layers") {
  HalfspaceExpansion e = build_gp_wall(2, 0.5);
  for (int k = 1; k <= 2; ++k) {
    CHECK(e.max_abs_A(k) == 0.0);
    CHECK(e.max_abs_phi(k) == 0.0);
    CHECK(e.matching_error[k] <= 1e-8);
  }
  for (const auto& w : e.wall_velocity)
    for (double v : w) CHECK(v == 0.0);
  for (double t : e.wall_trace_error) CHECK(t <= 1e-8);

  HalfspaceAssembly as = assemble_halfspace(e, 0.1);
  for (double r : as.neumann_residual) CHECK(r <= 1e-10);

  // without layers the assembled interior is the whole approximation
  HalfspaceFields with = halfspace_fields(e, 0.1, e.times.size() - 1, true);
  HalfspaceFields without = halfspace_fields(e, 0.1, e.times.size() - 1, false);
  CHECK((with.a - without.a).abs().maxCoeff() == 0.0);
  CHECK((with.phi - without.phi).abs().maxCoeff() == 0.0);
}

TEST_CASE("half-line residual order of the first expansion") {
  HalfspaceExpansion e = build_gp_wall(1, 0.5);
  std::vector<double> eps{0.2, 0.1, 0.05}, sup;
  for (double x : eps) sup.push_back(halfspace_residual(e, x, 0).sup_total);
  RateFit f = fit_rate(eps, sup);
  // the leftover is eps^2/2 times the curvature of a, exactly second order
  CHECK(f.slope == doctest::Approx(2.0).epsilon(0.01));
}
