#include "doctest.h"
#include "wkbnls/nls.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

using namespace wkbnls;
using cd = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

Grid torus() { return Grid::periodic(1, 64, 2.0 * kPi); }

ComplexField plane(const Grid& g, double amp, int k) {
  RealField x = g.coordinate(0);
  ComplexField u(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) u[i] = std::polar(amp, k * x[i]);
  return u;
}

NLSConfig config(double eps, double t_end, NonlinearModel model = NonlinearModel::power(1)) {
  NLSConfig c;
  c.epsilon = eps;
  c.t_end = t_end;
  c.model = model;
  return c;
}

}  // namespace

TEST_CASE("configuration is validated") {
  NLSConfig c = config(0.1, 1.0);
  c.dt = 0.2;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.dt = 0.05;
  CHECK_NOTHROW(c.validate());
  c.t_end = -1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("constant field rotates in closed form") {
  Grid g = torus();
  const double A = 0.7, eps = 0.1, T = 0.5;
  for (const auto& model : {NonlinearModel::power(1), NonlinearModel::power(2), NonlinearModel::gross_pitaevskii()}) {
    NLSConfig c = config(eps, T, model);
    NLSTrajectory run = integrate(g, ComplexField::Constant(64, A), c, {0.0, T});
    cd exact = std::polar(A, -T * model.f(A * A) / eps);
    CHECK((run.psi.back() - exact).abs().maxCoeff() <= 1e-11);
  }
}

TEST_CASE("free dispersion of a single mode") {
  Grid g = torus();
  const double eps = 0.1, T = 0.3;
  const int K = 4;
  // amplitude 1e-8 makes the cubic term negligible against the tolerance
  ComplexField psi0 = plane(g, 1e-8, K);
  NLSTrajectory run = integrate(g, psi0, config(eps, T), {0.0, T});
  ComplexField exact = psi0 * std::polar(1.0, -eps * T * K * K / 2.0);
  CHECK((run.psi.back() - exact).abs().maxCoeff() <= 1e-20);
}

TEST_CASE("zero stays zero") {
  NLSTrajectory run = integrate(torus(), ComplexField::Zero(64), config(0.1, 0.2), {0.0, 0.1, 0.2});
  for (const auto& p : run.psi) CHECK(p.abs().maxCoeff() == 0.0);
}

TEST_CASE("plane wave follows its dispersion relation") {
  Grid g = torus();
  const double eps = 0.1, T = 1.0;
  const int K = 3;
  for (const auto& model : {NonlinearModel::power(1), NonlinearModel::rational(2)}) {
    NLSConfig c = config(eps, T, model);
    c.dt = 0.05 * eps;
    NLSTrajectory run = integrate(g, plane(g, 1.0, K), c, {0.0, T});
    double omega = eps * K * K / 2.0 + model.f(1.0) / eps;
    ComplexField exact = plane(g, 1.0, K) * std::polar(1.0, -omega * T);
    CHECK((run.psi.back() - exact).abs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("zero end time returns the initial field") {
  Grid g = torus();
  ComplexField psi0 = plane(g, 0.5, 2);
  NLSTrajectory run = integrate(g, psi0, config(0.1, 0.0), {0.0});
  REQUIRE(run.psi.size() == 1);
  CHECK((run.psi[0] - psi0).abs().maxCoeff() == 0.0);
}

TEST_CASE("splitting error is second order") {
  Grid g = torus();
  RealField x = g.coordinate(0);
  ComplexField psi0(64);
  for (Eigen::Index i = 0; i < 64; ++i) psi0[i] = (1.0 + 0.3 * std::cos(x[i])) * std::polar(1.0, 0.2 * std::sin(x[i]) / 0.1);
  const double eps = 0.1, T = 0.5;
  auto run_at = [&](double dt) {
    NLSConfig c = config(eps, T);
    c.dt = dt;
    return integrate(g, psi0, c, {0.0, T}).psi.back();
  };
  ComplexField ref = run_at(0.05 * eps / 16.0);
  double e1 = (run_at(0.05 * eps) - ref).abs().maxCoeff();
  double e2 = (run_at(0.025 * eps) - ref).abs().maxCoeff();
  CHECK(e1 / e2 >= 3.5);
}

TEST_CASE("mass and energy of simple fields") {
  Grid g = torus();
  ComplexField one = ComplexField::Ones(64);
  CHECK(mass(g, one) == doctest::Approx(2.0 * kPi).epsilon(1e-14));
  CHECK(energy(g, one, 0.1, NonlinearModel::power(1)) == doctest::Approx(kPi).epsilon(1e-14));
  CHECK(energy(g, one, 0.1, NonlinearModel::gross_pitaevskii()) == doctest::Approx(0.0).epsilon(1e-14));
  ComplexField zero = ComplexField::Zero(64);
  CHECK(mass(g, zero) == 0.0);
  CHECK(energy(g, zero, 0.1, NonlinearModel::power(2)) == 0.0);
}

TEST_CASE("one step conserves mass and commutes with a constant gauge") {
  Grid g = Grid::periodic(1, 128, 10.0);
  RealField x = g.coordinate(0);
  ComplexField psi(128);
  for (Eigen::Index i = 0; i < 128; ++i) psi[i] = std::polar(1.0 + 0.4 * std::exp(-x[i] * x[i]), 0.3 * std::cos(x[i]));
  NLSConfig c = config(0.1, 1.0, NonlinearModel::power(2));
  ComplexField next = strang_step(g, psi, c, 0.004);
  CHECK(std::abs(mass(g, next) - mass(g, psi)) / mass(g, psi) <= 1e-14);
  const cd gauge = std::polar(1.0, 0.77);
  ComplexField a = strang_step(g, psi * gauge, c, 0.004);
  ComplexField b = next * gauge;
  CHECK((a - b).abs().maxCoeff() <= 1e-14);
  // time reversal
  ComplexField back = strang_step(g, next, c, -0.004);
  CHECK((back - psi).abs().maxCoeff() <= 1e-13);
}

TEST_CASE("automatic step stays below the resonance bound") {
  Grid g = Grid::periodic(1, 1024, 16.0 * kPi);
  NLSConfig c = config(0.2, 1.0);
  double h = effective_step(g, c);
  CHECK(h <= 0.05 * 0.2);
  CHECK(0.5 * c.epsilon * h * g.k_max() * g.k_max() <= 0.9 * kPi + 1e-12);
  c.dt = 0.003;
  CHECK(effective_step(g, c) == 0.003);
}

TEST_CASE("Neumann half-line run keeps the wall flat and mass fixed") {
  Grid g = Grid::half_line(256, 16.0);
  RealField z = g.coordinate(0);
  ComplexField psi(256);
  for (Eigen::Index i = 0; i < 256; ++i)
    psi[i] = std::polar(1.0 + 0.1 * std::exp(-(z[i] - 4.0) * (z[i] - 4.0)), 0.0);
  NLSConfig c = config(0.1, 0.5, NonlinearModel::gross_pitaevskii());
  c.boundary = Boundary::NeumannHalfLine;
  NLSTrajectory run = integrate(g, psi, c, {0.0, 0.25, 0.5});
  CHECK(run.max_step_mass_drift <= 1e-13);
  CHECK(std::abs(evaluate_derivative_at(g, run.psi.back(), 0.0, 1)) <= 1e-10);
}

TEST_CASE("under-resolved initial fields are refused") {
  Grid g = Grid::periodic(1, 64, 2.0 * kPi);
  CHECK_NOTHROW(require_resolved(g, plane(g, 1.0, 3)));
  RealField x = g.coordinate(0);
  ComplexField kink = x.abs().cast<cd>();
  CHECK_THROWS_AS(require_resolved(g, kink), std::runtime_error);
}
