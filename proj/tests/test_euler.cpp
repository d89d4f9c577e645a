#include "doctest.h"
#include "wkbnls/euler.hpp"
#include "wkbnls/trajectory.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace wkbnls;

namespace {

constexpr double kPi = std::numbers::pi;

RealField smooth_positive(const Grid& g, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  RealField x = g.coordinate(0);
  RealField u = RealField::Constant(x.size(), 1.5);
  for (int k = 1; k <= 4; ++k) u += 0.1 * U(rng) * (k * x + U(rng)).cos();
  return u;
}

RealField smooth(const Grid& g, unsigned seed) {
  RealField s = smooth_positive(g, seed);
  return s - 1.5;
}

}  // namespace

TEST_CASE("constant state is steady") {
  Grid g = Grid::periodic(1, 64, 2.0 * kPi);
  for (const auto& model : {NonlinearModel::power(1), NonlinearModel::power(2), NonlinearModel::sum_of_powers(1, 3)}) {
    EulerState s = initial_state(g, RealField::Constant(64, 0.8), {RealField::Zero(64)}, model);
    EulerRates r = euler_rhs(g, s, model, EulerConfig{});
    CHECK(r.h.abs().maxCoeff() <= 1e-14);
    CHECK(r.H.abs().maxCoeff() <= 1e-14);
    CHECK(r.u[0].abs().maxCoeff() <= 1e-14);
    EulerTrajectory run = integrate_euler(g, s, model, EulerConfig{}, {0.0, 0.5, 1.0});
    CHECK_FALSE(run.blew_up);
    for (const auto& st : run.states) CHECK((st.h - s.h).abs().maxCoeff() <= 1e-13);
  }
}

TEST_CASE("cubic right-hand side against the direct amplitude form") {
  Grid g = Grid::periodic(1, 64, 2.0 * kPi);
  NonlinearModel model = NonlinearModel::power(1);
  for (unsigned seed = 1; seed <= 4; ++seed) {
    RealField a = smooth_positive(g, seed);
    RealField u = smooth(g, seed + 100);
    EulerState s = initial_state(g, a, {u}, model);
    EulerRates r = euler_rhs(g, s, model, EulerConfig{});
    RealField ax = spectral_derivative(g, a, 0, 1), ux = spectral_derivative(g, u, 0, 1);
    RealField at = -u * ax - 0.5 * a * ux;
    RealField ut = -u * ux - 2.0 * a * ax;
    CHECK((r.H - at).abs().maxCoeff() <= 1e-10);
    CHECK((r.h - at).abs().maxCoeff() <= 1e-10);
    CHECK((r.u[0] - ut).abs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("pressure force at rest matches the gradient of f") {
  // fine enough that dealiasing the products is below the tolerance
  Grid g = Grid::periodic(1, 256, 2.0 * kPi);
  for (const auto& model : {NonlinearModel::power(2), NonlinearModel::sum_of_powers(1, 2), NonlinearModel::rational(1)}) {
    RealField a = smooth_positive(g, 9);
    EulerState s = initial_state(g, a, {RealField::Zero(256)}, model);
    EulerRates r = euler_rhs(g, s, model, EulerConfig{});
    RealField grad_f = spectral_derivative(g, RealField(model.f(a * a)), 0, 1);
    CHECK((r.u[0] + grad_f).abs().maxCoeff() <= 1e-9 * (1.0 + grad_f.abs().maxCoeff()));
    int n = model.n();
    RealField grad_power = spectral_derivative(g, RealField(s.h.pow(2 * n)), 0, 1);
    CHECK((r.u[0] + grad_power).abs().maxCoeff() <= 1e-9 * (1.0 + grad_power.abs().maxCoeff()));
  }
}

TEST_CASE("amplitude reconstruction") {
  Grid g = Grid::periodic(1, 16, 2.0 * kPi);
  EulerState s;
  s.h = RealField::Constant(16, 2.0 * std::sqrt(5.0));
  s.H = s.h;
  CHECK((reconstruct_amplitude(s, NonlinearModel::sum_of_powers(1, 2)) - 2.0).abs().maxCoeff() <= 1e-10);
  s.h = RealField::LinSpaced(16, 0.0, 2.0);
  CHECK((reconstruct_amplitude(s, NonlinearModel::power(3)) - s.h).abs().maxCoeff() == 0.0);
  s.h = RealField::Zero(16);
  CHECK(reconstruct_amplitude(s, NonlinearModel::rational(2)).abs().maxCoeff() == 0.0);
}

TEST_CASE("phase quadrature of constant states") {
  auto times = uniform_times(1.0, 0.1);
  RealField phi0 = RealField::LinSpaced(8, -1.0, 1.0);
  const double A = 1.3;
  std::vector<RealField> a(times.size(), RealField::Constant(8, A));
  std::vector<VectorField> u(times.size(), VectorField{RealField::Zero(8)});
  NonlinearModel cubic = NonlinearModel::power(1);
  auto phi = reconstruct_phase(times, a, u, phi0, cubic);
  CHECK((phi[0] - phi0).abs().maxCoeff() == 0.0);
  for (std::size_t n = 0; n < times.size(); ++n)
    CHECK((phi[n] - (phi0 - times[n] * cubic.f(A * A))).abs().maxCoeff() <= 1e-13);

  const double u_inf = 0.6;
  std::vector<RealField> ones(times.size(), RealField::Ones(8));
  std::vector<VectorField> flow(times.size(), VectorField{RealField::Constant(8, u_inf)});
  auto gp = reconstruct_phase(times, ones, flow, phi0, NonlinearModel::gross_pitaevskii());
  CHECK((gp.back() - (phi0 - 0.5 * u_inf * u_inf)).abs().maxCoeff() <= 1e-13);
}

TEST_CASE("power variable stays consistent and blow-up is reported") {
  Grid g = Grid::periodic(1, 256, 2.0 * kPi);
  RealField x = g.coordinate(0);
  NonlinearModel model = NonlinearModel::power(2);
  EulerState s = initial_state(g, RealField(1.0 + 0.2 * x.cos()), {RealField(0.1 * x.sin())}, model);
  EulerTrajectory run = integrate_euler(g, s, model, EulerConfig{}, uniform_times(0.5, 0.05));
  CHECK_FALSE(run.blew_up);
  CHECK(run.max_power_drift <= 1e-8);
  CHECK(run.min_h > 0.0);

  // a strong compression steepens into a shock
  EulerState steep = initial_state(g, RealField(1.0 + 0.5 * x.cos()), {RealField(-2.0 * x.sin())}, NonlinearModel::power(1));
  EulerConfig c;
  c.filter = false;
  EulerTrajectory shock = integrate_euler(g, steep, NonlinearModel::power(1), c, uniform_times(5.0, 0.05));
  CHECK(shock.blew_up);
  CHECK(shock.last_valid_time < 5.0);
  CHECK_FALSE(shock.message.empty());
}

TEST_CASE("viscous solutions converge as the viscosity halves") {
  Grid g = Grid::periodic(1, 256, 2.0 * kPi);
  RealField x = g.coordinate(0);
  NonlinearModel model = NonlinearModel::power(1);
  EulerState s = initial_state(g, RealField(1.0 + 0.2 * x.cos()), {RealField(0.1 * x.sin())}, model);
  std::vector<double> gaps;
  std::vector<RealField> last;
  for (double nu : {1e-2, 5e-3, 2.5e-3}) {
    EulerConfig c;
    c.nu = nu;
    EulerTrajectory run = integrate_euler(g, s, model, c, {0.0, 0.5});
    REQUIRE_FALSE(run.blew_up);
    last.push_back(run.states.back().h);
  }
  double d1 = sobolev_norm(g, RealField(last[0] - last[1]), 1);
  double d2 = sobolev_norm(g, RealField(last[1] - last[2]), 1);
  CHECK(d1 <= 1e-2);
  CHECK(d2 < d1);
}
