#include "doctest.h"
#include "wkbnls/fit.hpp"
#include "wkbnls/grid.hpp"
#include "wkbnls/jet.hpp"
#include "wkbnls/spectral.hpp"
#include "wkbnls/trajectory.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace wkbnls;
using cd = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

ComplexField mode(const Grid& g, int k) {
  RealField x = g.coordinate(0);
  ComplexField u(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) u[i] = std::polar(1.0, k * x[i]);
  return u;
}

RealField smooth_field(const Grid& g, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  RealField x = g.coordinate(0);
  RealField u = RealField::Zero(x.size());
  for (int k = 0; k <= 6; ++k) u += N(rng) / (1.0 + k * k) * (k * 2.0 * kPi / g.length() * x + N(rng)).cos();
  return u;
}

RealJet random_jet(int order, Eigen::Index size, std::mt19937& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  RealJet j(order, size);
  for (int k = 0; k <= order; ++k)
    for (Eigen::Index i = 0; i < size; ++i) j[k][i] = U(rng);
  return j;
}

}  // namespace

TEST_CASE("periodic grid layout") {
  Grid g = Grid::periodic(1, 16, 2.0 * kPi);
  CHECK(g.size() == 16);
  CHECK(g.spacing() == doctest::Approx(2.0 * kPi / 16));
  RealField x = g.coordinate(0);
  CHECK(x[0] == doctest::Approx(-kPi));
  for (Eigen::Index i = 1; i < x.size(); ++i) CHECK(x[i] - x[i - 1] == doctest::Approx(g.spacing()));
  const RealField& k = g.wavenumber(0);
  CHECK(k.minCoeff() == doctest::Approx(-8.0));
  CHECK(k.maxCoeff() == doctest::Approx(7.0));
  CHECK_THROWS(Grid::periodic(1, 4, 1.0));
}

TEST_CASE("half-line grid is cell centred") {
  Grid g = Grid::half_line(32, 4.0);
  RealField z = g.coordinate(0);
  CHECK(z[0] == doctest::Approx(4.0 / 64));
  CHECK(z[31] == doctest::Approx(4.0 - 4.0 / 64));
  CHECK(g.transform_length() == 64);
}

TEST_CASE("single-mode derivatives") {
  Grid g = Grid::periodic(1, 64, 2.0 * kPi);
  RealField x = g.coordinate(0);
  RealField s = x.sin();
  RealField d = spectral_derivative(g, s, 0, 1);
  CHECK((d - x.cos()).abs().maxCoeff() <= 1e-12);

  RealField c = RealField::Constant(64, 3.5);
  for (int order : {1, 2, 3}) CHECK(spectral_derivative(g, c, 0, order).abs().maxCoeff() <= 1e-12);

  ComplexField e3 = mode(g, 3);
  ComplexField d2 = spectral_derivative(g, e3, 0, 2);
  CHECK((d2 + 9.0 * e3).abs().maxCoeff() <= 1e-11);
}

TEST_CASE("Sobolev norm examples") {
  Grid g = Grid::periodic(1, 64, 2.0 * kPi);
  ComplexField e3 = mode(g, 3);
  CHECK(sobolev_norm(g, e3, 0) == doctest::Approx(std::sqrt(2.0 * kPi)).epsilon(1e-12));
  CHECK(sobolev_norm(g, e3, 2) == doctest::Approx(10.0 * std::sqrt(2.0 * kPi)).epsilon(1e-12));
  ComplexField zero = ComplexField::Zero(64);
  for (int s : {0, 1, 2, 3}) CHECK(sobolev_norm(g, zero, s) == 0.0);
}

TEST_CASE("Parseval and norm monotonicity") {
  for (unsigned seed = 1; seed <= 5; ++seed) {
    Grid g = Grid::periodic(1, 128, 10.0);
    RealField u = smooth_field(g, seed);
    double quad = std::sqrt((u * u).sum() * g.spacing());
    CHECK(sobolev_norm(g, u, 0) == doctest::Approx(quad).epsilon(1e-12));
    double prev = 0.0;
    for (int s = 0; s <= 4; ++s) {
      double n = sobolev_norm(g, u, s);
      CHECK(n >= prev);
      prev = n;
    }
  }
  Grid h = Grid::half_line(128, 5.0);
  RealField v = smooth_field(h, 11);
  CHECK(sobolev_norm(h, v, 0) == doctest::Approx(std::sqrt((v * v).sum() * h.spacing())).epsilon(1e-12));
}

TEST_CASE("W1,inf norm examples") {
  Grid g = Grid::periodic(1, 64, 2.0 * kPi);
  CHECK(w1inf_norm(g, RealField(RealField::Constant(64, -2.0))) == doctest::Approx(2.0));
  CHECK(w1inf_norm(g, RealField(g.coordinate(0).sin())) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(w1inf_norm(g, RealField(RealField::Zero(64))) == 0.0);
}

TEST_CASE("half-line transform round trip and Neumann derivative") {
  Grid g = Grid::half_line(64, 8.0);
  RealField z = g.coordinate(0);
  RealField u = (-(z * z) / 2.0).exp() + 0.3 * (2.0 * kPi * z / 8.0).cos();
  for (Parity p : {Parity::Even, Parity::Odd}) {
    ComplexField back = inverse_transform(g, forward_transform(g, u.cast<cd>(), p));
    CHECK((back.real() - u).abs().maxCoeff() <= 1e-12);
  }
  CHECK(std::abs(evaluate_derivative_at(g, u, 0.0, 1)) <= 1e-12);
  RealField uz = spectral_derivative(g, u, 0, 1);
  RealField exact = -z * (-(z * z) / 2.0).exp() - 0.3 * (2.0 * kPi / 8.0) * (2.0 * kPi * z / 8.0).sin();
  CHECK((uz - exact).abs().maxCoeff() <= 1e-8);
}

TEST_CASE("dealiasing removes the upper third") {
  Grid g = Grid::periodic(1, 64, 2.0 * kPi);
  ComplexField high = mode(g, 25);
  ComplexField low = mode(g, 5);
  CHECK(dealias(g, high).abs().maxCoeff() <= 1e-14);
  CHECK((dealias(g, low) - low).abs().maxCoeff() <= 1e-13);
}

TEST_CASE("jet product examples") {
  const Eigen::Index n = 5;
  RealField u = RealField::LinSpaced(n, -1.0, 2.0);
  RealField one = RealField::Ones(n);
  RealJet plus({one, u}), minus({one, RealField(-u)});
  RealJet p = jet_mul(plus, minus);
  CHECK((p[0] - 1.0).abs().maxCoeff() == 0.0);
  CHECK(p[1].abs().maxCoeff() == 0.0);

  RealField x = RealField::LinSpaced(n, 0.5, 3.0);
  RealJet s({x, one});
  RealJet sq = jet_mul(s, s);
  CHECK((sq[0] - x * x).abs().maxCoeff() <= 1e-15);
  CHECK((sq[1] - 2.0 * x).abs().maxCoeff() <= 1e-15);

  RealJet zero(1, n);
  RealJet z = jet_mul(s, zero);
  CHECK(z[0].abs().maxCoeff() == 0.0);
  CHECK(z[1].abs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(jet_mul(RealJet(1, n), RealJet(2, n)), std::invalid_argument);
  CHECK_THROWS_AS(jet_mul(RealJet(1, n), RealJet(1, n + 1)), std::invalid_argument);
}

TEST_CASE("jet algebra is associative and distributive") {
  std::mt19937 rng(42);
  for (int order = 0; order <= 4; ++order) {
    RealJet a = random_jet(order, 7, rng), b = random_jet(order, 7, rng), c = random_jet(order, 7, rng);
    RealJet l = jet_mul(jet_mul(a, b), c), r = jet_mul(a, jet_mul(b, c));
    RealJet dl = jet_mul(a, b + c), dr = jet_mul(a, b) + jet_mul(a, c);
    for (int k = 0; k <= order; ++k) {
      CHECK((l[k] - r[k]).abs().maxCoeff() <= 1e-12);
      CHECK((dl[k] - dr[k]).abs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("jet reciprocal") {
  std::mt19937 rng(3);
  RealJet a = random_jet(4, 6, rng);
  a[0] += 3.0;
  RealJet p = jet_mul(a, jet_reciprocal(a));
  CHECK((p[0] - 1.0).abs().maxCoeff() <= 1e-14);
  for (int k = 1; k <= 4; ++k) CHECK(p[k].abs().maxCoeff() <= 1e-13);
}

TEST_CASE("jet composition examples") {
  RealField r0 = RealField::LinSpaced(4, 0.5, 2.0), r1 = RealField::LinSpaced(4, -1.0, 1.0);
  RealJet rho({r0, r1});
  RealJet lin = jet_compose(NonlinearModel::power(1), rho);
  CHECK((lin[0] - r0).abs().maxCoeff() <= 1e-15);
  CHECK((lin[1] - r1).abs().maxCoeff() <= 1e-15);

  RealJet unit({RealField(RealField::Ones(4)), r1});
  RealJet sq = jet_compose(NonlinearModel::power(2), unit);
  CHECK((sq[0] - 1.0).abs().maxCoeff() <= 1e-15);
  CHECK((sq[1] - 2.0 * r1).abs().maxCoeff() <= 1e-15);

  RealJet gp = jet_compose(NonlinearModel::gross_pitaevskii(), rho);
  CHECK((gp[0] - (r0 - 1.0)).abs().maxCoeff() <= 1e-15);
  CHECK((gp[1] - r1).abs().maxCoeff() <= 1e-15);

  // (rho0 + eps rho1)^3 through order 3 against direct expansion
  RealJet rho3({r0, r1, RealField(RealField::Zero(4)), RealField(RealField::Zero(4))});
  RealJet cube = jet_compose(NonlinearModel::power(3), rho3);
  CHECK((cube[1] - 3.0 * r0 * r0 * r1).abs().maxCoeff() <= 1e-13);
  CHECK((cube[2] - 3.0 * r0 * r1 * r1).abs().maxCoeff() <= 1e-13);
  CHECK((cube[3] - r1 * r1 * r1).abs().maxCoeff() <= 1e-13);
}

TEST_CASE("rate fit examples") {
  RateFit one = fit_rate({0.2, 0.1, 0.05}, {0.02, 0.01, 0.005});
  CHECK(one.valid);
  CHECK(one.slope == doctest::Approx(1.0).epsilon(1e-12));
  RateFit two = fit_rate({0.2, 0.1, 0.05}, {0.04, 0.01, 0.0025});
  CHECK(two.slope == doctest::Approx(2.0).epsilon(1e-12));

  std::mt19937 rng(5);
  std::uniform_real_distribution<double> U(-0.01, 0.01);
  std::vector<double> eps{0.4, 0.2, 0.1, 0.05, 0.025, 0.0125}, v;
  for (double e : eps) v.push_back(std::pow(e, 1.5) * (1.0 + U(rng)));
  CHECK(std::abs(fit_rate(eps, v).slope - 1.5) <= 0.05);

  RateFit bad = fit_rate({0.2, 0.1, 0.05, 0.025}, {0.1, -1.0, 0.0, 0.01});
  CHECK(bad.excluded == 2);
  CHECK_FALSE(bad.valid);
}

TEST_CASE("time helpers") {
  auto t = uniform_times(1.0, 0.3);
  CHECK(t.front() == 0.0);
  CHECK(t.back() == doctest::Approx(1.0));
  CHECK(t.size() == 5);

  const double dt = 0.01;
  std::vector<Eigen::ArrayXd> y, g;
  for (int n = 0; n <= 100; ++n) {
    double s = n * dt;
    y.push_back(Eigen::ArrayXd::Constant(1, std::sin(s)));
    g.push_back(Eigen::ArrayXd::Constant(1, std::cos(s)));
  }
  for (std::size_t n : {std::size_t(0), std::size_t(1), std::size_t(50), std::size_t(100)})
    CHECK(time_derivative(y, dt, n)[0] == doctest::Approx(std::cos(n * dt)).epsilon(1e-8));
  auto I = cumulative_integral(g, dt);
  CHECK(I.back()[0] == doctest::Approx(std::sin(1.0)).epsilon(1e-9));

  HermiteSeries h;
  for (int n = 0; n <= 10; ++n) {
    double s = 0.1 * n;
    h.push(s, Eigen::ArrayXd::Constant(1, s * s * s), Eigen::ArrayXd::Constant(1, 3 * s * s));
  }
  CHECK(h.evaluate(0.55)[0] == doctest::Approx(0.55 * 0.55 * 0.55).epsilon(1e-12));
  CHECK(h.evaluate_derivative(0.55)[0] == doctest::Approx(3 * 0.55 * 0.55).epsilon(1e-12));
}
