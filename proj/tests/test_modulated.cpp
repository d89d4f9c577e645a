#include "doctest.h"
#include "wkbnls/criteria.hpp"
#include "wkbnls/modulated.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace wkbnls;
using cd = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

Grid torus() { return Grid::periodic(1, 64, 2.0 * kPi); }

ComplexField random_smooth(const Grid& g, std::mt19937& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  RealField x = g.coordinate(0);
  ComplexField w = ComplexField::Zero(g.size());
  for (int k = 0; k <= 5; ++k) {
    cd c(N(rng), N(rng));
    w += c / (1.0 + k * k) * (cd(0.0, 1.0) * (k * x + N(rng)).cast<cd>()).exp();
  }
  return w;
}

}  // namespace

TEST_CASE("modulated energy of constant fields") {
  Grid g = torus();
  NonlinearModel cubic = NonlinearModel::power(1);
  ComplexField one = ComplexField::Ones(64);
  CHECK(n_eps(g, ComplexField::Zero(64), one, 0.1, cubic, 1.0) == 0.0);
  CHECK(n_eps(g, one, one, 0.1, cubic, 1.0) == doctest::Approx(0.5 * 4.01 * 2.0 * kPi).epsilon(1e-13));
  ComplexField i = ComplexField::Constant(64, cd(0.0, 1.0));
  CHECK(n_eps(g, i, one, 0.1, cubic, 1.0) == doctest::Approx(0.5 * 0.01 * 2.0 * kPi).epsilon(1e-13));
}

TEST_CASE("higher modulated energy of one mode") {
  Grid g = torus();
  NonlinearModel cubic = NonlinearModel::power(1);
  RealField x = g.coordinate(0);
  ComplexField w = (cd(0.0, 1.0) * x.cast<cd>()).exp();
  ComplexField one = ComplexField::Ones(64);
  // |w| = |w_x| = 1 and (Re w)^2, (Re w_x)^2 both integrate to pi, so N(w) = N(w_x)
  const double eps = 0.1, K = 1.0;
  double single = 0.5 * (eps * eps * 2.0 * kPi + 4.0 * kPi + K * eps * eps * 2.0 * kPi);
  double oracle = 2.0 * single + K * kPi;
  NormConfig cfg{K, 2};
  CHECK(n_s_eps(g, w, one, RealField::Ones(64), eps, cubic, cfg) == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(n_s_eps(g, ComplexField::Zero(64), one, RealField::Ones(64), eps, cubic, cfg) == 0.0);
}

TEST_CASE("higher energies dominate the first") {
  Grid g = Grid::periodic(1, 128, 20.0);
  RealField x = g.coordinate(0);
  RealField a0 = 1.0 + 0.3 * (-(x * x)).exp();
  ComplexField a = a0.cast<cd>();
  std::mt19937 rng(17);
  for (const auto& model : {NonlinearModel::power(1), NonlinearModel::power(2)})
    for (int trial = 0; trial < 5; ++trial) {
      ComplexField w = random_smooth(g, rng);
      double n1 = n_eps(g, w, a, 0.1, model, 10.0);
      CHECK(n_s_eps(g, w, a, a0, 0.1, model, NormConfig{10.0, 1}) == doctest::Approx(n1).epsilon(1e-14));
      for (int s : {2, 3}) CHECK(n_s_eps(g, w, a, a0, 0.1, model, NormConfig{10.0, s}) >= n1);
    }
}

TEST_CASE("norm bounds hold on smooth perturbations") {
  Grid g = Grid::periodic(1, 128, 20.0);
  RealField x = g.coordinate(0);
  RealField a0 = 1.0 + 0.3 * (-(x * x)).exp();
  ComplexField a = a0.cast<cd>();
  std::mt19937 rng(23);
  std::vector<ComplexField> samples;
  for (int i = 0; i < 20; ++i) samples.push_back(random_smooth(g, rng));
  for (int s : {1, 2}) {
    Calibration cal = calibrate_K(g, samples, a, a0, 0.1, NonlinearModel::power(1), NormConfig{10.0, s});
    CHECK(cal.pass);
    for (const auto& w : samples) {
      BoundsReport r = check_bounds(g, w, a, a0, 0.1, NonlinearModel::power(1), NormConfig{cal.K, s});
      CHECK(r.pass);
      CHECK(r.lower_margin > 0.0);
      CHECK(r.equivalence_margin > 0.0);
    }
  }
  BoundsReport zero = check_bounds(g, ComplexField::Zero(128), a, a0, 0.1, NonlinearModel::power(1), NormConfig{});
  CHECK(zero.pass);
  CHECK(zero.n_s == 0.0);
  CHECK(zero.hs_norm2 == 0.0);
}

TEST_CASE("equivalence margin stays nonnegative for eps near one") {
  Grid g = torus();
  RealField x = g.coordinate(0);
  ComplexField w = (cd(0.0, 1.0) * (3.0 * x).cast<cd>()).exp();
  ComplexField one = ComplexField::Ones(64);
  double previous = std::numeric_limits<double>::infinity();
  for (double eps : {0.25, 0.5, 1.0}) {
    BoundsReport r = check_bounds(g, w, one, RealField::Ones(64), eps, NonlinearModel::power(1), NormConfig{10.0, 1});
    CHECK(r.equivalence_margin >= 0.0);
    CHECK(r.equivalence_margin <= previous);
    previous = r.equivalence_margin;
  }
}

TEST_CASE("residual functional X") {
  Grid g = Grid::periodic(1, 32, 5.0);
  CHECK(x_eps(g, ComplexField::Zero(32), 0.1) == 0.0);
  const double c = 0.3;
  CHECK(x_eps(g, ComplexField::Constant(32, c), 0.1) == doctest::Approx(c * c * 5.0 * 11.0).epsilon(1e-13));
  CHECK(x_eps(g, ComplexField::Constant(32, cd(0.0, c)), 0.1) == doctest::Approx(c * c * 5.0 * 111.0).epsilon(1e-13));
}

TEST_CASE("brute-force evaluation agrees with the spectral one") {
  Grid g = Grid::periodic(1, 64, 12.0);
  RealField x = g.coordinate(0);
  RealField a0 = 1.0 + 0.2 * (-(x * x)).exp();
  ComplexField a = a0.cast<cd>();
  std::mt19937 rng(31);
  for (int s : {1, 2}) {
    ComplexField w = random_smooth(g, rng);
    double fast = n_s_eps(g, w, a, a0, 0.1, NonlinearModel::power(2), NormConfig{10.0, s});
    double slow = brute_force_n_s(g, w, a, 0.1, NonlinearModel::power(2), 10.0, s);
    CHECK(fast == doctest::Approx(slow).epsilon(1e-12));
  }
  ComplexField w = random_smooth(g, rng);
  CHECK((brute_force_derivative(g, w, 1) - spectral_derivative(g, w, 0, 1)).abs().maxCoeff() <= 1e-11);
}

TEST_CASE("audit of an exact trajectory stays at the floor") {
  Grid g = torus();
  std::vector<double> times{0.0, 0.1, 0.2, 0.3};
  ComplexField one = ComplexField::Ones(64);
  std::vector<ComplexField> psi(4, one), a(4, one);
  std::vector<RealField> phi(4, RealField::Zero(64)), a0(4, RealField::Ones(64));
  AuditRecord r = gronwall_audit(g, times, psi, a, phi, a0, 0.1, NonlinearModel::power(1), NormConfig{});
  CHECK(r.sup_n == 0.0);
  CHECK(r.sup_lambda == 0.0);
  for (double l : r.lambda) CHECK(std::isnan(l));
}

TEST_CASE("audit growth rate of an exponential") {
  Grid g = torus();
  std::vector<double> times;
  std::vector<ComplexField> psi, a;
  std::vector<RealField> phi, a0;
  ComplexField one = ComplexField::Ones(64);
  for (int n = 0; n <= 20; ++n) {
    double t = 0.05 * n;
    times.push_back(t);
    // w = 1e-3 e^{t} real, so N = const * e^{2t}
    psi.push_back(one * (1.0 + 1e-3 * std::exp(t)));
    a.push_back(one);
    phi.push_back(RealField::Zero(64));
    a0.push_back(RealField::Ones(64));
  }
  AuditRecord r = gronwall_audit(g, times, psi, a, phi, a0, 0.1, NonlinearModel::power(1), NormConfig{});
  CHECK(r.sup_lambda == doctest::Approx(2.0).epsilon(1e-3));

  AuditRecord copy = r;
  copy.sup_lambda = 3.0;
  CHECK(audit_uniformity({r, copy}) == doctest::Approx(1.5).epsilon(1e-3));
  copy.sup_lambda = 0.0;
  CHECK(std::isinf(audit_uniformity({r, copy})));
}
