#include "wkbnls/cases.hpp"

#include "wkbnls/euler.hpp"
#include "wkbnls/halfspace.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wkbnls {

namespace {

using cd = std::complex<double>;

OrderData zero_order(const Grid& g) { return {ComplexField::Zero(g.size()), RealField::Zero(g.size())}; }

// Order-0 data as given; higher orders vanish.
DataGenerator leading(std::function<OrderData(const Grid&)> f) {
  return [f](const Grid& g, int orders) {
    std::vector<OrderData> out;
    out.push_back(f(g));
    for (int k = 1; k < orders; ++k) out.push_back(zero_order(g));
    return out;
  };
}

RealField gaussian(const Grid& g) { return (-0.5 * g.coordinate(0).square()).exp(); }

OrderData bump_data(const Grid& g) {
  RealField G = gaussian(g);
  return {(1.0 + 0.3 * G).cast<cd>(), RealField(0.2 * G)};
}

// int_0^z u for odd-extended u, spectrally.
RealField halfline_antiderivative(const Grid& g, const RealField& u) {
  ComplexField m = derivative_multiplier(g, 0, 1);
  for (Eigen::Index i = 0; i < m.size(); ++i) m[i] = std::abs(m[i]) > 0.0 ? 1.0 / m[i] : cd(0.0);
  RealField v = apply_multiplier(g, u, m, Parity::Odd);
  return v - evaluate_derivative_at(g, v, 0.0, 0, Parity::Even);
}

}  // namespace

RealField compact_bump(const RealField& x) {
  RealField b = RealField::Zero(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (std::abs(x[i]) < 1.0) b[i] = std::exp(1.0 - 1.0 / (1.0 - x[i] * x[i]));
  return b;
}

Grid CaseSpec::grid() const { return domain == Domain::Torus ? Grid::periodic(1, n, length) : Grid::half_line(n, length); }

std::vector<std::string> case_names() {
  return {"constant", "cubic-bump", "quintic-vacuum", "sum-powers", "rational", "gp-wall"};
}

CaseSpec make_case(const std::string& name) {
  CaseSpec c;
  c.name = name;
  const double torus = 16.0 * std::numbers::pi;
  if (name == "constant") {
    c.model = NonlinearModel::power(1);
    c.n = 64;
    c.length = torus;
    c.t_end = 1.0;
    c.data = leading([](const Grid& g) { return OrderData{ComplexField::Ones(g.size()), RealField::Zero(g.size())}; });
  } else if (name == "cubic-bump") {
    c.model = NonlinearModel::power(1);
    c.n = 1024;
    c.length = torus;
    c.t_end = 1.0;
    c.data = leading(bump_data);
  } else if (name == "quintic-vacuum") {
    c.model = NonlinearModel::power(2);
    c.n = 4096;  // the compact bump needs it to resolve Psi_0 below the tail bound
    c.length = torus;
    c.t_end = 0.5;
    c.data = leading([](const Grid& g) {
      RealField x = g.coordinate(0);
      return OrderData{compact_bump(RealField(x / 3.0)).cast<cd>(), RealField(0.1 * gaussian(g))};
    });
  } else if (name == "sum-powers") {
    c.model = NonlinearModel::sum_of_powers(1, 3);
    c.n = 1024;
    c.length = torus;
    c.t_end = 0.4;  // steepens near t = 0.8
    c.data = leading(bump_data);
  } else if (name == "rational") {
    c.model = NonlinearModel::rational(2);
    c.n = 1024;
    c.length = torus;
    c.t_end = 0.5;
    c.data = leading(bump_data);
  } else if (name == "gp-wall") {
    c.domain = Domain::HalfLine;
    c.tails = false;
    c.model = NonlinearModel::gross_pitaevskii();
    c.n = 2048;
    c.length = 16.0;
    c.t_end = 1.5;
    c.data = [](const Grid& g, int orders) {
      RealField z = g.coordinate(0);
      RealField B = compact_bump(RealField((z - 3.5) / 2.5));
      RealField a0 = 1.0 + 0.1 * B;
      // left-moving simple wave: u + 2a constant
      RealField u0 = -2.0 * (a0 - 1.0);
      RealField phi0 = halfline_antiderivative(g, u0);
      std::vector<OrderData> out{{a0.cast<cd>(), phi0}};
      if (orders > 1) out.push_back({(0.05 * B).cast<cd>(), RealField::Zero(g.size())});
      for (int k = 2; k < orders; ++k) out.push_back(zero_order(g));
      return out;
    };
  } else {
    throw std::invalid_argument("unknown case '" + name + "'");
  }
  return c;
}

HorizonCheck check_horizon(const CaseSpec& spec) {
  HorizonCheck h;
  const double t_max = 2.0 * spec.t_end;
  const Grid g = spec.grid();
  OrderData d0 = spec.initial(1)[0];
  std::vector<double> times = uniform_times(t_max, 0.01);
  std::vector<double> steepness;  // max |d_x amplitude| + max |d_x u| per snapshot
  auto grad = [&](const RealField& f, Parity p) { return spectral_derivative(g, f, 0, 1, p).abs().maxCoeff(); };
  if (spec.domain == Domain::HalfLine) {
    try {
      HalfspaceConfig cfg;
      LimitRun run = solve_limit_euler_halfline(g, d0, times, cfg);
      for (std::size_t n = 0; n < run.series.size(); ++n) {
        OrderFields o = run.series.at(n);
        steepness.push_back(grad(RealField(o.a.real()), Parity::Even) + grad(o.u[0], Parity::Odd));
      }
    } catch (const std::runtime_error& e) {
      h.blew_up = true;
      h.message = e.what();
    }
  } else {
    EulerState s0 = initial_state(g, d0.a.real(), gradient(g, d0.phi), spec.model);
    EulerTrajectory run = integrate_euler(g, s0, spec.model, EulerConfig{}, times);
    h.blew_up = run.blew_up;
    h.message = run.message;
    for (const auto& s : run.states) steepness.push_back(grad(s.h, Parity::Even) + grad(s.u[0], Parity::Even));
  }
  h.horizon = steepness.empty() ? 0.0 : times[steepness.size() - 1];
  for (std::size_t n = 1; n < steepness.size(); ++n) {
    if (steepness[n] > kSteepeningFactor * std::max(steepness[0], 1e-12)) {
      h.horizon = times[n];
      h.steepened = true;
      break;
    }
  }
  h.ok = spec.t_end <= 0.5 * h.horizon + 1e-12;
  return h;
}

}  // namespace wkbnls
