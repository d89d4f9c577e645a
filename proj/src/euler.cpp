#include "wkbnls/euler.hpp"

#include "wkbnls/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace wkbnls {

namespace {

EulerState advance(const EulerState& s, const EulerRates& r, double dt) {
  EulerState o;
  o.h = s.h + dt * r.h;
  o.H = s.H + dt * r.H;
  o.u.resize(s.u.size());
  for (std::size_t i = 0; i < s.u.size(); ++i) o.u[i] = s.u[i] + dt * r.u[i];
  o.t = s.t + dt;
  return o;
}

void accumulate(EulerRates& acc, const EulerRates& r, double w) {
  acc.h += w * r.h;
  acc.H += w * r.H;
  for (std::size_t i = 0; i < acc.u.size(); ++i) acc.u[i] += w * r.u[i];
}

double velocity_w1inf(const Grid& grid, const VectorField& u) {
  double sup = 0.0, grad = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    sup = std::max(sup, u[i].abs().maxCoeff());
    for (const auto& g : gradient(grid, u[i])) grad = std::max(grad, g.abs().maxCoeff());
  }
  return sup + grad;
}

double power_drift(const EulerState& s, int n) {
  double drift = (s.H - s.h.pow(n)).abs().maxCoeff();
  return drift / (1.0 + s.H.abs().maxCoeff());
}

}  // namespace

EulerState initial_state(const Grid& grid, const RealField& a0, const VectorField& u0, const NonlinearModel& model) {
  if (model.kind() == ModelKind::GrossPitaevskii) throw std::domain_error("the (h, H, u) system needs an (A)-model");
  if (a0.size() != grid.size() || static_cast<int>(u0.size()) != grid.dim())
    throw std::invalid_argument("initial data do not match the grid");
  EulerState s;
  s.h = h_transform(model, a0);
  s.H = s.h.pow(model.n());
  s.u = u0;
  s.t = 0.0;
  return s;
}

EulerRates euler_rhs(const Grid& grid, const EulerState& s, const NonlinearModel& model, const EulerConfig& cfg) {
  const int n = model.n();
  const int d = grid.dim();
  auto grad_h = gradient(grid, s.h);
  auto grad_H = gradient(grid, s.H);
  RealField div_u = divergence(grid, s.u, Parity::Even);
  RealField c = c_coefficient(model, s.h);

  EulerRates r;
  r.h = -s.h * c * div_u;
  r.H = -n * s.H * c * div_u;
  for (int j = 0; j < d; ++j) {
    r.h -= s.u[j] * grad_h[j];
    r.H -= s.u[j] * grad_H[j];
  }
  r.u.resize(d);
  for (int i = 0; i < d; ++i) {
    auto grad_ui = gradient(grid, s.u[i]);
    r.u[i] = -2.0 * s.H * grad_H[i];
    for (int j = 0; j < d; ++j) r.u[i] -= s.u[j] * grad_ui[j];
  }

  if (cfg.nu > 0.0) {
    r.h += cfg.nu * laplacian(grid, s.h);
    RealField visc_H = laplacian(grid, s.H);
    if (n >= 2) {
      RealField grad2 = RealField::Zero(s.h.size());
      for (int j = 0; j < d; ++j) grad2 += grad_h[j].square();
      // n(n-1) h^{n-2} |grad h|^2 written as n(n-1) H h^{-2} |grad h|^2, zero at vacuum nodes
      RealField factor = (s.h.abs() < kVacuumThreshold).select(0.0, s.H / s.h.square());
      visc_H -= n * (n - 1) * factor * grad2;
    }
    r.H += cfg.nu * visc_H;
    for (int i = 0; i < d; ++i) r.u[i] += cfg.nu * laplacian(grid, s.u[i]);
  }

  r.h = dealias(grid, r.h);
  r.H = dealias(grid, r.H);
  for (int i = 0; i < d; ++i) r.u[i] = dealias(grid, r.u[i]);
  return r;
}

double max_wave_speed(const Grid& grid, const EulerState& s, const NonlinearModel& model) {
  RealField speed2 = RealField::Zero(grid.size());
  for (const auto& ui : s.u) speed2 += ui.square();
  RealField sound = s.H.abs() * (2.0 * model.n() * c_coefficient(model, s.h)).sqrt();
  return (speed2.sqrt() + sound).maxCoeff();
}

EulerTrajectory integrate_euler(const Grid& grid, const EulerState& s0, const NonlinearModel& model,
                                const EulerConfig& cfg, const std::vector<double>& times,
                                const EulerForcing& forcing) {
  if (grid.kind() != GridKind::Periodic) throw std::invalid_argument("integrate_euler runs on periodic grids");
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("EulerConfig.dt must be positive");
  if (times.empty() || times.front() != s0.t) throw std::invalid_argument("first output time must equal the initial time");

  auto rhs = [&](const EulerState& s) {
    EulerRates r = euler_rhs(grid, s, model, cfg);
    if (forcing) forcing(s.t, r);
    return r;
  };

  EulerTrajectory out;
  EulerState s = s0;
  out.min_h = s.h.minCoeff();
  auto store = [&]() {
    out.states.push_back(s);
    out.rates.push_back(rhs(s));
    out.max_power_drift = std::max(out.max_power_drift, power_drift(s, model.n()));
    out.last_valid_time = s.t;
  };
  store();

  const double dx = grid.spacing();
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double target = times[k];
    if (!(target > s.t)) throw std::invalid_argument("output times must increase");
    int sub = std::max(1, static_cast<int>(std::ceil((target - s.t) / cfg.dt - 1e-9)));
    double t_start = s.t;
    for (int j = 0; j < sub;) {
      double dt = (target - t_start) / sub;
      double limit = cfg.cfl * dx / std::max(max_wave_speed(grid, s, model), 1e-300);
      if (dt > limit) {
        // reject: refine the whole interval from the current position
        ++out.rejected_steps;
        double remaining = target - s.t;
        t_start = s.t;
        sub = std::max(1, static_cast<int>(std::ceil(remaining / (0.9 * limit))));
        j = 0;
        if (out.rejected_steps > 10000) {
          out.blew_up = true;
          out.message = "CFL step rejection limit reached";
          return out;
        }
        continue;
      }
      EulerRates k1 = rhs(s);
      EulerRates k2 = rhs(advance(s, k1, 0.5 * dt));
      EulerRates k3 = rhs(advance(s, k2, 0.5 * dt));
      EulerRates k4 = rhs(advance(s, k3, dt));
      EulerRates acc = k1;
      accumulate(acc, k2, 2.0);
      accumulate(acc, k3, 2.0);
      accumulate(acc, k4, 1.0);
      s = advance(s, acc, dt / 6.0);
      ++j;
      s.t = j == sub ? target : t_start + j * dt;
      ++out.steps;
      if (cfg.nu == 0.0 && cfg.filter) {
        s.h = exponential_filter(grid, s.h, cfg.filter_strength, cfg.filter_order);
        s.H = exponential_filter(grid, s.H, cfg.filter_strength, cfg.filter_order);
        for (auto& ui : s.u) ui = exponential_filter(grid, ui, cfg.filter_strength, cfg.filter_order);
      }
      out.min_h = std::min(out.min_h, s.h.minCoeff());
      bool finite = s.h.allFinite() && s.H.allFinite();
      for (const auto& ui : s.u) finite = finite && ui.allFinite();
      if (!finite || velocity_w1inf(grid, s.u) > cfg.blowup_ceiling) {
        out.blew_up = true;
        std::ostringstream msg;
        msg << "blow-up indicator exceeded at t = " << s.t << "; last valid time " << out.last_valid_time;
        out.message = msg.str();
        return out;
      }
    }
    store();
  }
  return out;
}

RealField reconstruct_amplitude(const EulerState& s, const NonlinearModel& model) { return h_inverse(model, s.h); }

std::vector<RealField> reconstruct_phase(const std::vector<double>& times, const std::vector<RealField>& a,
                                         const std::vector<VectorField>& u, const RealField& phi0,
                                         const NonlinearModel& model) {
  if (times.size() != a.size() || times.size() != u.size()) throw std::invalid_argument("trajectories must share the time grid");
  if (times.empty()) return {};
  std::vector<RealField> integrand(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    RealField g = model.f(a[k].square());
    for (const auto& ui : u[k]) g += 0.5 * ui.square();
    integrand[k] = g;
  }
  std::vector<RealField> phi(times.size());
  if (times.size() == 1) {
    phi[0] = phi0;
    return phi;
  }
  const double dt = times[1] - times[0];
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (std::abs(times[k] - times[k - 1] - dt) > 1e-9 * std::max(1.0, dt))
      throw std::invalid_argument("reconstruct_phase needs a uniform time grid");
  }
  auto integral = cumulative_integral(integrand, dt);
  for (std::size_t k = 0; k < times.size(); ++k) phi[k] = phi0 - integral[k];
  return phi;
}

}  // namespace wkbnls
