#include "wkbnls/nls.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace wkbnls {

namespace {

using cd = std::complex<double>;

void check_boundary(const Grid& grid, const NLSConfig& cfg) {
  bool half = grid.kind() == GridKind::HalfLine;
  if (half != (cfg.boundary == Boundary::NeumannHalfLine))
    throw std::invalid_argument("NLS boundary does not match the grid kind");
}

class Stepper {
 public:
  Stepper(const Grid& grid, const NLSConfig& cfg) : grid_(grid), cfg_(cfg) {}

  ComplexField step(const ComplexField& psi, double dt) {
    ComplexField p = nonlinear(psi, 0.5 * dt);
    ComplexField hat = forward_transform(grid_, p, Parity::Even);
    hat *= linear_multiplier(dt);
    p = inverse_transform(grid_, hat);
    return nonlinear(p, 0.5 * dt);
  }

 private:
  ComplexField nonlinear(const ComplexField& psi, double tau) const {
    Eigen::ArrayXd phase = cfg_.model.f(psi.abs2()) * (-tau / cfg_.epsilon);
    ComplexField rot(psi.size());
    for (Eigen::Index i = 0; i < psi.size(); ++i) rot[i] = psi[i] * std::polar(1.0, phase[i]);
    return rot;
  }

  const ComplexField& linear_multiplier(double dt) {
    if (dt != cached_dt_) {
      const auto& k2 = grid_.wavenumber_sq();
      cached_.resize(k2.size());
      for (Eigen::Index s = 0; s < k2.size(); ++s) cached_[s] = std::polar(1.0, -0.5 * cfg_.epsilon * dt * k2[s]);
      cached_dt_ = dt;
    }
    return cached_;
  }

  const Grid& grid_;
  const NLSConfig& cfg_;
  double cached_dt_ = std::numeric_limits<double>::quiet_NaN();
  ComplexField cached_;
};

}  // namespace

void NLSConfig::validate() const {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw std::invalid_argument("NLS epsilon must lie in (0, 1]");
  if (!(t_end >= 0.0)) throw std::invalid_argument("NLS t_end must be >= 0");
  double h = step();
  if (!(h > 0.0 && h <= epsilon)) throw std::invalid_argument("NLS dt must satisfy 0 < dt <= epsilon");
}

double resonance_step(const Grid& grid, double epsilon) {
  const double k = grid.k_max();
  return 2.0 * std::numbers::pi / (epsilon * grid.dim() * k * k);
}

void require_resolved(const Grid& grid, const ComplexField& psi0) {
  const double tail = spectral_tail_ratio(grid, psi0, Parity::Even);
  if (tail > kResolutionTail) {
    std::ostringstream os;
    os << "under-resolved initial field: spectral tail " << tail << " exceeds " << kResolutionTail
       << " on N = " << grid.n();
    throw std::runtime_error(os.str());
  }
}

double effective_step(const Grid& grid, const NLSConfig& cfg) {
  if (cfg.dt > 0.0) return cfg.dt;
  return std::min(cfg.step(), 0.9 * resonance_step(grid, cfg.epsilon));
}

ComplexField strang_step(const Grid& grid, const ComplexField& psi, const NLSConfig& cfg, double dt) {
  check_boundary(grid, cfg);
  Stepper s(grid, cfg);
  ComplexField out = s.step(psi, dt);
  if (!out.allFinite()) throw std::runtime_error("NLS step produced non-finite values");
  return out;
}

NLSTrajectory integrate(const Grid& grid, const ComplexField& psi0, const NLSConfig& cfg,
                        const std::vector<double>& snapshot_times, const NLSObserver& observer) {
  cfg.validate();
  check_boundary(grid, cfg);
  if (psi0.size() != grid.size()) throw std::invalid_argument("initial field does not match grid");
  for (std::size_t i = 0; i < snapshot_times.size(); ++i) {
    double t = snapshot_times[i];
    if (t < 0.0 || t > cfg.t_end * (1.0 + 1e-12)) throw std::invalid_argument("snapshot time outside [0, t_end]");
    if (i > 0 && !(t > snapshot_times[i - 1])) throw std::invalid_argument("snapshot times must increase");
  }

  NLSTrajectory out;
  Stepper stepper(grid, cfg);
  const double h = effective_step(grid, cfg);
  const double m0 = mass(grid, psi0);
  const double e0 = energy(grid, psi0, cfg.epsilon, cfg.model);
  ComplexField psi = psi0;
  double t = 0.0;
  double m_prev = m0;

  auto record = [&](double time) {
    out.t.push_back(time);
    out.psi.push_back(psi);
    double e = energy(grid, psi, cfg.epsilon, cfg.model);
    double scale = std::abs(e0) > 0.0 ? std::abs(e0) : 1.0;
    out.max_energy_drift = std::max(out.max_energy_drift, std::abs(e - e0) / scale);
    if (observer) observer(time, psi);
  };

  for (double target : snapshot_times) {
    while (target - t > 1e-14 * std::max(1.0, target)) {
      double dt = std::min(h, target - t);
      // avoid a sliver step below 1e-3 of the nominal step
      if (target - t - dt < 1e-3 * h) dt = target - t;
      psi = stepper.step(psi, dt);
      t = (target - t - dt == 0.0) ? target : t + dt;
      ++out.steps;
      if (!psi.allFinite()) {
        std::ostringstream msg;
        msg << "NLS integration produced non-finite values at t = " << t;
        throw std::runtime_error(msg.str());
      }
      double m = mass(grid, psi);
      if (m0 > 0.0) out.max_step_mass_drift = std::max(out.max_step_mass_drift, std::abs(m - m_prev) / m0);
      m_prev = m;
    }
    t = target;
    record(target);
  }
  return out;
}

double mass(const Grid& grid, const ComplexField& psi) { return integrate(grid, Eigen::ArrayXd(psi.abs2())); }

double energy(const Grid& grid, const ComplexField& psi, double epsilon, const NonlinearModel& model) {
  auto g = gradient(grid, psi, Parity::Even);
  Eigen::ArrayXd density = model.antiderivative(psi.abs2());
  for (const auto& c : g) density += 0.5 * epsilon * epsilon * c.abs2();
  return integrate(grid, density);
}

}  // namespace wkbnls
