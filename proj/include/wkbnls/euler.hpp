#pragma once

#include "wkbnls/grid.hpp"
#include "wkbnls/nonlinearity.hpp"
#include "wkbnls/spectral.hpp"

#include <functional>
#include <string>
#include <vector>

namespace wkbnls {

// Limit system in the variables h = h(a), H = h^n, u = grad phi.
struct EulerState {
  RealField h;
  RealField H;
  VectorField u;
  double t = 0.0;
};

struct EulerRates {
  RealField h;
  RealField H;
  VectorField u;
};

struct EulerConfig {
  double nu = 0.0;
  double dt = 0.01;  // upper bound on the RK4 step
  double cfl = 0.5;
  bool filter = true;  // exponential filter after each step when nu == 0
  double filter_strength = 36.0;
  int filter_order = 36;
  double blowup_ceiling = 1e3;  // on ||u||_{W^{1,inf}}
};

inline constexpr double kVacuumThreshold = 1e-12;

EulerState initial_state(const Grid& grid, const RealField& a0, const VectorField& u0, const NonlinearModel& model);

using EulerForcing = std::function<void(double t, EulerRates& rates)>;

EulerRates euler_rhs(const Grid& grid, const EulerState& s, const NonlinearModel& model, const EulerConfig& cfg);

// Largest characteristic speed max(|u| + H sqrt(2 n c(h))).
double max_wave_speed(const Grid& grid, const EulerState& s, const NonlinearModel& model);

struct EulerTrajectory {
  std::vector<EulerState> states;  // at the requested times (up to blow-up)
  std::vector<EulerRates> rates;   // right-hand side at the stored states
  bool blew_up = false;
  double last_valid_time = 0.0;
  std::string message;
  double max_power_drift = 0.0;  // max ||H - h^n||_inf / (1 + ||H||_inf)
  double min_h = 0.0;
  std::size_t steps = 0;
  std::size_t rejected_steps = 0;
};

EulerTrajectory integrate_euler(const Grid& grid, const EulerState& s0, const NonlinearModel& model,
                                const EulerConfig& cfg, const std::vector<double>& times,
                                const EulerForcing& forcing = {});

RealField reconstruct_amplitude(const EulerState& s, const NonlinearModel& model);

// phi(t_k) = phi0 - int_0^{t_k} (f(a^2) + |u|^2/2) on a uniform time grid.
std::vector<RealField> reconstruct_phase(const std::vector<double>& times, const std::vector<RealField>& a,
                                         const std::vector<VectorField>& u, const RealField& phi0,
                                         const NonlinearModel& model);

}  // namespace wkbnls
