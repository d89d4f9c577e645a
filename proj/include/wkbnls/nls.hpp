#pragma once

#include "wkbnls/grid.hpp"
#include "wkbnls/nonlinearity.hpp"
#include "wkbnls/spectral.hpp"

#include <functional>
#include <vector>

namespace wkbnls {

enum class Boundary { Periodic, NeumannHalfLine };

struct NLSConfig {
  double epsilon = 0.1;
  double dt = 0.0;  // 0 selects min(cfl_factor * epsilon, 0.9 * resonance_step)
  double t_end = 1.0;
  NonlinearModel model = NonlinearModel::power(1);
  Boundary boundary = Boundary::Periodic;
  double cfl_factor = 0.05;

  double step() const { return dt > 0.0 ? dt : cfl_factor * epsilon; }
  void validate() const;
};

// Step at which the top mode turns by pi in one linear substep; splitting
// steps above it excite resonant growth on a nonzero background.
double resonance_step(const Grid& grid, double epsilon);

// Step used by integrate for this grid.
double effective_step(const Grid& grid, const NLSConfig& cfg);

// Runs whose initial spectrum is not below this fraction at the cutoff are refused.
inline constexpr double kResolutionTail = 1e-10;

// Throws std::runtime_error when psi0 is under-resolved on the grid.
void require_resolved(const Grid& grid, const ComplexField& psi0);

// i eps Psi_t + eps^2/2 Lap Psi - f(|Psi|^2) Psi = 0, one Strang step of size dt
// (dt may be negative).
ComplexField strang_step(const Grid& grid, const ComplexField& psi, const NLSConfig& cfg, double dt);

struct NLSTrajectory {
  std::vector<double> t;
  std::vector<ComplexField> psi;
  std::size_t steps = 0;
  double max_step_mass_drift = 0.0;  // max_n |M_{n+1} - M_n| / M_0
  double max_energy_drift = 0.0;     // max over snapshots |E - E_0| / |E_0|
};

using NLSObserver = std::function<void(double t, const ComplexField& psi)>;

// Repeated Strang steps landing exactly on each snapshot time.
NLSTrajectory integrate(const Grid& grid, const ComplexField& psi0, const NLSConfig& cfg,
                        const std::vector<double>& snapshot_times, const NLSObserver& observer = {});

double mass(const Grid& grid, const ComplexField& psi);
double energy(const Grid& grid, const ComplexField& psi, double epsilon, const NonlinearModel& model);

}  // namespace wkbnls
