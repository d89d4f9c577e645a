#pragma once

#include "wkbnls/halfspace.hpp"
#include "wkbnls/sweep.hpp"

#include <string>
#include <utility>
#include <vector>

namespace wkbnls {

// Outcome of one acceptance check with the measured quantities it used.
struct CriterionReport {
  CriterionReport() = default;
  CriterionReport(int i, std::string n) : id(i), name(std::move(n)) {}

  int id = 0;
  std::string name;
  bool pass = false;
  std::vector<std::pair<std::string, double>> metrics;
  std::string note;

  void add(const std::string& key, double value) { metrics.emplace_back(key, value); }
  // "PASS [id] name: key=value ..."
  std::string line() const;
};

// Residual slopes of the whole-space cascade on cubic-bump, m = 0, 1, 2.
CriterionReport check_residual_order(const std::vector<double>& eps_list);

// Error slopes from cubic-bump (m = 0) and quintic-vacuum (m = 1) sweeps.
CriterionReport check_convergence(const SweepResult& cubic_m0, const SweepResult& quintic_m1);

// Mass per step and energy drift over every row of the given sweeps.
CriterionReport check_conservation(const std::vector<const SweepResult*>& sweeps);

struct PlaneWaveStudy {
  double max_error = 0.0;        // exact plane wave at dt = 0.05 eps
  double error_dt = 0.0;         // perturbed wave against a fine reference
  double error_half = 0.0;
  double halving_ratio = 0.0;
};

// Plane wave A exp(i(kx - omega t)/eps) with omega = k^2/2 + f(A^2).
PlaneWaveStudy plane_wave_study(double epsilon = 0.1, double t_end = 1.0);
CriterionReport check_plane_wave(const PlaneWaveStudy& st);

struct LimitStudy {
  double max_power_drift = 0.0;      // over every limit run made here
  std::vector<double> nu, viscous_gap;  // ||(h, u)_nu - (h, u)_{nu/2}||_{H^1} at T
  RateFit viscous_fit;
  std::vector<double> mms_dt, mms_error;  // manufactured solution, RK4 in time
  RateFit mms_fit;
};

LimitStudy limit_study();
CriterionReport check_limit_system(const LimitStudy& st, double extra_power_drift = 0.0);

// N_1 slopes and Gronwall uniformity from audited cubic-bump sweeps.
CriterionReport check_modulated(const SweepResult& cubic_m0, const SweepResult& cubic_m1);

// Norm bounds on random smooth perturbations over every shipped background,
// and n_s_eps against a brute-force DFT evaluation.
CriterionReport check_norm_bounds(int samples = 100, unsigned seed = 20240601);

// d^q w/dx^q on a periodic grid by an O(N^2) DFT (independent of the FFT path).
ComplexField brute_force_derivative(const Grid& grid, const ComplexField& w, int order);
double brute_force_n_s(const Grid& grid, const ComplexField& w, const ComplexField& a_eps, double epsilon,
                       const NonlinearModel& model, double K, int s);

// Closed-form layer examples, synthetic three-order layer cascade and the
// gp-wall expansion.
CriterionReport check_layers(const HalfspaceExpansion& gp_wall);

// Raw L2 GP residual slopes on gp-wall for m = 1 and m = 2.
CriterionReport check_halfspace_residual(const HalfspaceExpansion& m1, const HalfspaceExpansion& m2,
                                         const std::vector<double>& eps_list);

CriterionReport check_layer_necessity(const NecessityStudy& st);

CriterionReport check_determinism(const SweepResult& first, const SweepResult& second);

// gp-wall expansion with the case data.
HalfspaceExpansion build_gp_wall(int m, double t_end = 0.0, const HalfspaceConfig& cfg = {});

}  // namespace wkbnls
