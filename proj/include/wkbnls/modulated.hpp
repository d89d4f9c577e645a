#pragma once

#include "wkbnls/grid.hpp"
#include "wkbnls/nonlinearity.hpp"
#include "wkbnls/spectral.hpp"

#include <array>
#include <vector>

namespace wkbnls {

struct NormConfig {
  double K = 10.0;
  int s = 1;
};

// N(w) = 1/2 int eps^2 |grad w|^2 + 4 f'(|a|^2) (w, a)^2 + K eps^2 |w|^2,
// (w, a) = Re(w conj(a)).
double n_eps(const Grid& grid, const ComplexField& w, const ComplexField& a_eps, double epsilon,
             const NonlinearModel& model, double K);

// Multi-indices alpha with |alpha| <= order in grid.dim() variables.
std::vector<std::array<int, 2>> multi_indices(int dim, int order);

// N_s(w) = sum_{|alpha| <= s-1} N(d^alpha w) + K ||Re w||^2_{H^{s-2}}; N_1 = N.
double n_s_eps(const Grid& grid, const ComplexField& w, const ComplexField& a_eps, const RealField& a0, double epsilon,
               const NonlinearModel& model, const NormConfig& cfg);

struct BoundsReport {
  double n_s = 0.0;
  double lower_rhs = 0.0;    // 1/2 sum N(d^a w) + sum int f'(|a|^2) a0^2 |Re d^a w|^2
  double hs_norm2 = 0.0;     // ||w||^2_{H^s}
  double upper_rhs = 0.0;    // (2/eps^2) N_s
  double lower_margin = 0.0;  // n_s - lower_rhs
  double equivalence_margin = 0.0;  // upper_rhs - hs_norm2
  bool pass = false;
};

BoundsReport check_bounds(const Grid& grid, const ComplexField& w, const ComplexField& a_eps, const RealField& a0,
                          double epsilon, const NonlinearModel& model, const NormConfig& cfg);

struct Calibration {
  double K = 10.0;
  int doublings = 0;
  bool pass = false;
};

// Doubles K from cfg.K until check_bounds holds strictly on every sample.
Calibration calibrate_K(const Grid& grid, const std::vector<ComplexField>& samples, const ComplexField& a_eps,
                        const RealField& a0, double epsilon, const NonlinearModel& model, const NormConfig& cfg,
                        int max_doublings = 40);

// X(F) = ||F||^2_{H^1} + ||F||^2/eps + ||Im F||^2/eps^2.
double x_eps(const Grid& grid, const ComplexField& F, double epsilon);

struct AuditRecord {
  double epsilon = 0.0;
  double K = 0.0;
  int s = 1;
  std::vector<double> times;
  std::vector<double> n_values;
  std::vector<double> lambda;     // d/dt log(N + floor), NaN where excluded
  double sup_n = 0.0;
  double sup_lambda = 0.0;
};

inline constexpr double kAuditFloor = 1e-30;
// Samples with N below this fraction of sup N are left out of lambda.
inline constexpr double kAuditOnset = 1e-6;

// w(t) = psi(t) exp(-i phi(t)/eps) - a(t) at the snapshot times.
AuditRecord gronwall_audit(const Grid& grid, const std::vector<double>& times, const std::vector<ComplexField>& psi,
                           const std::vector<ComplexField>& a_eps, const std::vector<RealField>& phi_eps,
                           const std::vector<RealField>& a0, double epsilon, const NonlinearModel& model,
                           const NormConfig& cfg);

// Ratio max/min of sup lambda over consecutive epsilon values.
double audit_uniformity(const std::vector<AuditRecord>& records);

}  // namespace wkbnls
