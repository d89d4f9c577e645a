#pragma once

#include "wkbnls/fit.hpp"
#include "wkbnls/grid.hpp"
#include "wkbnls/jet.hpp"
#include "wkbnls/layer.hpp"
#include "wkbnls/spectral.hpp"
#include "wkbnls/wkb.hpp"

#include <string>
#include <vector>

namespace wkbnls {

// Gross-Pitaevskii on the half-line z > 0 with Neumann wall and |Psi| -> 1.
// Interior amplitudes are even across the wall; interior velocities are
// v + w(t) chi(z) with v odd, chi = exp(-z^2) and w the imposed wall velocity.

struct HalfspaceConfig {
  double dt = 0.01;               // snapshot spacing (upper bound)
  double cfl = 0.4;
  double sponge_strength = 10.0;  // relaxation rate at z = L
  double alpha_floor = 1e-3;      // abort when min a falls below
  bool filter = true;
  ZGrid zgrid{};
};

// Start of the sponge layer [7L/8, L].
double sponge_start(const Grid& grid);
RealField sponge_profile(const Grid& grid, double strength);
// Smooth window equal to 1 on [0, 3L/4] and 0 beyond the sponge start.
RealField interior_window(const Grid& grid);

struct LimitRun {
  OrderSeries series;              // a (real part), u, phi with rates
  std::vector<double> mass;        // int (a^2 - 1) per snapshot
  std::vector<double> wall_velocity;  // |u(t, 0)| per snapshot
  std::vector<double> max_speed;   // max(|u| + a) per snapshot
  double min_a = 0.0;
};

LimitRun solve_limit_euler_halfline(const Grid& grid, const OrderData& data, const std::vector<double>& times,
                                    const HalfspaceConfig& cfg);

struct HalfspaceExpansion {
  Grid grid = Grid::half_line(8, 1.0);
  ZGrid zgrid{};
  HalfspaceConfig cfg{};
  int m = 1;
  std::vector<double> times;
  std::vector<double> max_speed;
  std::vector<OrderSeries> interior;                 // orders 0..m-1; u slot holds v
  std::vector<std::vector<double>> wall_velocity;    // [order][snapshot]
  std::vector<std::vector<double>> wall_rate;        // d/dt of wall_velocity
  std::vector<std::vector<Eigen::ArrayXd>> A, Phi;   // [k][snapshot], k = 0..m (k = 0 unused)
  std::vector<double> a_wall;                        // a(t, 0)
  LimitRun limit;
  std::vector<double> matching_error;        // per k: max_t |d_Z A^k(0) + d_z a^{k-1}(0)|
  std::vector<double> phase_matching_error;  // per k: max_t |d_Z Phi^k(0) + u^{k-1}(0)|
  std::vector<double> ode_residual;          // per k: max_t layer ODE residual
  std::vector<double> wall_trace_error;      // per interior order: max_t |u^k(0) - w_k|

  double dt() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
  // Interior order l at snapshot n with the full velocity v + w chi.
  OrderFields interior_at(int l, std::size_t n) const;
  double max_abs_phi(int k) const;
  double max_abs_A(int k) const;
};

// Wall data of the interior orders: d[l][q] = d_z^q X^l at z = 0.
struct WallTaylor {
  std::vector<std::vector<double>> a, u;
};

WallTaylor wall_taylor(const HalfspaceExpansion& e, std::size_t n, int orders, int derivatives);

// Boundary-layer parts of eps^2 times the amplitude and phase equations as
// eps-jets on the Z-grid, from the interior Taylor data at the wall and the
// layer profiles (index k = eps^k; empty arrays count as zero).
struct LayerEquations {
  RealJet e_a;
  RealJet e_phi;
};

LayerEquations layer_equations(const ZGrid& zg, const WallTaylor& wall, const std::vector<Eigen::ArrayXd>& A,
                               const std::vector<Eigen::ArrayXd>& Phi, const std::vector<Eigen::ArrayXd>& dA,
                               const std::vector<Eigen::ArrayXd>& dPhi, int order);

// Interior order k >= 1 with wall velocity w (per snapshot) on the expansion prefix.
OrderSeries solve_interior_orderk(const HalfspaceExpansion& prefix, int k, const OrderData& data,
                                  const std::vector<double>& w, const std::vector<double>& dw);

// Cascade: data[0..m-1] are interior initial data.
HalfspaceExpansion build_halfspace(const Grid& grid, int m, const std::vector<OrderData>& data, double t_end,
                                   const HalfspaceConfig& cfg = {});

// Assembled fields and derivatives at one snapshot.
struct HalfspaceFields {
  RealField a, a_z, a_zz, a_t;
  RealField phi, u, u_z, phi_t;
};

HalfspaceFields halfspace_fields(const HalfspaceExpansion& e, double epsilon, std::size_t n, bool with_layers = true);

struct HalfspaceAssembly {
  std::vector<double> times;
  std::vector<RealField> a;
  std::vector<RealField> phi;
  std::vector<double> neumann_residual;  // |d_z Psi(0)| from the components
  std::vector<double> neumann_discrete;  // one-sided stencil on the nodes
};

HalfspaceAssembly assemble_halfspace(const HalfspaceExpansion& e, double epsilon);
ComplexField initial_wavefunction(const HalfspaceExpansion& e, double epsilon);

struct HalfspaceResidual {
  double epsilon = 0.0;
  int s = 0;
  std::vector<double> times;
  std::vector<double> total;     // ||GP(Psi)||_{H^s} on the window
  std::vector<double> interior;  // interior-only assembly
  std::vector<double> layer;     // total minus interior field
  double sup_total = 0.0;
  double sup_interior = 0.0;
  double sup_layer = 0.0;
};

HalfspaceResidual halfspace_residual(const HalfspaceExpansion& e, double epsilon, int s);

struct HalfspaceNorms {
  double K = 0.0;
  int doublings = 0;
  std::vector<double> n_plus, y_plus, z_plus;
  bool one_sided_ends = false;  // endpoint time differences are one-sided
};

// eps R_phi^b at snapshot n: phase residual of the full assembly minus the interior one.
RealField layer_phase_residual(const HalfspaceExpansion& e, double epsilon, std::size_t n);

// N_+ of one field given a^eps and eps R_phi^b.
double n_plus(const Grid& grid, const ComplexField& w, const RealField& a_eps, const RealField& eps_rb, double epsilon,
              double K);

HalfspaceNorms halfspace_norms(const HalfspaceExpansion& e, double epsilon, const std::vector<ComplexField>& w,
                               double K);

struct NecessityRow {
  double epsilon = 0.0;
  double err_with = 0.0;       // sup_t W^{1,inf} error against a + eps A^1
  double err_without = 0.0;    // sup_t W^{1,inf} error against a
  double wall_grad_with = 0.0;
  double wall_grad_without = 0.0;  // sup_t max_{z <= eps} |d_z error|
  double mass_drift = 0.0;
  double energy_drift = 0.0;
};

struct NecessityStudy {
  int m = 1;
  std::vector<NecessityRow> rows;
  RateFit fit_with, fit_without_wall;
  double max_A1 = 0.0;
  bool pass = false;
};

NecessityStudy layer_necessity_study(const HalfspaceExpansion& e, const std::vector<double>& eps_list,
                                     double cfl_factor = 0.05);

}  // namespace wkbnls
