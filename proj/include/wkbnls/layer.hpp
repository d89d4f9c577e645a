#pragma once

#include <Eigen/Core>

#include <vector>

namespace wkbnls {

// Composite Chebyshev-Lobatto grid on [0, z_max] for the fast variable Z.
// Panels share their end nodes; the grid does not depend on epsilon.
class ZGrid {
 public:
  explicit ZGrid(double z_max = 36.0, int panels = 36, int order = 16);

  double z_max() const { return z_max_; }
  int panels() const { return panels_; }
  int order() const { return order_; }
  double panel_width() const { return z_max_ / panels_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(panels_) * order_ + 1; }
  const Eigen::ArrayXd& nodes() const { return nodes_; }
  const Eigen::ArrayXd& weights() const { return weights_; }

  // Panelwise spectral derivative; shared nodes take the mean of both sides.
  Eigen::ArrayXd derivative(const Eigen::ArrayXd& f, int order = 1) const;
  // d^order f / dZ^order at Z = 0.
  double wall_derivative(const Eigen::ArrayXd& f, int order = 1) const;
  double integrate(const Eigen::ArrayXd& f) const { return (weights_ * f).sum(); }
  // int_0^Z f and int_Z^{z_max} f at every node.
  Eigen::ArrayXd cumulative(const Eigen::ArrayXd& f) const;
  Eigen::ArrayXd tail(const Eigen::ArrayXd& f) const;
  // Local integrals int_{Z_start}^{Z_i} g over one panel (g at that panel's nodes).
  Eigen::VectorXd panel_integral(int panel, const Eigen::VectorXd& g) const;
  // Barycentric interpolation; zero beyond z_max.
  double interpolate(const Eigen::ArrayXd& f, double Z) const;
  Eigen::ArrayXd interpolate(const Eigen::ArrayXd& f, const Eigen::ArrayXd& Z) const;
  // Largest |f| on the last panel (tail check).
  double tail_size(const Eigen::ArrayXd& f) const;

  Eigen::Index index(int panel, int j) const { return static_cast<Eigen::Index>(panel) * order_ + j; }

 private:
  double z_max_;
  int panels_;
  int order_;
  Eigen::ArrayXd nodes_;
  Eigen::ArrayXd weights_;
  Eigen::ArrayXd ref_;          // reference nodes on [-1, 1], increasing
  Eigen::ArrayXd bary_;         // barycentric weights
  Eigen::MatrixXd diff_;        // reference differentiation matrix
  Eigen::MatrixXd integ_;       // reference cumulative integration from -1
};

// Profile on the Z-grid with its fitted decay rate.
struct BoundaryLayerProfile {
  Eigen::ArrayXd values;
  double gamma = 0.0;        // fitted decay rate; infinity for a vanishing profile
  double amplitude = 0.0;    // C with |values| <= C exp(-gamma Z)
  double wall_slope = 0.0;   // d/dZ at Z = 0
};

BoundaryLayerProfile make_profile(const ZGrid& zg, Eigen::ArrayXd values);

// Least-squares decay rate of log|f| over the nodes where f is above
// round-off; infinity for a vanishing profile.
double decay_rate(const ZGrid& zg, const Eigen::ArrayXd& f);

// A = (dz_a_b / (2 a_b)) exp(-2 a_b Z).
BoundaryLayerProfile layer_A1(const ZGrid& zg, double a_b, double dz_a_b);

// Decaying solution of A'' = 4 a_b^2 A + F with A'(0) = beta.
BoundaryLayerProfile layer_ode_solve(const ZGrid& zg, double a_b, const Eigen::ArrayXd& F, double beta);

struct PhaseLayer {
  BoundaryLayerProfile phi;
  double wall_velocity = 0.0;  // (1/a_b) int_0^inf G
};

// Decaying solution of a_b Phi'' = G: Phi'(Z) = -(1/a_b) int_Z^inf G, Phi(inf) = 0.
PhaseLayer layer_phase_solve(const ZGrid& zg, double a_b, const Eigen::ArrayXd& G);

// max |A'' - 4 a_b^2 A - F| over interior nodes.
double layer_ode_residual(const ZGrid& zg, double a_b, const Eigen::ArrayXd& A, const Eigen::ArrayXd& F);

}  // namespace wkbnls
