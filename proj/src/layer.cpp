#include "wkbnls/layer.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace wkbnls {

namespace {

constexpr double kTailTolerance = 1e-8;

void check_size(const ZGrid& zg, const Eigen::ArrayXd& f) {
  if (f.size() != zg.size()) throw std::invalid_argument("profile does not match the Z-grid");
}

void check_decay(const ZGrid& zg, const Eigen::ArrayXd& f, const char* what) {
  double scale = std::max(1.0, f.abs().maxCoeff());
  if (!f.allFinite() || zg.tail_size(f) > kTailTolerance * scale)
    throw std::domain_error(std::string(what) + " does not decay on the Z-grid");
}

}  // namespace

ZGrid::ZGrid(double z_max, int panels, int order) : z_max_(z_max), panels_(panels), order_(order) {
  if (!(z_max > 0.0) || panels < 1 || order < 2) throw std::invalid_argument("invalid Z-grid parameters");
  const int p = order;
  ref_.resize(p + 1);
  bary_.resize(p + 1);
  for (int j = 0; j <= p; ++j) {
    ref_[j] = -std::cos(std::numbers::pi * j / p);
    bary_[j] = (j % 2 == 0 ? 1.0 : -1.0) * ((j == 0 || j == p) ? 0.5 : 1.0);
  }
  diff_ = Eigen::MatrixXd::Zero(p + 1, p + 1);
  for (int i = 0; i <= p; ++i) {
    double diag = 0.0;
    for (int j = 0; j <= p; ++j) {
      if (i == j) continue;
      diff_(i, j) = (bary_[j] / bary_[i]) / (ref_[i] - ref_[j]);
      diag -= diff_(i, j);
    }
    diff_(i, i) = diag;
  }

  // cumulative integration through Chebyshev coefficients
  Eigen::MatrixXd V(p + 1, p + 1), W(p + 1, p + 2);
  Eigen::VectorXd Wm1(p + 2);
  for (int i = 0; i <= p; ++i) {
    double th = std::acos(std::clamp(ref_[i], -1.0, 1.0));
    for (int n = 0; n <= p; ++n) V(i, n) = std::cos(n * th);
    for (int n = 0; n <= p + 1; ++n) W(i, n) = std::cos(n * th);
  }
  for (int n = 0; n <= p + 1; ++n) Wm1[n] = n % 2 == 0 ? 1.0 : -1.0;
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(p + 2, p + 1);
  // antiderivative of T_n: T_1 for n=0, T_2/4 for n=1, T_{n+1}/(2(n+1)) - T_{n-1}/(2(n-1)) otherwise
  B(1, 0) = 1.0;
  if (p >= 1) B(2, 1) = 0.25;
  for (int n = 2; n <= p; ++n) {
    B(n + 1, n) += 1.0 / (2.0 * (n + 1));
    B(n - 1, n) -= 1.0 / (2.0 * (n - 1));
  }
  Eigen::MatrixXd Vinv = V.partialPivLu().inverse();
  integ_ = (W - Eigen::VectorXd::Ones(p + 1) * Wm1.transpose()) * B * Vinv;

  const double h = panel_width();
  nodes_.resize(size());
  weights_ = Eigen::ArrayXd::Zero(size());
  Eigen::VectorXd w_ref = integ_.row(p).transpose();
  for (int k = 0; k < panels_; ++k) {
    for (int j = 0; j <= p; ++j) {
      nodes_[index(k, j)] = k * h + 0.5 * (ref_[j] + 1.0) * h;
      weights_[index(k, j)] += 0.5 * h * w_ref[j];
    }
  }
  nodes_[0] = 0.0;
  nodes_[size() - 1] = z_max_;
}

Eigen::ArrayXd ZGrid::derivative(const Eigen::ArrayXd& f, int order) const {
  check_size(*this, f);
  const int p = order_;
  const double scale = std::pow(2.0 / panel_width(), order);
  Eigen::MatrixXd D = Eigen::MatrixXd::Identity(p + 1, p + 1);
  for (int r = 0; r < order; ++r) D = diff_ * D;
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(size());
  Eigen::ArrayXd count = Eigen::ArrayXd::Zero(size());
  for (int k = 0; k < panels_; ++k) {
    Eigen::VectorXd local = f.segment(index(k, 0), p + 1).matrix();
    Eigen::VectorXd d = scale * (D * local);
    out.segment(index(k, 0), p + 1) += d.array();
    count.segment(index(k, 0), p + 1) += 1.0;
  }
  return out / count;
}

double ZGrid::wall_derivative(const Eigen::ArrayXd& f, int order) const {
  check_size(*this, f);
  const int p = order_;
  Eigen::MatrixXd D = Eigen::MatrixXd::Identity(p + 1, p + 1);
  for (int r = 0; r < order; ++r) D = diff_ * D;
  Eigen::VectorXd local = f.segment(0, p + 1).matrix();
  return std::pow(2.0 / panel_width(), order) * D.row(0).dot(local);
}

Eigen::VectorXd ZGrid::panel_integral(int panel, const Eigen::VectorXd& g) const {
  (void)panel;
  if (g.size() != order_ + 1) throw std::invalid_argument("panel data must have order+1 values");
  return 0.5 * panel_width() * (integ_ * g);
}

Eigen::ArrayXd ZGrid::cumulative(const Eigen::ArrayXd& f) const {
  check_size(*this, f);
  Eigen::ArrayXd out(size());
  out[0] = 0.0;
  double offset = 0.0;
  for (int k = 0; k < panels_; ++k) {
    Eigen::VectorXd local = panel_integral(k, f.segment(index(k, 0), order_ + 1).matrix());
    for (int j = 1; j <= order_; ++j) out[index(k, j)] = offset + local[j];
    offset += local[order_];
  }
  return out;
}

Eigen::ArrayXd ZGrid::tail(const Eigen::ArrayXd& f) const {
  check_size(*this, f);
  Eigen::ArrayXd out(size());
  out[size() - 1] = 0.0;
  double offset = 0.0;
  for (int k = panels_ - 1; k >= 0; --k) {
    Eigen::VectorXd local = panel_integral(k, f.segment(index(k, 0), order_ + 1).matrix());
    for (int j = 0; j < order_; ++j) out[index(k, j)] = offset + (local[order_] - local[j]);
    offset += local[order_];
  }
  return out;
}

double ZGrid::interpolate(const Eigen::ArrayXd& f, double Z) const {
  check_size(*this, f);
  if (Z < 0.0) throw std::invalid_argument("Z must be nonnegative");
  if (Z > z_max_) return 0.0;
  const double h = panel_width();
  int k = std::min(panels_ - 1, static_cast<int>(Z / h));
  double x = 2.0 * (Z - k * h) / h - 1.0;
  double num = 0.0, den = 0.0;
  for (int j = 0; j <= order_; ++j) {
    double diff = x - ref_[j];
    if (diff == 0.0) return f[index(k, j)];
    double c = bary_[j] / diff;
    num += c * f[index(k, j)];
    den += c;
  }
  return num / den;
}

Eigen::ArrayXd ZGrid::interpolate(const Eigen::ArrayXd& f, const Eigen::ArrayXd& Z) const {
  Eigen::ArrayXd out(Z.size());
  for (Eigen::Index i = 0; i < Z.size(); ++i) out[i] = interpolate(f, Z[i]);
  return out;
}

double ZGrid::tail_size(const Eigen::ArrayXd& f) const {
  check_size(*this, f);
  return f.segment(index(panels_ - 1, 0), order_ + 1).abs().maxCoeff();
}

double decay_rate(const ZGrid& zg, const Eigen::ArrayXd& f) {
  check_size(zg, f);
  const double peak = f.abs().maxCoeff();
  if (peak == 0.0) return std::numeric_limits<double>::infinity();
  double sz = 0, sl = 0, szz = 0, szl = 0;
  int count = 0;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    double v = std::abs(f[i]);
    if (v <= 1e-13 * peak) continue;
    double z = zg.nodes()[i], l = std::log(v);
    sz += z;
    sl += l;
    szz += z * z;
    szl += z * l;
    ++count;
  }
  if (count < 2) return std::numeric_limits<double>::infinity();
  double slope = (count * szl - sz * sl) / (count * szz - sz * sz);
  return -slope;
}

BoundaryLayerProfile make_profile(const ZGrid& zg, Eigen::ArrayXd values) {
  check_size(zg, values);
  BoundaryLayerProfile p;
  p.gamma = decay_rate(zg, values);
  if (std::isfinite(p.gamma)) {
    p.amplitude = (values.abs() * (p.gamma * zg.nodes()).exp()).maxCoeff();
  }
  p.wall_slope = zg.wall_derivative(values);
  p.values = std::move(values);
  return p;
}

BoundaryLayerProfile layer_A1(const ZGrid& zg, double a_b, double dz_a_b) {
  if (!(a_b > 0.0)) throw std::domain_error("layer_A1 needs a_b > 0");
  Eigen::ArrayXd v = dz_a_b / (2.0 * a_b) * (-2.0 * a_b * zg.nodes()).exp();
  BoundaryLayerProfile p = make_profile(zg, v);
  if (dz_a_b != 0.0) {
    p.gamma = 2.0 * a_b;
    p.amplitude = std::abs(dz_a_b) / (2.0 * a_b);
  }
  return p;
}

BoundaryLayerProfile layer_ode_solve(const ZGrid& zg, double a_b, const Eigen::ArrayXd& F, double beta) {
  if (!(a_b > 0.0)) throw std::domain_error("layer_ode_solve needs a_b > 0");
  check_size(zg, F);
  check_decay(zg, F, "layer source");
  const double kappa = 2.0 * a_b;
  const int p = zg.order();
  const Eigen::ArrayXd& Z = zg.nodes();
  Eigen::ArrayXd I1(zg.size()), I2(zg.size());

  // I1(Z) = int_0^Z exp(-kappa (Z - s)) F(s) ds, panel by panel
  I1[0] = 0.0;
  for (int k = 0; k < zg.panels(); ++k) {
    Eigen::Index s = zg.index(k, 0);
    Eigen::ArrayXd dz = Z.segment(s, p + 1) - Z[s];
    Eigen::VectorXd g = ((kappa * dz).exp() * F.segment(s, p + 1)).matrix();
    Eigen::VectorXd J = zg.panel_integral(k, g);
    double start = I1[s];
    for (int j = 1; j <= p; ++j) I1[s + j] = std::exp(-kappa * dz[j]) * (start + J[j]);
  }
  // I2(Z) = int_Z^inf exp(-kappa (s - Z)) F(s) ds
  I2[zg.size() - 1] = 0.0;
  for (int k = zg.panels() - 1; k >= 0; --k) {
    Eigen::Index s = zg.index(k, 0);
    Eigen::Index e = s + p;
    Eigen::ArrayXd dz = Z[e] - Z.segment(s, p + 1);
    Eigen::VectorXd g = ((kappa * dz).exp() * F.segment(s, p + 1)).matrix();
    Eigen::VectorXd J = zg.panel_integral(k, g);
    double end = I2[e];
    for (int j = 0; j < p; ++j) I2[s + j] = std::exp(-kappa * dz[j]) * (end + (J[p] - J[j]));
  }
  Eigen::ArrayXd Ap = -(I1 + I2) / (2.0 * kappa);
  double dAp0 = -0.5 * I2[0];
  double C = (dAp0 - beta) / kappa;
  Eigen::ArrayXd A = C * (-kappa * Z).exp() + Ap;
  BoundaryLayerProfile out = make_profile(zg, A);
  out.wall_slope = -kappa * C + dAp0;
  return out;
}

PhaseLayer layer_phase_solve(const ZGrid& zg, double a_b, const Eigen::ArrayXd& G) {
  if (!(a_b > 0.0)) throw std::domain_error("layer_phase_solve needs a_b > 0");
  check_size(zg, G);
  check_decay(zg, G, "phase-layer source");
  PhaseLayer out;
  Eigen::ArrayXd P = -zg.tail(G) / a_b;
  Eigen::ArrayXd phi = -zg.tail(P);
  out.phi = make_profile(zg, phi);
  out.phi.wall_slope = P[0];
  out.wall_velocity = -P[0];
  return out;
}

double layer_ode_residual(const ZGrid& zg, double a_b, const Eigen::ArrayXd& A, const Eigen::ArrayXd& F) {
  Eigen::ArrayXd r = zg.derivative(A, 2) - 4.0 * a_b * a_b * A - F;
  return r.segment(1, r.size() - 2).abs().maxCoeff();
}

}  // namespace wkbnls
