#include "wkbnls/wkb.hpp"

#include "wkbnls/jet.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wkbnls {

namespace {

using cd = std::complex<double>;
const cd kI(0.0, 1.0);

// State of the order-k system: F^k = 2 g(a^0) a^k, u^k, a^k, phi^k.
struct OrderState {
  ComplexField F;
  VectorField u;
  ComplexField a;
  RealField phi;
};

OrderState advance(const OrderState& s, const OrderState& r, double dt) {
  OrderState o;
  o.F = s.F + dt * r.F;
  o.a = s.a + dt * r.a;
  o.phi = s.phi + dt * r.phi;
  o.u.resize(s.u.size());
  for (std::size_t i = 0; i < s.u.size(); ++i) o.u[i] = s.u[i] + dt * r.u[i];
  return o;
}

void accumulate(OrderState& acc, const OrderState& r, double w) {
  acc.F += w * r.F;
  acc.a += w * r.a;
  acc.phi += w * r.phi;
  for (std::size_t i = 0; i < acc.u.size(); ++i) acc.u[i] += w * r.u[i];
}

// Order-0 coefficients of the linearised system at one time.
struct Background {
  RealField a0;
  VectorField u0;
  VectorField grad_a0;
  RealField div_u0;
  std::vector<VectorField> grad_u0;  // grad_u0[i][j] = d_j u0_i
  RealField g;
  RealField glog;
  RealField fprime;
};

Background background(const Grid& grid, const NonlinearModel& model, const OrderFields& o0) {
  Background b;
  b.a0 = o0.a.real();
  b.u0 = o0.u;
  b.grad_a0 = gradient(grid, b.a0);
  b.div_u0 = divergence(grid, b.u0, Parity::Even);
  for (const auto& ui : b.u0) b.grad_u0.push_back(gradient(grid, ui));
  b.g = g_weight(model, b.a0);
  b.glog = g_log_derivative(model, b.a0);
  b.fprime = model.fprime(b.a0.square());
  return b;
}

OrderState order_rhs(const Grid& grid, const Background& b, const SourceFields& src, const OrderState& s) {
  const int d = grid.dim();
  OrderState r;
  auto grad_F = gradient(grid, s.F);
  auto grad_a = gradient(grid, s.a);
  RealField div_u = divergence(grid, s.u, Parity::Even);

  RealField u_dot_grad_a0 = RealField::Zero(grid.size());
  RealField u0_dot_u = RealField::Zero(grid.size());
  for (int j = 0; j < d; ++j) {
    u_dot_grad_a0 += s.u[j] * b.grad_a0[j];
    u0_dot_u += b.u0[j] * s.u[j];
  }

  r.F = -(b.g * b.a0 * div_u).cast<cd>() - (2.0 * b.g * u_dot_grad_a0).cast<cd>() -
        0.5 * s.F * (1.0 + b.glog).cast<cd>() * b.div_u0.cast<cd>() + 2.0 * b.g.cast<cd>() * src.S_a;
  r.a = -(0.5 * b.a0 * div_u + u_dot_grad_a0).cast<cd>() - 0.5 * s.a * b.div_u0.cast<cd>() + src.S_a;
  for (int j = 0; j < d; ++j) {
    r.F -= b.u0[j].cast<cd>() * grad_F[j];
    r.a -= b.u0[j].cast<cd>() * grad_a[j];
  }
  r.phi = -2.0 * b.fprime * b.a0 * s.a.real() - u0_dot_u + src.S_phi;

  RealField pressure = src.S_phi - b.g * b.a0 * s.F.real();
  auto grad_p = gradient(grid, pressure);
  r.u.resize(d);
  for (int i = 0; i < d; ++i) {
    auto grad_ui = gradient(grid, s.u[i]);
    r.u[i] = grad_p[i];
    for (int j = 0; j < d; ++j) r.u[i] -= b.u0[j] * grad_ui[j] + s.u[j] * b.grad_u0[i][j];
  }

  r.F = dealias(grid, r.F);
  r.a = dealias(grid, r.a);
  r.phi = dealias(grid, r.phi);
  for (auto& ui : r.u) ui = dealias(grid, ui);
  return r;
}

OrderFields fields_of(const OrderState& s) { return OrderFields{s.a, s.u, s.phi}; }

std::vector<OrderFields> lower_at(const WKBExpansion& e, int k, double t) {
  std::vector<OrderFields> lower;
  for (int j = 0; j < k; ++j) lower.push_back(e.orders[j].evaluate(t));
  return lower;
}

std::vector<OrderFields> lower_at_node(const WKBExpansion& e, int k, std::size_t n) {
  std::vector<OrderFields> lower;
  for (int j = 0; j < k; ++j) lower.push_back(e.orders[j].at(n));
  return lower;
}

void check_uniform(const std::vector<double>& t) {
  if (t.size() < 2) return;
  double dt = t[1] - t[0];
  for (std::size_t n = 1; n < t.size(); ++n)
    if (std::abs(t[n] - t[n - 1] - dt) > 1e-9 * std::max(1.0, dt)) throw std::invalid_argument("time grid must be uniform");
}

}  // namespace

Eigen::ArrayXd OrderSeries::pack(const OrderFields& f) const {
  Eigen::ArrayXd y(n_ * (3 + d_));
  y.segment(0, n_) = f.a.real();
  y.segment(n_, n_) = f.a.imag();
  for (int i = 0; i < d_; ++i) y.segment((2 + i) * n_, n_) = f.u[i];
  y.segment((2 + d_) * n_, n_) = f.phi;
  return y;
}

OrderFields OrderSeries::unpack(const Eigen::ArrayXd& y) const {
  OrderFields f;
  f.a = ComplexField(n_);
  f.a.real() = y.segment(0, n_);
  f.a.imag() = y.segment(n_, n_);
  for (int i = 0; i < d_; ++i) f.u.push_back(y.segment((2 + i) * n_, n_));
  f.phi = y.segment((2 + d_) * n_, n_);
  return f;
}

void OrderSeries::push(double t, const OrderFields& value, const OrderFields& rate) {
  series_.push(t, pack(value), pack(rate));
}

OrderSeries solve_order0(const Grid& grid, const NonlinearModel& model, const OrderData& data,
                         const std::vector<double>& times, const CascadeConfig& cfg, EulerTrajectory* run,
                         std::vector<double>* max_speed) {
  if (data.a.imag().abs().maxCoeff() != 0.0) throw std::invalid_argument("order-0 amplitude must be real");
  check_uniform(times);
  RealField a0 = data.a.real();
  VectorField u0 = gradient(grid, data.phi);
  EulerState s0 = initial_state(grid, a0, u0, model);
  EulerTrajectory traj = integrate_euler(grid, s0, model, cfg.euler, times);
  if (traj.blew_up || traj.states.size() != times.size())
    throw std::runtime_error("order-0 limit solve failed: " + traj.message);

  std::vector<RealField> a(times.size());
  std::vector<VectorField> u(times.size());
  for (std::size_t n = 0; n < times.size(); ++n) {
    a[n] = reconstruct_amplitude(traj.states[n], model);
    u[n] = traj.states[n].u;
  }
  auto phi = reconstruct_phase(times, a, u, data.phi, model);

  OrderSeries series(grid);
  if (max_speed) max_speed->clear();
  for (std::size_t n = 0; n < times.size(); ++n) {
    OrderFields value{a[n].cast<cd>(), u[n], phi[n]};
    auto grad_a = gradient(grid, a[n]);
    RealField div_u = divergence(grid, u[n], Parity::Even);
    RealField da = -0.5 * a[n] * div_u;
    RealField dphi = -model.f(a[n].square());
    for (int j = 0; j < grid.dim(); ++j) {
      da -= u[n][j] * grad_a[j];
      dphi -= 0.5 * u[n][j].square();
    }
    OrderFields rate{da.cast<cd>(), traj.rates[n].u, dphi};
    series.push(times[n], value, rate);
    if (max_speed) max_speed->push_back(max_wave_speed(grid, traj.states[n], model));
  }
  if (run) *run = std::move(traj);
  return series;
}

SourceFields cascade_sources(const Grid& grid, const NonlinearModel& model, const std::vector<OrderFields>& lower,
                             int k) {
  if (k < 1 || static_cast<int>(lower.size()) < k) throw std::invalid_argument("cascade_sources needs orders 0..k-1");
  const int d = grid.dim();
  const Eigen::Index n = grid.size();
  ComplexJet A(k, n), lapA(k, n);
  std::vector<ComplexJet> gradA(d, ComplexJet(k, n)), U(d, ComplexJet(k, n));
  ComplexJet lapPhi(k, n);
  for (int j = 0; j < k; ++j) {
    const auto& o = lower[j];
    A[j] = o.a;
    lapA[j] = laplacian(grid, o.a);
    auto g = gradient(grid, o.a);
    for (int i = 0; i < d; ++i) {
      gradA[i][j] = g[i];
      U[i][j] = o.u[i].cast<cd>();
    }
    lapPhi[j] = divergence(grid, o.u, Parity::Even).cast<cd>();
  }

  RealJet rho = jet_real(jet_mul(A, jet_conj(A)));
  RealJet f_rho = jet_compose(model, rho);
  ComplexJet kinetic(k, n), transport(k, n);
  for (int i = 0; i < d; ++i) {
    kinetic += jet_mul(U[i], U[i]);
    transport += jet_mul(U[i], gradA[i]);
  }
  RealJet n_phi = jet_real(cd(0.5) * kinetic) + f_rho;
  ComplexJet n_a = transport + cd(0.5) * jet_mul(A, lapPhi) - cd(0.0, 0.5) * jet_shift(lapA, 1);

  SourceFields s;
  s.S_phi = -n_phi[k];
  s.S_a = -n_a[k];
  return s;
}

std::vector<SourceFields> cascade_sources(const WKBExpansion& prefix, int k) {
  if (prefix.top_order() < k - 1) throw std::invalid_argument("expansion prefix lacks lower orders");
  std::vector<SourceFields> out;
  for (std::size_t n = 0; n < prefix.times.size(); ++n)
    out.push_back(cascade_sources(prefix.grid, prefix.model, lower_at_node(prefix, k, n), k));
  return out;
}

OrderSeries solve_orderk(const WKBExpansion& prefix, int k, const OrderData& data, double* weight_consistency) {
  if (k < 1 || prefix.top_order() < k - 1) throw std::invalid_argument("solve_orderk needs orders 0..k-1");
  const Grid& grid = prefix.grid;
  const auto& model = prefix.model;
  const auto& times = prefix.times;
  const double dx = grid.spacing();
  const double cfl = 0.5;

  auto rhs_at = [&](double t, const OrderState& s) {
    auto lower = lower_at(prefix, k, t);
    Background b = background(grid, model, lower[0]);
    SourceFields src = cascade_sources(grid, model, lower, k);
    return order_rhs(grid, b, src, s);
  };

  OrderState s;
  {
    OrderFields o0 = prefix.orders[0].at(0);
    RealField g = g_weight(model, o0.a.real());
    s.a = data.a;
    s.phi = data.phi;
    s.u = gradient(grid, data.phi);
    s.F = 2.0 * g.cast<cd>() * data.a;
  }

  OrderSeries series(grid);
  double consistency = 0.0;
  auto store = [&](std::size_t n) {
    OrderState r = rhs_at(times[n], s);
    series.push(times[n], fields_of(s), fields_of(r));
    RealField g = g_weight(model, prefix.orders[0].at(n).a.real());
    consistency = std::max(consistency, (s.F - 2.0 * g.cast<cd>() * s.a).abs().maxCoeff());
  };
  store(0);
  for (std::size_t n = 0; n + 1 < times.size(); ++n) {
    const double interval = times[n + 1] - times[n];
    double speed = std::max(prefix.max_speed.empty() ? 0.0 : prefix.max_speed[n], 1e-12);
    if (!prefix.max_speed.empty()) speed = std::max(speed, prefix.max_speed[n + 1]);
    int sub = std::max(1, static_cast<int>(std::ceil(interval / (cfl * dx / speed) - 1e-9)));
    const double h = interval / sub;
    for (int j = 0; j < sub; ++j) {
      double t = times[n] + j * h;
      OrderState k1 = rhs_at(t, s);
      OrderState k2 = rhs_at(t + 0.5 * h, advance(s, k1, 0.5 * h));
      OrderState k3 = rhs_at(t + 0.5 * h, advance(s, k2, 0.5 * h));
      OrderState k4 = rhs_at(std::min(t + h, times[n + 1]), advance(s, k3, h));
      OrderState acc = k1;
      accumulate(acc, k2, 2.0);
      accumulate(acc, k3, 2.0);
      accumulate(acc, k4, 1.0);
      s = advance(s, acc, h / 6.0);
    }
    bool finite = s.F.allFinite() && s.a.allFinite() && s.phi.allFinite();
    for (const auto& ui : s.u) finite = finite && ui.allFinite();
    if (!finite) throw std::runtime_error("order-" + std::to_string(k) + " solve produced non-finite values");
    store(n + 1);
  }
  if (weight_consistency) *weight_consistency = consistency;
  return series;
}

WKBExpansion build_expansion(const Grid& grid, const NonlinearModel& model, int m, const std::vector<OrderData>& data,
                             double t_end, const CascadeConfig& cfg) {
  if (m < 0) throw std::invalid_argument("expansion order must be >= 0");
  if (static_cast<int>(data.size()) < m + 1) throw std::invalid_argument("initial data needed for orders 0..m");
  WKBExpansion e;
  e.grid = grid;
  e.model = model;
  e.m = m;
  e.has_tail = static_cast<int>(data.size()) >= m + 2;
  e.times = uniform_times(t_end, cfg.dt);
  e.orders.push_back(solve_order0(grid, model, data[0], e.times, cfg, &e.order0_run, &e.max_speed));
  const int top = e.has_tail ? m + 1 : m;
  for (int k = 1; k <= top; ++k) {
    double consistency = 0.0;
    OrderSeries s = solve_orderk(e, k, data[k], &consistency);
    e.orders.push_back(std::move(s));
    e.weight_consistency.push_back(consistency);
  }
  return e;
}

AssembledSeries assemble(const WKBExpansion& expansion, double epsilon) {
  if (epsilon < 0.0 || epsilon > 1.0) throw std::invalid_argument("assemble needs epsilon in [0, 1]");
  AssembledSeries out;
  out.times = expansion.times;
  for (std::size_t n = 0; n < expansion.times.size(); ++n) {
    OrderFields o = expansion.orders[0].at(n);
    ComplexField a = o.a;
    RealField phi = o.phi;
    double power = 1.0;
    for (int k = 1; k <= expansion.top_order(); ++k) {
      power *= epsilon;
      OrderFields ok = expansion.orders[k].at(n);
      a += power * ok.a;
      phi += power * ok.phi;
    }
    out.a.push_back(std::move(a));
    out.phi.push_back(std::move(phi));
  }
  return out;
}

ResidualEntry residual(const WKBExpansion& expansion, double epsilon, int s) {
  const Grid& grid = expansion.grid;
  const auto& model = expansion.model;
  AssembledSeries as = assemble(expansion, epsilon);
  const std::size_t nt = as.times.size();
  if (nt < 9) throw std::invalid_argument("residual needs at least 9 snapshots");
  const double dt = expansion.dt();

  // real packing for the differencing helpers
  std::vector<Eigen::ArrayXd> a_re(nt), a_im(nt);
  for (std::size_t n = 0; n < nt; ++n) {
    a_re[n] = as.a[n].real();
    a_im[n] = as.a[n].imag();
  }

  ResidualEntry r;
  r.epsilon = epsilon;
  r.s = s;
  for (std::size_t n = 0; n < nt; ++n) {
    const ComplexField& a = as.a[n];
    const RealField& phi = as.phi[n];
    ComplexField dt_a(a.size());
    dt_a.real() = time_derivative(a_re, dt, n);
    dt_a.imag() = time_derivative(a_im, dt, n);
    RealField dt_phi = time_derivative(as.phi, dt, n);

    auto grad_phi = gradient(grid, phi);
    auto grad_a = gradient(grid, a);
    RealField lap_phi = laplacian(grid, phi);
    ComplexField lap_a = laplacian(grid, a);

    RealField r_phi = dt_phi + model.f(a.abs2());
    ComplexField r_a = dt_a + 0.5 * a * lap_phi.cast<cd>() - cd(0.0, 0.5 * epsilon) * lap_a;
    for (int j = 0; j < grid.dim(); ++j) {
      r_phi += 0.5 * grad_phi[j].square();
      r_a += grad_phi[j].cast<cd>() * grad_a[j];
    }
    ComplexField r_nls = kI * epsilon * r_a - a * r_phi.cast<cd>();

    double na = sobolev_norm(grid, r_a, s);
    double np = sobolev_norm(grid, r_phi, s);
    r.times.push_back(as.times[n]);
    r.res_a.push_back(na);
    r.res_phi.push_back(np);
    r.res_nls.push_back(sobolev_norm(grid, r_nls, s));

    // differencing error: fourth-order stencils at steps dt and 2 dt
    ComplexField coarse_a(a.size());
    coarse_a.real() = time_derivative_coarse(a_re, dt, n);
    coarse_a.imag() = time_derivative_coarse(a_im, dt, n);
    RealField coarse_phi = time_derivative_coarse(as.phi, dt, n);
    double est = (sobolev_norm(grid, ComplexField(coarse_a - dt_a), s) +
                  sobolev_norm(grid, RealField(coarse_phi - dt_phi), s)) / 15.0;
    r.differencing_error = std::max(r.differencing_error, est);
  }
  r.sup_a = *std::max_element(r.res_a.begin(), r.res_a.end());
  r.sup_phi = *std::max_element(r.res_phi.begin(), r.res_phi.end());
  r.sup_nls = *std::max_element(r.res_nls.begin(), r.res_nls.end());
  r.under_resolved = r.differencing_error > 0.1 * (r.sup_a + r.sup_phi) && r.sup_a + r.sup_phi > 1e-13;
  return r;
}

}  // namespace wkbnls
