#include "wkbnls/halfspace.hpp"

#include "wkbnls/nls.hpp"
#include "wkbnls/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace wkbnls {

namespace {

using cd = std::complex<double>;

// Tail mass of a layer profile beyond which assembly refuses to proceed.
constexpr double kAssemblyTail = 1e-12;

RealField dz(const Grid& g, const RealField& f, Parity p, int order = 1) { return spectral_derivative(g, f, 0, order, p); }

// d^q/dz^q exp(-z^2) at z = 0.
double chi_at_zero(int q) {
  if (q % 2) return 0.0;
  int h = q / 2;
  double v = std::tgamma(q + 1.0) / std::tgamma(h + 1.0);
  return h % 2 ? -v : v;
}

// exp(-z^2) and its first two derivatives on the nodes.
struct Lift {
  RealField chi, chi_z, chi_zz;
  explicit Lift(const Grid& g) {
    RealField z = g.coordinate(0);
    chi = (-z.square()).exp();
    chi_z = -2.0 * z * chi;
    chi_zz = (4.0 * z.square() - 2.0) * chi;
  }
};

struct HalfState {
  RealField a, v, phi;
};

HalfState advance(const HalfState& s, const HalfState& r, double dt) {
  return HalfState{s.a + dt * r.a, s.v + dt * r.v, s.phi + dt * r.phi};
}

void accumulate(HalfState& acc, const HalfState& r, double w) {
  acc.a += w * r.a;
  acc.v += w * r.v;
  acc.phi += w * r.phi;
}

HalfState dealiased(const Grid& g, HalfState r) {
  r.a = dealias(g, r.a, Parity::Even);
  r.v = dealias(g, r.v, Parity::Odd);
  r.phi = dealias(g, r.phi, Parity::Even);
  return r;
}

void filter(const Grid& g, HalfState& s) {
  s.a = exponential_filter(g, s.a, 36.0, 36, Parity::Even);
  s.v = exponential_filter(g, s.v, 36.0, 36, Parity::Odd);
  s.phi = exponential_filter(g, s.phi, 36.0, 36, Parity::Even);
}

bool finite(const HalfState& s) { return s.a.allFinite() && s.v.allFinite() && s.phi.allFinite(); }

OrderFields fields_of(const HalfState& s) { return OrderFields{s.a.cast<cd>(), {s.v}, s.phi}; }

int substeps(double interval, double dx, double cfl, double speed) {
  return std::max(1, static_cast<int>(std::ceil(interval / (cfl * dx / std::max(speed, 1e-12)) - 1e-9)));
}

HermiteSeries scalar_series(const std::vector<double>& t, const std::vector<double>& y, const std::vector<double>& dy) {
  HermiteSeries s;
  for (std::size_t n = 0; n < t.size(); ++n) s.push(t[n], Eigen::ArrayXd::Constant(1, y[n]), Eigen::ArrayXd::Constant(1, dy[n]));
  return s;
}

std::vector<double> scalar_rate(const std::vector<double>& y, double dt) {
  std::vector<Eigen::ArrayXd> packed;
  for (double v : y) packed.push_back(Eigen::ArrayXd::Constant(1, v));
  std::vector<double> out;
  for (std::size_t n = 0; n < y.size(); ++n) out.push_back(y.size() >= 5 ? time_derivative(packed, dt, n)[0] : 0.0);
  return out;
}

Eigen::ArrayXd profile_rate(const std::vector<Eigen::ArrayXd>& series, double dt, std::size_t n) {
  if (series.empty() || series[n].size() == 0) return {};
  if (series.size() < 5) return Eigen::ArrayXd::Zero(series[n].size());
  return time_derivative(series, dt, n);
}

bool is_zero(const Eigen::ArrayXd& f) { return f.size() == 0 || f.abs().maxCoeff() == 0.0; }

// Fornberg weights for the first derivative at x0.
std::vector<double> fornberg_first(const std::vector<double>& x, double x0) {
  const int n = static_cast<int>(x.size());
  std::vector<std::vector<double>> c(n, std::vector<double>(2, 0.0));
  double c1 = 1.0, c4 = x[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    int mn = std::min(i, 1);
    double c2 = 1.0, c5 = c4;
    c4 = x[i] - x0;
    for (int j = 0; j < i; ++j) {
      double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = c[i][1];
  return w;
}

}  // namespace

double sponge_start(const Grid& grid) { return 0.875 * grid.length(); }

RealField sponge_profile(const Grid& grid, double strength) {
  RealField z = grid.coordinate(0);
  const double zs = sponge_start(grid), width = grid.length() - zs;
  RealField s = RealField::Zero(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (z[i] <= zs) continue;
    double x = std::min(1.0, (z[i] - zs) / width);
    s[i] = strength * std::pow(std::sin(0.5 * std::numbers::pi * x), 2);
  }
  return s;
}

RealField interior_window(const Grid& grid) {
  RealField z = grid.coordinate(0);
  const double z1 = 0.75 * grid.length(), z2 = sponge_start(grid);
  RealField w(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (z[i] <= z1) w[i] = 1.0;
    else if (z[i] >= z2) w[i] = 0.0;
    else w[i] = std::pow(std::cos(0.5 * std::numbers::pi * (z[i] - z1) / (z2 - z1)), 2);
  }
  return w;
}

LimitRun solve_limit_euler_halfline(const Grid& grid, const OrderData& data, const std::vector<double>& times,
                                    const HalfspaceConfig& cfg) {
  if (grid.kind() != GridKind::HalfLine) throw std::invalid_argument("half-space solves need a half-line grid");
  if (times.empty() || times.front() != 0.0) throw std::invalid_argument("snapshot times must start at 0");
  const RealField sigma = sponge_profile(grid, cfg.sponge_strength);
  HalfState s{data.a.real(), dz(grid, data.phi, Parity::Even), data.phi};
  if (s.a.minCoeff() < cfg.alpha_floor) throw std::domain_error("initial amplitude is not bounded away from zero");

  auto rhs = [&](const HalfState& x) {
    RealField az = dz(grid, x.a, Parity::Even);
    RealField uz = dz(grid, x.v, Parity::Odd);
    HalfState r;
    r.a = -x.v * az - 0.5 * x.a * uz - sigma * (x.a - 1.0);
    r.v = -x.v * uz - 2.0 * x.a * az - sigma * x.v;
    r.phi = -(0.5 * x.v.square() + x.a.square() - 1.0);
    return dealiased(grid, r);
  };

  LimitRun out;
  out.series = OrderSeries(grid);
  out.min_a = s.a.minCoeff();
  auto store = [&](double t) {
    out.series.push(t, fields_of(s), fields_of(rhs(s)));
    out.mass.push_back(integrate(grid, RealField(s.a.square() - 1.0)));
    out.wall_velocity.push_back(std::abs(evaluate_derivative_at(grid, s.v, 0.0, 0, Parity::Odd)));
    out.max_speed.push_back((s.v.abs() + s.a.abs()).maxCoeff());
  };
  store(0.0);
  for (std::size_t n = 0; n + 1 < times.size(); ++n) {
    const double interval = times[n + 1] - times[n];
    int sub = substeps(interval, grid.spacing(), cfg.cfl, out.max_speed.back());
    const double h = interval / sub;
    for (int j = 0; j < sub; ++j) {
      HalfState k1 = rhs(s);
      HalfState k2 = rhs(advance(s, k1, 0.5 * h));
      HalfState k3 = rhs(advance(s, k2, 0.5 * h));
      HalfState k4 = rhs(advance(s, k3, h));
      HalfState acc = k1;
      accumulate(acc, k2, 2.0);
      accumulate(acc, k3, 2.0);
      accumulate(acc, k4, 1.0);
      s = advance(s, acc, h / 6.0);
      if (cfg.filter) filter(grid, s);
      double t = times[n] + (j + 1) * h;
      if (!finite(s)) {
        std::ostringstream msg;
        msg << "half-line limit solve produced non-finite values at t = " << t;
        throw std::runtime_error(msg.str());
      }
      out.min_a = std::min(out.min_a, s.a.minCoeff());
      if (out.min_a < cfg.alpha_floor) {
        std::ostringstream msg;
        msg << "amplitude fell below " << cfg.alpha_floor << " at t = " << t;
        throw std::runtime_error(msg.str());
      }
    }
    store(times[n + 1]);
  }
  return out;
}

OrderFields HalfspaceExpansion::interior_at(int l, std::size_t n) const {
  OrderFields o = interior.at(l).at(n);
  double w = wall_velocity.at(l).at(n);
  if (w != 0.0) o.u[0] += w * Lift(grid).chi;
  return o;
}

double HalfspaceExpansion::max_abs_phi(int k) const {
  double m = 0.0;
  if (k < 0 || k >= static_cast<int>(Phi.size())) return 0.0;
  for (const auto& p : Phi[k]) if (p.size()) m = std::max(m, p.abs().maxCoeff());
  return m;
}

double HalfspaceExpansion::max_abs_A(int k) const {
  double m = 0.0;
  if (k < 0 || k >= static_cast<int>(A.size())) return 0.0;
  for (const auto& p : A[k]) if (p.size()) m = std::max(m, p.abs().maxCoeff());
  return m;
}

WallTaylor wall_taylor(const HalfspaceExpansion& e, std::size_t n, int orders, int derivatives) {
  WallTaylor t;
  const int available = std::min<int>(orders, static_cast<int>(e.interior.size()));
  for (int l = 0; l < available; ++l) {
    OrderFields o = e.interior[l].at(n);
    RealField a = o.a.real();
    const RealField& v = o.u[0];
    const double w = e.wall_velocity[l][n];
    std::vector<double> da(derivatives, 0.0), du(derivatives, 0.0);
    for (int q = 0; q < derivatives; ++q) {
      // parity makes the other half vanish identically
      if (q % 2 == 0) da[q] = evaluate_derivative_at(e.grid, a, 0.0, q, Parity::Even);
      else du[q] = evaluate_derivative_at(e.grid, v, 0.0, q, Parity::Odd);
      du[q] += w * chi_at_zero(q);
    }
    t.a.push_back(std::move(da));
    t.u.push_back(std::move(du));
  }
  return t;
}

LayerEquations layer_equations(const ZGrid& zg, const WallTaylor& wall, const std::vector<Eigen::ArrayXd>& A,
                               const std::vector<Eigen::ArrayXd>& Phi, const std::vector<Eigen::ArrayXd>& dA,
                               const std::vector<Eigen::ArrayXd>& dPhi, int order) {
  if (wall.a.empty()) throw std::invalid_argument("layer_equations needs the order-0 wall data");
  const Eigen::Index nz = zg.size();
  const Eigen::ArrayXd& Z = zg.nodes();
  const int K = order;

  auto taylor = [&](const std::vector<std::vector<double>>& d, int shift) {
    RealJet J(K, nz);
    for (int k = 0; k <= K; ++k) {
      for (int j = 0; j <= k; ++j) {
        int l = k - j;
        if (l >= static_cast<int>(d.size()) || j + shift >= static_cast<int>(d[l].size())) continue;
        double c = d[l][j + shift];
        if (c == 0.0) continue;
        J[k] += (c / std::tgamma(j + 1.0)) * Z.pow(j);
      }
    }
    return J;
  };
  auto layer = [&](const std::vector<Eigen::ArrayXd>& P, int deriv) {
    RealJet J(K, nz);
    for (int k = 1; k <= K && k < static_cast<int>(P.size()); ++k) {
      if (is_zero(P[k])) continue;
      J[k] = deriv == 0 ? P[k] : zg.derivative(P[k], deriv);
    }
    return J;
  };

  RealJet Ia = taylor(wall.a, 0), Iaz = taylor(wall.a, 1), Iazz = taylor(wall.a, 2);
  RealJet Iu = taylor(wall.u, 0), Iuz = taylor(wall.u, 1);
  RealJet Ba = layer(A, 0), BaZ = layer(A, 1), BaZZ = layer(A, 2);
  RealJet Bp = layer(Phi, 0), BpZ = layer(Phi, 1), BpZZ = layer(Phi, 2);
  RealJet dBa = layer(dA, 0), dBp = layer(dPhi, 0);
  (void)Bp;

  LayerEquations eq;
  eq.e_a = jet_shift(dBa, 2) + jet_shift(jet_mul(Iu, BaZ), 1) + jet_shift(jet_mul(BpZ, Iaz), 1) + jet_mul(BpZ, BaZ) +
           0.5 * jet_mul(Ia, BpZZ) + 0.5 * jet_mul(Ba, jet_shift(Iuz, 2) + BpZZ);

  RealJet rI = jet_reciprocal(Ia);
  RealJet rIB = jet_reciprocal(Ia + Ba);
  // (eps^2 Iazz + BaZZ)/(Ia + Ba) - eps^2 Iazz/Ia without cancellation
  RealJet quantum = jet_mul(BaZZ, rIB) - jet_mul(jet_mul(jet_shift(Iazz, 2), Ba), jet_mul(rI, rIB));
  eq.e_phi = jet_shift(dBp, 2) + jet_shift(jet_mul(Iu, BpZ), 1) + 0.5 * jet_mul(BpZ, BpZ) +
             jet_shift(2.0 * jet_mul(Ia, Ba) + jet_mul(Ba, Ba), 2) - 0.5 * jet_shift(quantum, 2);
  return eq;
}

OrderSeries solve_interior_orderk(const HalfspaceExpansion& prefix, int k, const OrderData& data,
                                  const std::vector<double>& w, const std::vector<double>& dw) {
  if (k < 1 || static_cast<int>(prefix.interior.size()) < k) throw std::invalid_argument("interior order needs orders 0..k-1");
  const Grid& grid = prefix.grid;
  const auto& times = prefix.times;
  if (w.size() != times.size() || dw.size() != times.size()) throw std::invalid_argument("wall velocity must follow the snapshots");
  const Eigen::Index N = grid.size();
  const Lift lift(grid);
  const RealField sigma = sponge_profile(grid, prefix.cfg.sponge_strength);

  std::vector<HermiteSeries> walls;
  for (int j = 0; j < k; ++j) walls.push_back(scalar_series(times, prefix.wall_velocity[j], prefix.wall_rate[j]));
  HermiteSeries own = scalar_series(times, w, dw);

  auto rhs = [&](double t, const HalfState& s) {
    RealJet Ja(k, N), Jaz(k, N), Jazz(k, N), Ju(k, N), Juz(k, N);
    for (int j = 0; j < k; ++j) {
      OrderFields o = prefix.interior[j].evaluate(t);
      RealField a = o.a.real();
      double wj = walls[j].evaluate(t)[0];
      Ja[j] = a;
      Jaz[j] = dz(grid, a, Parity::Even);
      Jazz[j] = dz(grid, a, Parity::Even, 2);
      Ju[j] = o.u[0] + wj * lift.chi;
      Juz[j] = dz(grid, o.u[0], Parity::Odd) + wj * lift.chi_z;
    }
    RealField S_a = -(jet_mul(Ju, Jaz) + 0.5 * jet_mul(Ja, Juz))[k];
    RealField S_phi = -(0.5 * jet_mul(Ju, Ju) + jet_mul(Ja, Ja))[k];
    if (k >= 2) S_phi += 0.5 * jet_mul(Jazz, jet_reciprocal(Ja))[k - 2];

    const RealField& a0 = Ja[0];
    const RealField& u0 = Ju[0];
    const RealField& a0z = Jaz[0];
    const RealField& u0z = Juz[0];
    double wk = own.evaluate(t)[0], dwk = own.evaluate_derivative(t)[0];
    RealField uk = s.v + wk * lift.chi;
    RealField ukz = dz(grid, s.v, Parity::Odd) + wk * lift.chi_z;
    RealField akz = dz(grid, s.a, Parity::Even);

    HalfState r;
    r.a = -u0 * akz - uk * a0z - 0.5 * a0 * ukz - 0.5 * s.a * u0z + S_a - sigma * s.a;
    r.v = -dz(grid, RealField(2.0 * a0 * s.a), Parity::Even) - (u0z * uk + u0 * ukz) + dz(grid, S_phi, Parity::Even) -
          dwk * lift.chi - sigma * s.v;
    r.phi = -2.0 * a0 * s.a - u0 * uk + S_phi;
    return dealiased(grid, r);
  };

  HalfState s;
  s.a = data.a.real();
  s.phi = data.phi;
  s.v = dz(grid, data.phi, Parity::Even) - w[0] * lift.chi;

  OrderSeries series(grid);
  series.push(times[0], fields_of(s), fields_of(rhs(times[0], s)));
  for (std::size_t n = 0; n + 1 < times.size(); ++n) {
    const double interval = times[n + 1] - times[n];
    double speed = std::max(prefix.max_speed[n], prefix.max_speed[n + 1]);
    int sub = substeps(interval, grid.spacing(), prefix.cfg.cfl, speed);
    const double h = interval / sub;
    for (int j = 0; j < sub; ++j) {
      double t = times[n] + j * h;
      HalfState k1 = rhs(t, s);
      HalfState k2 = rhs(t + 0.5 * h, advance(s, k1, 0.5 * h));
      HalfState k3 = rhs(t + 0.5 * h, advance(s, k2, 0.5 * h));
      HalfState k4 = rhs(std::min(t + h, times[n + 1]), advance(s, k3, h));
      HalfState acc = k1;
      accumulate(acc, k2, 2.0);
      accumulate(acc, k3, 2.0);
      accumulate(acc, k4, 1.0);
      s = advance(s, acc, h / 6.0);
      if (prefix.cfg.filter) filter(grid, s);
    }
    if (!finite(s)) {
      std::ostringstream msg;
      msg << "interior order " << k << " produced non-finite values at t = " << times[n + 1];
      throw std::runtime_error(msg.str());
    }
    series.push(times[n + 1], fields_of(s), fields_of(rhs(times[n + 1], s)));
  }
  return series;
}

HalfspaceExpansion build_halfspace(const Grid& grid, int m, const std::vector<OrderData>& data, double t_end,
                                   const HalfspaceConfig& cfg) {
  if (m < 1 || m > 3) throw std::invalid_argument("half-space expansions are built for 1 <= m <= 3");
  if (data.empty()) throw std::invalid_argument("order-0 data required");
  HalfspaceExpansion e;
  e.grid = grid;
  e.zgrid = cfg.zgrid;
  e.cfg = cfg;
  e.m = m;
  e.times = uniform_times(t_end, cfg.dt);
  const std::size_t nt = e.times.size();
  const double dt = e.dt();
  const ZGrid& zg = e.zgrid;
  const int K = m + 2;

  e.limit = solve_limit_euler_halfline(grid, data[0], e.times, cfg);
  e.max_speed = e.limit.max_speed;
  e.interior.push_back(e.limit.series);
  e.wall_velocity.push_back(std::vector<double>(nt, 0.0));
  e.wall_rate.push_back(std::vector<double>(nt, 0.0));
  e.wall_trace_error.push_back(*std::max_element(e.limit.wall_velocity.begin(), e.limit.wall_velocity.end()));
  for (std::size_t n = 0; n < nt; ++n)
    e.a_wall.push_back(evaluate_derivative_at(grid, RealField(e.interior[0].at(n).a.real()), 0.0, 0, Parity::Even));

  e.A.assign(m + 1, std::vector<Eigen::ArrayXd>(nt));
  e.Phi.assign(m + 1, std::vector<Eigen::ArrayXd>(nt));
  e.matching_error.assign(m + 1, 0.0);
  e.phase_matching_error.assign(m + 1, 0.0);
  e.ode_residual.assign(m + 1, 0.0);

  auto profiles_at = [&](const std::vector<std::vector<Eigen::ArrayXd>>& P, int upto, std::size_t n) {
    std::vector<Eigen::ArrayXd> out(K + 1);
    for (int j = 1; j <= upto && j <= K; ++j) out[j] = P[j][n];
    return out;
  };
  auto rates_at = [&](const std::vector<std::vector<Eigen::ArrayXd>>& P, int upto, std::size_t n) {
    std::vector<Eigen::ArrayXd> out(K + 1);
    for (int j = 1; j <= upto && j <= K; ++j) out[j] = profile_rate(P[j], dt, n);
    return out;
  };

  for (int k = 1; k <= m; ++k) {
    // phase layer Phi^k from G^k = -2 [eps^2 E_a]_k
    std::vector<double> w(nt);
    for (std::size_t n = 0; n < nt; ++n) {
      WallTaylor wt = wall_taylor(e, n, k, K + 3);
      LayerEquations eq = layer_equations(zg, wt, profiles_at(e.A, k - 1, n), profiles_at(e.Phi, k - 1, n),
                                          rates_at(e.A, k - 1, n), rates_at(e.Phi, k - 1, n), K);
      Eigen::ArrayXd G = -2.0 * eq.e_a[k];
      PhaseLayer ph = layer_phase_solve(zg, e.a_wall[n], G);
      e.Phi[k][n] = ph.phi.values;
      w[n] = ph.wall_velocity;
    }
    // interior order k-1 with wall velocity -d_Z Phi^k(0)
    if (k >= 2) {
      std::vector<double> dw = scalar_rate(w, dt);
      OrderData d = static_cast<int>(data.size()) > k - 1 ? data[k - 1]
                                                         : OrderData{ComplexField::Zero(grid.size()), RealField::Zero(grid.size())};
      e.interior.push_back(solve_interior_orderk(e, k - 1, d, w, dw));
      e.wall_velocity.push_back(w);
      e.wall_rate.push_back(dw);
      double trace = 0.0;
      for (std::size_t n = 0; n < nt; ++n)
        trace = std::max(trace, std::abs(evaluate_derivative_at(grid, e.interior.back().at(n).u[0], 0.0, 0, Parity::Odd)));
      e.wall_trace_error.push_back(trace);
    } else {
      double wmax = 0.0;
      for (double v : w) wmax = std::max(wmax, std::abs(v));
      if (wmax != 0.0) throw std::logic_error("first phase layer must vanish");
    }
    // amplitude layer A^k from F^k = 2 a_b [eps^2 E_phi]_{k+2}
    for (std::size_t n = 0; n < nt; ++n) {
      WallTaylor wt = wall_taylor(e, n, k, K + 3);
      const double a_b = e.a_wall[n];
      const double dza = wt.a[k - 1][1];
      e.phase_matching_error[k] =
          std::max(e.phase_matching_error[k], std::abs(zg.wall_derivative(e.Phi[k][n]) + wt.u[k - 1][0]));
      BoundaryLayerProfile p;
      if (k == 1) {
        p = layer_A1(zg, a_b, dza);
      } else {
        LayerEquations eq = layer_equations(zg, wt, profiles_at(e.A, k - 1, n), profiles_at(e.Phi, k, n),
                                            rates_at(e.A, k - 1, n), rates_at(e.Phi, k, n), K);
        Eigen::ArrayXd F = 2.0 * a_b * eq.e_phi[k + 2];
        p = layer_ode_solve(zg, a_b, F, -dza);
        e.ode_residual[k] = std::max(e.ode_residual[k], layer_ode_residual(zg, a_b, p.values, F));
      }
      e.matching_error[k] = std::max(e.matching_error[k], std::abs(zg.wall_derivative(p.values) + dza));
      e.A[k][n] = std::move(p.values);
    }
  }
  return e;
}

HalfspaceFields halfspace_fields(const HalfspaceExpansion& e, double epsilon, std::size_t n, bool with_layers) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  const Grid& g = e.grid;
  const Lift lift(g);
  const Eigen::Index N = g.size();
  HalfspaceFields f;
  f.a = f.a_z = f.a_zz = f.a_t = f.phi = f.u = f.u_z = f.phi_t = RealField::Zero(N);
  double p = 1.0;
  for (std::size_t l = 0; l < e.interior.size(); ++l, p *= epsilon) {
    OrderFields o = e.interior[l].at(n);
    OrderFields r = e.interior[l].rate_at(n);
    RealField a = o.a.real();
    const double w = e.wall_velocity[l][n];
    f.a += p * a;
    f.a_z += p * dz(g, a, Parity::Even);
    f.a_zz += p * dz(g, a, Parity::Even, 2);
    f.a_t += p * r.a.real();
    f.phi += p * o.phi;
    f.u += p * (o.u[0] + w * lift.chi);
    f.u_z += p * (dz(g, o.u[0], Parity::Odd) + w * lift.chi_z);
    f.phi_t += p * r.phi;
  }
  if (!with_layers) return f;
  const ZGrid& zg = e.zgrid;
  const RealField Z = g.coordinate(0) / epsilon;
  const double dt = e.dt();
  for (int k = 1; k <= e.m; ++k) {
    const double pk = std::pow(epsilon, k);
    const Eigen::ArrayXd& A = e.A[k][n];
    if (!is_zero(A)) {
      f.a += pk * zg.interpolate(A, Z);
      f.a_z += pk / epsilon * zg.interpolate(zg.derivative(A), Z);
      f.a_zz += pk / (epsilon * epsilon) * zg.interpolate(zg.derivative(A, 2), Z);
      f.a_t += pk * zg.interpolate(profile_rate(e.A[k], dt, n), Z);
    }
    const Eigen::ArrayXd& P = e.Phi[k][n];
    if (!is_zero(P)) {
      f.phi += pk * zg.interpolate(P, Z);
      f.u += pk / epsilon * zg.interpolate(zg.derivative(P), Z);
      f.u_z += pk / (epsilon * epsilon) * zg.interpolate(zg.derivative(P, 2), Z);
      f.phi_t += pk * zg.interpolate(profile_rate(e.Phi[k], dt, n), Z);
    }
  }
  return f;
}

HalfspaceAssembly assemble_halfspace(const HalfspaceExpansion& e, double epsilon) {
  const ZGrid& zg = e.zgrid;
  for (int k = 1; k <= e.m; ++k) {
    for (const auto* P : {&e.A[k], &e.Phi[k]}) {
      for (const auto& prof : *P) {
        if (is_zero(prof)) continue;
        Eigen::ArrayXd last = Eigen::ArrayXd::Zero(zg.size());
        Eigen::Index start = zg.index(zg.panels() - 1, 0);
        last.segment(start, zg.order() + 1) = prof.segment(start, zg.order() + 1).abs();
        if (zg.integrate(last) > kAssemblyTail)
          throw std::runtime_error("boundary-layer tail exceeds the Z-grid; increase z_max");
      }
    }
  }
  HalfspaceAssembly out;
  out.times = e.times;
  const RealField z = e.grid.coordinate(0);
  std::vector<double> nodes;
  for (int i = 0; i < 8; ++i) nodes.push_back(z[i]);
  std::vector<double> wts = fornberg_first(nodes, 0.0);
  for (std::size_t n = 0; n < e.times.size(); ++n) {
    HalfspaceFields f = halfspace_fields(e, epsilon, n);
    // wall derivative from the components
    double az0 = 0.0, u0 = 0.0, a0 = e.a_wall[n];
    double p = 1.0;
    for (std::size_t l = 0; l < e.interior.size(); ++l, p *= epsilon) {
      u0 += p * e.wall_velocity[l][n];
      if (l > 0) a0 += p * evaluate_derivative_at(e.grid, RealField(e.interior[l].at(n).a.real()), 0.0, 0, Parity::Even);
    }
    for (int k = 1; k <= e.m; ++k) {
      const double pk = std::pow(epsilon, k);
      if (!is_zero(e.A[k][n])) {
        az0 += pk / epsilon * zg.wall_derivative(e.A[k][n]);
        a0 += pk * e.A[k][n][0];
      }
      if (!is_zero(e.Phi[k][n])) u0 += pk / epsilon * zg.wall_derivative(e.Phi[k][n]);
    }
    out.neumann_residual.push_back(std::abs(cd(az0, a0 * u0 / epsilon)));
    cd d(0.0, 0.0);
    for (int i = 0; i < 8; ++i) d += wts[i] * f.a[i] * std::polar(1.0, f.phi[i] / epsilon);
    out.neumann_discrete.push_back(std::abs(d));
    out.a.push_back(std::move(f.a));
    out.phi.push_back(std::move(f.phi));
  }
  return out;
}

ComplexField initial_wavefunction(const HalfspaceExpansion& e, double epsilon) {
  HalfspaceFields f = halfspace_fields(e, epsilon, 0);
  ComplexField psi(f.a.size());
  for (Eigen::Index i = 0; i < psi.size(); ++i) psi[i] = f.a[i] * std::polar(1.0, f.phi[i] / epsilon);
  return psi;
}

namespace {

ComplexField gp_residual(const HalfspaceFields& f, double epsilon) {
  RealField r_phi = f.phi_t + 0.5 * f.u.square() + f.a.square() - 1.0;
  RealField r_a = f.a_t + f.u * f.a_z + 0.5 * f.a * f.u_z;
  ComplexField R(f.a.size());
  R.real() = -f.a * r_phi + 0.5 * epsilon * epsilon * f.a_zz;
  R.imag() = epsilon * r_a;
  return R;
}

}  // namespace

HalfspaceResidual halfspace_residual(const HalfspaceExpansion& e, double epsilon, int s) {
  HalfspaceResidual r;
  r.epsilon = epsilon;
  r.s = s;
  const RealField window = interior_window(e.grid);
  for (std::size_t n = 0; n < e.times.size(); ++n) {
    ComplexField full = gp_residual(halfspace_fields(e, epsilon, n, true), epsilon);
    ComplexField inner = gp_residual(halfspace_fields(e, epsilon, n, false), epsilon);
    r.times.push_back(e.times[n]);
    r.total.push_back(sobolev_norm(e.grid, ComplexField(window.cast<cd>() * full), s, Parity::Even));
    r.interior.push_back(sobolev_norm(e.grid, ComplexField(window.cast<cd>() * inner), s, Parity::Even));
    r.layer.push_back(sobolev_norm(e.grid, ComplexField(window.cast<cd>() * (full - inner)), s, Parity::Even));
  }
  r.sup_total = *std::max_element(r.total.begin(), r.total.end());
  r.sup_interior = *std::max_element(r.interior.begin(), r.interior.end());
  r.sup_layer = *std::max_element(r.layer.begin(), r.layer.end());
  return r;
}

RealField layer_phase_residual(const HalfspaceExpansion& e, double epsilon, std::size_t n) {
  HalfspaceFields full = halfspace_fields(e, epsilon, n, true);
  HalfspaceFields inner = halfspace_fields(e, epsilon, n, false);
  auto r_phi = [](const HalfspaceFields& f) { return RealField(f.phi_t + 0.5 * f.u.square() + f.a.square() - 1.0); };
  return r_phi(full) - r_phi(inner);
}

namespace {

// Pieces of N_+ that do not depend on K.
struct NPlusTerms {
  double quad = 0.0;  // eps^2 |w_z|^2 + 4 (a Re w)^2 + 2 eps R^b |w|^2
  double mass = 0.0;  // |w|^2
  double value(double K, double eps) const { return 0.5 * (quad + 2.0 * K * eps * eps * mass); }
};

NPlusTerms n_plus_terms(const Grid& g, const ComplexField& w, const RealField& a, const RealField& rb, double eps) {
  ComplexField wz = spectral_derivative(g, w, 0, 1, Parity::Even);
  NPlusTerms t;
  t.quad = integrate(g, RealField(eps * eps * wz.abs2() + 4.0 * (a * w.real()).square() + 2.0 * rb * w.abs2()));
  t.mass = integrate(g, RealField(w.abs2()));
  return t;
}

}  // namespace

double n_plus(const Grid& grid, const ComplexField& w, const RealField& a_eps, const RealField& eps_rb, double epsilon,
              double K) {
  return n_plus_terms(grid, w, a_eps, eps_rb, epsilon).value(K, epsilon);
}

HalfspaceNorms halfspace_norms(const HalfspaceExpansion& e, double epsilon, const std::vector<ComplexField>& w,
                               double K) {
  const std::size_t nt = e.times.size();
  if (w.size() != nt) throw std::invalid_argument("w must be sampled at the expansion snapshots");
  if (nt < 3) throw std::invalid_argument("halfspace_norms needs at least three snapshots");
  const Grid& g = e.grid;
  const double dt = e.dt();
  const RealField z = g.coordinate(0);
  const RealField weight = z / (1.0 + z);

  std::vector<std::array<NPlusTerms, 3>> terms(nt);
  std::vector<double> h3(nt);
  for (std::size_t n = 0; n < nt; ++n) {
    RealField a = halfspace_fields(e, epsilon, n).a;
    RealField rb = layer_phase_residual(e, epsilon, n);
    ComplexField wt;
    if (n == 0) wt = (-3.0 * w[0] + 4.0 * w[1] - w[2]) / (2.0 * dt);
    else if (n == nt - 1) wt = (3.0 * w[n] - 4.0 * w[n - 1] + w[n - 2]) / (2.0 * dt);
    else wt = (w[n + 1] - w[n - 1]) / (2.0 * dt);
    ComplexField wz = spectral_derivative(g, w[n], 0, 1, Parity::Even);
    terms[n][0] = n_plus_terms(g, w[n], a, rb, epsilon);
    terms[n][1] = n_plus_terms(g, ComplexField(epsilon * wt), a, rb, epsilon);
    terms[n][2] = n_plus_terms(g, ComplexField(epsilon * weight.cast<cd>() * wz), a, rb, epsilon);
    double s3 = sobolev_norm(g, w[n], 3, Parity::Even);
    h3[n] = std::pow(epsilon, 6) * s3 * s3;
  }

  HalfspaceNorms out;
  out.one_sided_ends = true;
  double k = K;
  for (int d = 0; d <= 40; ++d) {
    bool ok = true;
    for (const auto& t : terms)
      for (const auto& c : t) ok = ok && c.value(k, epsilon) >= 0.0;
    if (ok) {
      out.doublings = d;
      break;
    }
    k *= 2.0;
  }
  out.K = k;
  for (std::size_t n = 0; n < nt; ++n) {
    double np = terms[n][0].value(k, epsilon);
    double yp = np + terms[n][1].value(k, epsilon) + terms[n][2].value(k, epsilon);
    out.n_plus.push_back(np);
    out.y_plus.push_back(yp);
    out.z_plus.push_back(yp + h3[n]);
  }
  return out;
}

NecessityStudy layer_necessity_study(const HalfspaceExpansion& e, const std::vector<double>& eps_list,
                                     double cfl_factor) {
  NecessityStudy st;
  st.m = e.m;
  st.max_A1 = e.max_abs_A(1);
  const Grid& g = e.grid;
  const RealField z = g.coordinate(0);
  const double t_end = e.times.back();
  std::vector<double> eps, with, wall_without;
  for (double epsilon : eps_list) {
    NLSConfig cfg;
    cfg.epsilon = epsilon;
    cfg.t_end = t_end;
    cfg.model = NonlinearModel::gross_pitaevskii();
    cfg.boundary = Boundary::NeumannHalfLine;
    cfg.cfl_factor = cfl_factor;
    NLSTrajectory traj = integrate(g, initial_wavefunction(e, epsilon), cfg, e.times);
    NecessityRow row;
    row.epsilon = epsilon;
    row.mass_drift = traj.max_step_mass_drift;
    row.energy_drift = traj.max_energy_drift;
    for (std::size_t n = 0; n < e.times.size(); ++n) {
      HalfspaceFields f = halfspace_fields(e, epsilon, n);
      RealField a0 = e.interior[0].at(n).a.real();
      ComplexField demod(g.size());
      for (Eigen::Index i = 0; i < demod.size(); ++i) demod[i] = traj.psi[n][i] * std::polar(1.0, -f.phi[i] / epsilon);
      ComplexField e0 = demod - a0.cast<cd>();
      ComplexField e1 = e0;
      if (!is_zero(e.A[1][n])) e1 -= (epsilon * e.zgrid.interpolate(e.A[1][n], RealField(z / epsilon))).cast<cd>();
      row.err_with = std::max(row.err_with, w1inf_norm(g, e1, Parity::Even));
      row.err_without = std::max(row.err_without, w1inf_norm(g, e0, Parity::Even));
      ComplexField d0 = spectral_derivative(g, e0, 0, 1, Parity::Even);
      ComplexField d1 = spectral_derivative(g, e1, 0, 1, Parity::Even);
      for (Eigen::Index i = 0; i < z.size() && z[i] <= std::max(epsilon, z[0]); ++i) {
        row.wall_grad_without = std::max(row.wall_grad_without, std::abs(d0[i]));
        row.wall_grad_with = std::max(row.wall_grad_with, std::abs(d1[i]));
      }
    }
    st.rows.push_back(row);
    eps.push_back(epsilon);
    with.push_back(row.err_with);
    wall_without.push_back(row.wall_grad_without);
  }
  st.fit_with = fit_rate(eps, with);
  st.fit_without_wall = fit_rate(eps, wall_without);
  st.pass = st.fit_with.valid && st.fit_without_wall.valid && st.fit_with.slope >= 0.8 &&
            st.fit_without_wall.slope <= 0.2 && st.fit_with.slope - st.fit_without_wall.slope >= 0.5;
  return st;
}

}  // namespace wkbnls
