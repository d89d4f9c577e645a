#include "wkbnls/criteria.hpp"

#include "wkbnls/euler.hpp"
#include "wkbnls/nls.hpp"
#include "wkbnls/wkb.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace wkbnls {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

double max_abs(const ComplexField& f) { return f.abs().maxCoeff(); }

std::vector<double> sup_residual_sum(const WKBExpansion& e, const std::vector<double>& eps_list) {
  std::vector<double> out;
  for (double eps : eps_list) {
    ResidualEntry r = residual(e, eps, 1);
    double sup = 0.0;
    for (std::size_t n = 0; n < r.times.size(); ++n) sup = std::max(sup, r.res_a[n] + r.res_phi[n]);
    out.push_back(sup);
  }
  return out;
}

const RateFit* find_fit(const SweepResult& r, const std::string& key) {
  auto it = r.fits.find(key);
  return it == r.fits.end() ? nullptr : &it->second;
}

double fit_slope(const SweepResult& r, const std::string& key) {
  const RateFit* f = find_fit(r, key);
  return f && f->valid ? f->slope : std::numeric_limits<double>::quiet_NaN();
}

ComplexField random_smooth(const Grid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const RealField x = g.coordinate(0);
  ComplexField w = ComplexField::Zero(g.size());
  for (int j = -8; j <= 8; ++j) {
    cd c(normal(rng), normal(rng));
    c /= 1.0 + j * j;
    if (g.kind() == GridKind::Periodic) {
      RealField arg = (2.0 * kPi * j / g.length()) * x;
      w += c * (arg.cast<cd>() * cd(0.0, 1.0)).exp();
    } else {
      // even across the wall
      w += c * (std::abs(j) * kPi / g.length() * x).cos().cast<cd>();
    }
  }
  return w;
}

// Static wall data for the synthetic layer cascade.
WallTaylor synthetic_wall() {
  WallTaylor w;
  w.a = {{1.2, 0.3, -0.2, 0.1, 0.05, -0.02, 0.01, 0.0}, {0.2, -0.15, 0.1, 0.04, -0.03, 0.0, 0.0, 0.0},
         {-0.1, 0.08, 0.05, 0.0, 0.0, 0.0, 0.0, 0.0}};
  w.u = {{0.0, 0.4, 0.1, -0.3, 0.05, 0.0, 0.0, 0.0}, {0.0, -0.2, 0.15, 0.0, 0.0, 0.0, 0.0, 0.0},
         {0.0, 0.1, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0}};
  return w;
}

}  // namespace

std::string CriterionReport::line() const {
  std::ostringstream os;
  os << (pass ? "PASS" : "FAIL") << " [" << id << "] " << name << ":";
  char buf[64];
  for (const auto& [k, v] : metrics) {
    std::snprintf(buf, sizeof buf, "%.4g", v);
    os << ' ' << k << '=' << buf;
  }
  if (!note.empty()) os << " (" << note << ")";
  return os.str();
}

CriterionReport check_residual_order(const std::vector<double>& eps_list) {
  CriterionReport r{1, "wkb-residual-order"};
  CaseSpec spec = make_case("cubic-bump");
  const Grid grid = spec.grid();
  r.pass = true;
  for (int m = 0; m <= 2; ++m) {
    WKBExpansion e = build_expansion(grid, spec.model, m, spec.expansion_data(m), spec.t_end, CascadeConfig{});
    RateFit f = fit_rate(eps_list, sup_residual_sum(e, eps_list));
    r.add("slope_m" + std::to_string(m), f.slope);
    r.pass = r.pass && f.valid && f.slope >= m + 1.7;
  }
  r.note = "need slope >= m+1.7";
  return r;
}

CriterionReport check_convergence(const SweepResult& cubic_m0, const SweepResult& quintic_m1) {
  CriterionReport r{2, "convergence-rate"};
  double s0 = fit_slope(cubic_m0, "err_hs"), s1 = fit_slope(quintic_m1, "err_hs");
  r.add("cubic_m0_slope", s0);
  r.add("quintic_m1_slope", s1);
  r.pass = s0 >= 0.8 && s1 >= 1.7;
  r.note = "need >= 0.8 and >= 1.7";
  return r;
}

CriterionReport check_conservation(const std::vector<const SweepResult*>& sweeps) {
  CriterionReport r{3, "nls-conservation"};
  double mass = 0.0, energy = 0.0;
  bool all_ok = true;
  for (const auto* s : sweeps)
    for (const auto& row : s->rows) {
      all_ok = all_ok && row.ok;
      mass = std::max(mass, row.mass_drift);
      energy = std::max(energy, row.energy_drift);
    }
  r.add("mass_drift_per_step", mass);
  r.add("energy_drift", energy);
  r.pass = all_ok && mass <= 1e-12 && energy <= 1e-6;
  return r;
}

PlaneWaveStudy plane_wave_study(double epsilon, double t_end) {
  PlaneWaveStudy st;
  const Grid g = Grid::periodic(1, 64, 2.0 * kPi);
  const RealField x = g.coordinate(0);
  const NonlinearModel model = NonlinearModel::power(1);
  const double A = 0.8, k = 3.0 * epsilon;
  const double omega = 0.5 * k * k + model.f(A * A);
  auto exact = [&](double t) {
    return ComplexField(A * (cd(0.0, 1.0 / epsilon) * (k * x - omega * t).cast<cd>()).exp());
  };
  NLSConfig cfg;
  cfg.epsilon = epsilon;
  cfg.t_end = t_end;
  cfg.model = model;
  cfg.dt = 0.05 * epsilon;
  NLSTrajectory run = integrate(g, exact(0.0), cfg, {0.0, t_end});
  st.max_error = max_abs(ComplexField(run.psi.back() - exact(t_end)));

  // modulated wave: splitting error is no longer zero
  ComplexField psi0 = exact(0.0) * (1.0 + 0.2 * x.cos()).cast<cd>();
  auto final_state = [&](double dt) {
    NLSConfig c = cfg;
    c.dt = dt;
    return integrate(g, psi0, c, {0.0, t_end}).psi.back();
  };
  ComplexField ref = final_state(0.05 * epsilon / 16.0);
  st.error_dt = max_abs(ComplexField(final_state(0.05 * epsilon) - ref));
  st.error_half = max_abs(ComplexField(final_state(0.025 * epsilon) - ref));
  st.halving_ratio = st.error_dt / st.error_half;
  return st;
}

CriterionReport check_plane_wave(const PlaneWaveStudy& st) {
  CriterionReport r{4, "plane-wave-oracle"};
  r.add("max_error", st.max_error);
  r.add("halving_ratio", st.halving_ratio);
  r.pass = st.max_error <= 1e-8 && st.halving_ratio >= 3.5;
  r.note = "ratio measured on a modulated wave against a dt/16 reference";
  return r;
}

LimitStudy limit_study() {
  LimitStudy st;
  // vanishing viscosity on the cubic-bump data
  {
    CaseSpec spec = make_case("cubic-bump");
    spec.n = 512;
    const Grid g = spec.grid();
    OrderData d = spec.initial(1)[0];
    EulerState s0 = initial_state(g, d.a.real(), gradient(g, d.phi), spec.model);
    std::vector<double> nus{0.08, 0.04, 0.02, 0.01, 0.005, 0.0025};
    std::vector<EulerState> finals;
    for (double nu : nus) {
      EulerConfig cfg;
      cfg.nu = nu;
      EulerTrajectory run = integrate_euler(g, s0, spec.model, cfg, {0.0, spec.t_end});
      if (run.blew_up) throw std::runtime_error("viscous limit run failed: " + run.message);
      st.max_power_drift = std::max(st.max_power_drift, run.max_power_drift);
      finals.push_back(run.states.back());
    }
    for (std::size_t i = 0; i + 1 < nus.size(); ++i) {
      double gap = sobolev_norm(g, RealField(finals[i].h - finals[i + 1].h), 1) +
                   sobolev_norm(g, RealField(finals[i].u[0] - finals[i + 1].u[0]), 1);
      st.nu.push_back(nus[i]);
      st.viscous_gap.push_back(gap);
    }
    st.viscous_fit = fit_rate(st.nu, st.viscous_gap);
  }
  // inviscid order-0 runs, including the degenerate quintic case
  for (const char* name : {"cubic-bump", "quintic-vacuum"}) {
    CaseSpec spec = make_case(name);
    const Grid g = spec.grid();
    OrderData d = spec.initial(1)[0];
    EulerState s0 = initial_state(g, d.a.real(), gradient(g, d.phi), spec.model);
    EulerTrajectory run = integrate_euler(g, s0, spec.model, EulerConfig{}, uniform_times(spec.t_end, 0.01));
    if (run.blew_up) throw std::runtime_error(std::string("limit run failed on ") + name + ": " + run.message);
    st.max_power_drift = std::max(st.max_power_drift, run.max_power_drift);
  }
  // manufactured solution, band-limited so that only the time error remains
  {
    const Grid g = Grid::periodic(1, 64, 2.0 * kPi);
    const RealField x = g.coordinate(0);
    const NonlinearModel model = NonlinearModel::power(1);
    EulerConfig cfg;
    cfg.filter = false;
    cfg.cfl = 100.0;
    auto exact = [&](double t) {
      EulerState s;
      s.h = 1.0 + 0.2 * (x - t).sin();
      s.H = s.h;
      s.u = {RealField(0.3 * (x + 0.5 * t).cos())};
      s.t = t;
      return s;
    };
    auto forcing = [&](double t, EulerRates& rates) {
      EulerState s = exact(t);
      EulerRates base = euler_rhs(g, s, model, cfg);
      RealField dh = -0.2 * (x - t).cos();
      RealField du = -0.15 * (x + 0.5 * t).sin();
      rates.h += dh - base.h;
      rates.H += dh - base.H;
      rates.u[0] += du - base.u[0];
    };
    const double T = 1.0;
    for (double dt : {0.1, 0.05, 0.025, 0.0125}) {
      cfg.dt = dt;
      EulerTrajectory run = integrate_euler(g, exact(0.0), model, cfg, {0.0, T}, forcing);
      EulerState ex = exact(T);
      const EulerState& s = run.states.back();
      st.max_power_drift = std::max(st.max_power_drift, run.max_power_drift);
      st.mms_dt.push_back(dt);
      st.mms_error.push_back((s.h - ex.h).abs().maxCoeff() + (s.u[0] - ex.u[0]).abs().maxCoeff());
    }
    st.mms_fit = fit_rate(st.mms_dt, st.mms_error);
  }
  return st;
}

CriterionReport check_limit_system(const LimitStudy& st, double extra_power_drift) {
  CriterionReport r{5, "limit-system"};
  double drift = std::max(st.max_power_drift, extra_power_drift);
  r.add("max_H_minus_h^n", drift);
  r.add("viscous_order", st.viscous_fit.slope);
  r.add("mms_dt_order", st.mms_fit.slope);
  r.pass = drift <= 1e-8 && st.viscous_fit.valid && st.viscous_fit.slope >= 0.8 && st.mms_fit.valid &&
           st.mms_fit.slope >= 3.5;
  return r;
}

CriterionReport check_modulated(const SweepResult& cubic_m0, const SweepResult& cubic_m1) {
  CriterionReport r{6, "modulated-energy"};
  r.pass = true;
  for (const SweepResult* s : {&cubic_m0, &cubic_m1}) {
    const std::string tag = "_m" + std::to_string(s->m);
    double slope = fit_slope(*s, "n_s_eps_max");
    std::vector<AuditRecord> audits;
    for (const auto& row : s->rows)
      if (row.has_audit) audits.push_back(row.audit);
    double uniform = audits.size() >= 2 ? audit_uniformity(audits) : std::numeric_limits<double>::infinity();
    r.add("N1_slope" + tag, slope);
    r.add("lambda_ratio" + tag, uniform);
    r.pass = r.pass && s->s == 1 && slope >= 2 * s->m + 3 && uniform <= 2.0;
  }
  return r;
}

ComplexField brute_force_derivative(const Grid& grid, const ComplexField& w, int order) {
  if (grid.kind() != GridKind::Periodic || grid.dim() != 1) throw std::invalid_argument("brute-force DFT is 1-D periodic");
  const int N = grid.n();
  const RealField x = grid.coordinate(0);
  ComplexField out = ComplexField::Zero(N);
  for (int j = -N / 2 + 1; j < N / 2; ++j) {
    const double k = 2.0 * kPi * j / grid.length();
    cd c(0.0, 0.0);
    for (int n = 0; n < N; ++n) c += w[n] * std::polar(1.0, -k * x[n]);
    c /= static_cast<double>(N);
    c *= std::pow(cd(0.0, k), order);
    for (int n = 0; n < N; ++n) out[n] += c * std::polar(1.0, k * x[n]);
  }
  return out;
}

double brute_force_n_s(const Grid& grid, const ComplexField& w, const ComplexField& a_eps, double epsilon,
                       const NonlinearModel& model, double K, int s) {
  const double dx = grid.spacing();
  auto quad = [&](const RealField& f) { return f.sum() * dx; };
  auto n1 = [&](const ComplexField& v) {
    ComplexField vx = brute_force_derivative(grid, v, 1);
    RealField pair = (v * a_eps.conjugate()).real();
    RealField fp(a_eps.size());
    for (Eigen::Index i = 0; i < fp.size(); ++i) fp[i] = model.fprime(std::norm(a_eps[i]));
    return 0.5 * (epsilon * epsilon * quad(vx.abs2()) + quad(4.0 * fp * pair.square()) + K * epsilon * epsilon * quad(v.abs2()));
  };
  if (s == 1) return n1(w);
  double sum = 0.0;
  for (int q = 0; q <= s - 1; ++q) sum += n1(q == 0 ? w : brute_force_derivative(grid, w, q));
  ComplexField re = w.real().cast<cd>();
  double h = quad(re.abs2());
  if (s == 3) h += quad(brute_force_derivative(grid, re, 1).abs2());
  if (s > 3) throw std::invalid_argument("oracle covers s <= 3");
  return sum + K * h;
}

CriterionReport check_norm_bounds(int samples, unsigned seed) {
  CriterionReport r{7, "norm-bounds"};
  std::mt19937_64 rng(seed);
  const double eps = 0.1;
  double worst_rel = 0.0, max_K = 0.0;
  bool all_pass = true;
  for (const auto& name : case_names()) {
    CaseSpec spec = make_case(name);
    const Grid g = spec.grid();
    OrderData d = spec.initial(1)[0];
    const RealField a0 = d.a.real();
    std::vector<ComplexField> ws;
    for (int i = 0; i < samples; ++i) ws.push_back(random_smooth(g, rng));
    for (int s : {1, 2}) {
      Calibration cal = calibrate_K(g, ws, d.a, a0, eps, spec.model, NormConfig{10.0, s});
      all_pass = all_pass && cal.pass;
      max_K = std::max(max_K, cal.K);
      if (g.kind() == GridKind::Periodic) {
        for (int i = 0; i < 3; ++i) {
          double fast = n_s_eps(g, ws[i], d.a, a0, eps, spec.model, NormConfig{cal.K, s});
          double slow = brute_force_n_s(g, ws[i], d.a, eps, spec.model, cal.K, s);
          worst_rel = std::max(worst_rel, std::abs(fast - slow) / std::abs(slow));
        }
      }
    }
  }
  r.add("max_K", max_K);
  r.add("oracle_rel_err", worst_rel);
  r.pass = all_pass && worst_rel <= 1e-12;
  return r;
}

CriterionReport check_layers(const HalfspaceExpansion& gp_wall) {
  CriterionReport r{8, "boundary-layers"};
  const ZGrid zg;
  const Eigen::ArrayXd& Z = zg.nodes();
  double closed = 0.0;
  {
    BoundaryLayerProfile p = layer_A1(zg, 1.0, 1.0);
    closed = std::max(closed, (p.values - 0.5 * (-2.0 * Z).exp()).abs().maxCoeff());
    closed = std::max(closed, std::abs(zg.wall_derivative(p.values) + 1.0));
    BoundaryLayerProfile q = layer_A1(zg, 2.0, 0.4);
    closed = std::max(closed, std::abs(q.values[0] - 0.1));
    Eigen::ArrayXd F = (-3.0 * Z).exp();
    BoundaryLayerProfile s = layer_ode_solve(zg, 1.0, F, 0.0);
    closed = std::max(closed, (s.values - (-0.3 * (-2.0 * Z).exp() + 0.2 * (-3.0 * Z).exp())).abs().maxCoeff());
    BoundaryLayerProfile h = layer_ode_solve(zg, 1.3, Eigen::ArrayXd::Zero(zg.size()), -0.7);
    closed = std::max(closed, (h.values - (0.7 / 2.6) * (-2.6 * Z).exp()).abs().maxCoeff());
  }
  // synthetic cascade with a nonzero wall slope, static in time
  double matching = 0.0, ode = 0.0, phi12 = 0.0, lifted = 0.0;
  {
    WallTaylor wall = synthetic_wall();
    const int m = 3, K = m + 2;
    const double a_b = wall.a[0][0];
    std::vector<Eigen::ArrayXd> A(K + 1), Phi(K + 1), none(K + 1);
    for (int k = 1; k <= m; ++k) {
      WallTaylor lower = wall;
      lower.a.resize(k - 1);
      lower.u.resize(k - 1);
      if (k == 1) {
        lower.a = {wall.a[0]};
        lower.u = {wall.u[0]};
      }
      LayerEquations eq = layer_equations(zg, lower, A, Phi, none, none, K);
      PhaseLayer ph = layer_phase_solve(zg, a_b, Eigen::ArrayXd(-2.0 * eq.e_a[k]));
      Phi[k] = ph.phi.values;
      if (k <= 2) phi12 = std::max(phi12, Phi[k].abs().maxCoeff());
      if (k >= 2) wall.u[k - 1][0] = ph.wall_velocity;
      if (k == 3) lifted = std::abs(ph.wall_velocity);
      WallTaylor known = wall;
      known.a.resize(k);
      known.u.resize(k);
      const double dza = wall.a[k - 1][1];
      BoundaryLayerProfile p;
      if (k == 1) {
        p = layer_A1(zg, a_b, dza);
      } else {
        LayerEquations eq2 = layer_equations(zg, known, A, Phi, none, none, K);
        Eigen::ArrayXd F = 2.0 * a_b * eq2.e_phi[k + 2];
        p = layer_ode_solve(zg, a_b, F, -dza);
        ode = std::max(ode, layer_ode_residual(zg, a_b, p.values, F));
      }
      matching = std::max(matching, std::abs(zg.wall_derivative(p.values) + dza));
      A[k] = p.values;
    }
  }
  double gp_match = 0.0, gp_ode = 0.0;
  for (int k = 1; k <= gp_wall.m; ++k) {
    gp_match = std::max(gp_match, gp_wall.matching_error[k]);
    gp_ode = std::max(gp_ode, gp_wall.ode_residual[k]);
  }
  double gp_phi12 = std::max(gp_wall.max_abs_phi(1), gp_wall.max_abs_phi(2));
  r.add("closed_form_err", closed);
  r.add("matching_err", std::max(matching, gp_match));
  r.add("ode_residual", std::max(ode, gp_ode));  // spectral second derivative, reported only
  r.add("max_Phi1_Phi2", std::max(phi12, gp_phi12));
  r.add("synthetic_lift", lifted);
  r.pass = closed <= 1e-10 && std::max(matching, gp_match) <= 1e-8 && phi12 == 0.0 && gp_phi12 == 0.0;
  return r;
}

CriterionReport check_halfspace_residual(const HalfspaceExpansion& m1, const HalfspaceExpansion& m2,
                                         const std::vector<double>& eps_list) {
  CriterionReport r{9, "halfspace-residual"};
  r.pass = true;
  for (const HalfspaceExpansion* e : {&m1, &m2}) {
    std::vector<double> sup;
    for (double eps : eps_list) sup.push_back(halfspace_residual(*e, eps, 0).sup_total);
    RateFit f = fit_rate(eps_list, sup);
    r.add("slope_m" + std::to_string(e->m), f.slope);
    r.pass = r.pass && f.valid && std::abs(f.slope - e->m) <= 0.3;
  }
  r.note = "need |slope - m| <= 0.3; m <= 3 is outside the theorem's hypothesis";
  return r;
}

CriterionReport check_layer_necessity(const NecessityStudy& st) {
  CriterionReport r{10, "layer-necessity"};
  r.add("slope_with", st.fit_with.slope);
  r.add("wall_slope_without", st.fit_without_wall.slope);
  r.add("max_A1", st.max_A1);
  r.pass = st.pass;
  r.note = "need >= 0.8, <= 0.2, separation >= 0.5";
  return r;
}

CriterionReport check_determinism(const SweepResult& first, const SweepResult& second) {
  CriterionReport r{11, "determinism"};
  std::ostringstream c1, c2;
  write_csv(c1, first);
  write_csv(c2, second);
  bool csv = c1.str() == c2.str();
  bool json = to_json(first) == to_json(second);
  r.add("csv_identical", csv ? 1.0 : 0.0);
  r.add("json_identical", json ? 1.0 : 0.0);
  r.pass = csv && json;
  return r;
}

HalfspaceExpansion build_gp_wall(int m, double t_end, const HalfspaceConfig& cfg) {
  CaseSpec spec = make_case("gp-wall");
  return build_halfspace(spec.grid(), m, spec.initial(m), t_end > 0.0 ? t_end : spec.t_end, cfg);
}

}  // namespace wkbnls
