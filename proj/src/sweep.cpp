#include "wkbnls/sweep.hpp"

#include "wkbnls/nls.hpp"
#include "wkbnls/wkb.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <ostream>
#include <stdexcept>

namespace wkbnls {

namespace {

using cd = std::complex<double>;
using nlohmann::json;

SweepRow run_row(const CaseSpec& spec, const WKBExpansion& e, const SweepConfig& cfg, double epsilon) {
  SweepRow row;
  row.epsilon = epsilon;
  row.m = cfg.m;
  row.s = cfg.s;
  const Grid& grid = e.grid;
  AssembledSeries as = assemble(e, epsilon);
  ComplexField psi0 = as.a[0] * (cd(0.0, 1.0 / epsilon) * as.phi[0].cast<cd>()).exp();
  require_resolved(grid, psi0);

  NLSConfig nc;
  nc.epsilon = epsilon;
  nc.t_end = e.times.back();
  nc.model = spec.model;
  nc.boundary = Boundary::Periodic;
  nc.cfl_factor = cfg.cfl_factor;
  NLSTrajectory traj = integrate(grid, psi0, nc, e.times);
  row.mass_drift = traj.max_step_mass_drift;
  row.energy_drift = traj.max_energy_drift;
  row.steps = traj.steps;

  std::vector<RealField> a0;
  const NormConfig norm{cfg.K, cfg.s};
  for (std::size_t n = 0; n < e.times.size(); ++n) {
    a0.push_back(e.orders[0].at(n).a.real());
    ComplexField w = traj.psi[n] * (cd(0.0, -1.0 / epsilon) * as.phi[n].cast<cd>()).exp() - as.a[n];
    row.err_hs = std::max(row.err_hs, sobolev_norm(grid, w, cfg.s));
    row.err_w1inf = std::max(row.err_w1inf, w1inf_norm(grid, w));
    row.n_s_eps_max = std::max(row.n_s_eps_max, n_s_eps(grid, w, as.a[n], a0.back(), epsilon, spec.model, norm));
  }
  ResidualEntry res = residual(e, epsilon, cfg.s);
  row.res_a = res.sup_a;
  row.res_phi = res.sup_phi;
  row.res_nls = res.sup_nls;
  for (std::size_t n = 0; n < res.times.size(); ++n) row.res_sum = std::max(row.res_sum, res.res_a[n] + res.res_phi[n]);
  if (cfg.audit) {
    row.audit = gronwall_audit(grid, e.times, traj.psi, as.a, as.phi, a0, epsilon, spec.model, norm);
    row.has_audit = true;
  }
  return row;
}

json fit_json(const RateFit& f) {
  return json{{"excluded", f.excluded}, {"intercept", f.intercept}, {"max_log_residual", f.max_log_residual},
              {"slope", f.slope}, {"used", f.used}, {"valid", f.valid}};
}

// Non-finite values become null; finite ones dump as the shortest string that
// parses back to the same double.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

SweepResult run_sweep(const CaseSpec& spec, const SweepConfig& cfg) {
  if (spec.domain != Domain::Torus) throw std::invalid_argument("sweep runs torus cases; use halfspace for '" + spec.name + "'");
  if (cfg.eps_list.size() < 3) throw std::invalid_argument("eps_list needs at least three values");
  for (std::size_t i = 1; i < cfg.eps_list.size(); ++i)
    if (!(cfg.eps_list[i] < cfg.eps_list[i - 1])) throw std::invalid_argument("eps_list must be strictly decreasing");
  if (cfg.m < 0 || cfg.s < 1) throw std::invalid_argument("need m >= 0 and s >= 1");

  SweepResult r;
  r.case_name = spec.name;
  r.model = spec.model.name();
  r.m = cfg.m;
  r.s = cfg.s;
  r.t_end = cfg.t_end > 0.0 ? cfg.t_end : spec.t_end;

  const Grid grid = spec.grid();
  CascadeConfig cc;
  cc.dt = cfg.cascade_dt;
  WKBExpansion e = build_expansion(grid, spec.model, cfg.m, spec.expansion_data(cfg.m), r.t_end, cc);

  auto task = [&](double epsilon) {
    try {
      return run_row(spec, e, cfg, epsilon);
    } catch (const std::exception& ex) {
      SweepRow bad;
      bad.epsilon = epsilon;
      bad.m = cfg.m;
      bad.s = cfg.s;
      bad.ok = false;
      bad.error = ex.what();
      return bad;
    }
  };
  const std::size_t workers = static_cast<std::size_t>(std::max(1, cfg.threads));
  for (std::size_t i = 0; i < cfg.eps_list.size(); i += workers) {
    std::vector<std::future<SweepRow>> batch;
    for (std::size_t j = i; j < std::min(cfg.eps_list.size(), i + workers); ++j)
      batch.push_back(std::async(workers > 1 ? std::launch::async : std::launch::deferred, task, cfg.eps_list[j]));
    for (auto& f : batch) r.rows.push_back(f.get());
  }
  std::sort(r.rows.begin(), r.rows.end(), [](const SweepRow& x, const SweepRow& y) { return x.epsilon > y.epsilon; });

  std::vector<double> eps;
  std::map<std::string, std::vector<double>> cols;
  bool all_floor = true;
  for (const auto& row : r.rows) {
    if (!row.ok) continue;
    eps.push_back(row.epsilon);
    cols["err_hs"].push_back(row.err_hs);
    cols["err_w1inf"].push_back(row.err_w1inf);
    cols["res_sum"].push_back(row.res_sum);
    cols["res_nls"].push_back(row.res_nls);
    cols["n_s_eps_max"].push_back(row.n_s_eps_max);
    all_floor = all_floor && row.err_hs < kNoiseFloor;
  }
  r.degenerate = all_floor;
  if (!r.degenerate && eps.size() >= 3)
    for (const auto& [key, values] : cols) r.fits[key] = fit_rate(eps, values);
  return r;
}

void write_csv(std::ostream& os, const SweepResult& r) {
  os << "epsilon,m,s,err_hs,err_w1inf,res_a,res_phi,res_nls,n_s_eps_max\n";
  for (const auto& row : r.rows) {
    if (!row.ok) continue;
    os << format_number(row.epsilon) << ',' << row.m << ',' << row.s << ',' << format_number(row.err_hs) << ','
       << format_number(row.err_w1inf) << ',' << format_number(row.res_a) << ',' << format_number(row.res_phi) << ','
       << format_number(row.res_nls) << ',' << format_number(row.n_s_eps_max) << '\n';
  }
}

std::string to_json(const SweepResult& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    json j{{"epsilon", num(row.epsilon)}, {"m", row.m}, {"s", row.s}, {"ok", row.ok}};
    if (!row.ok) {
      j["error"] = row.error;
    } else {
      j["err_hs"] = num(row.err_hs);
      j["err_w1inf"] = num(row.err_w1inf);
      j["res_a"] = num(row.res_a);
      j["res_phi"] = num(row.res_phi);
      j["res_sum"] = num(row.res_sum);
      j["res_nls"] = num(row.res_nls);
      j["n_s_eps_max"] = num(row.n_s_eps_max);
      j["mass_drift"] = num(row.mass_drift);
      j["energy_drift"] = num(row.energy_drift);
      j["steps"] = row.steps;
    }
    if (row.has_audit) {
      json lam = json::array();
      for (double v : row.audit.lambda) lam.push_back(num(v));
      j["audit"] = json{{"K", num(row.audit.K)}, {"lambda", lam}, {"sup_lambda", num(row.audit.sup_lambda)},
                        {"sup_n", num(row.audit.sup_n)}};
    }
    rows.push_back(j);
  }
  json fits = json::object();
  for (const auto& [key, f] : r.fits) {
    json fj = fit_json(f);
    fj["intercept"] = num(f.intercept);
    fj["max_log_residual"] = num(f.max_log_residual);
    fj["slope"] = num(f.slope);
    fits[key] = fj;
  }
  json out{{"case", r.case_name}, {"model", r.model}, {"m", r.m}, {"s", r.s}, {"t_end", num(r.t_end)},
           {"degenerate", r.degenerate}, {"rows", rows}, {"fits", fits}};
  return out.dump(2) + "\n";
}

}  // namespace wkbnls
