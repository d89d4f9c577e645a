#include "wkbnls/criteria.hpp"

#include <chrono>
#include <cstdio>
#include <exception>
#include <functional>
#include <vector>

using namespace wkbnls;

namespace {

SweepResult sweep(const std::string& name, int m, bool audit) {
  SweepConfig cfg;
  cfg.case_name = name;
  cfg.m = m;
  cfg.s = 1;
  cfg.audit = audit;
  return run_sweep(make_case(name), cfg);
}

void report(const CriterionReport& r, std::vector<CriterionReport>& all) {
  std::printf("%s\n", r.line().c_str());
  std::fflush(stdout);
  all.push_back(r);
}

void guarded(int id, const char* name, const std::function<CriterionReport()>& f, std::vector<CriterionReport>& all) {
  auto t0 = std::chrono::steady_clock::now();
  try {
    CriterionReport r = f();
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.add("seconds", secs);
    report(r, all);
  } catch (const std::exception& e) {
    CriterionReport r(id, name);
    r.note = std::string("error: ") + e.what();
    report(r, all);
  }
}

}  // namespace

int main() {
  const std::vector<double> eps_list{0.2, 0.1, 0.05, 0.025};
  std::vector<CriterionReport> all;

  guarded(1, "wkb-residual-order", [&] { return check_residual_order(eps_list); }, all);

  SweepResult cubic0, cubic1, quintic1;
  bool sweeps_ok = true;
  try {
    cubic0 = sweep("cubic-bump", 0, true);
    cubic1 = sweep("cubic-bump", 1, true);
    quintic1 = sweep("quintic-vacuum", 1, false);
  } catch (const std::exception& e) {
    std::printf("sweep error: %s\n", e.what());
    sweeps_ok = false;
  }
  auto need_sweeps = [&] {
    if (!sweeps_ok) throw std::runtime_error("sweeps unavailable");
  };
  guarded(2, "convergence-rate", [&] { need_sweeps(); return check_convergence(cubic0, quintic1); }, all);
  guarded(3, "nls-conservation", [&] { need_sweeps(); return check_conservation({&cubic0, &cubic1, &quintic1}); }, all);
  guarded(4, "plane-wave-oracle", [&] { return check_plane_wave(plane_wave_study()); }, all);
  guarded(5, "limit-system", [&] { return check_limit_system(limit_study()); }, all);
  guarded(6, "modulated-energy", [&] { need_sweeps(); return check_modulated(cubic0, cubic1); }, all);
  guarded(7, "norm-bounds", [&] { return check_norm_bounds(); }, all);

  HalfspaceExpansion gp1, gp2, gp3;
  bool gp_ok = true;
  try {
    gp1 = build_gp_wall(1);
    gp2 = build_gp_wall(2);
    gp3 = build_gp_wall(3);
  } catch (const std::exception& e) {
    std::printf("gp-wall build error: %s\n", e.what());
    gp_ok = false;
  }
  auto need_gp = [&] {
    if (!gp_ok) throw std::runtime_error("gp-wall expansions unavailable");
  };
  guarded(8, "boundary-layers", [&] { need_gp(); return check_layers(gp3); }, all);
  guarded(9, "halfspace-residual", [&] { need_gp(); return check_halfspace_residual(gp1, gp2, eps_list); }, all);
  guarded(10, "layer-necessity", [&] { need_gp(); return check_layer_necessity(layer_necessity_study(gp1, eps_list)); }, all);
  guarded(11, "determinism", [&] { need_sweeps(); return check_determinism(cubic0, sweep("cubic-bump", 0, true)); }, all);

  int failed = 0;
  for (const auto& r : all) failed += r.pass ? 0 : 1;
  std::printf("%d of %zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
  return failed ? 1 : 0;
}
