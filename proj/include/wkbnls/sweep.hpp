#pragma once

#include "wkbnls/cases.hpp"
#include "wkbnls/fit.hpp"
#include "wkbnls/modulated.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace wkbnls {

struct SweepConfig {
  std::string case_name = "cubic-bump";
  int m = 0;
  int s = 1;
  std::vector<double> eps_list{0.2, 0.1, 0.05, 0.025};
  double t_end = 0.0;        // 0 selects the case default
  double cascade_dt = 0.01;  // snapshot spacing of the expansion
  double cfl_factor = 0.05;  // NLS step = cfl_factor * eps
  double K = 10.0;
  bool audit = false;        // attach a Gronwall audit to each row
  int threads = 1;
};

struct SweepRow {
  double epsilon = 0.0;
  int m = 0;
  int s = 1;
  double err_hs = 0.0;       // sup_t ||w||_{H^s}
  double err_w1inf = 0.0;    // sup_t ||w||_{W^{1,inf}}
  double res_a = 0.0;        // sup_t ||R_a||_{H^s}
  double res_phi = 0.0;
  double res_sum = 0.0;      // sup_t (||R_a|| + ||R_phi||)
  double res_nls = 0.0;
  double n_s_eps_max = 0.0;  // sup_t N_s(w)
  double mass_drift = 0.0;   // per step, relative
  double energy_drift = 0.0;
  std::size_t steps = 0;
  bool ok = true;
  std::string error;
  AuditRecord audit;
  bool has_audit = false;
};

struct SweepResult {
  std::string case_name;
  std::string model;
  int m = 0;
  int s = 1;
  double t_end = 0.0;
  std::vector<SweepRow> rows;  // sorted by decreasing epsilon
  std::map<std::string, RateFit> fits;
  bool degenerate = false;     // every error at the noise floor
};

// Errors below this are treated as the noise floor when deciding degeneracy.
inline constexpr double kNoiseFloor = 1e-12;

// Torus cases only; the half-line case goes through the halfspace module.
SweepResult run_sweep(const CaseSpec& spec, const SweepConfig& cfg);

// 17 significant digits.
std::string format_number(double v);

void write_csv(std::ostream& os, const SweepResult& r);
// Sorted keys; numbers round-trip exactly.
std::string to_json(const SweepResult& r);

}  // namespace wkbnls
