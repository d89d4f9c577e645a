#include "wkbnls/modulated.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wkbnls {

namespace {

using cd = std::complex<double>;

ComplexField partial(const Grid& grid, const ComplexField& w, const std::array<int, 2>& alpha) {
  ComplexField out = w;
  for (int axis = 0; axis < grid.dim(); ++axis)
    if (alpha[axis] > 0) out = spectral_derivative(grid, out, axis, alpha[axis]);
  return out;
}

double pairing_term(const Grid& grid, const ComplexField& w, const ComplexField& a_eps, const NonlinearModel& model) {
  RealField pair = (w * a_eps.conjugate()).real();
  RealField fp = model.fprime(a_eps.abs2());
  return integrate(grid, RealField(4.0 * fp * pair.square()));
}

void check_shapes(const Grid& grid, const ComplexField& w, const ComplexField& a) {
  if (w.size() != grid.size() || a.size() != grid.size()) throw std::invalid_argument("fields do not match the grid");
}

}  // namespace

double n_eps(const Grid& grid, const ComplexField& w, const ComplexField& a_eps, double epsilon,
             const NonlinearModel& model, double K) {
  check_shapes(grid, w, a_eps);
  double grad2 = 0.0;
  for (const auto& g : gradient(grid, w)) grad2 += integrate(grid, RealField(g.abs2()));
  double mass = integrate(grid, RealField(w.abs2()));
  return 0.5 * (epsilon * epsilon * grad2 + pairing_term(grid, w, a_eps, model) + K * epsilon * epsilon * mass);
}

std::vector<std::array<int, 2>> multi_indices(int dim, int order) {
  std::vector<std::array<int, 2>> out;
  for (int total = 0; total <= order; ++total) {
    if (dim == 1) {
      out.push_back({total, 0});
    } else {
      for (int i = total; i >= 0; --i) out.push_back({i, total - i});
    }
  }
  return out;
}

double n_s_eps(const Grid& grid, const ComplexField& w, const ComplexField& a_eps, const RealField& a0, double epsilon,
               const NonlinearModel& model, const NormConfig& cfg) {
  (void)a0;
  if (cfg.s < 1) throw std::invalid_argument("n_s_eps needs s >= 1");
  if (cfg.s == 1) return n_eps(grid, w, a_eps, epsilon, model, cfg.K);
  double sum = 0.0;
  for (const auto& alpha : multi_indices(grid.dim(), cfg.s - 1))
    sum += n_eps(grid, partial(grid, w, alpha), a_eps, epsilon, model, cfg.K);
  double re = sobolev_norm(grid, RealField(w.real()), cfg.s - 2);
  return sum + cfg.K * re * re;
}

BoundsReport check_bounds(const Grid& grid, const ComplexField& w, const ComplexField& a_eps, const RealField& a0,
                          double epsilon, const NonlinearModel& model, const NormConfig& cfg) {
  check_shapes(grid, w, a_eps);
  BoundsReport r;
  r.n_s = n_s_eps(grid, w, a_eps, a0, epsilon, model, cfg);
  RealField weight = model.fprime(a_eps.abs2()) * a0.square();
  double half_sum = 0.0, re_sum = 0.0;
  for (const auto& alpha : multi_indices(grid.dim(), cfg.s - 1)) {
    ComplexField dw = partial(grid, w, alpha);
    half_sum += 0.5 * n_eps(grid, dw, a_eps, epsilon, model, cfg.K);
    re_sum += integrate(grid, RealField(weight * dw.real().square()));
  }
  r.lower_rhs = half_sum + re_sum;
  double hs = sobolev_norm(grid, w, cfg.s);
  r.hs_norm2 = hs * hs;
  r.upper_rhs = 2.0 / (epsilon * epsilon) * r.n_s;
  r.lower_margin = r.n_s - r.lower_rhs;
  r.equivalence_margin = r.upper_rhs - r.hs_norm2;
  r.pass = r.lower_margin >= 0.0 && r.equivalence_margin >= 0.0;
  return r;
}

Calibration calibrate_K(const Grid& grid, const std::vector<ComplexField>& samples, const ComplexField& a_eps,
                        const RealField& a0, double epsilon, const NonlinearModel& model, const NormConfig& cfg,
                        int max_doublings) {
  Calibration c;
  NormConfig trial = cfg;
  for (int i = 0; i <= max_doublings; ++i) {
    bool ok = true;
    for (const auto& w : samples) {
      BoundsReport r = check_bounds(grid, w, a_eps, a0, epsilon, model, trial);
      bool zero = w.abs().maxCoeff() == 0.0;
      if (!(r.pass && (zero || (r.lower_margin > 0.0 && r.equivalence_margin > 0.0)))) {
        ok = false;
        break;
      }
    }
    if (ok) {
      c.K = trial.K;
      c.doublings = i;
      c.pass = true;
      return c;
    }
    trial.K *= 2.0;
  }
  c.K = trial.K;
  c.doublings = max_doublings;
  return c;
}

double x_eps(const Grid& grid, const ComplexField& F, double epsilon) {
  double h1 = sobolev_norm(grid, F, 1);
  double l2 = sobolev_norm(grid, F, 0);
  double im = sobolev_norm(grid, RealField(F.imag()), 0);
  return h1 * h1 + l2 * l2 / epsilon + im * im / (epsilon * epsilon);
}

AuditRecord gronwall_audit(const Grid& grid, const std::vector<double>& times, const std::vector<ComplexField>& psi,
                           const std::vector<ComplexField>& a_eps, const std::vector<RealField>& phi_eps,
                           const std::vector<RealField>& a0, double epsilon, const NonlinearModel& model,
                           const NormConfig& cfg) {
  const std::size_t nt = times.size();
  if (psi.size() != nt || a_eps.size() != nt || phi_eps.size() != nt || a0.size() != nt)
    throw std::invalid_argument("gronwall_audit inputs must share the time grid");
  AuditRecord r;
  r.epsilon = epsilon;
  r.K = cfg.K;
  r.s = cfg.s;
  r.times = times;
  for (std::size_t n = 0; n < nt; ++n) {
    ComplexField w(grid.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = psi[n][i] * std::polar(1.0, -phi_eps[n][i] / epsilon) - a_eps[n][i];
    r.n_values.push_back(n_s_eps(grid, w, a_eps[n], a0[n], epsilon, model, cfg));
  }
  r.sup_n = *std::max_element(r.n_values.begin(), r.n_values.end());
  // samples where N is negligible against its own maximum are excluded (w ~ 0)
  const double threshold = std::max(kAuditFloor, kAuditOnset * r.sup_n);
  r.lambda.assign(nt, std::numeric_limits<double>::quiet_NaN());
  r.sup_lambda = 0.0;
  for (std::size_t n = 1; n + 1 < nt; ++n) {
    if (r.n_values[n - 1] < threshold || r.n_values[n] < threshold || r.n_values[n + 1] < threshold) continue;
    double l = (std::log(r.n_values[n + 1] + kAuditFloor) - std::log(r.n_values[n - 1] + kAuditFloor)) /
               (times[n + 1] - times[n - 1]);
    r.lambda[n] = l;
    r.sup_lambda = std::max(r.sup_lambda, l);
  }
  return r;
}

double audit_uniformity(const std::vector<AuditRecord>& records) {
  double worst = 1.0;
  for (std::size_t i = 1; i < records.size(); ++i) {
    double a = records[i - 1].sup_lambda, b = records[i].sup_lambda;
    if (a <= 0.0 || b <= 0.0) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, std::max(a / b, b / a));
  }
  return worst;
}

}  // namespace wkbnls
