#include "wkbnls/nonlinearity.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wkbnls {

namespace {

double ipow(double x, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= x;
  return r;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

int parse_int(std::string_view s) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw std::invalid_argument("bad integer in nonlinearity spec: '" + std::string(s) + "'");
  }
  return v;
}

// Taylor coefficients of rho^p about rho0.
void monomial_taylor(int p, double rho0, int order, std::vector<double>& out) {
  for (int j = 0; j <= order && j <= p; ++j) out[j] += binomial(p, j) * ipow(rho0, p - j);
}

}  // namespace

NonlinearModel NonlinearModel::power(int sigma) {
  if (sigma < 1) throw std::invalid_argument("power model needs sigma >= 1");
  return NonlinearModel(ModelKind::Power, sigma, 0, sigma);
}

NonlinearModel NonlinearModel::sum_of_powers(int sigma1, int sigma2) {
  if (sigma1 < 1 || sigma2 <= sigma1) throw std::invalid_argument("sum model needs 1 <= sigma1 < sigma2");
  return NonlinearModel(ModelKind::SumOfPowers, sigma1, sigma2, sigma1);
}

NonlinearModel NonlinearModel::rational(int sigma) {
  if (sigma < 1) throw std::invalid_argument("rational model needs sigma >= 1");
  return NonlinearModel(ModelKind::RationalPower, sigma, 0, sigma);
}

NonlinearModel NonlinearModel::gross_pitaevskii() { return NonlinearModel(ModelKind::GrossPitaevskii, 1, 0, 0); }

NonlinearModel NonlinearModel::parse(std::string_view spec) {
  if (spec == "gp") return gross_pitaevskii();
  auto colon = spec.find(':');
  if (colon == std::string_view::npos) throw std::invalid_argument("unknown nonlinearity '" + std::string(spec) + "'");
  auto kind = spec.substr(0, colon);
  auto args = spec.substr(colon + 1);
  if (kind == "power") return power(parse_int(args));
  if (kind == "rational") return rational(parse_int(args));
  if (kind == "sum") {
    auto comma = args.find(',');
    if (comma == std::string_view::npos) throw std::invalid_argument("sum model needs 'sum:s1,s2'");
    return sum_of_powers(parse_int(args.substr(0, comma)), parse_int(args.substr(comma + 1)));
  }
  throw std::invalid_argument("unknown nonlinearity '" + std::string(spec) + "'");
}

std::string NonlinearModel::name() const {
  switch (kind_) {
    case ModelKind::Power: return "power:" + std::to_string(s1_);
    case ModelKind::SumOfPowers: return "sum:" + std::to_string(s1_) + "," + std::to_string(s2_);
    case ModelKind::RationalPower: return "rational:" + std::to_string(s1_);
    case ModelKind::GrossPitaevskii: return "gp";
  }
  return "";
}

void NonlinearModel::require_assumption_a(const char* what) const {
  if (kind_ == ModelKind::GrossPitaevskii) {
    throw std::domain_error(std::string(what) + " is undefined for the Gross-Pitaevskii model");
  }
}

std::vector<double> NonlinearModel::taylor(double rho0, int order) const {
  if (order < 0) throw std::invalid_argument("taylor order must be >= 0");
  std::vector<double> c(order + 1, 0.0);
  switch (kind_) {
    case ModelKind::Power:
      monomial_taylor(s1_, rho0, order, c);
      break;
    case ModelKind::SumOfPowers:
      monomial_taylor(s1_, rho0, order, c);
      monomial_taylor(s2_, rho0, order, c);
      break;
    case ModelKind::RationalPower: {
      // rho^sigma * (1+rho)^{-1} as a Cauchy product of the two Taylor series.
      std::vector<double> p(order + 1, 0.0);
      monomial_taylor(s1_, rho0, order, p);
      std::vector<double> q(order + 1);
      double inv = 1.0 / (1.0 + rho0);
      double term = inv;
      for (int j = 0; j <= order; ++j) {
        q[j] = term;
        term *= -inv;
      }
      for (int k = 0; k <= order; ++k)
        for (int i = 0; i <= k; ++i) c[k] += p[i] * q[k - i];
      break;
    }
    case ModelKind::GrossPitaevskii:
      c[0] = rho0 - 1.0;
      if (order >= 1) c[1] = 1.0;
      break;
  }
  return c;
}

double NonlinearModel::f(double rho) const {
  switch (kind_) {
    case ModelKind::Power: return ipow(rho, s1_);
    case ModelKind::SumOfPowers: return ipow(rho, s1_) + ipow(rho, s2_);
    case ModelKind::RationalPower: return ipow(rho, s1_) / (1.0 + rho);
    case ModelKind::GrossPitaevskii: return rho - 1.0;
  }
  return 0.0;
}

double NonlinearModel::fprime(double rho) const { return taylor(rho, 1)[1]; }

double NonlinearModel::fsecond(double rho) const { return 2.0 * taylor(rho, 2)[2]; }

double NonlinearModel::antiderivative(double rho) const {
  switch (kind_) {
    case ModelKind::Power: return ipow(rho, s1_ + 1) / (s1_ + 1);
    case ModelKind::SumOfPowers: return ipow(rho, s1_ + 1) / (s1_ + 1) + ipow(rho, s2_ + 1) / (s2_ + 1);
    case ModelKind::RationalPower: {
      if (std::abs(rho) < 0.25) {
        // series avoids cancellation between the polynomial and logarithmic parts
        double sum = 0.0, term = ipow(rho, s1_ + 1);
        for (int j = 0; j < 200; ++j) {
          double add = term / (s1_ + 1 + j);
          sum += add;
          if (std::abs(add) <= 1e-18 * std::abs(sum)) break;
          term *= -rho;
        }
        return sum;
      }
      // rho^s/(1+rho) = sum_{i<s} (-1)^(s-1-i) rho^i + (-1)^s/(1+rho)
      double sum = 0.0;
      for (int i = 0; i < s1_; ++i) {
        double sign = ((s1_ - 1 - i) % 2 == 0) ? 1.0 : -1.0;
        sum += sign * ipow(rho, i + 1) / (i + 1);
      }
      sum += ((s1_ % 2 == 0) ? 1.0 : -1.0) * std::log1p(rho);
      return sum;
    }
    case ModelKind::GrossPitaevskii: return 0.5 * (rho - 1.0) * (rho - 1.0);
  }
  return 0.0;
}

double NonlinearModel::tilde_f(double rho) const {
  require_assumption_a("tilde_f");
  switch (kind_) {
    case ModelKind::Power: return 1.0;
    case ModelKind::SumOfPowers: return 1.0 + ipow(rho, s2_ - s1_);
    case ModelKind::RationalPower: return 1.0 / (1.0 + rho);
    default: return 0.0;
  }
}

double NonlinearModel::tilde_f_prime(double rho) const {
  require_assumption_a("tilde_f");
  switch (kind_) {
    case ModelKind::Power: return 0.0;
    case ModelKind::SumOfPowers: return (s2_ - s1_) * ipow(rho, s2_ - s1_ - 1);
    case ModelKind::RationalPower: return -1.0 / ((1.0 + rho) * (1.0 + rho));
    default: return 0.0;
  }
}

double NonlinearModel::hat_f(double rho) const {
  require_assumption_a("hat_f");
  switch (kind_) {
    case ModelKind::Power: return s1_;
    case ModelKind::SumOfPowers: return s1_ + s2_ * ipow(rho, s2_ - s1_);
    case ModelKind::RationalPower: return (s1_ + (s1_ - 1) * rho) / ((1.0 + rho) * (1.0 + rho));
    default: return 0.0;
  }
}

double NonlinearModel::hat_f_prime(double rho) const {
  require_assumption_a("hat_f");
  switch (kind_) {
    case ModelKind::Power: return 0.0;
    case ModelKind::SumOfPowers: return s2_ * (s2_ - s1_) * ipow(rho, s2_ - s1_ - 1);
    case ModelKind::RationalPower: return (-s1_ - 1.0 - (s1_ - 1.0) * rho) / ipow(1.0 + rho, 3);
    default: return 0.0;
  }
}

Eigen::ArrayXd NonlinearModel::f(const Eigen::ArrayXd& rho) const {
  return rho.unaryExpr([this](double r) { return f(r); });
}

Eigen::ArrayXd NonlinearModel::fprime(const Eigen::ArrayXd& rho) const {
  switch (kind_) {
    case ModelKind::Power:
      return s1_ == 1 ? Eigen::ArrayXd::Ones(rho.size()).eval() : (s1_ * rho.pow(s1_ - 1)).eval();
    case ModelKind::GrossPitaevskii: return Eigen::ArrayXd::Ones(rho.size());
    default: return rho.unaryExpr([this](double r) { return fprime(r); });
  }
}

Eigen::ArrayXd NonlinearModel::antiderivative(const Eigen::ArrayXd& rho) const {
  return rho.unaryExpr([this](double r) { return antiderivative(r); });
}

std::vector<Eigen::ArrayXd> NonlinearModel::taylor(const Eigen::ArrayXd& rho0, int order) const {
  std::vector<Eigen::ArrayXd> out(order + 1, Eigen::ArrayXd(rho0.size()));
  for (Eigen::Index i = 0; i < rho0.size(); ++i) {
    auto c = taylor(rho0[i], order);
    for (int j = 0; j <= order; ++j) out[j][i] = c[j];
  }
  return out;
}

AssumptionReport verify_assumption_A(const NonlinearModel& model, double rho_max, int n_samples) {
  if (!(rho_max > 0.0) || n_samples < 2) throw std::invalid_argument("verify_assumption_A needs rho_max > 0 and n_samples >= 2");
  AssumptionReport r;
  r.n = model.n();
  if (model.kind() == ModelKind::GrossPitaevskii) {
    r.applicable = false;
    r.pass = false;
    r.note = "assumption (A) not applicable: f(0) = -1";
    return r;
  }
  bool ok = std::abs(model.f(0.0)) <= 1e-14 && model.tilde_f(0.0) != 0.0;
  r.min_fprime = std::numeric_limits<double>::infinity();
  for (int i = 1; i < n_samples; ++i) {
    double rho = rho_max * i / (n_samples - 1);
    double fp = model.fprime(rho);
    r.min_fprime = std::min(r.min_fprime, fp);
    if (!(fp > 0.0) || !(model.tilde_f(rho) > 0.0) || !(model.hat_f(rho) > 0.0)) ok = false;
  }
  r.pass = ok;
  if (!ok) r.note = "f(0) != 0, f' <= 0 or a vanishing factor on the sampled interval";
  return r;
}

double h_transform(const NonlinearModel& model, double a) {
  if (model.kind() == ModelKind::Power) return a;
  return a * std::pow(model.tilde_f(a * a), 1.0 / (2.0 * model.n()));
}

double h_derivative(const NonlinearModel& model, double a) {
  if (model.kind() == ModelKind::Power) return 1.0;
  double rho = a * a;
  double t = model.tilde_f(rho);
  return std::pow(t, 1.0 / (2.0 * model.n())) * (1.0 + rho * model.tilde_f_prime(rho) / (model.n() * t));
}

double h_inverse(const NonlinearModel& model, double h_val) {
  if (model.kind() == ModelKind::GrossPitaevskii) throw std::domain_error("h_inverse is undefined for the Gross-Pitaevskii model");
  if (!std::isfinite(h_val)) throw std::range_error("h_inverse: non-finite argument");
  if (model.kind() == ModelKind::Power || h_val == 0.0) return h_val;
  const double target = std::abs(h_val);
  // h is odd and increasing: bracket [0, hi] grown geometrically.
  double lo = 0.0, hi = std::max(1.0, target);
  while (h_transform(model, hi) < target) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e150) throw std::range_error("h_inverse: value outside the range of h");
  }
  double a = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    double r = h_transform(model, a) - target;
    if (r == 0.0) break;
    if (r > 0.0) hi = a; else lo = a;
    double d = h_derivative(model, a);
    double next = a - r / d;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - a) <= 1e-16 * std::max(1.0, std::abs(a))) {
      a = next;
      break;
    }
    a = next;
  }
  return std::copysign(a, h_val);
}

double c_coefficient(const NonlinearModel& model, double h_val) {
  if (model.kind() == ModelKind::Power) return 0.5;
  double a = h_inverse(model, h_val);
  double rho = a * a;
  return 0.5 * (1.0 + rho * model.tilde_f_prime(rho) / (model.n() * model.tilde_f(rho)));
}

double g_weight(const NonlinearModel& model, double a0) {
  return std::pow(a0, model.n() - 1) * std::sqrt(model.hat_f(a0 * a0));
}

double g_log_derivative(const NonlinearModel& model, double a0) {
  double rho = a0 * a0;
  return (model.n() - 1) + rho * model.hat_f_prime(rho) / model.hat_f(rho);
}

Eigen::ArrayXd h_transform(const NonlinearModel& model, const Eigen::ArrayXd& a) {
  if (model.kind() == ModelKind::Power) return a;
  return a.unaryExpr([&](double x) { return h_transform(model, x); });
}

Eigen::ArrayXd h_inverse(const NonlinearModel& model, const Eigen::ArrayXd& h) {
  if (model.kind() == ModelKind::Power) return h;
  return h.unaryExpr([&](double x) { return h_inverse(model, x); });
}

Eigen::ArrayXd c_coefficient(const NonlinearModel& model, const Eigen::ArrayXd& h) {
  if (model.kind() == ModelKind::Power) return Eigen::ArrayXd::Constant(h.size(), 0.5);
  return h.unaryExpr([&](double x) { return c_coefficient(model, x); });
}

Eigen::ArrayXd g_weight(const NonlinearModel& model, const Eigen::ArrayXd& a0) {
  return a0.unaryExpr([&](double x) { return g_weight(model, x); });
}

Eigen::ArrayXd g_log_derivative(const NonlinearModel& model, const Eigen::ArrayXd& a0) {
  return a0.unaryExpr([&](double x) { return g_log_derivative(model, x); });
}

}  // namespace wkbnls
