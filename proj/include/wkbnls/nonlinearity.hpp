#pragma once

#include <Eigen/Core>

#include <string>
#include <string_view>
#include <vector>

namespace wkbnls {

enum class ModelKind { Power, SumOfPowers, RationalPower, GrossPitaevskii };

// Pressure law f(rho). Closed set of kinds so that the factorisations
// f = rho^n * tilde_f and f' = rho^(n-1) * hat_f are exact.
class NonlinearModel {
 public:
  static NonlinearModel power(int sigma);
  static NonlinearModel sum_of_powers(int sigma1, int sigma2);
  static NonlinearModel rational(int sigma);
  static NonlinearModel gross_pitaevskii();
  // "power:2", "sum:1,3", "rational:2", "gp"
  static NonlinearModel parse(std::string_view spec);

  std::string name() const;
  ModelKind kind() const { return kind_; }
  int sigma1() const { return s1_; }
  int sigma2() const { return s2_; }
  // Vanishing order n; 0 for Gross-Pitaevskii (f(0) != 0).
  int n() const { return n_; }

  double f(double rho) const;
  double fprime(double rho) const;
  double fsecond(double rho) const;
  // F with F' = f, F(0) = 0; for Gross-Pitaevskii F = (rho-1)^2/2.
  double antiderivative(double rho) const;
  double tilde_f(double rho) const;
  double tilde_f_prime(double rho) const;
  double hat_f(double rho) const;
  double hat_f_prime(double rho) const;

  // Taylor coefficients f^(j)(rho0)/j!, j = 0..order.
  std::vector<double> taylor(double rho0, int order) const;

  Eigen::ArrayXd f(const Eigen::ArrayXd& rho) const;
  Eigen::ArrayXd fprime(const Eigen::ArrayXd& rho) const;
  Eigen::ArrayXd antiderivative(const Eigen::ArrayXd& rho) const;
  // Coefficient arrays c_j(x) = f^(j)(rho0(x))/j!.
  std::vector<Eigen::ArrayXd> taylor(const Eigen::ArrayXd& rho0, int order) const;

  bool operator==(const NonlinearModel&) const = default;

 private:
  NonlinearModel(ModelKind kind, int s1, int s2, int n) : kind_(kind), s1_(s1), s2_(s2), n_(n) {}
  void require_assumption_a(const char* what) const;

  ModelKind kind_;
  int s1_;
  int s2_;
  int n_;
};

struct AssumptionReport {
  bool applicable = true;
  bool pass = false;
  int n = 0;
  double min_fprime = 0.0;
  std::string note;
};

AssumptionReport verify_assumption_A(const NonlinearModel& model, double rho_max, int n_samples);

// h(a) = a * tilde_f(a^2)^(1/(2n)), so that h^(2n) = f(a^2).
double h_transform(const NonlinearModel& model, double a);
double h_derivative(const NonlinearModel& model, double a);
double h_inverse(const NonlinearModel& model, double h_val);
// c(h) defined by (1/2) a h'(a) = h(a) c(h(a)).
double c_coefficient(const NonlinearModel& model, double h_val);
// g(a0) = a0^(n-1) * hat_f(a0^2)^(1/2), so that g^2 = f'(a0^2).
double g_weight(const NonlinearModel& model, double a0);
// a0 g'(a0) / g(a0), smooth through a0 = 0.
double g_log_derivative(const NonlinearModel& model, double a0);

Eigen::ArrayXd h_transform(const NonlinearModel& model, const Eigen::ArrayXd& a);
Eigen::ArrayXd h_inverse(const NonlinearModel& model, const Eigen::ArrayXd& h);
Eigen::ArrayXd c_coefficient(const NonlinearModel& model, const Eigen::ArrayXd& h);
Eigen::ArrayXd g_weight(const NonlinearModel& model, const Eigen::ArrayXd& a0);
Eigen::ArrayXd g_log_derivative(const NonlinearModel& model, const Eigen::ArrayXd& a0);

}  // namespace wkbnls
