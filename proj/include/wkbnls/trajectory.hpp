#pragma once

#include <Eigen/Core>

#include <vector>

namespace wkbnls {

// Packed state samples y(t_n) with time derivatives y'(t_n); evaluation
// between samples is cubic Hermite.
class HermiteSeries {
 public:
  void push(double t, Eigen::ArrayXd y, Eigen::ArrayXd dy);

  std::size_t size() const { return t_.size(); }
  bool empty() const { return t_.empty(); }
  const std::vector<double>& times() const { return t_; }
  const Eigen::ArrayXd& value(std::size_t n) const { return y_[n]; }
  const Eigen::ArrayXd& derivative(std::size_t n) const { return dy_[n]; }
  Eigen::ArrayXd evaluate(double t) const;
  Eigen::ArrayXd evaluate_derivative(double t) const;

 private:
  std::size_t locate(double t) const;

  std::vector<double> t_;
  std::vector<Eigen::ArrayXd> y_;
  std::vector<Eigen::ArrayXd> dy_;
};

// Uniform time grid 0 = t_0 < ... < t_N = t_end with spacing <= max_dt.
std::vector<double> uniform_times(double t_end, double max_dt);

// Cumulative integral of uniformly sampled g from t_0, fourth order
// (trapezoid when fewer than four samples).
std::vector<Eigen::ArrayXd> cumulative_integral(const std::vector<Eigen::ArrayXd>& g, double dt);

// Fourth-order centred first derivative of uniformly sampled data at index n
// (one-sided fourth-order stencils near the ends).
Eigen::ArrayXd time_derivative(const std::vector<Eigen::ArrayXd>& y, double dt, std::size_t n);
// Same with step 2*dt; used for the differencing error estimate.
Eigen::ArrayXd time_derivative_coarse(const std::vector<Eigen::ArrayXd>& y, double dt, std::size_t n);

}  // namespace wkbnls
