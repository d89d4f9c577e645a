#include "wkbnls/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wkbnls {

void HermiteSeries::push(double t, Eigen::ArrayXd y, Eigen::ArrayXd dy) {
  if (!t_.empty() && !(t > t_.back())) throw std::invalid_argument("HermiteSeries times must increase");
  if (y.size() != dy.size() || (!y_.empty() && y.size() != y_[0].size()))
    throw std::invalid_argument("HermiteSeries sample size mismatch");
  t_.push_back(t);
  y_.push_back(std::move(y));
  dy_.push_back(std::move(dy));
}

std::size_t HermiteSeries::locate(double t) const {
  if (t_.size() < 2) throw std::logic_error("HermiteSeries needs two samples to interpolate");
  const double tol = 1e-12 * std::max(1.0, std::abs(t_.back()));
  if (t < t_.front() - tol || t > t_.back() + tol) throw std::out_of_range("HermiteSeries evaluation outside the stored window");
  auto it = std::upper_bound(t_.begin(), t_.end(), t);
  std::size_t i = it == t_.begin() ? 0 : static_cast<std::size_t>(it - t_.begin()) - 1;
  return std::min(i, t_.size() - 2);
}

Eigen::ArrayXd HermiteSeries::evaluate(double t) const {
  if (t_.size() == 1) return y_[0];
  std::size_t i = locate(t);
  const double h = t_[i + 1] - t_[i];
  const double s = (t - t_[i]) / h;
  if (s == 0.0) return y_[i];
  if (s == 1.0) return y_[i + 1];
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);
  return h00 * y_[i] + h10 * h * dy_[i] + h01 * y_[i + 1] + h11 * h * dy_[i + 1];
}

Eigen::ArrayXd HermiteSeries::evaluate_derivative(double t) const {
  if (t_.size() == 1) return dy_[0];
  std::size_t i = locate(t);
  const double h = t_[i + 1] - t_[i];
  const double s = (t - t_[i]) / h;
  const double d00 = 6 * s * s - 6 * s;
  const double d10 = 3 * s * s - 4 * s + 1;
  const double d01 = -d00;
  const double d11 = 3 * s * s - 2 * s;
  return (d00 * y_[i] + d01 * y_[i + 1]) / h + d10 * dy_[i] + d11 * dy_[i + 1];
}

std::vector<double> uniform_times(double t_end, double max_dt) {
  if (!(t_end >= 0.0) || !(max_dt > 0.0)) throw std::invalid_argument("uniform_times needs t_end >= 0, dt > 0");
  if (t_end == 0.0) return {0.0};
  const auto steps = static_cast<std::size_t>(std::ceil(t_end / max_dt - 1e-9));
  std::vector<double> t(steps + 1);
  for (std::size_t n = 0; n <= steps; ++n) t[n] = t_end * static_cast<double>(n) / static_cast<double>(steps);
  return t;
}

std::vector<Eigen::ArrayXd> cumulative_integral(const std::vector<Eigen::ArrayXd>& g, double dt) {
  std::vector<Eigen::ArrayXd> out(g.size());
  if (g.empty()) return out;
  out[0] = Eigen::ArrayXd::Zero(g[0].size());
  const std::size_t n = g.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    Eigen::ArrayXd step;
    if (n < 4) {
      step = 0.5 * dt * (g[i] + g[i + 1]);
    } else if (i == 0) {
      step = dt / 24.0 * (9.0 * g[0] + 19.0 * g[1] - 5.0 * g[2] + g[3]);
    } else if (i + 2 == n) {
      step = dt / 24.0 * (9.0 * g[i + 1] + 19.0 * g[i] - 5.0 * g[i - 1] + g[i - 2]);
    } else {
      step = dt / 24.0 * (-g[i - 1] + 13.0 * g[i] + 13.0 * g[i + 1] - g[i + 2]);
    }
    out[i + 1] = out[i] + step;
  }
  return out;
}

namespace {

Eigen::ArrayXd derivative_with_stride(const std::vector<Eigen::ArrayXd>& y, double dt, std::size_t n, std::size_t k) {
  const std::size_t size = y.size();
  if (size < 4 * k + 1) throw std::invalid_argument("time_derivative needs at least 4*stride+1 samples");
  const double h = dt * static_cast<double>(k);
  auto at = [&](std::size_t i) -> const Eigen::ArrayXd& { return y[i]; };
  if (n >= 2 * k && n + 2 * k < size) {
    return (at(n - 2 * k) - 8.0 * at(n - k) + 8.0 * at(n + k) - at(n + 2 * k)) / (12.0 * h);
  }
  if (n < 2 * k) {
    // one-sided stencils at offsets 0..4 from the left end
    std::size_t b = n % k;
    std::size_t off = (n - b) / k;
    static const double w[2][5] = {{-25, 48, -36, 16, -3}, {-3, -10, 18, -6, 1}};
    Eigen::ArrayXd r = Eigen::ArrayXd::Zero(y[0].size());
    for (int j = 0; j < 5; ++j) r += w[off][j] * at(b + j * k);
    return r / (12.0 * h);
  }
  std::size_t back = (size - 1 - n) / k;
  std::size_t last = n + back * k;
  static const double w[2][5] = {{25, -48, 36, -16, 3}, {3, 10, -18, 6, -1}};
  Eigen::ArrayXd r = Eigen::ArrayXd::Zero(y[0].size());
  for (int j = 0; j < 5; ++j) r += w[back][j] * at(last - j * k);
  return r / (12.0 * h);
}

}  // namespace

Eigen::ArrayXd time_derivative(const std::vector<Eigen::ArrayXd>& y, double dt, std::size_t n) {
  return derivative_with_stride(y, dt, n, 1);
}

Eigen::ArrayXd time_derivative_coarse(const std::vector<Eigen::ArrayXd>& y, double dt, std::size_t n) {
  return derivative_with_stride(y, dt, n, 2);
}

}  // namespace wkbnls
