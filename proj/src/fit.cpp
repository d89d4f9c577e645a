#include "wkbnls/fit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wkbnls {

RateFit fit_rate(const std::vector<double>& eps, const std::vector<double>& values) {
  if (eps.size() != values.size()) throw std::invalid_argument("fit_rate needs matching arrays");
  RateFit f;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0) || !(values[i] > 0.0) || !std::isfinite(values[i])) {
      ++f.excluded;
      continue;
    }
    x.push_back(std::log(eps[i]));
    y.push_back(std::log(values[i]));
  }
  f.used = static_cast<int>(x.size());
  if (f.used < 3) return f;
  double mx = 0, my = 0;
  for (int i = 0; i < f.used; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= f.used;
  my /= f.used;
  double sxx = 0, sxy = 0;
  for (int i = 0; i < f.used; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) return f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  for (int i = 0; i < f.used; ++i)
    f.max_log_residual = std::max(f.max_log_residual, std::abs(y[i] - f.intercept - f.slope * x[i]));
  f.valid = true;
  return f;
}

}  // namespace wkbnls
