#pragma once

#include <vector>

namespace wkbnls {

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_log_residual = 0.0;
  int used = 0;
  int excluded = 0;  // nonpositive or non-finite values
  bool valid = false;  // at least three usable points
};

// Least squares on (log eps, log value).
RateFit fit_rate(const std::vector<double>& eps, const std::vector<double>& values);

}  // namespace wkbnls
