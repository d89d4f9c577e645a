#pragma once

#include "wkbnls/grid.hpp"
#include "wkbnls/nonlinearity.hpp"
#include "wkbnls/wkb.hpp"

#include <functional>
#include <string>
#include <vector>

namespace wkbnls {

enum class Domain { Torus, HalfLine };

// Initial data of orders 0..orders-1 on a grid.
using DataGenerator = std::function<std::vector<OrderData>(const Grid&, int orders)>;

struct CaseSpec {
  std::string name;
  Domain domain = Domain::Torus;
  NonlinearModel model = NonlinearModel::power(1);
  int n = 1024;         // nodes
  double length = 1.0;  // torus period or half-line extent
  double t_end = 1.0;
  DataGenerator data;
  bool tails = true;    // whole-space cases supply the order m+1 data pair

  Grid grid() const;
  std::vector<OrderData> initial(int orders) const { return data(grid(), orders); }
  // Data for an order-m cascade, including the tail pair when supplied.
  std::vector<OrderData> expansion_data(int m) const { return initial(tails ? m + 2 : m + 1); }
};

std::vector<std::string> case_names();
// Throws std::invalid_argument for an unknown name.
CaseSpec make_case(const std::string& name);

// exp(1 - 1/(1 - x^2)) on |x| < 1, zero outside; peak 1 at x = 0.
RealField compact_bump(const RealField& x);

// Gradient growth over the initial value taken as the onset of steepening.
inline constexpr double kSteepeningFactor = 10.0;

struct HorizonCheck {
  double horizon = 0.0;  // first steepening or blow-up time, capped at t_max
  bool blew_up = false;
  bool steepened = false;
  bool ok = false;       // t_end <= horizon / 2
  std::string message;
};

// Runs the order-0 limit system to t_max = 2 t_end and tracks
// max |d_x a| + max |d_x u| against its initial value.
HorizonCheck check_horizon(const CaseSpec& spec);

}  // namespace wkbnls
