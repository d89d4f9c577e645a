#pragma once

#include "wkbnls/euler.hpp"
#include "wkbnls/grid.hpp"
#include "wkbnls/nonlinearity.hpp"
#include "wkbnls/spectral.hpp"
#include "wkbnls/trajectory.hpp"

#include <string>
#include <vector>

namespace wkbnls {

// Fields of one expansion order at one time.
struct OrderFields {
  ComplexField a;  // a^k (real for k = 0)
  VectorField u;   // u^k = grad phi^k
  RealField phi;
};

// Initial data (a_0^k, phi_0^k) of one order.
struct OrderData {
  ComplexField a;
  RealField phi;
};

// One order on the snapshot grid; samples carry time derivatives so that the
// coefficients can be evaluated between snapshots.
class OrderSeries {
 public:
  OrderSeries() = default;
  OrderSeries(const Grid& grid) : n_(grid.size()), d_(grid.dim()) {}

  void push(double t, const OrderFields& value, const OrderFields& rate);
  std::size_t size() const { return series_.size(); }
  OrderFields at(std::size_t n) const { return unpack(series_.value(n)); }
  OrderFields rate_at(std::size_t n) const { return unpack(series_.derivative(n)); }
  OrderFields evaluate(double t) const { return unpack(series_.evaluate(t)); }

 private:
  Eigen::ArrayXd pack(const OrderFields& f) const;
  OrderFields unpack(const Eigen::ArrayXd& y) const;

  Eigen::Index n_ = 0;
  int d_ = 1;
  HermiteSeries series_;
};

struct CascadeConfig {
  double dt = 0.01;  // snapshot spacing (upper bound)
  EulerConfig euler;
};

struct WKBExpansion {
  Grid grid = Grid::periodic(1, 8, 1.0);
  NonlinearModel model = NonlinearModel::power(1);
  int m = 0;
  bool has_tail = false;  // order m+1 built from the supplied tail data
  std::vector<double> times;
  std::vector<double> max_speed;  // order-0 characteristic speed per snapshot
  std::vector<OrderSeries> orders;
  EulerTrajectory order0_run;  // diagnostics of the limit solve
  std::vector<double> weight_consistency;  // per order k >= 1: max_t ||F^k - 2 g a^k||_inf

  int top_order() const { return static_cast<int>(orders.size()) - 1; }
  double dt() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
};

// Order 0 through the (h, H, u) limit system and the phase quadrature.
OrderSeries solve_order0(const Grid& grid, const NonlinearModel& model, const OrderData& data,
                         const std::vector<double>& times, const CascadeConfig& cfg, EulerTrajectory* run = nullptr,
                         std::vector<double>* max_speed = nullptr);

struct SourceFields {
  ComplexField S_a;
  RealField S_phi;
};

// Minus the eps^k coefficient of the spatial part of the WKB system applied
// to sum_{j<k} eps^j (a^j, phi^j); lower[j] holds order j at one time.
SourceFields cascade_sources(const Grid& grid, const NonlinearModel& model, const std::vector<OrderFields>& lower,
                             int k);

// Sources at every snapshot time of the expansion prefix.
std::vector<SourceFields> cascade_sources(const WKBExpansion& prefix, int k);

// Linearised order-k system around order 0, sources from orders < k.
OrderSeries solve_orderk(const WKBExpansion& prefix, int k, const OrderData& data, double* weight_consistency = nullptr);

// Full cascade: data[k] for k = 0..m (and m+1 when tail data are supplied).
WKBExpansion build_expansion(const Grid& grid, const NonlinearModel& model, int m, const std::vector<OrderData>& data,
                             double t_end, const CascadeConfig& cfg);

struct AssembledSeries {
  std::vector<double> times;
  std::vector<ComplexField> a;
  std::vector<RealField> phi;
};

AssembledSeries assemble(const WKBExpansion& expansion, double epsilon);

struct ResidualEntry {
  double epsilon = 0.0;
  int s = 1;
  std::vector<double> times;
  std::vector<double> res_a;    // ||R_a||_{H^s}
  std::vector<double> res_phi;  // ||R_phi||_{H^s}
  std::vector<double> res_nls;  // ||i eps R_a - a R_phi||_{H^s}
  double sup_a = 0.0;
  double sup_phi = 0.0;
  double sup_nls = 0.0;
  double differencing_error = 0.0;  // estimate of the time-differencing contribution
  bool under_resolved = false;
};

ResidualEntry residual(const WKBExpansion& expansion, double epsilon, int s);

}  // namespace wkbnls
