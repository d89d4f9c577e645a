#include "wkbnls/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wkbnls {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

Grid Grid::periodic(int dim, int n, double length) {
  if (dim < 1 || dim > 2) throw std::invalid_argument("periodic grid supports d = 1 or 2");
  return Grid(GridKind::Periodic, dim, n, length);
}

Grid Grid::half_line(int n, double length) { return Grid(GridKind::HalfLine, 1, n, length); }

Grid::Grid(GridKind kind, int dim, int n, double length) : kind_(kind), dim_(dim), n_(n), length_(length) {
  if (n < 8 || !is_power_of_two(n)) throw std::invalid_argument("grid needs N >= 8, a power of two");
  if (!(length > 0.0)) throw std::invalid_argument("grid length must be positive");

  auto tables = std::make_shared<Tables>();
  const int m = transform_length();
  const double period = kind == GridKind::Periodic ? length : 2.0 * length;
  const double dk = 2.0 * std::numbers::pi / period;
  const Eigen::Index total = spectral_size();
  Eigen::ArrayXi idx1d(m);
  for (int j = 0; j < m; ++j) idx1d[j] = j < m / 2 ? j : j - m;

  tables->k2 = Eigen::ArrayXd::Zero(total);
  tables->nyquist = Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(total, false);
  tables->keep = Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(total, true);
  for (int axis = 0; axis < dim; ++axis) tables->k[axis] = Eigen::ArrayXd(total);
  for (Eigen::Index s = 0; s < total; ++s) {
    Eigen::Index rest = s;
    for (int axis = dim - 1; axis >= 0; --axis) {
      int j = static_cast<int>(rest % m);
      rest /= m;
      int q = idx1d[j];
      tables->k[axis][s] = dk * q;
      tables->k2[s] += dk * q * dk * q;
      if (q == -m / 2) tables->nyquist[s] = true;
      if (3 * std::abs(q) > m) tables->keep[s] = false;
    }
  }
  data_ = std::move(tables);
}

Eigen::Index Grid::size() const { return dim_ == 1 ? n_ : Eigen::Index(n_) * n_; }

Eigen::Index Grid::spectral_size() const {
  Eigen::Index m = transform_length();
  return dim_ == 1 ? m : m * m;
}

double Grid::cell_volume() const { return dim_ == 1 ? spacing() : spacing() * spacing(); }

double Grid::k_max() const { return std::numbers::pi / spacing(); }

Eigen::ArrayXd Grid::coordinate(int axis) const {
  if (axis < 0 || axis >= dim_) throw std::out_of_range("grid axis out of range");
  Eigen::ArrayXd x(size());
  const double h = spacing();
  for (Eigen::Index s = 0; s < size(); ++s) {
    Eigen::Index j = dim_ == 1 ? s : (axis == 0 ? s / n_ : s % n_);
    x[s] = kind_ == GridKind::Periodic ? -0.5 * length_ + j * h : (j + 0.5) * h;
  }
  return x;
}

}  // namespace wkbnls
