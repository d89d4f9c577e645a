#pragma once

#include <Eigen/Core>

#include <memory>

namespace wkbnls {

enum class GridKind { Periodic, HalfLine };

// Reflection symmetry used to extend half-line data onto a periodic grid of
// twice the length. Ignored on periodic grids.
enum class Parity { Even, Odd };

inline Parity flip(Parity p, int order) {
  if (order % 2 == 0) return p;
  return p == Parity::Even ? Parity::Odd : Parity::Even;
}

// Uniform spectral grid. Periodic grids cover [-L/2, L/2)^d with nodes
// x_j = -L/2 + j L/N. Half-line grids cover (0, L) with cell-centred nodes
// z_j = (j + 1/2) L/N and transform through the extension to (-L, L).
class Grid {
 public:
  static Grid periodic(int dim, int n, double length);
  static Grid half_line(int n, double length);

  GridKind kind() const { return kind_; }
  int dim() const { return dim_; }
  int n() const { return n_; }
  double length() const { return length_; }
  Eigen::Index size() const;
  double spacing() const { return length_ / n_; }
  double cell_volume() const;
  // Coordinate along `axis` at every node (row-major, axis 0 slowest).
  Eigen::ArrayXd coordinate(int axis) const;

  // Transform side: per-axis length is N (periodic) or 2N (half-line).
  int transform_length() const { return kind_ == GridKind::Periodic ? n_ : 2 * n_; }
  Eigen::Index spectral_size() const;
  const Eigen::ArrayXd& wavenumber(int axis) const { return data_->k[axis]; }
  const Eigen::ArrayXd& wavenumber_sq() const { return data_->k2; }
  // Per spectral index: true where the mode sits on a Nyquist line.
  const Eigen::Array<bool, Eigen::Dynamic, 1>& nyquist() const { return data_->nyquist; }
  // Per spectral index: true where the mode survives the 2/3 rule.
  const Eigen::Array<bool, Eigen::Dynamic, 1>& dealias_mask() const { return data_->keep; }
  double k_max() const;

  bool operator==(const Grid& o) const {
    return kind_ == o.kind_ && dim_ == o.dim_ && n_ == o.n_ && length_ == o.length_;
  }
  bool operator!=(const Grid& o) const { return !(*this == o); }

 private:
  struct Tables {
    Eigen::ArrayXd k[2];
    Eigen::ArrayXd k2;
    Eigen::Array<bool, Eigen::Dynamic, 1> nyquist;
    Eigen::Array<bool, Eigen::Dynamic, 1> keep;
  };
  Grid(GridKind kind, int dim, int n, double length);

  GridKind kind_;
  int dim_;
  int n_;
  double length_;
  std::shared_ptr<const Tables> data_;
};

}  // namespace wkbnls
