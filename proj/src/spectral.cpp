#include "wkbnls/spectral.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace wkbnls {

namespace {

using cd = std::complex<double>;

Eigen::FFT<double>& engine() {
  thread_local Eigen::FFT<double> fft;
  return fft;
}

void transform_lines(std::vector<cd>& data, int m, int dim, bool inverse) {
  auto& fft = engine();
  std::vector<cd> in(m), out(m);
  auto run = [&]() {
    if (inverse) fft.inv(out, in); else fft.fwd(out, in);
  };
  if (dim == 1) {
    in.assign(data.begin(), data.end());
    run();
    data.assign(out.begin(), out.end());
    return;
  }
  for (int r = 0; r < m; ++r) {
    std::copy(data.begin() + Eigen::Index(r) * m, data.begin() + Eigen::Index(r + 1) * m, in.begin());
    run();
    std::copy(out.begin(), out.end(), data.begin() + Eigen::Index(r) * m);
  }
  for (int c = 0; c < m; ++c) {
    for (int r = 0; r < m; ++r) in[r] = data[Eigen::Index(r) * m + c];
    run();
    for (int r = 0; r < m; ++r) data[Eigen::Index(r) * m + c] = out[r];
  }
}

template <typename Scalar>
ComplexField as_complex(const Eigen::ArrayX<Scalar>& u) {
  return u.template cast<cd>();
}

template <typename Scalar>
Eigen::ArrayX<Scalar> from_complex(const ComplexField& u) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return u.real();
  } else {
    return u;
  }
}

void check_size(const Grid& grid, Eigen::Index n) {
  if (n != grid.size()) throw std::invalid_argument("field size does not match grid");
}

}  // namespace

ComplexField forward_transform(const Grid& grid, const ComplexField& u, Parity parity) {
  check_size(grid, u.size());
  const int m = grid.transform_length();
  std::vector<cd> buf(grid.spectral_size());
  if (grid.kind() == GridKind::Periodic) {
    std::copy(u.data(), u.data() + u.size(), buf.begin());
  } else {
    const int n = grid.n();
    const double sign = parity == Parity::Even ? 1.0 : -1.0;
    for (int j = 0; j < n; ++j) {
      buf[j] = u[j];
      buf[m - 1 - j] = sign * u[j];
    }
  }
  transform_lines(buf, m, grid.dim(), false);
  return Eigen::Map<ComplexField>(buf.data(), buf.size());
}

ComplexField inverse_transform(const Grid& grid, const ComplexField& hat) {
  if (hat.size() != grid.spectral_size()) throw std::invalid_argument("spectrum size does not match grid");
  const int m = grid.transform_length();
  std::vector<cd> buf(hat.data(), hat.data() + hat.size());
  transform_lines(buf, m, grid.dim(), true);
  if (grid.kind() == GridKind::HalfLine) return Eigen::Map<ComplexField>(buf.data(), grid.n());
  return Eigen::Map<ComplexField>(buf.data(), buf.size());
}

ComplexField derivative_multiplier(const Grid& grid, int axis, int order) {
  if (axis < 0 || axis >= grid.dim()) throw std::out_of_range("derivative axis out of range");
  if (order < 0) throw std::invalid_argument("derivative order must be >= 0");
  const auto& k = grid.wavenumber(axis);
  ComplexField m(k.size());
  const int mm = grid.transform_length();
  const double k_nyq = 2.0 * std::numbers::pi / (grid.spacing() * mm) * (mm / 2);
  for (Eigen::Index s = 0; s < k.size(); ++s) {
    if (order % 2 == 1 && std::abs(std::abs(k[s]) - k_nyq) < 1e-9 * k_nyq) {
      m[s] = 0.0;
      continue;
    }
    m[s] = std::pow(cd(0.0, k[s]), order);
  }
  return m;
}

template <typename Scalar>
Eigen::ArrayX<Scalar> apply_multiplier(const Grid& grid, const Eigen::ArrayX<Scalar>& u, const ComplexField& m,
                                       Parity parity) {
  ComplexField hat = forward_transform(grid, as_complex(u), parity);
  hat *= m;
  return from_complex<Scalar>(inverse_transform(grid, hat));
}

template <typename Scalar>
Eigen::ArrayX<Scalar> spectral_derivative(const Grid& grid, const Eigen::ArrayX<Scalar>& u, int axis, int order,
                                          Parity parity) {
  if (order < 1) throw std::invalid_argument("spectral_derivative needs order >= 1");
  return apply_multiplier(grid, u, derivative_multiplier(grid, axis, order), parity);
}

template <typename Scalar>
std::vector<Eigen::ArrayX<Scalar>> gradient(const Grid& grid, const Eigen::ArrayX<Scalar>& u, Parity parity) {
  std::vector<Eigen::ArrayX<Scalar>> g;
  if (grid.dim() == 1) {
    g.push_back(spectral_derivative(grid, u, 0, 1, parity));
    return g;
  }
  ComplexField hat = forward_transform(grid, as_complex(u), parity);
  for (int axis = 0; axis < grid.dim(); ++axis) {
    ComplexField h = hat * derivative_multiplier(grid, axis, 1);
    g.push_back(from_complex<Scalar>(inverse_transform(grid, h)));
  }
  return g;
}

template <typename Scalar>
Eigen::ArrayX<Scalar> laplacian(const Grid& grid, const Eigen::ArrayX<Scalar>& u, Parity parity) {
  ComplexField m = -grid.wavenumber_sq().cast<cd>();
  return apply_multiplier(grid, u, m, parity);
}

RealField divergence(const Grid& grid, const VectorField& u, Parity parity) {
  if (static_cast<int>(u.size()) != grid.dim()) throw std::invalid_argument("vector field has wrong number of components");
  RealField out = spectral_derivative(grid, u[0], 0, 1, parity);
  for (int axis = 1; axis < grid.dim(); ++axis) out += spectral_derivative(grid, u[axis], axis, 1, parity);
  return out;
}

template <typename Scalar>
double sobolev_norm(const Grid& grid, const Eigen::ArrayX<Scalar>& u, int s, Parity parity) {
  if (s < 0) throw std::invalid_argument("sobolev_norm needs s >= 0");
  ComplexField hat = forward_transform(grid, as_complex(u), parity);
  Eigen::ArrayXd w = (1.0 + grid.wavenumber_sq()).pow(s);
  double sum = (w * hat.abs2()).sum();
  double norm2 = grid.cell_volume() / static_cast<double>(grid.spectral_size()) * sum;
  if (grid.kind() == GridKind::HalfLine) norm2 *= 0.5;
  return std::sqrt(norm2);
}

template <typename Scalar>
double w1inf_norm(const Grid& grid, const Eigen::ArrayX<Scalar>& u, Parity parity) {
  check_size(grid, u.size());
  auto g = gradient(grid, u, parity);
  Eigen::ArrayXd mag = Eigen::ArrayXd::Zero(u.size());
  for (const auto& c : g) mag += c.abs2();
  return u.abs().maxCoeff() + std::sqrt(mag.maxCoeff());
}

template <typename Scalar>
Scalar integrate(const Grid& grid, const Eigen::ArrayX<Scalar>& u) {
  check_size(grid, u.size());
  return u.sum() * grid.cell_volume();
}

template <typename Scalar>
Eigen::ArrayX<Scalar> dealias(const Grid& grid, const Eigen::ArrayX<Scalar>& u, Parity parity) {
  ComplexField m = grid.dealias_mask().cast<double>().cast<cd>();
  return apply_multiplier(grid, u, m, parity);
}

template <typename Scalar>
Eigen::ArrayX<Scalar> exponential_filter(const Grid& grid, const Eigen::ArrayX<Scalar>& u, double strength, int order,
                                         Parity parity) {
  const double km = grid.k_max();
  ComplexField m = (-strength * (grid.wavenumber_sq().sqrt() / km).pow(order)).exp().cast<cd>();
  return apply_multiplier(grid, u, m, parity);
}

template <typename Scalar>
double spectral_tail_ratio(const Grid& grid, const Eigen::ArrayX<Scalar>& u, Parity parity) {
  ComplexField hat = forward_transform(grid, as_complex(u), parity);
  const double cut = 0.9 * grid.k_max();
  double top = 0.0, all = 0.0;
  for (Eigen::Index s = 0; s < hat.size(); ++s) {
    double a = std::abs(hat[s]);
    all = std::max(all, a);
    bool outer = false;
    for (int axis = 0; axis < grid.dim(); ++axis) outer = outer || std::abs(grid.wavenumber(axis)[s]) >= cut;
    if (outer) top = std::max(top, a);
  }
  return all > 0.0 ? top / all : 0.0;
}

template <typename Scalar>
Scalar evaluate_derivative_at(const Grid& grid, const Eigen::ArrayX<Scalar>& u, double x, int order, Parity parity) {
  if (grid.dim() != 1) throw std::invalid_argument("evaluate_derivative_at supports 1-D grids");
  ComplexField hat = forward_transform(grid, as_complex(u), parity);
  const int m = grid.transform_length();
  const double x0 = grid.kind() == GridKind::Periodic ? -0.5 * grid.length() : 0.5 * grid.spacing();
  const auto& k = grid.wavenumber(0);
  cd sum = 0.0;
  for (int q = 0; q < m; ++q) {
    if (q == m / 2) {
      // Nyquist mode split symmetrically between +k and -k.
      double kn = std::abs(k[q]);
      cd plus = std::pow(cd(0.0, kn), order) * std::exp(cd(0.0, kn * (x - x0)));
      cd minus = std::pow(cd(0.0, -kn), order) * std::exp(cd(0.0, -kn * (x - x0)));
      sum += hat[q] * 0.5 * (plus + minus);
      continue;
    }
    sum += hat[q] * std::pow(cd(0.0, k[q]), order) * std::exp(cd(0.0, k[q] * (x - x0)));
  }
  sum /= static_cast<double>(m);
  if constexpr (std::is_same_v<Scalar, double>) {
    return sum.real();
  } else {
    return sum;
  }
}

void write_field_csv(std::ostream& os, const Grid& grid, const ComplexField& u) {
  check_size(grid, u.size());
  std::vector<RealField> coords;
  for (int axis = 0; axis < grid.dim(); ++axis) coords.push_back(grid.coordinate(axis));
  os << (grid.dim() == 1 ? "x" : "x,y") << ",real,imag\n";
  char buf[64];
  for (Eigen::Index s = 0; s < u.size(); ++s) {
    for (const auto& c : coords) {
      std::snprintf(buf, sizeof buf, "%.17g,", c[s]);
      os << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", u[s].real(), u[s].imag());
    os << buf;
  }
}

#define WKBNLS_INSTANTIATE(S)                                                                                     \
  template Eigen::ArrayX<S> apply_multiplier<S>(const Grid&, const Eigen::ArrayX<S>&, const ComplexField&, Parity); \
  template Eigen::ArrayX<S> spectral_derivative<S>(const Grid&, const Eigen::ArrayX<S>&, int, int, Parity);       \
  template std::vector<Eigen::ArrayX<S>> gradient<S>(const Grid&, const Eigen::ArrayX<S>&, Parity);               \
  template Eigen::ArrayX<S> laplacian<S>(const Grid&, const Eigen::ArrayX<S>&, Parity);                           \
  template double sobolev_norm<S>(const Grid&, const Eigen::ArrayX<S>&, int, Parity);                             \
  template double w1inf_norm<S>(const Grid&, const Eigen::ArrayX<S>&, Parity);                                    \
  template S integrate<S>(const Grid&, const Eigen::ArrayX<S>&);                                                  \
  template Eigen::ArrayX<S> dealias<S>(const Grid&, const Eigen::ArrayX<S>&, Parity);                             \
  template Eigen::ArrayX<S> exponential_filter<S>(const Grid&, const Eigen::ArrayX<S>&, double, int, Parity);     \
  template double spectral_tail_ratio<S>(const Grid&, const Eigen::ArrayX<S>&, Parity);                           \
  template S evaluate_derivative_at<S>(const Grid&, const Eigen::ArrayX<S>&, double, int, Parity);

WKBNLS_INSTANTIATE(double)
WKBNLS_INSTANTIATE(std::complex<double>)

#undef WKBNLS_INSTANTIATE

}  // namespace wkbnls
