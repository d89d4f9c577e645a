#pragma once

#include "wkbnls/grid.hpp"

#include <Eigen/Core>

#include <complex>
#include <iosfwd>
#include <vector>

namespace wkbnls {

using RealField = Eigen::ArrayXd;
using ComplexField = Eigen::ArrayXcd;
using VectorField = std::vector<RealField>;

// Unnormalised DFT of the grid samples. Half-line data are first extended to
// 2N points: ext[j] = u[j], ext[2N-1-j] = +-u[j].
ComplexField forward_transform(const Grid& grid, const ComplexField& u, Parity parity = Parity::Even);
// Inverse of forward_transform (1/M scaling); half-line output is restricted
// to the physical nodes.
ComplexField inverse_transform(const Grid& grid, const ComplexField& hat);

// Pointwise multiplier m (indexed like the spectrum) applied in Fourier space.
template <typename Scalar>
Eigen::ArrayX<Scalar> apply_multiplier(const Grid& grid, const Eigen::ArrayX<Scalar>& u, const ComplexField& m,
                                       Parity parity = Parity::Even);

// Multiplier (i k_axis)^order; Nyquist modes are dropped for odd orders.
ComplexField derivative_multiplier(const Grid& grid, int axis, int order);

template <typename Scalar>
Eigen::ArrayX<Scalar> spectral_derivative(const Grid& grid, const Eigen::ArrayX<Scalar>& u, int axis, int order,
                                          Parity parity = Parity::Even);

template <typename Scalar>
std::vector<Eigen::ArrayX<Scalar>> gradient(const Grid& grid, const Eigen::ArrayX<Scalar>& u,
                                            Parity parity = Parity::Even);

template <typename Scalar>
Eigen::ArrayX<Scalar> laplacian(const Grid& grid, const Eigen::ArrayX<Scalar>& u, Parity parity = Parity::Even);

// Velocity components on the half-line are odd.
RealField divergence(const Grid& grid, const VectorField& u, Parity parity = Parity::Odd);

// (sum_k (1+|k|^2)^s |u_k|^2 * normalisation)^(1/2); s = 0 gives the
// quadrature L2 norm. Half-line norms are half the extension's.
template <typename Scalar>
double sobolev_norm(const Grid& grid, const Eigen::ArrayX<Scalar>& u, int s, Parity parity = Parity::Even);

// max |u| + max |grad u|.
template <typename Scalar>
double w1inf_norm(const Grid& grid, const Eigen::ArrayX<Scalar>& u, Parity parity = Parity::Even);

template <typename Scalar>
Scalar integrate(const Grid& grid, const Eigen::ArrayX<Scalar>& u);

// 2/3-rule truncation.
template <typename Scalar>
Eigen::ArrayX<Scalar> dealias(const Grid& grid, const Eigen::ArrayX<Scalar>& u, Parity parity = Parity::Even);

// exp(-strength (|k|/k_max)^order) damping of every mode.
template <typename Scalar>
Eigen::ArrayX<Scalar> exponential_filter(const Grid& grid, const Eigen::ArrayX<Scalar>& u, double strength,
                                         int order, Parity parity = Parity::Even);

// Largest modulus in the outer tenth of the spectrum relative to the largest
// modulus overall (resolution check).
template <typename Scalar>
double spectral_tail_ratio(const Grid& grid, const Eigen::ArrayX<Scalar>& u, Parity parity = Parity::Even);

// d^order/dx^order of the trigonometric interpolant at a point (1-D grids).
template <typename Scalar>
Scalar evaluate_derivative_at(const Grid& grid, const Eigen::ArrayX<Scalar>& u, double x, int order,
                              Parity parity = Parity::Even);

// Columns: coordinate(s), real, imag.
void write_field_csv(std::ostream& os, const Grid& grid, const ComplexField& u);

}  // namespace wkbnls
