#pragma once

#include "wkbnls/nonlinearity.hpp"

#include <Eigen/Core>

#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

namespace wkbnls {

// Truncated power series sum_k eps^k c_k with field-valued coefficients.
template <typename Scalar>
class EpsilonJet {
 public:
  using Field = Eigen::ArrayX<Scalar>;

  EpsilonJet() = default;
  EpsilonJet(int order, Eigen::Index size) : c_(order + 1, Field::Zero(size)) {
    if (order < 0) throw std::invalid_argument("jet order must be >= 0");
  }
  explicit EpsilonJet(std::vector<Field> coeffs) : c_(std::move(coeffs)) {
    if (c_.empty()) throw std::invalid_argument("jet needs at least one coefficient");
    for (const auto& f : c_)
      if (f.size() != c_[0].size()) throw std::invalid_argument("jet coefficients must share one size");
  }
  // Coefficient list [value, 0, ..., 0].
  static EpsilonJet constant(const Field& value, int order) {
    EpsilonJet j(order, value.size());
    j.c_[0] = value;
    return j;
  }

  int order() const { return static_cast<int>(c_.size()) - 1; }
  Eigen::Index size() const { return c_.empty() ? 0 : c_[0].size(); }
  Field& operator[](int k) { return c_.at(k); }
  const Field& operator[](int k) const { return c_.at(k); }
  const std::vector<Field>& coefficients() const { return c_; }

  EpsilonJet& operator+=(const EpsilonJet& o) {
    check(o);
    for (int k = 0; k <= order(); ++k) c_[k] += o.c_[k];
    return *this;
  }
  EpsilonJet& operator-=(const EpsilonJet& o) {
    check(o);
    for (int k = 0; k <= order(); ++k) c_[k] -= o.c_[k];
    return *this;
  }
  EpsilonJet& operator*=(Scalar s) {
    for (auto& f : c_) f *= s;
    return *this;
  }
  void check(const EpsilonJet& o) const {
    if (o.order() != order() || o.size() != size()) throw std::invalid_argument("jet order/size mismatch");
  }

 private:
  std::vector<Field> c_;
};

using RealJet = EpsilonJet<double>;
using ComplexJet = EpsilonJet<std::complex<double>>;

template <typename S>
EpsilonJet<S> operator+(EpsilonJet<S> a, const EpsilonJet<S>& b) { return a += b; }
template <typename S>
EpsilonJet<S> operator-(EpsilonJet<S> a, const EpsilonJet<S>& b) { return a -= b; }
template <typename S>
EpsilonJet<S> operator*(S s, EpsilonJet<S> a) { return a *= s; }

// Cauchy product truncated at the common order.
template <typename S>
EpsilonJet<S> jet_mul(const EpsilonJet<S>& a, const EpsilonJet<S>& b) {
  a.check(b);
  EpsilonJet<S> r(a.order(), a.size());
  for (int k = 0; k <= a.order(); ++k)
    for (int i = 0; i <= k; ++i) r[k] += a[i] * b[k - i];
  return r;
}

// Multiplication by eps^p (p >= 0), truncated.
template <typename S>
EpsilonJet<S> jet_shift(const EpsilonJet<S>& a, int p) {
  EpsilonJet<S> r(a.order(), a.size());
  for (int k = p; k <= a.order(); ++k) r[k] = a[k - p];
  return r;
}

// Same coefficients at another truncation order.
template <typename S>
EpsilonJet<S> jet_resize(const EpsilonJet<S>& a, int order) {
  EpsilonJet<S> r(order, a.size());
  for (int k = 0; k <= std::min(order, a.order()); ++k) r[k] = a[k];
  return r;
}

// Apply a linear map to every coefficient.
template <typename S, typename Op>
auto jet_map(const EpsilonJet<S>& a, Op&& op) {
  using Out = typename std::decay_t<decltype(op(a[0]))>::Scalar;
  std::vector<Eigen::ArrayX<Out>> c;
  c.reserve(a.order() + 1);
  for (int k = 0; k <= a.order(); ++k) c.push_back(op(a[k]));
  return EpsilonJet<Out>(std::move(c));
}

inline ComplexJet jet_conj(const ComplexJet& a) {
  return jet_map(a, [](const ComplexJet::Field& f) { return f.conjugate().eval(); });
}

inline RealJet jet_real(const ComplexJet& a) {
  return jet_map(a, [](const ComplexJet::Field& f) { return f.real().eval(); });
}

inline ComplexJet jet_complex(const RealJet& a) {
  return jet_map(a, [](const RealJet::Field& f) { return f.cast<std::complex<double>>().eval(); });
}

// 1/a for a jet whose leading coefficient is nowhere zero.
template <typename S>
EpsilonJet<S> jet_reciprocal(const EpsilonJet<S>& a) {
  EpsilonJet<S> r(a.order(), a.size());
  r[0] = a[0].inverse();
  for (int k = 1; k <= a.order(); ++k) {
    typename EpsilonJet<S>::Field acc = EpsilonJet<S>::Field::Zero(a.size());
    for (int j = 1; j <= k; ++j) acc += a[j] * r[k - j];
    r[k] = -acc * r[0];
  }
  return r;
}

// g(rho) for g with pointwise Taylor coefficients taylor[j] about rho[0].
inline RealJet jet_compose(const std::vector<Eigen::ArrayXd>& taylor, const RealJet& rho) {
  if (static_cast<int>(taylor.size()) < rho.order() + 1) throw std::invalid_argument("not enough Taylor coefficients");
  RealJet delta = rho;
  delta[0].setZero();
  RealJet r = RealJet::constant(taylor[rho.order()], rho.order());
  for (int j = rho.order() - 1; j >= 0; --j) {
    r = jet_mul(r, delta);
    r[0] += taylor[j];
  }
  return r;
}

inline RealJet jet_compose(const NonlinearModel& model, const RealJet& rho) {
  return jet_compose(model.taylor(rho[0], rho.order()), rho);
}

}  // namespace wkbnls
