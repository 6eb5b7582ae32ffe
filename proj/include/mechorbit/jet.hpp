#pragma once

#include <Eigen/Dense>

#include <cmath>

namespace mechorbit {

/// Largest chart dimension supported by second-order jets (stack storage).
inline constexpr int kMaxJetDim = 8;

using JetVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxJetDim, 1>;
using JetMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxJetDim, kMaxJetDim>;

/// Second-order forward-mode jet: value, gradient and Hessian with respect to
/// the n chart coordinates.
struct Jet {
  double v = 0.0;
  JetVector d;
  JetMatrix h;

  static Jet constant(double value, int n) {
    Jet j;
    j.v = value;
    j.d = JetVector::Zero(n);
    j.h = JetMatrix::Zero(n, n);
    return j;
  }
  static Jet variable(double value, int index, int n) {
    Jet j = constant(value, n);
    j.d(index) = 1.0;
    return j;
  }
  int dim() const { return static_cast<int>(d.size()); }
};

namespace detail {
// Chain rule for a scalar function with derivatives f1, f2 at a.v.
inline Jet chain(const Jet& a, double f0, double f1, double f2) {
  Jet r;
  r.v = f0;
  r.d = f1 * a.d;
  r.h = f1 * a.h + f2 * (a.d * a.d.transpose());
  return r;
}
}  // namespace detail

inline Jet operator+(const Jet& a, const Jet& b) {
  Jet r;
  r.v = a.v + b.v;
  r.d = a.d + b.d;
  r.h = a.h + b.h;
  return r;
}
inline Jet operator-(const Jet& a, const Jet& b) {
  Jet r;
  r.v = a.v - b.v;
  r.d = a.d - b.d;
  r.h = a.h - b.h;
  return r;
}
inline Jet operator-(const Jet& a) {
  Jet r;
  r.v = -a.v;
  r.d = -a.d;
  r.h = -a.h;
  return r;
}
inline Jet operator*(const Jet& a, const Jet& b) {
  Jet r;
  r.v = a.v * b.v;
  r.d = a.v * b.d + b.v * a.d;
  r.h = a.v * b.h + b.v * a.h + a.d * b.d.transpose() + b.d * a.d.transpose();
  return r;
}
inline Jet operator*(double s, const Jet& a) {
  Jet r;
  r.v = s * a.v;
  r.d = s * a.d;
  r.h = s * a.h;
  return r;
}
inline Jet operator*(const Jet& a, double s) { return s * a; }
inline Jet operator+(const Jet& a, double s) {
  Jet r = a;
  r.v += s;
  return r;
}
inline Jet operator+(double s, const Jet& a) { return a + s; }
inline Jet operator-(const Jet& a, double s) { return a + (-s); }
inline Jet operator-(double s, const Jet& a) { return (-a) + s; }

inline Jet reciprocal(const Jet& a) {
  const double inv = 1.0 / a.v;
  return detail::chain(a, inv, -inv * inv, 2.0 * inv * inv * inv);
}
inline Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
inline Jet operator/(const Jet& a, double s) { return (1.0 / s) * a; }
inline Jet operator/(double s, const Jet& a) { return s * reciprocal(a); }

inline Jet exp(const Jet& a) {
  const double e = std::exp(a.v);
  return detail::chain(a, e, e, e);
}
inline Jet log(const Jet& a) { return detail::chain(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v)); }
inline Jet sin(const Jet& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return detail::chain(a, s, c, -s);
}
inline Jet cos(const Jet& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return detail::chain(a, c, -s, -c);
}
inline Jet tan(const Jet& a) {
  const double t = std::tan(a.v), sec2 = 1.0 + t * t;
  return detail::chain(a, t, sec2, 2.0 * t * sec2);
}
inline Jet tanh(const Jet& a) {
  const double t = std::tanh(a.v), s2 = 1.0 - t * t;
  return detail::chain(a, t, s2, -2.0 * t * s2);
}
inline Jet sqrt(const Jet& a) {
  const double r = std::sqrt(a.v);
  return detail::chain(a, r, 0.5 / r, -0.25 / (r * a.v));
}
/// Integer power; valid for negative bases.
inline Jet ipow(const Jet& a, int k) {
  if (k == 0) return Jet::constant(1.0, a.dim());
  const double p = std::pow(a.v, k);
  const double p1 = k * std::pow(a.v, k - 1);
  const double p2 = (k == 1) ? 0.0 : k * (k - 1) * std::pow(a.v, k - 2);
  return detail::chain(a, p, p1, p2);
}
inline double ipow(double a, int k) { return std::pow(a, k); }
inline Jet pow(const Jet& a, const Jet& b) { return exp(b * log(a)); }

inline double value_of(double x) { return x; }
inline double value_of(const Jet& x) { return x.v; }

}  // namespace mechorbit
