#pragma once

#include "mechorbit/geometry.hpp"
#include "mechorbit/presets.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace mechorbit::fixtures {

inline GeometryBundle flat_bundle(int n, PotentialField v, double half_width = 10.0) {
  return GeometryBundle{ChartDomain::euclidean(n, half_width), MetricField::flat(n), std::move(v)};
}

inline GeometryBundle harmonic(int n = 1, double k = 1.0, double v0 = 0.5) {
  return flat_bundle(n, make_potential_preset("harmonic", n, {{"k", k}, {"V0", v0}}));
}

/// g = exp(2 f) I with f = q1 on R^2, V = q1^2/2 + q2^2 - q1 q2/4 - 1/2.
inline GeometryBundle conformal_quadratic(const char* factor = "q1") {
  GeometryBundle b{ChartDomain::euclidean(2, 3.0), MetricField::conformal(Expression::parse(factor, 2)),
                   make_potential_expression("0.5*q1^2 + q2^2 - 0.25*q1*q2 - 0.5", 2)};
  return b;
}

/// Cylinder S^1 x (0, inf) with g = r^2 dphi^2 + dr^2, coordinates (phi, r).
inline GeometryBundle warped_cylinder() {
  ChartDomain c;
  c.dimension = 2;
  c.periods = {2.0 * std::numbers::pi, std::nullopt};
  c.box_lo = Eigen::Vector2d(0.0, 0.5);
  c.box_hi = Eigen::Vector2d(2.0 * std::numbers::pi, 4.0);
  return GeometryBundle{c, MetricField::warped(Expression::parse("q2^2", 2)),
                        make_potential_expression("0.5*(q2 - 2)^2 + 0.1*sin(q1) - 0.5", 2)};
}

/// Christoffel symbols from a finite-difference metric derivative, with the
/// defining formula written out independently of the library.
inline std::vector<Matrix> christoffel_oracle(const MetricField& m, const Vector& q, double h = 1e-5) {
  const int n = static_cast<int>(q.size());
  std::vector<Matrix> dg(n);
  for (int l = 0; l < n; ++l) {
    Vector a = q, b = q;
    a(l) += h;
    b(l) -= h;
    dg[l] = (m(a) - m(b)) / (2 * h);
  }
  const Matrix ginv = m(q).inverse();
  std::vector<Matrix> gamma(n, Matrix::Zero(n, n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l)
          gamma[k](i, j) += 0.5 * ginv(k, l) * (dg[i](l, j) + dg[j](i, l) - dg[l](i, j));
  return gamma;
}

inline Vector random_vector(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

}  // namespace mechorbit::fixtures
