#pragma once

#include "mechorbit/geometry.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace mechorbit {

/// v(q) = -grad V / (1 + |grad V|^2).
Vector contact_vector_field(const GeometryBundle& b, const Vector& q);

/// f(q, theta) = theta(v(q)).
double contact_function(const GeometryBundle& b, const Vector& q, const Vector& theta);

/// Closed form of the derivative of f along X_H.
double xh_of_f_analytic(const GeometryBundle& b, const Vector& q, const Vector& theta);
double xh_of_f_analytic(const LocalGeometry& lg, const Vector& theta);

/// Central difference of f along one RK4 step of size +-delta.
double xh_of_f_oracle(const GeometryBundle& b, const Vector& q, const Vector& theta, double delta);

/// Theta(X_H) = |theta|^2 + kappa X_H(f).
double theta_of_xh(const GeometryBundle& b, const Vector& q, const Vector& theta, double kappa);

double a_kappa(double kappa, double v_infinity, double v0, double eps0);

struct ContactScanOptions {
  double eps0 = 0.05;
  std::optional<double> kappa;  // empty: kappa0
  double c_margin = 0.1;        // safety factor on the sampled C
  int samples = 2000;           // points of the energy surfaces
  int c_samples = 4000;         // box samples for C
  int band_samples = 2000;      // samples of |V| <= 2 eps0 inside inner_radius
  double v0_floor = 1e-2;
  double tolerance = 1e-9;
  RegularityOptions regularity;  // inner_radius doubles as R_K for the band
  std::uint64_t seed = 1;
};

struct ContactCheckReport {
  double kappa = 0.0;
  bool kappa_auto = false;
  double c_estimate = 0.0;
  double kappa0 = 0.0;
  double v_infinity = 0.0;
  double v0 = 0.0;
  double eps0 = 0.0;
  double a_kappa = 0.0;
  double min_theta = 0.0;
  double min_excess = 0.0;  // Theta(X_H) - |theta|^2/2 - kappa G/(1+G)
  int samples = 0;
  int band_hits = 0;
  int degenerate = 0;  // samples with Theta(X_H) <= tolerance
  bool regularity_pass = false;
  bool pass = false;
  std::string reason;
};

ContactCheckReport uniform_contact_scan(const GeometryBundle& b, const ContactScanOptions& opt);

}  // namespace mechorbit
