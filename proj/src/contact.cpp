#include "mechorbit/contact.hpp"

#include "mechorbit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace mechorbit {

Vector contact_vector_field(const GeometryBundle& b, const Vector& q) {
  const Vector grad = grad_potential(b, q);
  const double g2 = grad.dot(metric_at(b, q) * grad);
  return -grad / (1.0 + g2);
}

double contact_function(const GeometryBundle& b, const Vector& q, const Vector& theta) {
  return theta.dot(contact_vector_field(b, q));
}

double xh_of_f_analytic(const LocalGeometry& lg, const Vector& theta) {
  const Vector sharp = lg.g_inv * theta;
  const double g2 = lg.potential.differential.dot(lg.grad);
  const double denom = 1.0 + g2;
  const double term1 = g2 / denom;
  const double term2 = sharp.dot(lg.hess * sharp) / denom;
  const double term3 = 2.0 * theta.dot(lg.grad) * lg.grad.dot(lg.hess * sharp) / (denom * denom);
  return term1 - term2 + term3;
}

double xh_of_f_analytic(const GeometryBundle& b, const Vector& q, const Vector& theta) {
  return xh_of_f_analytic(local_geometry(b, q), theta);
}

double xh_of_f_oracle(const GeometryBundle& b, const Vector& q, const Vector& theta, double delta) {
  Vector qp = q, tp = theta, qm = q, tm = theta;
  rk4_step(b, qp, tp, delta);
  rk4_step(b, qm, tm, -delta);
  return (contact_function(b, qp, tp) - contact_function(b, qm, tm)) / (2.0 * delta);
}

double theta_of_xh(const GeometryBundle& b, const Vector& q, const Vector& theta, double kappa) {
  const LocalGeometry lg = local_geometry(b, q);
  return theta.dot(lg.g_inv * theta) + kappa * xh_of_f_analytic(lg, theta);
}

double a_kappa(double kappa, double v_infinity, double v0, double eps0) {
  const double vi2 = v_infinity * v_infinity, v02 = v0 * v0;
  return std::min({kappa * vi2 / (1.0 + vi2), kappa * v02 / (1.0 + v02), eps0});
}

namespace {

Vector uniform_in_box(const ChartDomain& c, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector q(c.dimension);
  for (int i = 0; i < c.dimension; ++i) {
    const double hi = c.is_periodic(i) ? c.box_lo(i) + c.period(i) : c.box_hi(i);
    q(i) = c.box_lo(i) + (hi - c.box_lo(i)) * unit(rng);
  }
  return q;
}

}  // namespace

ContactCheckReport uniform_contact_scan(const GeometryBundle& b, const ContactScanOptions& opt) {
  if (!(opt.eps0 > 0.0)) throw GeometryError("contact scan needs eps0 > 0");
  if (opt.kappa && !(*opt.kappa > 0.0)) throw GeometryError("contact scan needs kappa > 0");
  if (opt.samples < 1 || opt.c_samples < 1 || opt.band_samples < 1) throw GeometryError("contact scan needs samples");
  const int n = b.dimension();
  ContactCheckReport rep;
  rep.eps0 = opt.eps0;

  const RegularityReport reg = regularity_scan(b, opt.regularity);
  rep.regularity_pass = reg.pass;
  rep.v_infinity = reg.v_infinity;

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  double c_sup = 0.0;
  for (int k = 0; k < opt.c_samples; ++k) {
    const LocalGeometry lg = local_geometry(b, uniform_in_box(b.chart, rng));
    const double g2 = lg.potential.differential.dot(lg.grad);
    c_sup = std::max(c_sup, 3.0 * hess_norm(lg) / (1.0 + g2));
  }
  rep.c_estimate = c_sup * (1.0 + opt.c_margin);
  rep.kappa0 = rep.c_estimate > 0.0 ? 1.0 / (2.0 * rep.c_estimate) : std::numeric_limits<double>::infinity();
  rep.kappa_auto = !opt.kappa;
  rep.kappa = opt.kappa ? *opt.kappa : rep.kappa0;
  if (!std::isfinite(rep.kappa)) rep.kappa = 1.0;

  // V0: smallest |grad V| on the band |V| <= 2 eps0 inside R_K
  const Vector center = opt.regularity.center.size() == n ? opt.regularity.center : Vector::Zero(n);
  const double rk = opt.regularity.inner_radius;
  rep.v0 = std::numeric_limits<double>::infinity();
  const long band_cap = 2000L * opt.band_samples;
  for (long attempt = 0; attempt < band_cap && rep.band_hits < opt.band_samples; ++attempt) {
    const Vector q = uniform_in_box(b.chart, rng);
    double r2 = 0.0;
    for (int i = 0; i < n; ++i)
      if (!b.chart.is_periodic(i)) r2 += (q(i) - center(i)) * (q(i) - center(i));
    if (r2 > rk * rk) continue;
    if (std::abs(b.potential(q)) > 2.0 * opt.eps0) continue;
    rep.v0 = std::min(rep.v0, grad_norm(b, q));
    ++rep.band_hits;
  }
  rep.a_kappa = rep.band_hits > 0 ? a_kappa(rep.kappa, rep.v_infinity, rep.v0, opt.eps0) : 0.0;

  rep.min_theta = std::numeric_limits<double>::infinity();
  rep.min_excess = std::numeric_limits<double>::infinity();
  const long cap = 2000L * opt.samples;
  long attempts = 0;
  while (rep.samples < opt.samples && attempts < cap) {
    ++attempts;
    const double eps = opt.eps0 * (2.0 * unit(rng) - 1.0);
    const Vector q = uniform_in_box(b.chart, rng);
    const double v = b.potential(q);
    if (v > eps) continue;
    const LocalGeometry lg = local_geometry(b, q);
    Vector u(n);
    do {
      for (int i = 0; i < n; ++i) u(i) = normal(rng);
    } while (u.norm() < 1e-12);
    u.normalize();
    const Matrix L = Eigen::LLT<Matrix>(lg.g).matrixL();
    const Vector theta = L * u * std::sqrt(2.0 * (eps - v));
    const double th2 = theta.dot(lg.g_inv * theta);
    const double g2 = lg.potential.differential.dot(lg.grad);
    const double value = th2 + rep.kappa * xh_of_f_analytic(lg, theta);
    rep.min_theta = std::min(rep.min_theta, value);
    rep.min_excess = std::min(rep.min_excess, value - 0.5 * th2 - rep.kappa * g2 / (1.0 + g2));
    if (value <= opt.tolerance) ++rep.degenerate;
    ++rep.samples;
  }
  if (rep.samples == 0) throw GeometryError("no sampleable points: V > eps everywhere in the chart box");

  if (rep.band_hits == 0) {
    rep.reason = "no samples with |V| <= 2 eps0 inside R_K";
  } else if (!(rep.v0 >= opt.v0_floor)) {
    rep.reason = "grad V nearly vanishes near {V = 0} (V0 = " + std::to_string(rep.v0) + ")";
  } else if (!(rep.a_kappa > 0.0)) {
    rep.reason = "a_kappa is not positive";
  } else if (!(rep.min_theta >= 0.0)) {
    rep.reason = "Theta(X_H) negative on a sample";
  } else if (!(rep.min_theta >= rep.a_kappa - opt.tolerance)) {
    rep.reason = "sampled min Theta(X_H) below a_kappa";
  } else {
    rep.pass = true;
  }
  return rep;
}

}  // namespace mechorbit
