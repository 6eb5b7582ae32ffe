#include "mechorbit/penalty.hpp"

#include "mechorbit/errors.hpp"

#include <cmath>
#include <limits>

namespace mechorbit {

double penalty_term(double eps, double tau) { return eps * (std::exp(-tau) + std::exp(0.5 * tau)); }

double penalty_slope(double eps, double tau) { return eps * (-std::exp(-tau) + 0.5 * std::exp(0.5 * tau)); }

PenalizedEval evaluate_penalized(const LoopSpace& ls, const LoopPoint& p, double eps, bool with_gradient) {
  PenalizedEval e;
  e.base = evaluate_action(ls, p, with_gradient);
  e.eps = eps;
  e.value = e.base.action + penalty_term(eps, p.tau);
  e.d_tau = e.base.d_tau + penalty_slope(eps, p.tau);
  return e;
}

double penalized_action(const LoopSpace& ls, const LoopPoint& p, double eps) {
  return evaluate_penalized(ls, p, eps, false).value;
}

double penalized_variation(const LoopSpace& ls, const LoopPoint& p, const TangentField& f, double eps) {
  const PenalizedEval e = evaluate_penalized(ls, p, eps);
  return e.base.partials().cwiseProduct(f.xi).sum() + e.d_tau * f.sigma;
}

TangentField penalized_gradient(const LoopSpace& ls, const LoopPoint& p, double eps) {
  const PenalizedEval e = evaluate_penalized(ls, p, eps);
  return h1_representative(ls, e.base.partials(), e.d_tau);
}

PsResiduals ps_identity_residuals(const LoopSpace& ls, const LoopPoint& p, double eps, double a_eps) {
  const PenalizedEval e = evaluate_penalized(ls, p, eps, false);
  const double em = std::exp(-p.tau), ep = std::exp(p.tau), eh = std::exp(0.5 * p.tau);
  PsResiduals r;
  r.r1 = -e.d_tau;
  r.r2 = e.value - a_eps;
  r.raw1 = em * e.base.energy + eps * (2 * em + 0.5 * eh) - a_eps;
  r.raw1_doubled = 2 * em * e.base.energy + eps * (2 * em + 0.5 * eh) - a_eps;
  r.raw2 = ep * e.base.potential - 0.75 * eps * eh + 0.5 * a_eps;
  return r;
}

double hamiltonian_level(double eps, double tau) { return eps * (-std::exp(-2 * tau) + 0.5 * std::exp(-0.5 * tau)); }

double level_residual(const LoopSpace& ls, const LoopPoint& p, double eps) {
  const HamiltonianProfile h = hamiltonian_along_loop(ls, p);
  return (h.values.array() - hamiltonian_level(eps, p.tau)).abs().maxCoeff();
}

double level_mean_residual(const LoopSpace& ls, const LoopPoint& p, double eps) {
  return std::abs(hamiltonian_along_loop(ls, p).mean - hamiltonian_level(eps, p.tau));
}

namespace {

// Root of f(t) = c on a monotone bracket [lo, hi].
template <class F>
double bisect(F f, double c, double lo, double hi) {
  const bool up = f(hi) > f(lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if ((f(mid) > c) == up) hi = mid;
    else lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TauBounds tau_bound_check(double tau, double eps, double a2, double a_kappa) {
  TauBounds t;
  t.tau = tau;
  auto est2 = [eps](double x) { return eps * (2 * std::exp(-x) + 0.5 * std::exp(0.5 * x)); };
  t.est2_value = est2(tau);
  t.est2_bound = a2 + 1;
  t.est2_ok = t.est2_value <= t.est2_bound;
  if (eps > 0) {
    // est2 is convex with minimum at tau = log(8) * 2/3.
    const double tmin = 2.0 * std::log(8.0) / 3.0;
    if (est2(tmin) > t.est2_bound) {
      t.t0 = t.t1 = std::numeric_limits<double>::quiet_NaN();
    } else {
      double lo = tmin - 1, hi = tmin + 1;
      while (est2(lo) <= t.est2_bound) lo -= 2 * (tmin - lo);
      while (est2(hi) <= t.est2_bound) hi += 2 * (hi - tmin);
      t.t0 = bisect(est2, t.est2_bound, lo, tmin);
      t.t1 = bisect(est2, t.est2_bound, tmin, hi);
    }
  } else {
    t.t0 = -std::numeric_limits<double>::infinity();
    t.t1 = std::numeric_limits<double>::infinity();
  }
  t.t2 = a_kappa > 0 ? std::max(0.0, std::log(a2 / a_kappa)) : std::numeric_limits<double>::infinity();
  t.upper_ok = tau <= t.t2;
  return t;
}

void PenaltySchedule::validate() const {
  if (eps.empty()) throw Error("penalty schedule is empty");
  for (std::size_t k = 0; k < eps.size(); ++k) {
    if (!(eps[k] > 0) || !std::isfinite(eps[k])) throw Error("penalty schedule values must be positive");
    if (k > 0 && !(eps[k] < eps[k - 1])) throw Error("penalty schedule must be strictly decreasing");
  }
  if (!tolerances.empty()) {
    if (tolerances.size() != eps.size()) throw Error("one tolerance per eps value is required");
    for (double t : tolerances)
      if (!(t > 0)) throw Error("tolerances must be positive");
  }
  if (!(default_tolerance > 0)) throw Error("tolerance must be positive");
  if (!(a1 > 0)) throw Error("action window lower end a1 must be positive");
  if (!(a2 > a1)) throw Error("action window needs a1 < a2");
}

PenaltyDiagnostics penalty_diagnostics(const LoopSpace& ls, const LoopPoint& p, double eps, double tol,
                                       double level_tolerance, const PenaltySchedule& schedule, double a_kappa) {
  PenaltyDiagnostics d;
  const PenalizedEval e = evaluate_penalized(ls, p, eps, false);
  d.eps = eps;
  d.tau = p.tau;
  d.a_eps = e.value;
  d.action = e.base.action;
  d.residuals = ps_identity_residuals(ls, p, eps, e.value);
  d.eps_tilde = hamiltonian_level(eps, p.tau);
  d.level_residual = level_residual(ls, p, eps);
  d.level_mean_residual = level_mean_residual(ls, p, eps);
  d.tau_bounds = tau_bound_check(p.tau, eps, schedule.a2, a_kappa);
  d.in_window = schedule.a1 <= d.action && d.action <= schedule.a2;
  d.residuals_ok = std::abs(d.residuals.r1) <= 10 * tol && std::abs(d.residuals.r2) <= 10 * tol;
  d.level_ok = d.level_mean_residual <= 10 * tol * (1 + std::exp(-2 * p.tau)) && d.level_residual <= level_tolerance;
  return d;
}

}  // namespace mechorbit
