#include "mechorbit/solver.hpp"

#include "mechorbit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mechorbit {

ShootingReport verify_orbit(const LoopSpace& ls, const LoopPoint& p, double eps, int steps) {
  if (steps < 1) throw Error("verify_orbit: steps must be positive");
  const GeometryBundle& b = ls.bundle();
  const ChartDomain& chart = b.chart;
  const int dim = ls.dimension();
  ShootingReport rep;
  rep.steps = steps;
  rep.period = std::exp(p.tau);
  const Matrix cp = loop_derivative(ls, p.loop);
  rep.q0 = p.loop.samples.row(0).transpose();
  rep.theta0 = metric_at(b, rep.q0) * (std::exp(-p.tau) * cp.row(0).transpose());

  const double level = hamiltonian_level(eps, p.tau);
  const double h0 = hamiltonian(b, rep.q0, rep.theta0);
  rep.level_deviation = std::abs(h0 - level);
  Vector q = rep.q0, theta = rep.theta0;
  const double dt = rep.period / steps;
  for (int i = 0; i < steps; ++i) {
    rk4_step(b, q, theta, dt);
    const double h = hamiltonian(b, q, theta);
    rep.energy_drift = std::max(rep.energy_drift, std::abs(h - h0));
    rep.level_deviation = std::max(rep.level_deviation, std::abs(h - level));
  }
  Vector dq(dim);
  for (int k = 0; k < dim; ++k) dq(k) = chart.shortest(k, q(k) - rep.q0(k));
  rep.closure_q = dq.norm();
  rep.closure_theta = (theta - rep.theta0).norm();
  rep.closure = std::hypot(rep.closure_q, rep.closure_theta);
  return rep;
}

OrbitSolution make_solution(const Objective& obj, const RefineResult& refined, double grad_tol,
                            const AcceptanceTolerances& tol, const PenaltySchedule& schedule, double a_kappa,
                            int shooting_steps) {
  const LoopSpace& ls = obj.space();
  const double eps = obj.eps();
  OrbitSolution s;
  s.point = refined.point;
  s.eps = eps;
  s.refine = refined;
  s.penalized_action = obj.value(s.point);
  s.action = action(ls, s.point);
  s.grad_norm = obj.gradient_norm(s.point);
  s.grad_tolerance = grad_tol;
  s.hamiltonian_residual = level_residual(ls, s.point, eps);
  s.level_tolerance = tol.level * (1 + std::abs(hamiltonian_level(eps, s.point.tau)));
  s.euler_lagrange = euler_lagrange_residual(ls, s.point).l2;
  s.period = std::exp(s.point.tau);
  s.penalty = penalty_diagnostics(ls, s.point, eps, grad_tol, s.level_tolerance, schedule, a_kappa);
  s.shooting = verify_orbit(ls, s.point, eps, shooting_steps);
  s.closure = s.shooting.closure;

  if (!(s.grad_norm <= grad_tol))
    s.reason = "gradient norm " + std::to_string(s.grad_norm) + " above " + std::to_string(grad_tol);
  else if (!(s.hamiltonian_residual <= s.level_tolerance))
    s.reason = "Hamiltonian level residual " + std::to_string(s.hamiltonian_residual) + " above " +
               std::to_string(s.level_tolerance);
  else if (!(s.euler_lagrange <= tol.euler_lagrange))
    s.reason = "Euler-Lagrange residual " + std::to_string(s.euler_lagrange) + " above " +
               std::to_string(tol.euler_lagrange);
  else if (!(s.closure <= tol.closure))
    s.reason = "shooting closure " + std::to_string(s.closure) + " above " + std::to_string(tol.closure);
  else if (!s.penalty.residuals_ok)
    s.reason = "critical-point identities not satisfied";
  s.accepted = s.reason.empty();
  return s;
}

LoopPoint resample(const LoopSpace& to, const LoopSpace& from, const LoopPoint& p) {
  const int n = from.size(), m = to.size(), dim = from.dimension();
  if (to.dimension() != dim) throw Error("resample: dimension mismatch");
  const Matrix u = from.unwrap(p.loop);
  const Vector d = from.drift(p.loop);
  // Periodic part u_i - d s_i, expanded in the trigonometric basis of n points.
  Matrix per = u;
  for (int i = 0; i < n; ++i) per.row(i) -= (static_cast<double>(i) / n) * d.transpose();
  const int kmax = n / 2;
  Matrix a = Matrix::Zero(kmax + 1, dim), bcoef = Matrix::Zero(kmax + 1, dim);
  for (int k = 0; k <= kmax; ++k)
    for (int i = 0; i < n; ++i) {
      const double ang = 2 * std::numbers::pi * k * i / n;
      a.row(k) += std::cos(ang) * per.row(i);
      bcoef.row(k) += std::sin(ang) * per.row(i);
    }
  Matrix out(m, dim);
  for (int j = 0; j < m; ++j) {
    const double s = static_cast<double>(j) / m;
    Eigen::RowVectorXd v = a.row(0) / n + s * d.transpose();
    for (int k = 1; k <= kmax; ++k) {
      // The Nyquist mode of an even grid carries half weight and no sine part.
      const double w = (2 * k == n) ? 1.0 / n : 2.0 / n;
      const double ang = 2 * std::numbers::pi * k * s;
      v += w * std::cos(ang) * a.row(k);
      if (2 * k != n) v += w * std::sin(ang) * bcoef.row(k);
    }
    out.row(j) = v;
  }
  return LoopPoint{to.make_loop(out, p.loop.winding), p.tau};
}

ContinuationResult continue_epsilon(const LoopSpace& ls, const Symmetry& sym, const OrbitSolution& first,
                                    const PenaltySchedule& schedule, const ContinuationOptions& opt) {
  schedule.validate();
  ContinuationResult res;
  res.solutions.push_back(first);
  if (!first.accepted) {
    res.aborted = true;
    res.message = "first solution not accepted: " + first.reason;
  }
  for (std::size_t k = 1; !res.aborted && k < schedule.eps.size(); ++k) {
    const OrbitSolution& prev = res.solutions.back();
    const Objective obj(ls, schedule.eps[k], sym);
    RefineOptions ro = opt.refine;
    ro.tol = std::min(ro.tol, schedule.tolerance(k));
    const RefineResult r = refine(obj, prev.point, ro);
    OrbitSolution s = make_solution(obj, r, schedule.tolerance(k), opt.tolerances, schedule, opt.a_kappa,
                                    opt.shooting_steps);
    const double jump = std::abs(s.point.tau - prev.point.tau);
    res.solutions.push_back(s);
    if (jump > opt.tau_jump) {
      res.aborted = true;
      res.message = "tau moved by " + std::to_string(jump) + " at eps " + std::to_string(schedule.eps[k]);
    } else if (!s.penalty.tau_bounds.pass()) {
      res.aborted = true;
      res.message = "tau outside its bounds at eps " + std::to_string(schedule.eps[k]);
    } else if (!s.accepted) {
      res.aborted = true;
      res.message = "not accepted at eps " + std::to_string(schedule.eps[k]) + ": " + s.reason;
    }
  }

  double lo = res.solutions.front().point.tau, hi = lo;
  for (const OrbitSolution& s : res.solutions) {
    lo = std::min(lo, s.point.tau);
    hi = std::max(hi, s.point.tau);
  }
  res.t3 = lo;
  res.tau_spread = hi - lo;
  for (OrbitSolution& s : res.solutions) s.penalty.t3 = res.t3;

  std::vector<const OrbitSolution*> ok;
  for (const OrbitSolution& s : res.solutions)
    if (s.accepted) ok.push_back(&s);
  if (ok.size() >= 2) {
    const OrbitSolution& x = *ok[ok.size() - 2];
    const OrbitSolution& y = *ok.back();
    auto at_zero = [&](double fx, double fy) { return fy - y.eps * (fx - fy) / (x.eps - y.eps); };
    res.action_extrapolated = at_zero(x.action, y.action);
    res.tau_extrapolated = at_zero(x.point.tau, y.point.tau);
  }
  return res;
}

SolveReport solve(const GeometryBundle& bundle, const LinkingConfig& linking, const PenaltySchedule& schedule,
                  const SolveOptions& opt) {
  schedule.validate();
  SolveReport rep;

  RegularityOptions ro = opt.regularity;
  ro.seed = opt.seed;
  try {
    rep.regularity = regularity_scan(bundle, ro);
  } catch (const Error& e) {
    throw SolverError("regularity", e.what());
  }
  rep.advisory = !rep.regularity.pass;

  if (opt.run_contact) {
    ContactScanOptions co = opt.contact;
    co.seed = opt.seed;
    try {
      rep.contact = uniform_contact_scan(bundle, co);
      if (rep.contact->pass) rep.a_kappa = rep.contact->a_kappa;
    } catch (const Error& e) {
      rep.contact_error = e.what();
    }
  }

  const LoopSpace ls(bundle, opt.samples, opt.scheme);
  rep.linking = build_linking_endpoints(ls, linking, opt.seed);

  const Objective obj(ls, schedule.eps.front(), rep.linking.symmetry);
  rep.a_bar = sublevel_threshold(obj, rep.linking);
  const MinimaxPath path = straight_path(obj, rep.linking.low, rep.linking.high, opt.path_nodes);
  rep.mountain_pass = mountain_pass(obj, path, rep.a_bar, opt.mountain_pass);
  const MountainPassResult& mp = rep.mountain_pass;
  rep.sandwich = rep.a_bar < mp.candidate_value && mp.candidate_value <= mp.initial_max;

  ContinuationOptions co = opt.continuation;
  co.a_kappa = rep.a_kappa;
  RefineOptions rf = co.refine;
  rf.tol = std::min(rf.tol, schedule.tolerance(0));
  const RefineResult first_refine = refine(obj, mp.candidate, rf);
  const OrbitSolution first = make_solution(obj, first_refine, schedule.tolerance(0), co.tolerances, schedule,
                                            rep.a_kappa, co.shooting_steps);
  rep.continuation = continue_epsilon(ls, rep.linking.symmetry, first, schedule, co);
  rep.final_solution = rep.continuation.solutions.back();

  rep.converged = !rep.continuation.aborted && rep.final_solution.accepted && rep.sandwich && mp.monotone;
  if (rep.converged)
    rep.status = "converged";
  else if (!mp.monotone)
    rep.status = "mountain-pass maximum increased";
  else if (!rep.sandwich)
    rep.status = "candidate outside (a_bar, initial max]";
  else
    rep.status = rep.continuation.message;
  return rep;
}

}  // namespace mechorbit
