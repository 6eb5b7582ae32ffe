#include "mechorbit/errors.hpp"
#include "mechorbit/solver.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace mechorbit;
using std::numbers::pi;

namespace {

LoopPoint cosine(const LoopSpace& ls, double tau, double amp = 1.0) {
  Matrix m(ls.size(), 1);
  for (int i = 0; i < ls.size(); ++i) m(i, 0) = amp * std::cos(2 * pi * i / ls.size());
  return LoopPoint{ls.make_loop(m), tau};
}

LinkingConfig oscillator_linking(int dim) {
  LinkingConfig cfg;
  cfg.base_points = {Vector::Zero(dim)};
  if (dim == 1) {
    cfg.waypoints = {Vector::Constant(1, 2.0), Vector::Constant(1, -2.0)};
  } else {
    cfg.waypoints = {Eigen::Vector2d(2, 0), Eigen::Vector2d(0, 2)};
    cfg.symmetry = SymmetryMode::kRotation;
  }
  return cfg;
}

const SolveReport& oscillator_run() {
  static const GeometryBundle b = fixtures::harmonic(1);
  static const SolveReport r = solve(b, oscillator_linking(1), PenaltySchedule{}, SolveOptions{});
  return r;
}

}  // namespace

TEST(VerifyOrbit, EquilibriumClosesExactly) {
  const auto b = fixtures::harmonic(1, 1.0, 0.0);
  const LoopSpace ls(b, 32);
  const ShootingReport r = verify_orbit(ls, LoopPoint{ls.constant_loop(Vector::Zero(1)), 0.3}, 0.0, 10000);
  EXPECT_EQ(r.closure, 0.0);
  EXPECT_EQ(r.energy_drift, 0.0);
  EXPECT_EQ(r.steps, 10000);
  EXPECT_THROW(verify_orbit(ls, LoopPoint{ls.constant_loop(Vector::Zero(1)), 0.3}, 0.0, 0), Error);
}

TEST(VerifyOrbit, OscillatorAndCorruptedPeriod) {
  const double eps = 1e-5;
  const auto b = fixtures::harmonic(1);
  const LoopSpace ls(b, 128, DerivativeScheme::kSpectral);
  const Objective obj(ls, eps, Symmetry::reflection(Vector::Zero(1)));
  const RefineResult r = refine(obj, cosine(ls, std::log(2 * pi)), RefineOptions{});
  ASSERT_TRUE(r.converged);
  const ShootingReport good = verify_orbit(ls, r.point, eps, 10000);
  EXPECT_LE(good.closure, 1e-4);
  EXPECT_NEAR(good.period, std::exp(r.point.tau), 0.0);
  EXPECT_LE(good.level_deviation, 1e-8);
  // q(0) = A, theta(0) = 0 for the cosine.
  EXPECT_NEAR(good.theta0(0), 0.0, 1e-12);

  LoopPoint bad = r.point;
  bad.tau += 0.01 * std::abs(bad.tau);
  const ShootingReport worse = verify_orbit(ls, bad, eps, 10000);
  EXPECT_GE(worse.closure, 100 * good.closure);
  EXPECT_GT(worse.closure, 1e-3);
}

TEST(Resample, TrigonometricInterpolation) {
  const auto b = fixtures::harmonic(1);
  const LoopSpace coarse(b, 64), fine(b, 256);
  const LoopPoint p = cosine(coarse, 0.5, 1.3);
  const LoopPoint q = resample(fine, coarse, p);
  EXPECT_LE((q.loop.samples - cosine(fine, 0.5, 1.3).loop.samples).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_EQ(q.tau, p.tau);
  const LoopPoint back = resample(coarse, fine, q);
  EXPECT_LE((back.loop.samples - p.loop.samples).cwiseAbs().maxCoeff(), 1e-13);

  // A winding loop on the cylinder keeps its winding and drift.
  const auto cyl = fixtures::warped_cylinder();
  const LoopSpace c64(cyl, 64), c128(cyl, 128);
  Matrix m(64, 2);
  for (int i = 0; i < 64; ++i) m.row(i) = Eigen::RowVector2d(2 * pi * i / 64 + 0.1 * std::sin(4 * pi * i / 64), 2 + 0.3 * std::cos(2 * pi * i / 64));
  Eigen::VectorXi w(2);
  w << 1, 0;
  const LoopPoint wind{c64.make_loop(m, w), 0.0};
  const LoopPoint up = resample(c128, c64, wind);
  EXPECT_EQ(up.loop.winding(0), 1);
  for (int i = 0; i < 128; ++i) {
    const double s = i / 128.0;
    EXPECT_NEAR(up.loop.samples(i, 1), 2 + 0.3 * std::cos(2 * pi * s), 1e-13);
  }
}

TEST(ContinueEpsilon, SingleEntrySchedule) {
  const auto b = fixtures::harmonic(1);
  const LoopSpace ls(b, 64, DerivativeScheme::kSpectral);
  const Symmetry sym = Symmetry::reflection(Vector::Zero(1));
  const Objective obj(ls, 1e-3, sym);
  const RefineResult r = refine(obj, cosine(ls, std::log(2 * pi)), RefineOptions{});
  PenaltySchedule s;
  s.eps = {1e-3};
  const OrbitSolution first = make_solution(obj, r, s.tolerance(0), AcceptanceTolerances{}, s, 0.0, 10000);
  ASSERT_TRUE(first.accepted) << first.reason;
  const ContinuationResult c = continue_epsilon(ls, sym, first, s, ContinuationOptions{});
  EXPECT_EQ(c.solutions.size(), 1u);
  EXPECT_FALSE(c.action_extrapolated.has_value());
  EXPECT_FALSE(c.tau_extrapolated.has_value());
  EXPECT_FALSE(c.aborted);
  EXPECT_EQ(c.tau_spread, 0.0);
}

TEST(ContinueEpsilon, RejectedStartAborts) {
  const auto b = fixtures::harmonic(1);
  const LoopSpace ls(b, 64);
  const Objective obj(ls, 1e-2);
  RefineResult r;
  r.point = cosine(ls, 0.5, 2.0);
  const OrbitSolution first = make_solution(obj, r, 1e-8, AcceptanceTolerances{}, PenaltySchedule{}, 0.0, 1000);
  EXPECT_FALSE(first.accepted);
  EXPECT_NE(first.reason.find("gradient"), std::string::npos);
  const ContinuationResult c = continue_epsilon(ls, Symmetry{}, first, PenaltySchedule{}, ContinuationOptions{});
  EXPECT_TRUE(c.aborted);
  EXPECT_EQ(c.solutions.size(), 1u);
}

TEST(Solve, OscillatorEndToEnd) {
  const SolveReport& r = oscillator_run();
  ASSERT_TRUE(r.converged) << r.status;
  EXPECT_FALSE(r.advisory);
  const OrbitSolution& s = r.final_solution;
  EXPECT_EQ(s.eps, 1e-5);
  EXPECT_NEAR(s.action, pi, 0.01 * pi);
  EXPECT_NEAR(s.period, 2 * pi, 0.02 * pi);
  EXPECT_EQ(r.continuation.solutions.size(), 6u);
  ASSERT_TRUE(r.continuation.action_extrapolated.has_value());
  EXPECT_NEAR(*r.continuation.action_extrapolated, pi, 1e-3);
  EXPECT_LE(r.continuation.tau_spread, 0.05);
  double t3 = r.continuation.solutions.front().point.tau;
  for (const OrbitSolution& x : r.continuation.solutions) t3 = std::min(t3, x.point.tau);
  EXPECT_EQ(r.continuation.t3, t3);
  EXPECT_TRUE(r.sandwich);
  EXPECT_TRUE(r.mountain_pass.monotone);
  EXPECT_GT(r.a_kappa, 0.0);
}

TEST(Solve, AcceptanceCoupling) {
  for (const OrbitSolution& s : oscillator_run().continuation.solutions) {
    ASSERT_TRUE(s.accepted) << s.reason;
    EXPECT_LE(s.grad_norm, s.grad_tolerance);
    EXPECT_LE(s.hamiltonian_residual, s.level_tolerance);
    EXPECT_LE(s.euler_lagrange, AcceptanceTolerances{}.euler_lagrange);
    EXPECT_LE(s.closure, AcceptanceTolerances{}.closure);
    EXPECT_TRUE(s.penalty.residuals_ok);
    EXPECT_TRUE(s.penalty.level_ok);
    EXPECT_TRUE(s.penalty.in_window);
    EXPECT_TRUE(s.penalty.tau_bounds.pass());
    EXPECT_NEAR(s.penalty.eps_tilde, hamiltonian_level(s.eps, s.point.tau), 0.0);
  }
}

TEST(Solve, Deterministic) {
  const auto b = fixtures::harmonic(1);
  PenaltySchedule s;
  s.eps = {1e-2, 1e-3};
  SolveOptions opt;
  opt.samples = 64;
  const SolveReport x = solve(b, oscillator_linking(1), s, opt);
  const SolveReport y = solve(b, oscillator_linking(1), s, opt);
  EXPECT_EQ(x.final_solution.point.loop.samples, y.final_solution.point.loop.samples);
  EXPECT_EQ(x.final_solution.point.tau, y.final_solution.point.tau);
  EXPECT_EQ(x.mountain_pass.max_trace, y.mountain_pass.max_trace);
}

TEST(Solve, IsotropicOscillatorCircle) {
  const auto b = fixtures::harmonic(2);
  const SolveReport r = solve(b, oscillator_linking(2), PenaltySchedule{}, SolveOptions{});
  ASSERT_TRUE(r.converged) << r.status;
  const OrbitSolution& s = r.final_solution;
  EXPECT_NEAR(s.action, pi, 0.02 * pi);
  for (int i = 0; i < s.point.loop.size(); ++i)
    EXPECT_NEAR(s.point.loop.samples.row(i).norm(), 1 / std::sqrt(2.0), 0.02 / std::sqrt(2.0));
}

TEST(Solve, IrregularPotentialIsAdvisory) {
  // A fast oscillation far out breaks the Hessian-to-gradient decay; the
  // orbit near the origin is unaffected.
  const auto b = fixtures::flat_bundle(1, make_potential_expression("0.5*q1^2 - 0.5 + 0.5*exp(-(q1^2 - 64)^2/100)*cos(30*q1)", 1));
  PenaltySchedule s;
  s.eps = {1e-2, 1e-3};
  SolveOptions opt;
  opt.samples = 64;
  opt.run_contact = false;
  const SolveReport r = solve(b, oscillator_linking(1), s, opt);
  EXPECT_FALSE(r.regularity.pass);
  EXPECT_TRUE(r.advisory);
  EXPECT_FALSE(r.contact.has_value());
  EXPECT_FALSE(r.continuation.solutions.empty());
  EXPECT_NEAR(r.final_solution.action, pi, 0.01 * pi);
}

TEST(Solve, StageLabels) {
  const auto b = fixtures::harmonic(1);
  LinkingConfig cfg = oscillator_linking(1);
  cfg.base_points = {Vector::Constant(1, 2.0)};
  try {
    solve(b, cfg, PenaltySchedule{}, SolveOptions{});
    FAIL() << "expected a linking failure";
  } catch (const SolverError& e) {
    EXPECT_EQ(e.stage(), "linking");
  }
  PenaltySchedule bad;
  bad.eps = {1e-3, 1e-2};
  EXPECT_THROW(solve(b, oscillator_linking(1), bad, SolveOptions{}), Error);
}
