#include "mechorbit/errors.hpp"
#include "mechorbit/refine.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

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

LinkingConfig oscillator_linking() {
  LinkingConfig cfg;
  cfg.base_points = {Vector::Zero(1)};
  cfg.waypoints = {Vector::Constant(1, 2.0), Vector::Constant(1, -2.0)};
  return cfg;
}

}  // namespace

TEST(SeedLoop, DwellsAtPositiveWaypoints) {
  const auto b = fixtures::harmonic(1);
  const LoopSpace ls(b, 128);
  const DiscreteLoop seed = seed_loop(ls, {Vector::Constant(1, 2.0), Vector::Constant(1, -2.0)}, 0.9);
  int at_waypoint = 0;
  double mean_v = 0.0;
  for (int i = 0; i < ls.size(); ++i) {
    const double q = seed.samples(i, 0);
    if (std::abs(std::abs(q) - 2.0) < 1e-12) ++at_waypoint;
    mean_v += (0.5 * q * q - 0.5) / ls.size();
  }
  EXPECT_GE(at_waypoint, 0.9 * ls.size() - 2);
  EXPECT_GT(mean_v, 0.0);
  EXPECT_GT(potential_integral(ls, seed), 0.0);
}

TEST(LinkingEndpoints, OscillatorConstruction) {
  const auto b = fixtures::harmonic(1);
  const LoopSpace ls(b, 128);
  const LinkingEndpoints e = build_linking_endpoints(ls, oscillator_linking(), 1);
  EXPECT_LT(e.sigma1, e.sigma2);
  EXPECT_DOUBLE_EQ(e.a, e.b / 2);
  EXPECT_DOUBLE_EQ(e.v_max, 0.5);
  EXPECT_NEAR(e.min_potential, -0.5, 1e-12);
  EXPECT_DOUBLE_EQ(e.b, 0.05);
  EXPECT_NEAR(e.sigma1, std::log(e.b / (2 * e.v_max)) - 0.5, 1e-14);
  EXPECT_NEAR(e.sigma2, std::max(std::log(e.energy_max / e.b), e.sigma1) + 0.5, 1e-14);
  EXPECT_LE(e.action_low, e.a);
  EXPECT_LE(e.action_high, e.a);
  EXPECT_NEAR(action(ls, e.low), e.action_low, 1e-14);
  EXPECT_GT(e.seed_potential, 0.0);
  EXPECT_TRUE(e.symmetry.enabled);
  EXPECT_EQ(e.symmetry.order, 2);
}

TEST(LinkingEndpoints, RejectsBadSeeds) {
  const auto b = fixtures::harmonic(1);
  const LoopSpace ls(b, 64);
  LinkingConfig cfg = oscillator_linking();
  cfg.base_points = {Vector::Constant(1, 1.0)};  // V = 0
  EXPECT_THROW(build_linking_endpoints(ls, cfg, 1), SolverError);
  cfg = oscillator_linking();
  cfg.waypoints = {Vector::Constant(1, 0.5)};
  EXPECT_THROW(build_linking_endpoints(ls, cfg, 1), SolverError);
  cfg.waypoints.clear();
  EXPECT_THROW(build_linking_endpoints(ls, cfg, 1), SolverError);
}

TEST(LinkingEndpoints, SmallerGapLowersSigma1) {
  const auto b = fixtures::harmonic(1);
  const LoopSpace ls(b, 64);
  double last = std::numeric_limits<double>::infinity();
  for (double gap : {0.05, 0.02, 0.005}) {
    LinkingConfig cfg = oscillator_linking();
    cfg.b = gap;
    const LinkingEndpoints e = build_linking_endpoints(ls, cfg, 1);
    EXPECT_NEAR(e.sigma1, std::log(gap) - 0.5, 1e-14);
    EXPECT_LT(e.sigma1, last);
    last = e.sigma1;
  }
}

TEST(LinkingEndpoints, SymmetrySelection) {
  const auto b1 = fixtures::harmonic(1);
  const LoopSpace ls1(b1, 64);
  LinkingConfig cfg = oscillator_linking();
  cfg.symmetry = SymmetryMode::kRotation;
  EXPECT_THROW(build_linking_endpoints(ls1, cfg, 1), SolverError);
  cfg.symmetry = SymmetryMode::kNone;
  EXPECT_FALSE(build_linking_endpoints(ls1, cfg, 1).symmetry.enabled);

  const auto b2 = fixtures::harmonic(2);
  const LoopSpace ls2(b2, 64);
  LinkingConfig c2;
  c2.base_points = {Vector::Zero(2)};
  c2.waypoints = {Eigen::Vector2d(2, 0), Eigen::Vector2d(0, 2)};
  c2.symmetry = SymmetryMode::kRotation;
  const LinkingEndpoints e = build_linking_endpoints(ls2, c2, 1);
  EXPECT_EQ(e.symmetry.order, 4);
  const Vector q = e.symmetry.act(Eigen::Vector2d(1, 0));
  EXPECT_NEAR(q(0), 0.0, 1e-15);
  EXPECT_NEAR(q(1), 1.0, 1e-15);

  const auto cyl = fixtures::warped_cylinder();
  std::string why;
  EXPECT_FALSE(symmetry_invariant(cyl, Symmetry::reflection(Eigen::Vector2d(0, 2)), 1, &why));
  EXPECT_FALSE(why.empty());
  EXPECT_FALSE(symmetry_invariant(fixtures::conformal_quadratic(), Symmetry::reflection(Vector::Zero(2)), 1));
  EXPECT_TRUE(symmetry_invariant(b2, Symmetry::rotation_about(Vector::Zero(2), 4), 1));
}

TEST(Symmetry, RotationProjection) {
  std::mt19937_64 rng(3);
  const auto b = fixtures::harmonic(2);
  const LoopSpace ls(b, 64);
  const Symmetry sym = Symmetry::rotation_about(Eigen::Vector2d(0.3, -0.2), 4);
  const LoopPoint p{ls.make_loop(fixtures::random_vector(rng, 128, -1, 1).reshaped(64, 2)), 0.4};
  const LoopPoint s = sym.project(ls, p);
  for (int i = 0; i < 48; ++i) {
    const Vector lhs = s.loop.samples.row(i + 16).transpose();
    EXPECT_LE((lhs - sym.act(s.loop.samples.row(i).transpose())).norm(), 1e-14);
  }
  EXPECT_LE((sym.project(ls, s).loop.samples - s.loop.samples).norm(), 1e-14);
  EXPECT_EQ(s.tau, p.tau);

  // A circle about the center traversed once is invariant.
  Matrix c(64, 2);
  for (int i = 0; i < 64; ++i) c.row(i) = Eigen::RowVector2d(0.3 + std::cos(2 * pi * i / 64), -0.2 + std::sin(2 * pi * i / 64));
  const LoopPoint circle{ls.make_loop(c), 0.0};
  EXPECT_LE((sym.project(ls, circle).loop.samples - c).norm(), 1e-13);

  const TangentField f{fixtures::random_vector(rng, 128, -1, 1).reshaped(64, 2), 0.7};
  const TangentField g = sym.project(f);
  EXPECT_LE((sym.project(g).xi - g.xi).norm(), 1e-14);
  EXPECT_EQ(g.sigma, f.sigma);
}

TEST(Descend, CriticalPointUnchanged) {
  const auto b = fixtures::harmonic(1);
  const LoopSpace ls(b, 64, DerivativeScheme::kSpectral);
  const LoopPoint orbit = cosine(ls, std::log(2 * pi));
  const Objective obj(ls, 0.0, Symmetry::reflection(Vector::Zero(1)));
  const DescentResult d = descend(obj, orbit, StepPolicy{}, 1e-8, 100);
  EXPECT_TRUE(d.converged);
  EXPECT_EQ(d.iterations, 0);
  EXPECT_LE((d.point.loop.samples - orbit.loop.samples).norm(), 1e-14);
  EXPECT_EQ(d.point.tau, orbit.tau);
  EXPECT_THROW(descend(obj, orbit, StepPolicy{}, 0.0, 10), Error);
}

TEST(Descend, ConstantLoopDriftsToSmallerAction) {
  // A of the constant loop at q is -e^tau V(q): descent pushes q out of
  // {V < 0} and the action is unbounded below from there.
  const auto b = fixtures::harmonic(1);
  const LoopSpace ls(b, 32);
  const Objective obj(ls, 0.0);
  const LoopPoint p{ls.constant_loop(Vector::Constant(1, 0.3)), -1.0};
  EXPECT_NEAR(obj.value(p), -std::exp(-1.0) * (0.045 - 0.5), 1e-14);
  double last = obj.value(p);
  LoopPoint cur = p;
  for (int k = 0; k < 5; ++k) {
    const DescentResult d = descend(obj, cur, StepPolicy{}, 1e-12, 4);
    EXPECT_FALSE(d.converged);
    EXPECT_LE(d.value, last);
    last = d.value;
    cur = d.point;
  }
  EXPECT_LT(last, 0.0);
  EXPECT_GT(std::abs(cur.loop.samples(0, 0)), 1.0);
}

TEST(Descend, PerturbedOrbitIsASaddle) {
  // The orbit has a descent direction in the symmetric subspace, so descent
  // leaves it; the Newton refinement recovers it from the same start.
  std::mt19937_64 rng(7);
  const auto b = fixtures::harmonic(1);
  const LoopSpace ls(b, 128, DerivativeScheme::kSpectral);
  const Objective obj(ls, 0.0, Symmetry::reflection(Vector::Zero(1)));
  LoopPoint p = cosine(ls, std::log(2 * pi));
  std::normal_distribution<double> nd;
  Matrix u = p.loop.samples;
  for (int i = 0; i < ls.size(); ++i) u(i, 0) += 0.01 * nd(rng);
  p = obj.symmetry().project(ls, LoopPoint{ls.make_loop(u), p.tau * (1 + 0.01 * nd(rng))});

  const DescentResult d = descend(obj, p, StepPolicy{}, 1e-8, 200);
  EXPECT_FALSE(d.converged);
  EXPECT_LT(d.value, obj.value(p));

  const RefineResult r = refine(obj, p, RefineOptions{});
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(action(ls, r.point), pi, 1e-4);
}

TEST(ArmijoStep, SufficientDecrease) {
  std::mt19937_64 rng(5);
  const auto b = fixtures::conformal_quadratic();
  const LoopSpace ls(b, 32);
  const Objective obj(ls, 1e-2);
  for (int t = 0; t < 20; ++t) {
    const LoopPoint p{ls.make_loop(fixtures::random_vector(rng, 64, -1, 1).reshaped(32, 2)), 0.5};
    double v = 0.0;
    const TangentField g = obj.gradient(p, &v);
    const double gn = h1_norm(ls, g);
    const StepPolicy pol;
    const StepResult s = armijo_step(obj, p, v, g, gn, pol);
    ASSERT_GT(s.step, 0.0);
    EXPECT_LE(s.value, v - pol.slope * s.step * gn * gn);
    EXPECT_EQ(s.value, obj.value(s.point));
  }
}

TEST(MinimaxPath, TieBreakLowestIndex) {
  MinimaxPath path;
  path.values = {0.0, 2.0, 1.0, 2.0};
  path.nodes.resize(4);
  EXPECT_EQ(path.argmax(), 1);
  EXPECT_EQ(path.max(), 2.0);
}

TEST(MountainPass, OscillatorCandidate) {
  const auto b = fixtures::harmonic(1);
  const LoopSpace ls(b, 128);
  const LinkingEndpoints e = build_linking_endpoints(ls, oscillator_linking(), 1);
  const Objective obj(ls, 1e-3, e.symmetry);
  const double a_bar = sublevel_threshold(obj, e);
  const MinimaxPath path = straight_path(obj, e.low, e.high, 33);
  EXPECT_LT(path.values.front(), a_bar);
  EXPECT_LT(path.values.back(), a_bar);
  const MountainPassResult r = mountain_pass(obj, path, a_bar, MountainPassOptions{});
  EXPECT_GE(r.candidate_value, 3.0);
  EXPECT_LE(r.candidate_value, 3.3);
  EXPECT_TRUE(r.monotone);
  for (std::size_t i = 1; i < r.max_trace.size(); ++i) EXPECT_LE(r.max_trace[i], r.max_trace[i - 1]);
  EXPECT_GT(r.candidate_value, a_bar);
  EXPECT_LE(r.candidate_value, r.initial_max);
  EXPECT_EQ(r.c_eps, r.path.max());
  EXPECT_EQ(r.candidate_value, obj.value(r.candidate));
  EXPECT_EQ(r.path.nodes.front().tau, e.low.tau);
  EXPECT_EQ(r.path.nodes.back().tau, e.high.tau);
}

TEST(MountainPass, PathThroughCriticalPoint) {
  // Without the symmetry the constant shift is a descent direction of the
  // orbit: A(orbit + d) = pi - e^tau d^2 / 2.
  const auto b = fixtures::harmonic(1);
  const LoopSpace ls(b, 64, DerivativeScheme::kSpectral);
  const Objective obj(ls, 0.0);
  const LoopPoint orbit = cosine(ls, std::log(2 * pi));
  MinimaxPath path;
  for (int j = 0; j < 9; ++j) {
    const double d = -1.0 + 0.25 * j;
    LoopPoint p{ls.make_loop(orbit.loop.samples.array() + d), orbit.tau};
    path.values.push_back(obj.value(p));
    EXPECT_NEAR(path.values.back(), pi - pi * d * d, 1e-12);
    path.nodes.push_back(std::move(p));
  }
  const MountainPassResult r = mountain_pass(obj, path, 0.5, MountainPassOptions{});
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 0);
  EXPECT_EQ(r.status, "converged");
  EXPECT_NEAR(r.candidate_value, pi, 1e-12);
}

TEST(MountainPass, Preconditions) {
  const auto b = fixtures::harmonic(1);
  const LoopSpace ls(b, 32);
  const Objective obj(ls, 1e-3);
  const LoopPoint a{ls.constant_loop(Vector::Zero(1)), -3.0};
  const LoopPoint c = cosine(ls, std::log(2 * pi));
  MinimaxPath path = straight_path(obj, a, a, 5);
  path.nodes.resize(2);
  path.values.resize(2);
  EXPECT_THROW(mountain_pass(obj, path, 1.0, MountainPassOptions{}), SolverError);
  // Endpoint above the threshold.
  EXPECT_THROW(mountain_pass(obj, straight_path(obj, a, c, 5), 1.0, MountainPassOptions{}), SolverError);
}

TEST(Refine, MountainPassCandidateConverges) {
  const double eps = 1e-3;
  const auto b = fixtures::harmonic(1);
  const LoopSpace ls(b, 128, DerivativeScheme::kSpectral);
  const LinkingEndpoints e = build_linking_endpoints(ls, oscillator_linking(), 1);
  const Objective obj(ls, eps, e.symmetry);
  const MountainPassResult mp =
      mountain_pass(obj, straight_path(obj, e.low, e.high, 33), sublevel_threshold(obj, e), MountainPassOptions{});
  const RefineResult r = refine(obj, mp.candidate, RefineOptions{});
  EXPECT_TRUE(r.converged) << r.message;
  EXPECT_LE(r.grad_norm, 1e-10);
  EXPECT_FALSE(r.fallback);
  EXPECT_EQ(r.rank, r.unknowns);
  EXPECT_LE(r.el_final, r.el_initial);
  // Penalized continuum critical point: tau = log 2 pi, A = pi.
  EXPECT_NEAR(action(ls, r.point), pi, 1e-6);
  EXPECT_NEAR(r.value, pi + eps * (1 / (2 * pi) + std::sqrt(2 * pi)), 1e-6);
  EXPECT_NEAR(r.point.tau, std::log(2 * pi), 1e-6);
  // Quadratic convergence: each of the last steps at least squares the error.
  const auto& tr = r.grad_trace;
  ASSERT_GE(tr.size(), 3u);
  for (std::size_t i = 1; i + 1 < tr.size(); ++i)
    if (tr[i] < 1e-3 && tr[i + 1] > 1e-13) EXPECT_LE(tr[i + 1], 10 * tr[i] * tr[i]);
}

TEST(Refine, ExactOrbitIsFixed) {
  const auto b = fixtures::harmonic(1);
  const LoopSpace ls(b, 64, DerivativeScheme::kSpectral);
  const Objective obj(ls, 0.0, Symmetry::reflection(Vector::Zero(1)));
  const LoopPoint orbit = cosine(ls, std::log(2 * pi));
  const RefineResult r = refine(obj, orbit, RefineOptions{});
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 0);
  EXPECT_LE(c0_distance(ls, r.point.loop, orbit.loop), 1e-14);
  EXPECT_EQ(r.point.tau, orbit.tau);
}

TEST(Refine, FarInputFailsWithFlag) {
  std::mt19937_64 rng(11);
  const auto b = fixtures::harmonic(1);
  const LoopSpace ls(b, 64);
  const Objective obj(ls, 1e-3, Symmetry::reflection(Vector::Zero(1)));
  const LoopPoint p{ls.make_loop(fixtures::random_vector(rng, 64, -3, 3)), 1.0};
  const RefineResult r = refine(obj, p, RefineOptions{});
  EXPECT_FALSE(r.converged);
  EXPECT_NE(r.message.find("basin"), std::string::npos);
  EXPECT_GT(r.grad_norm, 1e-10);
}
