#include "mechorbit/errors.hpp"
#include "mechorbit/geometry.hpp"
#include "mechorbit/presets.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <numbers>

using namespace mechorbit;
using mechorbit::fixtures::random_vector;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double a : v) x(i++) = a;
  return x;
}

GeometryBundle conformal_q1_bundle() {
  return GeometryBundle{ChartDomain::euclidean(2), MetricField::conformal(Expression::parse("q1", 2)),
                        make_potential_preset("harmonic", 2, {})};
}

}  // namespace

TEST(Metric, FlatIsIdentity) {
  const auto b = fixtures::harmonic(3);
  EXPECT_TRUE(metric_at(b, vec({1, -2, 3})).isIdentity(0.0));
}

TEST(Metric, ConformalFactor) {
  const auto b = conformal_q1_bundle();
  EXPECT_TRUE(metric_at(b, vec({0, 0})).isIdentity(0.0));
  const Matrix g = metric_at(b, vec({1, 0}));
  EXPECT_NEAR(g(0, 0), std::exp(2.0), 1e-13);
  EXPECT_NEAR(g(1, 1), std::exp(2.0), 1e-13);
  EXPECT_EQ(g(0, 1), 0.0);
}

TEST(Metric, NonPositiveDefiniteRejected) {
  GeometryBundle b{ChartDomain::euclidean(2), MetricField::warped(Expression::parse("q2", 2)),
                   make_potential_preset("harmonic", 2, {})};
  EXPECT_NO_THROW(metric_at(b, vec({0, 1})));
  EXPECT_THROW(metric_at(b, vec({0, -1})), GeometryError);
  EXPECT_THROW(christoffel_at(b, vec({0, 0})), GeometryError);
}

TEST(Christoffel, FlatVanishes) {
  const auto b = fixtures::harmonic(3);
  const Christoffel c = christoffel_at(b, vec({0.3, 1, 2}));
  ASSERT_EQ(c.gamma.size(), 3u);
  for (const auto& m : c.gamma) EXPECT_LT(m.cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Christoffel, ConformalAtOrigin) {
  const auto b = conformal_q1_bundle();
  const Vector q = vec({0, 0});
  const Christoffel c = christoffel_at(b, q);
  const auto oracle = fixtures::christoffel_oracle(b.metric, q);
  // gamma[k](i, j) = Gamma^{k+1}_{i+1 j+1}
  EXPECT_NEAR(oracle[0](1, 1), -1.0, 1e-8);
  EXPECT_NEAR(oracle[1](0, 1), 1.0, 1e-8);
  EXPECT_NEAR(oracle[0](0, 0), 1.0, 1e-8);
  EXPECT_NEAR(oracle[1](1, 1), 0.0, 1e-8);
  for (int k = 0; k < 2; ++k) EXPECT_LT((c.gamma[k] - oracle[k]).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Christoffel, WarpedCylinder) {
  const auto b = fixtures::warped_cylinder();
  const Vector q = vec({0.7, 2.0});  // (phi, r)
  const Christoffel c = christoffel_at(b, q);
  const auto oracle = fixtures::christoffel_oracle(b.metric, q);
  EXPECT_NEAR(oracle[1](0, 0), -2.0, 1e-8);
  EXPECT_NEAR(oracle[0](1, 0), 0.5, 1e-8);
  for (int k = 0; k < 2; ++k) EXPECT_LT((c.gamma[k] - oracle[k]).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Christoffel, SymmetricAsStored) {
  std::mt19937_64 rng(3);
  const auto b = fixtures::conformal_quadratic("0.3*q1*q2 + 0.2*sin(q2)");
  for (int t = 0; t < 20; ++t) {
    const Christoffel c = christoffel_at(b, random_vector(rng, 2, -2, 2));
    for (const auto& m : c.gamma) EXPECT_EQ(m(0, 1), m(1, 0));
  }
}

TEST(Potential, Gradient) {
  const auto b1 = fixtures::harmonic(1);
  EXPECT_NEAR(grad_potential(b1, vec({1}))(0), 1.0, 1e-15);
  EXPECT_EQ(grad_potential(b1, vec({0}))(0), 0.0);
  const auto b2 = fixtures::harmonic(2);
  const Vector g = grad_potential(b2, vec({0, 1}));
  EXPECT_NEAR(g(0), 0.0, 1e-15);
  EXPECT_NEAR(g(1), 1.0, 1e-15);
}

TEST(Potential, GradientRepresentsDifferential) {
  std::mt19937_64 rng(5);
  const auto b = fixtures::conformal_quadratic();
  for (int t = 0; t < 20; ++t) {
    const Vector q = random_vector(rng, 2, -1, 1);
    const Vector x = random_vector(rng, 2, -1, 1);
    const PotentialJet fd = b.potential.fd_jet(q, 1e-5);
    EXPECT_NEAR(grad_potential(b, q).dot(metric_at(b, q) * x), fd.differential.dot(x), 1e-8);
  }
}

TEST(Potential, Hessian) {
  const auto b = fixtures::harmonic(1);
  for (double q : {-3.0, 0.0, 2.5}) {
    EXPECT_NEAR(hess_potential(b, vec({q}))(0, 0), 1.0, 1e-14);
    EXPECT_NEAR(hess_norm(b, vec({q})), 1.0, 1e-14);
  }
  const auto lin = fixtures::flat_bundle(2, make_potential_preset("linear", 2, {}));
  EXPECT_LT(hess_potential(lin, vec({1, 2})).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Potential, ConformalHessianNormMatchesOracle) {
  const auto b = fixtures::conformal_quadratic();
  const Vector q = vec({0, 0});
  // Oracle: second-order central differences and Christoffel symbols from
  // metric finite differences.
  const double h = 1e-4;
  const PotentialJet fd = b.potential.fd_jet(q, h);
  const auto gamma = fixtures::christoffel_oracle(b.metric, q);
  Matrix hess = fd.second;
  for (int k = 0; k < 2; ++k) hess -= fd.differential(k) * gamma[k];
  const Matrix g = b.metric(q);
  const Matrix Linv = Eigen::LLT<Matrix>(g).matrixL().toDenseMatrix().inverse();
  const Matrix m = Linv * hess * Linv.transpose();
  const double oracle = Eigen::SelfAdjointEigenSolver<Matrix>(0.5 * (m + m.transpose())).eigenvalues().cwiseAbs().maxCoeff();
  EXPECT_NEAR(hess_norm(b, q), oracle, 1e-6);
  // Off-origin with a non-trivial conformal factor.
  const Vector q2 = vec({0.4, -0.3});
  const PotentialJet fd2 = b.potential.fd_jet(q2, h);
  const auto gamma2 = fixtures::christoffel_oracle(b.metric, q2);
  Matrix hess2 = fd2.second;
  for (int k = 0; k < 2; ++k) hess2 -= fd2.differential(k) * gamma2[k];
  const Matrix g2 = b.metric(q2);
  const Matrix L2 = Eigen::LLT<Matrix>(g2).matrixL().toDenseMatrix().inverse();
  const Matrix m2 = L2 * hess2 * L2.transpose();
  const double oracle2 = Eigen::SelfAdjointEigenSolver<Matrix>(0.5 * (m2 + m2.transpose())).eigenvalues().cwiseAbs().maxCoeff();
  EXPECT_NEAR(hess_norm(b, q2), oracle2, 1e-6);
}

TEST(Potential, AnalyticMatchesFiniteDifferenceOnCatalog) {
  std::mt19937_64 rng(17);
  for (const auto& name : potential_preset_names()) {
    for (int n : {1, 2, 3}) {
      if (name == "cutoff_saddle" && n < 2) continue;
      ParamMap params;
      if (name == "cutoff_saddle") params["positive"] = 1;
      const PotentialField v = make_potential_preset(name, n, params);
      for (int t = 0; t < 40; ++t) {
        const Vector q = random_vector(rng, n, -2.5, 2.5);
        const PotentialJet a = v.jet(q);
        const PotentialJet f = v.fd_jet(q, 1e-4);
        const double gscale = std::max(1.0, a.differential.norm());
        const double hscale = std::max(1.0, a.second.norm());
        EXPECT_LE((a.differential - f.differential).norm() / gscale, 1e-6) << name << " n=" << n;
        EXPECT_LE((a.second - f.second).norm() / hscale, 1e-6) << name << " n=" << n;
      }
    }
  }
}

TEST(Presets, CutoffProfileIsC2) {
  const double r0 = 1.0, r1 = 2.0;
  EXPECT_EQ(cutoff_profile(0.5, r0, r1), 0.0);
  EXPECT_EQ(cutoff_profile(2.5, r0, r1), 1.0);
  EXPECT_NEAR(cutoff_profile(1.5, r0, r1), 0.5, 1e-15);
  for (double x : {r0, r1}) {
    const Jet a = cutoff_profile(Jet::variable(x + 1e-9, 0, 1), r0, r1);
    const Jet b = cutoff_profile(Jet::variable(x - 1e-9, 0, 1), r0, r1);
    EXPECT_NEAR(a.v, b.v, 1e-8);
    EXPECT_NEAR(a.d(0), b.d(0), 1e-7);
    EXPECT_NEAR(a.h(0, 0), b.h(0, 0), 1e-6);
  }
}

TEST(Presets, SaddleOutsideCutoff) {
  const PotentialField v = make_potential_preset("cutoff_saddle", 2, {{"positive", 1}, {"C", 1}});
  EXPECT_NEAR(v(vec({3, 1})), 0.5 * (9 - 1) - 1, 1e-14);
  EXPECT_NEAR(v(vec({0.3, 0.2})), -1.0, 1e-15);
  EXPECT_THROW(make_potential_preset("cutoff_saddle", 2, {{"positive", 3}}), GeometryError);
  EXPECT_THROW(make_potential_preset("harmonic", 1, {{"mass", 3}}), GeometryError);
  EXPECT_THROW(make_potential_preset("nope", 1, {}), GeometryError);
}

TEST(NuShrink, Harmonic) {
  const auto b = fixtures::harmonic(1);
  EXPECT_DOUBLE_EQ(nu_shrink_value(b, vec({0})), -0.5);
  EXPECT_TRUE(nu_member(b, vec({0}), 0.3));
  EXPECT_FALSE(nu_member(b, vec({0}), 0.6));
  EXPECT_NEAR(nu_shrink_value(b, vec({1})), 0.0, 1e-16);
  for (double nu : {1e-6, 0.1, 1.0}) EXPECT_FALSE(nu_member(b, vec({1}), nu));
}

TEST(NuShrink, MembershipMatchesDefinition) {
  std::mt19937_64 rng(23);
  const auto b = fixtures::conformal_quadratic();
  for (int t = 0; t < 200; ++t) {
    const Vector q = random_vector(rng, 2, -2, 2);
    const double nu = 0.5 * std::uniform_real_distribution<double>(0, 1)(rng);
    EXPECT_EQ(nu_member(b, q, nu), nu_shrink_value(b, q) <= -nu);
  }
}

TEST(Hamiltonian, FlatExamples) {
  const auto b = fixtures::harmonic(1);
  EXPECT_DOUBLE_EQ(hamiltonian(b, vec({1}), vec({0})), 0.0);
  PhaseVelocity x = hamiltonian_vector_field(b, vec({1}), vec({0}));
  EXPECT_EQ(x.dq(0), 0.0);
  EXPECT_DOUBLE_EQ(x.dtheta(0), -1.0);
  EXPECT_DOUBLE_EQ(hamiltonian(b, vec({0}), vec({0})), -0.5);
  x = hamiltonian_vector_field(b, vec({0}), vec({0}));
  EXPECT_EQ(x.dq(0), 0.0);
  EXPECT_EQ(x.dtheta(0), 0.0);
}

TEST(Hamiltonian, CurvedMatchesChristoffelForm) {
  std::mt19937_64 rng(29);
  for (const auto& b : {fixtures::conformal_quadratic(), fixtures::warped_cylinder()}) {
    for (int t = 0; t < 50; ++t) {
      Vector q = random_vector(rng, 2, -1, 1);
      q(1) += 2.0;
      const Vector theta = random_vector(rng, 2, -2, 2);
      const PhaseVelocity x = hamiltonian_vector_field(b, q, theta);
      const Matrix ginv = metric_at(b, q).inverse();
      const auto gamma = fixtures::christoffel_oracle(b.metric, q);
      const PotentialJet pj = b.potential.fd_jet(q, 1e-5);
      const Vector p = ginv * theta;
      for (int i = 0; i < 2; ++i) {
        double expected = -pj.differential(i);
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l) expected += gamma[k](i, l) * p(l) * theta(k);
        EXPECT_NEAR(x.dtheta(i), expected, 1e-6 * (1 + std::abs(expected)));
        EXPECT_NEAR(x.dq(i), p(i), 1e-12);
      }
    }
  }
}

TEST(Hamiltonian, ConservedAlongVectorField) {
  std::mt19937_64 rng(31);
  for (const auto& b : {fixtures::conformal_quadratic(), fixtures::warped_cylinder(),
                        fixtures::conformal_quadratic("0.2*q1^2 - 0.1*q2")}) {
    for (int t = 0; t < 100; ++t) {
      Vector q = random_vector(rng, 2, -1, 1);
      q(1) += 2.0;
      const Vector theta = random_vector(rng, 2, -2, 2);
      EXPECT_LT(std::abs(hamiltonian_drift(b, q, theta)), 1e-8 * (1 + theta.squaredNorm()));
    }
  }
}

TEST(Hamiltonian, Rk4EnergyErrorIsFifthOrder) {
  const auto b = fixtures::conformal_quadratic();
  const Vector q0 = vec({0.3, -0.2}), t0 = vec({0.5, 0.4});
  const double h0 = hamiltonian(b, q0, t0);
  auto err = [&](double d) {
    Vector q = q0, t = t0;
    rk4_step(b, q, t, d);
    return std::abs(hamiltonian(b, q, t) - h0);
  };
  const double e1 = err(0.08), e2 = err(0.04);
  const double order = std::log2(e1 / e2);
  EXPECT_GT(order, 4.5);
  EXPECT_LT(order, 6.5);
}

TEST(Chart, PeriodicWrap) {
  const auto b = fixtures::warped_cylinder();
  const double p = 2 * std::numbers::pi;
  EXPECT_NEAR(b.chart.wrap(0, p + 0.5), 0.5, 1e-14);
  EXPECT_NEAR(b.chart.wrap(0, -0.5), p - 0.5, 1e-14);
  EXPECT_NEAR(b.chart.shortest(0, p - 0.1), -0.1, 1e-14);
  EXPECT_EQ(b.chart.shortest(1, 5.0), 5.0);
  ChartDomain bad = b.chart;
  bad.periods[0] = -1.0;
  EXPECT_THROW(bad.validate(), GeometryError);
  bad = b.chart;
  bad.box_hi(1) = bad.box_lo(1);
  EXPECT_THROW(bad.validate(), GeometryError);
}

TEST(Regularity, HarmonicPasses) {
  const auto b = fixtures::flat_bundle(2, make_potential_preset("harmonic", 2, {}), 20.0);
  RegularityOptions opt;
  opt.inner_radius = 1.0;
  opt.outer_radius = 10.0;
  const RegularityReport r = regularity_scan(b, opt);
  EXPECT_TRUE(r.pass) << r.reason;
  EXPECT_TRUE(r.ratio_decreasing);
  ASSERT_EQ(r.shells.size(), 8u);
  for (const auto& s : r.shells) {
    EXPECT_NEAR(s.max_ratio, 1.0 / s.r_inner, 0.05 / s.r_inner);
    EXPECT_GE(s.min_grad, s.r_inner - 1e-12);
  }
  EXPECT_NEAR(r.v_infinity, 1.0, 0.05);
}

TEST(Regularity, LinearPasses) {
  const auto b = fixtures::flat_bundle(1, make_potential_preset("linear", 1, {}), 20.0);
  const RegularityReport r = regularity_scan(b, {});
  EXPECT_TRUE(r.pass) << r.reason;
  EXPECT_NEAR(r.v_infinity, 1.0, 1e-12);
  for (const auto& s : r.shells) EXPECT_EQ(s.max_ratio, 0.0);
}

TEST(Regularity, SineFails) {
  const auto start = std::chrono::steady_clock::now();
  const auto b = fixtures::flat_bundle(1, make_potential_expression("sin(q1)", 1), 20.0);
  const RegularityReport r = regularity_scan(b, {});
  EXPECT_FALSE(r.pass);
  EXPECT_LT(r.v_infinity, 1e-2);
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 5.0);
}

TEST(Regularity, Errors) {
  const auto b = fixtures::flat_bundle(1, make_potential_preset("harmonic", 1, {}), 0.5);
  RegularityOptions opt;
  opt.shells = 1;
  EXPECT_THROW(regularity_scan(b, opt), GeometryError);
  opt.shells = 4;
  EXPECT_THROW(regularity_scan(b, opt), GeometryError);  // every shell outside the box
}

TEST(Regularity, PeriodicCoordinatesExcludedFromRadius) {
  GeometryBundle b = fixtures::warped_cylinder();
  b.chart.box_hi(1) = 50.0;
  b.potential = make_potential_expression("0.5*q2^2 + 0.01*sin(q1) - 0.5", 2);
  RegularityOptions opt;
  opt.inner_radius = 2.0;
  opt.outer_radius = 20.0;
  const RegularityReport r = regularity_scan(b, opt);
  EXPECT_GT(r.total_samples, 0);
  for (const auto& s : r.shells) EXPECT_GE(s.r_inner, 2.0);
}
