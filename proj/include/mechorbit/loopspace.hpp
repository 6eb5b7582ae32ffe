#pragma once

#include "mechorbit/geometry.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace mechorbit {

/// N uniform samples c(i/N) of a closed curve; row i is sample i. Periodic
/// coordinates are stored wrapped, their winding numbers separately.
struct DiscreteLoop {
  Matrix samples;
  Eigen::VectorXi winding;

  int size() const { return static_cast<int>(samples.rows()); }
  int dimension() const { return static_cast<int>(samples.cols()); }
};

/// A loop together with its log-period; the period is exp(tau).
struct LoopPoint {
  DiscreteLoop loop;
  double tau = 0.0;
};

/// Tangent vector (xi, sigma) at a LoopPoint.
struct TangentField {
  Matrix xi;
  double sigma = 0.0;
};

enum class DerivativeScheme { kCentral, kSpectral };

std::string to_string(DerivativeScheme s);
DerivativeScheme parse_scheme(const std::string& s);

/// Cyclic tridiagonal solver for (I + D^T D) x = r, where D is the forward
/// difference N (x_{i+1} - x_i) on the periodic grid.
class CyclicH1Solver {
 public:
  explicit CyclicH1Solver(int n);
  Vector solve(const Vector& r) const;
  /// (I + D^T D) x.
  Vector apply(const Vector& x) const;
  int size() const { return n_; }

 private:
  Vector thomas(const Vector& r) const;
  int n_;
  double diag_, off_, gamma_;
  Vector c_prime_, denom_, z_;
  double vz_;
};

/// Discretization context: geometry, grid size and derivative scheme.
///
/// The discrete energy uses half-step values m_j and velocities v_j between
/// samples j and j+1 (central: averages and forward differences; spectral:
/// trigonometric interpolation to the half grid). The potential term uses the
/// samples. Gradients are exact derivatives of these sums.
class LoopSpace {
 public:
  LoopSpace(const GeometryBundle& bundle, int n_samples, DerivativeScheme scheme = DerivativeScheme::kCentral);

  const GeometryBundle& bundle() const { return *bundle_; }
  int size() const { return n_; }
  int dimension() const { return bundle_->dimension(); }
  DerivativeScheme scheme() const { return scheme_; }
  const CyclicH1Solver& h1_solver() const { return solver_; }

  /// Validates and wraps; winding computed from consecutive samples unless given.
  DiscreteLoop make_loop(const Matrix& samples) const;
  DiscreteLoop make_loop(const Matrix& samples, const Eigen::VectorXi& winding) const;
  DiscreteLoop constant_loop(const Vector& q) const;
  void validate(const DiscreteLoop& loop) const;

  /// Lifted samples: consecutive rows differ by the shortest representative.
  Matrix unwrap(const DiscreteLoop& loop) const;
  /// winding * period per coordinate.
  Vector drift(const DiscreteLoop& loop) const;

  /// Half-step values and velocities (N x n each).
  void half_step(const Matrix& lifted, const Vector& drift, Matrix& mid, Matrix& vel) const;
  /// Adjoint of half_step: node gradient from half-step gradients.
  Matrix half_step_adjoint(const Matrix& d_mid, const Matrix& d_vel) const;
  /// d/ds at the samples (central: (x_{i+1} - x_{i-1}) N / 2).
  Matrix node_derivative(const Matrix& lifted, const Vector& drift) const;
  Matrix node_second_derivative(const Matrix& lifted, const Vector& drift) const;
  /// Transpose of the half-step interpolation applied to a half-step scalar field.
  Vector half_to_nodes(const Vector& half) const;

 private:
  const GeometryBundle* bundle_;
  int n_;
  DerivativeScheme scheme_;
  CyclicH1Solver solver_;
  Matrix s_mid_, d_mid_, d_node_, d2_node_;  // spectral only
};

// ---------------------------------------------------------------- functionals

struct ActionEval {
  double tau = 0.0;
  double energy = 0.0;
  double potential = 0.0;
  double action = 0.0;
  double d_tau = 0.0;        // partial of the action in tau
  Matrix d_energy;            // partials of the energy in the samples
  Matrix d_potential;         // partials of the potential integral in the samples
  Vector kinetic_half;        // |v_j|^2_g at the half steps

  /// Partials of the action in the samples.
  Matrix partials() const;
};

ActionEval evaluate_action(const LoopSpace& ls, const LoopPoint& p, bool with_gradient = true);

Matrix loop_derivative(const LoopSpace& ls, const DiscreteLoop& loop);
/// grad_s xi = xi' + Gamma(c)(c', xi) at the samples.
Matrix covariant_derivative(const LoopSpace& ls, const DiscreteLoop& loop, const Matrix& xi);
double energy(const LoopSpace& ls, const DiscreteLoop& loop);
double potential_integral(const LoopSpace& ls, const DiscreteLoop& loop);
double action(const LoopSpace& ls, const LoopPoint& p);

/// Exact derivative of the discrete action along (xi, sigma).
double first_variation(const LoopSpace& ls, const LoopPoint& p, const TangentField& f);
/// Continuous first-variation formula evaluated with sample derivatives.
double first_variation_formula(const LoopSpace& ls, const LoopPoint& p, const TangentField& f);

/// H^1 x R representative of a differential given by sample partials and a tau partial.
TangentField h1_representative(const LoopSpace& ls, const Matrix& partials, double d_tau);
TangentField h1_gradient(const LoopSpace& ls, const LoopPoint& p);
/// Flat H^1 x R inner product matching the preconditioner.
double h1_inner(const LoopSpace& ls, const TangentField& a, const TangentField& b);
double h1_norm(const LoopSpace& ls, const TangentField& a);

// ---------------------------------------------------------------- norms

double l2_norm(const LoopSpace& ls, const DiscreteLoop& loop, const Matrix& xi);
double c0_norm(const LoopSpace& ls, const DiscreteLoop& loop, const Matrix& xi);
/// ||xi||_{L2}^2 + ||grad_s xi||_{L2}^2 with the half-step covariant derivative.
double h1_norm(const LoopSpace& ls, const DiscreteLoop& loop, const Matrix& xi);
/// ||grad_s xi||_{L2}, half-step covariant derivative.
double perp_norm(const LoopSpace& ls, const DiscreteLoop& loop, const Matrix& xi);
/// max_i of the metric length of the shortest chart difference.
double c0_distance(const LoopSpace& ls, const DiscreteLoop& a, const DiscreteLoop& b);

// ---------------------------------------------------------------- diagnostics

struct HamiltonianProfile {
  Vector values;
  double mean = 0.0;
  double max_abs = 0.0;
  double max_deviation = 0.0;  // max |H_i - mean|
};

/// H_i = exp(-2 tau) |c'|^2_g / 2 + V(c_i), with |c'|^2_g the half-step
/// kinetic term carried to the samples; its mean is exp(-2 tau) E + W.
HamiltonianProfile hamiltonian_along_loop(const LoopSpace& ls, const LoopPoint& p);

struct EulerLagrangeResidual {
  Matrix values;  // e^{-tau} grad_s c' + e^{tau} grad V(c)
  double l2 = 0.0;
};

EulerLagrangeResidual euler_lagrange_residual(const LoopSpace& ls, const LoopPoint& p);

// ---------------------------------------------------------------- moves

/// p + step * f, wrapped into the chart.
LoopPoint advance(const LoopSpace& ls, const LoopPoint& p, const TangentField& f, double step);
/// Field from b to a (shortest chart differences).
TangentField difference(const LoopSpace& ls, const LoopPoint& a, const LoopPoint& b);

/// Cyclic symmetry c(s + 1/m) = center + R (c(s) - center) with R orthogonal
/// and R^m = I. Projects a position (affine) or a tangent field (linear) onto
/// the symmetric subspace by averaging over the group.
Matrix symmetrize_positions(const Matrix& lifted, const Vector& center, const Matrix& rotation, int order);
Matrix symmetrize_field(const Matrix& xi, const Matrix& rotation, int order);

/// The half-period reflection c(s + 1/2) = 2 center - c(s).
Matrix reflect_positions(const Matrix& lifted, const Vector& center);
Matrix reflect_field(const Matrix& xi);

Vector flatten(const TangentField& f);
TangentField unflatten(const Vector& x, int n_samples, int dim);

}  // namespace mechorbit
