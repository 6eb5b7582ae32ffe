#pragma once

#include "mechorbit/expression.hpp"
#include "mechorbit/jet.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace mechorbit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A single global chart. Periodic coordinates wrap into [box_lo, box_lo + period).
struct ChartDomain {
  int dimension = 1;
  std::vector<std::optional<double>> periods;
  Vector box_lo;
  Vector box_hi;

  static ChartDomain euclidean(int n, double half_width = 10.0);

  void validate() const;
  bool is_periodic(int i) const { return i < static_cast<int>(periods.size()) && periods[i].has_value(); }
  double period(int i) const { return *periods[i]; }
  /// Shortest representative of a coordinate difference.
  double shortest(int i, double delta) const;
  double wrap(int i, double x) const;
  void wrap_point(Eigen::Ref<Vector, 0, Eigen::InnerStride<>> q) const;
  bool in_box(const Vector& q) const;
};

/// Metric and its first coordinate derivatives: dg[l] = d g / d q^l.
struct MetricJet {
  Matrix g;
  std::vector<Matrix> dg;
};

class MetricField {
 public:
  enum class Kind { kFlat, kConformal, kWarped, kCustom };

  static MetricField flat(int n);
  /// g = exp(2 f) * identity.
  static MetricField conformal(Expression factor);
  /// g = diag(w, ..., w, 1): the first n-1 coordinates are scaled by w, the
  /// last coordinate is the radial one.
  static MetricField warped(Expression warp);
  /// Value-only evaluator; derivatives by central differences with step h.
  static MetricField custom(int n, std::function<Matrix(const Vector&)> g, double fd_step = 1e-4);

  Matrix operator()(const Vector& q) const;
  MetricJet jet(const Vector& q) const;
  /// Central-difference derivatives regardless of kind.
  MetricJet fd_jet(const Vector& q, double h) const;

  Kind kind() const { return kind_; }
  bool is_flat() const { return kind_ == Kind::kFlat; }
  int dimension() const { return dim_; }
  const Expression& factor() const { return factor_; }
  double fd_step() const { return fd_step_; }

 private:
  Kind kind_ = Kind::kFlat;
  int dim_ = 1;
  Expression factor_;
  std::function<Matrix(const Vector&)> custom_;
  double fd_step_ = 1e-4;
};

/// V together with coordinate partials dV and d^2 V.
struct PotentialJet {
  double value = 0.0;
  Vector differential;
  Matrix second;
};

class PotentialField {
 public:
  static PotentialField from_expression(Expression e, std::string label);
  static PotentialField from_jet(int n, std::function<Jet(const Vector&)> f, std::string label);
  /// Value only; derivatives by central differences with step h.
  static PotentialField custom(int n, std::function<double(const Vector&)> f, std::string label, double fd_step = 1e-4);

  double operator()(const Vector& q) const;
  PotentialJet jet(const Vector& q) const;
  PotentialJet fd_jet(const Vector& q, double h) const;

  bool analytic() const { return static_cast<bool>(jet_); }
  int dimension() const { return dim_; }
  const std::string& label() const { return label_; }
  double fd_step() const { return fd_step_; }

 private:
  int dim_ = 1;
  std::string label_;
  std::function<double(const Vector&)> value_;
  std::function<Jet(const Vector&)> jet_;
  double fd_step_ = 1e-4;
};

struct GeometryBundle {
  ChartDomain chart;
  MetricField metric;
  PotentialField potential;

  int dimension() const { return chart.dimension; }
};

/// Christoffel symbols of the second kind, gamma[k](i, j) = Gamma^k_{ij}.
struct Christoffel {
  std::vector<Matrix> gamma;

  /// Vector with components Gamma^k_{ij} a^i b^j.
  Vector contract(const Vector& a, const Vector& b) const;
  bool is_zero() const { return gamma.empty(); }
};

Christoffel christoffel_from_jet(const MetricJet& mj, const Eigen::LLT<Matrix>& llt);

/// Everything the pointwise formulas need at one chart point.
struct LocalGeometry {
  Matrix g;
  Matrix g_inv;
  Christoffel gamma;
  PotentialJet potential;
  Vector grad;  // #dV
  Matrix hess;  // covariant Hessian, lower indices
};

LocalGeometry local_geometry(const GeometryBundle& b, const Vector& q);

Matrix metric_at(const GeometryBundle& b, const Vector& q);
Christoffel christoffel_at(const GeometryBundle& b, const Vector& q);
Vector grad_potential(const GeometryBundle& b, const Vector& q);
/// |grad V|_g.
double grad_norm(const GeometryBundle& b, const Vector& q);
Matrix hess_potential(const GeometryBundle& b, const Vector& q);
/// Spectral norm of Hess V in a g-orthonormal frame.
double hess_norm(const LocalGeometry& lg);
double hess_norm(const GeometryBundle& b, const Vector& q);

double nu_shrink_value(const GeometryBundle& b, const Vector& q);
bool nu_member(const GeometryBundle& b, const Vector& q, double nu);

struct PhaseVelocity {
  Vector dq;
  Vector dtheta;
};

double hamiltonian(const GeometryBundle& b, const Vector& q, const Vector& theta);
PhaseVelocity hamiltonian_vector_field(const GeometryBundle& b, const Vector& q, const Vector& theta);
/// dH applied to X_H; vanishes identically.
double hamiltonian_drift(const GeometryBundle& b, const Vector& q, const Vector& theta);

/// One classical RK4 step of the Hamiltonian flow (delta may be negative).
void rk4_step(const GeometryBundle& b, Vector& q, Vector& theta, double delta);

struct RegularityOptions {
  Vector center;                 // empty: origin
  double inner_radius = 1.0;     // R_K
  double outer_radius = 10.0;
  int shells = 8;
  int samples_per_shell = 200;
  double ratio_threshold = 1.0;
  double gradient_floor = 1e-3;
  std::uint64_t seed = 1;
};

struct RegularityShell {
  double r_inner = 0.0;
  double r_outer = 0.0;
  double min_grad = 0.0;
  double max_ratio = 0.0;
  int samples = 0;
};

struct RegularityReport {
  std::vector<RegularityShell> shells;
  double v_infinity = 0.0;
  bool ratio_decreasing = false;
  bool pass = false;
  int total_samples = 0;
  std::string reason;
};

/// Radial scan of |grad V| and ||Hess V|| / |grad V| outside the ball of
/// radius inner_radius. Radii are measured in the non-periodic coordinates.
RegularityReport regularity_scan(const GeometryBundle& b, const RegularityOptions& opt);

}  // namespace mechorbit
