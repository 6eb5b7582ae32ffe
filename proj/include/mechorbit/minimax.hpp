#pragma once

#include "mechorbit/linking.hpp"
#include "mechorbit/penalty.hpp"

#include <limits>
#include <vector>

namespace mechorbit {

/// A_eps on a LoopSpace, restricted to the symmetric subspace when enabled.
class Objective {
 public:
  Objective(const LoopSpace& ls, double eps, Symmetry sym = {}) : ls_(&ls), eps_(eps), sym_(std::move(sym)) {}

  const LoopSpace& space() const { return *ls_; }
  double eps() const { return eps_; }
  const Symmetry& symmetry() const { return sym_; }
  Objective with_eps(double eps) const { return Objective(*ls_, eps, sym_); }

  double value(const LoopPoint& p) const { return penalized_action(*ls_, p, eps_); }
  /// Projected H1 x R gradient; optionally returns the value.
  TangentField gradient(const LoopPoint& p, double* value = nullptr) const;
  double gradient_norm(const LoopPoint& p) const { return h1_norm(*ls_, gradient(p)); }
  /// p + step * f, projected.
  LoopPoint move(const LoopPoint& p, const TangentField& f, double step) const;
  /// Point a fraction t of the way from a to b.
  LoopPoint interpolate(const LoopPoint& a, const LoopPoint& b, double t) const;
  double distance(const LoopPoint& a, const LoopPoint& b) const;

 private:
  const LoopSpace* ls_;
  double eps_;
  Symmetry sym_;
};

/// Armijo backtracking on the preconditioned gradient.
struct StepPolicy {
  double initial = 1.0;
  double factor = 0.5;
  double slope = 1e-4;
  int max_backtracks = 40;
  double max_step = std::numeric_limits<double>::infinity();  // cap on |step * g|
};

struct StepResult {
  LoopPoint point;
  double value = 0.0;
  double step = 0.0;  // 0 when no step was accepted
};

/// One Armijo step from p along -g, where g is the gradient at p with norm gnorm.
StepResult armijo_step(const Objective& obj, const LoopPoint& p, double value, const TangentField& g, double gnorm,
                       const StepPolicy& policy);

struct DescentResult {
  LoopPoint point;
  double value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

DescentResult descend(const Objective& obj, const LoopPoint& start, const StepPolicy& policy, double tol, int max_iter);

struct MinimaxPath {
  std::vector<LoopPoint> nodes;
  std::vector<double> values;

  int size() const { return static_cast<int>(nodes.size()); }
  /// Index of the largest value; lowest index on ties.
  int argmax() const;
  double max() const { return values[argmax()]; }
};

MinimaxPath straight_path(const Objective& obj, const LoopPoint& a, const LoopPoint& b, int nodes);

struct MountainPassOptions {
  int max_iter = 4000;
  double tol = 1e-4;           // gradient norm at the max node
  StepPolicy step;
  int push_radius = 8;         // nodes k - r .. k + r are pushed
  double step_fraction = 0.5;  // push capped at this fraction of the mean node spacing
  int stall_window = 100;      // stop when the max drops less than stall_tol (relative) over this many iterations
  double stall_tol = 1e-4;
};

struct MountainPassResult {
  LoopPoint candidate;
  double candidate_value = 0.0;
  double c_eps = 0.0;  // final path max
  double initial_max = 0.0;
  double a_bar = 0.0;
  double grad_norm = 0.0;
  MinimaxPath path;
  std::vector<double> max_trace;
  int iterations = 0;
  int reparam_rejected = 0;
  int chord_rejected = 0;
  bool converged = false;
  bool monotone = true;
  std::string status;  // converged, stalled or iteration cap
};

/// Local mountain-pass iteration: push the max node and its neighbours down
/// the gradient, redistribute nodes by H1 x R arclength, repeat. The path
/// maximum is checked to be non-increasing every iteration. Throws
/// SolverError when the maximum migrates to an endpoint or the candidate
/// drops to a_bar.
MountainPassResult mountain_pass(const Objective& obj, MinimaxPath path, double a_bar, const MountainPassOptions& opt);

/// Sublevel threshold: a, raised above the endpoint values when the penalty lifts them.
double sublevel_threshold(const Objective& obj, const LinkingEndpoints& e);

}  // namespace mechorbit
