#pragma once

#include "mechorbit/loopspace.hpp"

#include <optional>
#include <vector>

namespace mechorbit {

/// eps (e^{-tau} + e^{tau/2}).
double penalty_term(double eps, double tau);
/// d/dtau of penalty_term: eps (-e^{-tau} + e^{tau/2} / 2).
double penalty_slope(double eps, double tau);

struct PenalizedEval {
  ActionEval base;
  double eps = 0.0;
  double value = 0.0;  // A_eps
  double d_tau = 0.0;  // dA_eps / dtau
};

PenalizedEval evaluate_penalized(const LoopSpace& ls, const LoopPoint& p, double eps, bool with_gradient = true);
double penalized_action(const LoopSpace& ls, const LoopPoint& p, double eps);
double penalized_variation(const LoopSpace& ls, const LoopPoint& p, const TangentField& f, double eps);
TangentField penalized_gradient(const LoopSpace& ls, const LoopPoint& p, double eps);

/// Critical-point identities. r1 is the tau-stationarity residual
/// e^{-tau}E + e^{tau}W + eps(e^{-tau} - e^{tau/2}/2) and r2 = A_eps - a_eps.
/// The raw forms are kept for the log: raw1 = e^{-tau}E + eps(2e^{-tau} + e^{tau/2}/2) - a_eps,
/// raw2 = e^{tau}W - 3/4 eps e^{tau/2} + a_eps/2. At a critical point
/// raw1 tends to -e^{-tau}E, so raw1_doubled uses 2 e^{-tau}E instead.
struct PsResiduals {
  double r1 = 0.0;
  double r2 = 0.0;
  double raw1 = 0.0;
  double raw1_doubled = 0.0;
  double raw2 = 0.0;
};

PsResiduals ps_identity_residuals(const LoopSpace& ls, const LoopPoint& p, double eps, double a_eps);

/// eps (-e^{-2 tau} + e^{-tau/2} / 2).
double hamiltonian_level(double eps, double tau);
/// max_s |H(s) - hamiltonian_level(eps, tau)|.
double level_residual(const LoopSpace& ls, const LoopPoint& p, double eps);
/// |mean_s H(s) - hamiltonian_level(eps, tau)|; vanishes with the tau partial.
double level_mean_residual(const LoopSpace& ls, const LoopPoint& p, double eps);

struct TauBounds {
  double tau = 0.0;
  double est2_value = 0.0;  // eps (2 e^{-tau} + e^{tau/2} / 2)
  double est2_bound = 0.0;  // a2 + 1
  bool est2_ok = false;
  /// {tau : est2_value <= a2 + 1} = [t0, t1].
  double t0 = 0.0;
  double t1 = 0.0;
  double t2 = 0.0;  // max(0, log(a2 / a_kappa))
  bool upper_ok = false;
  bool pass() const { return est2_ok && upper_ok; }
};

TauBounds tau_bound_check(double tau, double eps, double a2, double a_kappa);

struct PenaltySchedule {
  std::vector<double> eps = {1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 1e-5};
  /// Gradient tolerance per eps; empty means `default_tolerance` for all.
  std::vector<double> tolerances;
  double default_tolerance = 1e-8;
  double a1 = 0.5;
  double a2 = 4.0;

  double tolerance(std::size_t k) const { return tolerances.empty() ? default_tolerance : tolerances.at(k); }
  /// Throws Error on a non-decreasing or non-positive list or a bad window.
  void validate() const;
};

struct PenaltyDiagnostics {
  double eps = 0.0;
  double tau = 0.0;
  double a_eps = 0.0;
  double action = 0.0;
  PsResiduals residuals;
  double eps_tilde = 0.0;
  double level_residual = 0.0;
  double level_mean_residual = 0.0;
  TauBounds tau_bounds;
  std::optional<double> t3;  // observed inf of tau over the continuation
  bool in_window = false;    // a1 <= A <= a2
  bool residuals_ok = false;
  bool level_ok = false;
};

/// Diagnostics at a point accepted with gradient norm `grad_norm`. The
/// identities must hold to 10 * tol; the pointwise level is compared to
/// `level_tolerance` since it carries the discretization error.
PenaltyDiagnostics penalty_diagnostics(const LoopSpace& ls, const LoopPoint& p, double eps, double tol,
                                       double level_tolerance, const PenaltySchedule& schedule, double a_kappa);

}  // namespace mechorbit
