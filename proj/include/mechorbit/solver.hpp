#pragma once

#include "mechorbit/contact.hpp"
#include "mechorbit/refine.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mechorbit {

/// Thresholds an accepted orbit must meet.
struct AcceptanceTolerances {
  double level = 1e-3;           // max_s |H - eps~| <= level (1 + |eps~|)
  double euler_lagrange = 1e-2;  // L2 norm of the node residual
  double closure = 1e-3;         // shooting closure in phase space
};

struct ShootingReport {
  double period = 0.0;
  int steps = 0;
  double closure = 0.0;  // |(q, theta)(T) - (q, theta)(0)|
  double closure_q = 0.0;
  double closure_theta = 0.0;
  double energy_drift = 0.0;     // max |H - H(0)| along the trajectory
  double level_deviation = 0.0;  // max |H - eps~| along the trajectory
  Vector q0, theta0;
};

/// RK4 from (c(0), g e^{-tau} c'(0)) over one period e^tau.
ShootingReport verify_orbit(const LoopSpace& ls, const LoopPoint& p, double eps, int steps = 10000);

struct OrbitSolution {
  LoopPoint point;
  double eps = 0.0;
  double action = 0.0;
  double penalized_action = 0.0;
  double grad_norm = 0.0;
  double grad_tolerance = 0.0;
  double hamiltonian_residual = 0.0;  // max_s |H - eps~|
  double level_tolerance = 0.0;
  double euler_lagrange = 0.0;
  double closure = 0.0;
  double period = 0.0;
  PenaltyDiagnostics penalty;
  ShootingReport shooting;
  RefineResult refine;
  bool accepted = false;
  std::string reason;  // first failed check
};

/// Gradient threshold `grad_tol`; the remaining checks come from `tol`.
OrbitSolution make_solution(const Objective& obj, const RefineResult& refined, double grad_tol,
                            const AcceptanceTolerances& tol, const PenaltySchedule& schedule, double a_kappa,
                            int shooting_steps);

/// Trigonometric resampling of a loop onto another grid (winding kept).
LoopPoint resample(const LoopSpace& to, const LoopSpace& from, const LoopPoint& p);

struct ContinuationOptions {
  RefineOptions refine;
  AcceptanceTolerances tolerances;
  int shooting_steps = 10000;
  double tau_jump = 1.0;  // abort when tau moves more than this between steps
  double a_kappa = 0.0;
};

struct ContinuationResult {
  std::vector<OrbitSolution> solutions;
  std::optional<double> action_extrapolated;  // linear in eps through the last two accepted
  std::optional<double> tau_extrapolated;
  double tau_spread = 0.0;
  double t3 = 0.0;  // observed inf of tau
  bool aborted = false;
  std::string message;
};

/// Warm-started refinement down the remaining schedule entries.
ContinuationResult continue_epsilon(const LoopSpace& ls, const Symmetry& sym, const OrbitSolution& first,
                                    const PenaltySchedule& schedule, const ContinuationOptions& opt);

struct SolveOptions {
  int samples = 128;
  DerivativeScheme scheme = DerivativeScheme::kCentral;
  int path_nodes = 33;
  MountainPassOptions mountain_pass;
  ContinuationOptions continuation;
  RegularityOptions regularity;
  bool run_contact = true;
  ContactScanOptions contact;
  std::uint64_t seed = 1;
};

struct SolveReport {
  RegularityReport regularity;
  bool advisory = false;  // regularity failed: the hypotheses are unverified
  std::optional<ContactCheckReport> contact;
  std::string contact_error;
  double a_kappa = 0.0;
  LinkingEndpoints linking;
  double a_bar = 0.0;
  MountainPassResult mountain_pass;
  ContinuationResult continuation;
  OrbitSolution final_solution;
  bool sandwich = false;  // a_bar < A_eps(candidate) <= initial path max
  bool converged = false;
  std::string status;
};

/// linking -> mountain pass at the first eps -> refine -> continuation -> verification.
SolveReport solve(const GeometryBundle& bundle, const LinkingConfig& linking, const PenaltySchedule& schedule,
                  const SolveOptions& opt);

}  // namespace mechorbit
