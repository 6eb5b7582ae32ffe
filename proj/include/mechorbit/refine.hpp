#pragma once

#include "mechorbit/minimax.hpp"

#include <string>

namespace mechorbit {

struct RefineOptions {
  double tol = 1e-10;        // H1 x R gradient norm
  double basin = 2.0;        // no Newton above this gradient norm
  int max_iter = 40;
  double fd_step = 1e-6;     // Jacobian columns by central differences of the exact gradient
  int max_backtracks = 12;
  double rank_threshold = 1e-7;  // relative pivot threshold of the least-squares solve
  int fallback_iter = 500;       // descent iterations when Newton cannot proceed
};

struct RefineResult {
  LoopPoint point;
  double value = 0.0;
  double grad_norm_initial = 0.0;
  double grad_norm = 0.0;
  double el_initial = 0.0;
  double el_final = 0.0;
  std::vector<double> grad_trace;
  int iterations = 0;
  int pinned_sample = -1;
  int pinned_coordinate = -1;
  int rank = 0;
  int unknowns = 0;
  bool converged = false;
  bool fallback = false;  // descent was used after a failed Newton step
  std::string message;
};

/// Damped Gauss-Newton on the stationarity equations of A_eps in the free
/// coordinates (half the samples under the reflection symmetry, plus tau).
/// The sample coordinate with the largest |c'| is pinned to remove the
/// rotation of the parameter circle.
RefineResult refine(const Objective& obj, const LoopPoint& start, const RefineOptions& opt);

}  // namespace mechorbit
