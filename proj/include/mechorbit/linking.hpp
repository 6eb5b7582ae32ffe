#pragma once

#include "mechorbit/loopspace.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace mechorbit {

/// auto: the half-period reflection when V and g allow it. rotation: a turn
/// of the (q1, q2) plane by 2 pi / rotation_order.
enum class SymmetryMode { kAuto, kReflection, kRotation, kNone };

std::string to_string(SymmetryMode m);
SymmetryMode parse_symmetry(const std::string& s);

/// User-facing linking data; unset optionals are derived.
struct LinkingConfig {
  std::vector<Vector> base_points;  // V < 0; the first one is the low endpoint
  std::vector<Vector> waypoints;    // V > 0, visited in order by the seed loop
  std::optional<double> sigma1;
  std::optional<double> sigma2;
  std::optional<double> b;
  double margin = 0.5;
  double dwell = 0.9;  // fraction of the seed period spent at waypoints
  double rho = 0.0;    // recorded only
  double nu = 0.0;     // recorded only
  SymmetryMode symmetry = SymmetryMode::kAuto;
  int rotation_order = 4;
  int potential_samples = 1000;  // box samples for min V
};

/// Cyclic symmetry c(s + 1/m) = center + R (c(s) - center), imposed on every
/// path node. The reflection is m = 2, R = -I.
struct Symmetry {
  bool enabled = false;
  Vector center;
  Matrix rotation;
  int order = 1;

  static Symmetry reflection(const Vector& center);
  /// Turn by 2 pi / order in the (q1, q2) plane.
  static Symmetry rotation_about(const Vector& center, int order);

  /// Samples determined freely; the rest follow from the group.
  int free_rows(int n_samples) const { return enabled ? n_samples / order : n_samples; }
  LoopPoint project(const LoopSpace& ls, const LoopPoint& p) const;
  TangentField project(const TangentField& f) const;
  /// q -> center + R (q - center).
  Vector act(const Vector& q) const { return center + rotation * (q - center); }
};

struct LinkingEndpoints {
  LoopPoint low;   // constant loop at the base point, tau = sigma1
  LoopPoint high;  // seed loop, tau = sigma2
  double sigma1 = 0.0, sigma2 = 0.0;
  double a = 0.0, b = 0.0;
  double v_max = 0.0;       // max |V| over base points
  double energy_max = 0.0;  // energy of the seed loop
  double min_potential = 0.0;
  double seed_potential = 0.0;  // mean of V over the seed loop
  double action_low = 0.0, action_high = 0.0;
  double rho = 0.0, nu = 0.0;
  Symmetry symmetry;
  std::string symmetry_reason;
};

/// Seed loop through the waypoints: dwells a fraction `dwell` of the period at
/// them, with C1 smoothstep transitions along shortest chart segments.
DiscreteLoop seed_loop(const LoopSpace& ls, const std::vector<Vector>& waypoints, double dwell);

/// True when V and g are invariant under the group on random box samples
/// (and no coordinate is periodic).
bool symmetry_invariant(const GeometryBundle& b, const Symmetry& sym, std::uint64_t seed, std::string* why = nullptr);

LinkingEndpoints build_linking_endpoints(const LoopSpace& ls, const LinkingConfig& cfg, std::uint64_t seed);

}  // namespace mechorbit
