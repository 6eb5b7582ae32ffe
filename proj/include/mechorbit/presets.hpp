#pragma once

#include "mechorbit/geometry.hpp"

#include <map>
#include <string>
#include <vector>

namespace mechorbit {

using ParamMap = std::map<std::string, double>;

/// Names accepted by make_potential_preset.
const std::vector<std::string>& potential_preset_names();

/// Default parameters of a preset; unknown names throw GeometryError.
ParamMap potential_preset_defaults(const std::string& name);

/// Potential catalog, all with analytic jets:
///   harmonic       k/2 |q|^2 - V0                         (k, V0)
///   linear         slope q1 + offset                       (slope, offset)
///   double_well    a (q1^2 - 1)^2 + |q'|^2/2 - V0          (a, V0)
///   cutoff_saddle  rho(|q|)/2 (sum_{i<=p} q_i^2 - sum_{i>p} q_i^2) - C
///                  with rho = 0 for |q| <= r0, 1 for |q| >= r1 (positive, C, r0, r1)
/// Parameters missing from `params` take their defaults; unknown keys throw.
PotentialField make_potential_preset(const std::string& name, int n, const ParamMap& params);

PotentialField make_potential_expression(const std::string& text, int n);

/// C^2 quintic step: 0 below r0, 1 above r1.
double cutoff_profile(double r, double r0, double r1);
Jet cutoff_profile(const Jet& r, double r0, double r1);

}  // namespace mechorbit
