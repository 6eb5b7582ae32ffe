#include "mechorbit/presets.hpp"

#include "mechorbit/errors.hpp"

#include <cmath>

namespace mechorbit {

namespace {

ParamMap merged(const std::string& name, const ParamMap& params) {
  ParamMap out = potential_preset_defaults(name);
  for (const auto& [key, value] : params) {
    auto it = out.find(key);
    if (it == out.end()) throw GeometryError("preset " + name + " has no parameter '" + key + "'");
    if (!std::isfinite(value)) throw GeometryError("preset " + name + " parameter '" + key + "' is not finite");
    it->second = value;
  }
  return out;
}

std::vector<Jet> variables(const Vector& q) {
  const int n = static_cast<int>(q.size());
  std::vector<Jet> x;
  x.reserve(n);
  for (int i = 0; i < n; ++i) x.push_back(Jet::variable(q(i), i, n));
  return x;
}

}  // namespace

const std::vector<std::string>& potential_preset_names() {
  static const std::vector<std::string> names{"harmonic", "linear", "double_well", "cutoff_saddle"};
  return names;
}

ParamMap potential_preset_defaults(const std::string& name) {
  if (name == "harmonic") return {{"k", 1.0}, {"V0", 0.5}};
  if (name == "linear") return {{"slope", 1.0}, {"offset", 0.0}};
  if (name == "double_well") return {{"a", 1.0}, {"V0", 0.5}};
  if (name == "cutoff_saddle") return {{"positive", 2.0}, {"C", 1.0}, {"r0", 1.0}, {"r1", 2.0}};
  throw GeometryError("unknown potential preset '" + name + "'");
}

double cutoff_profile(double r, double r0, double r1) {
  if (r <= r0) return 0.0;
  if (r >= r1) return 1.0;
  const double t = (r - r0) / (r1 - r0);
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

Jet cutoff_profile(const Jet& r, double r0, double r1) {
  const int n = r.dim();
  if (r.v <= r0) return Jet::constant(0.0, n);
  if (r.v >= r1) return Jet::constant(1.0, n);
  const double w = r1 - r0;
  const double t = (r.v - r0) / w;
  const double f0 = t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
  const double f1 = 30.0 * t * t * (1.0 - t) * (1.0 - t) / w;
  const double f2 = 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t) / (w * w);
  return detail::chain(r, f0, f1, f2);
}

PotentialField make_potential_preset(const std::string& name, int n, const ParamMap& params) {
  if (n < 1 || n > kMaxJetDim) throw GeometryError("preset dimension must be in [1, " + std::to_string(kMaxJetDim) + "]");
  const ParamMap p = merged(name, params);
  if (name == "harmonic") {
    const double k = p.at("k"), v0 = p.at("V0");
    if (!(k > 0.0)) throw GeometryError("harmonic needs k > 0");
    return PotentialField::from_jet(n, [k, v0, n](const Vector& q) {
      const auto x = variables(q);
      Jet s = Jet::constant(0.0, n);
      for (const auto& xi : x) s = s + xi * xi;
      return 0.5 * k * s - v0;
    }, name);
  }
  if (name == "linear") {
    const double slope = p.at("slope"), offset = p.at("offset");
    return PotentialField::from_jet(n, [slope, offset, n](const Vector& q) {
      return slope * Jet::variable(q(0), 0, n) + offset;
    }, name);
  }
  if (name == "double_well") {
    const double a = p.at("a"), v0 = p.at("V0");
    if (!(a > 0.0)) throw GeometryError("double_well needs a > 0");
    return PotentialField::from_jet(n, [a, v0, n](const Vector& q) {
      const auto x = variables(q);
      const Jet w = x[0] * x[0] - 1.0;
      Jet s = a * (w * w) - v0;
      for (int i = 1; i < n; ++i) s = s + 0.5 * (x[i] * x[i]);
      return s;
    }, name);
  }
  // cutoff_saddle
  const double positive = p.at("positive"), c = p.at("C"), r0 = p.at("r0"), r1 = p.at("r1");
  const int np = static_cast<int>(positive);
  if (np != positive || np < 0 || np > n) throw GeometryError("cutoff_saddle needs an integer 0 <= positive <= n");
  if (!(r1 > r0) || r0 < 0.0) throw GeometryError("cutoff_saddle needs 0 <= r0 < r1");
  return PotentialField::from_jet(n, [np, c, r0, r1, n](const Vector& q) {
    const auto x = variables(q);
    Jet quad = Jet::constant(0.0, n);
    Jet r2 = Jet::constant(0.0, n);
    for (int i = 0; i < n; ++i) {
      const Jet sq = x[i] * x[i];
      quad = i < np ? quad + sq : quad - sq;
      r2 = r2 + sq;
    }
    if (r2.v <= r0 * r0) return Jet::constant(-c, n);
    const Jet rho = r2.v >= r1 * r1 ? Jet::constant(1.0, n) : cutoff_profile(sqrt(r2), r0, r1);
    return 0.5 * (rho * quad) - c;
  }, name);
}

PotentialField make_potential_expression(const std::string& text, int n) {
  return PotentialField::from_expression(Expression::parse(text, n), "expression");
}

}  // namespace mechorbit
