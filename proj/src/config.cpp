#include "mechorbit/config.hpp"

#include "mechorbit/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace mechorbit {

namespace {

using json = nlohmann::ordered_json;

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key())) throw ConfigError(join(path, it.key()), "unknown key");
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  return j.get<double>();
}

template <class T>
void read(const json& obj, const char* key, const std::string& path, T& out) {
  if (!obj.contains(key)) return;
  const json& j = obj.at(key);
  const std::string p = join(path, key);
  if constexpr (std::is_same_v<T, bool>) {
    if (!j.is_boolean()) throw ConfigError(p, "expected true or false");
    out = j.get<bool>();
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!j.is_string()) throw ConfigError(p, "expected a string");
    out = j.get<std::string>();
  } else if constexpr (std::is_same_v<T, std::uint64_t>) {
    if (!j.is_number_unsigned()) throw ConfigError(p, "expected a non-negative integer");
    out = j.get<std::uint64_t>();
  } else if constexpr (std::is_integral_v<T>) {
    if (!j.is_number_integer()) throw ConfigError(p, "expected an integer");
    out = j.get<T>();
  } else {
    out = get_number(j, p);
  }
}

void read_optional(const json& obj, const char* key, const std::string& path, std::optional<double>& out) {
  if (!obj.contains(key)) return;
  const json& j = obj.at(key);
  if (j.is_null())
    out.reset();
  else
    out = get_number(j, join(path, key));
}

Vector read_vector(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of numbers");
  Vector v(static_cast<int>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<int>(i)) = get_number(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

std::vector<double> read_list(const json& j, const std::string& path) {
  const Vector v = read_vector(j, path);
  return std::vector<double>(v.begin(), v.end());
}

std::vector<Vector> read_points(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of points");
  std::vector<Vector> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(read_vector(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

json vec_json(const Vector& v) {
  json a = json::array();
  for (double x : v) a.push_back(x);
  return a;
}

json opt_json(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

std::string line_col(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

void parse_geometry(const json& j, GeometrySpec& g) {
  const std::string p = "geometry";
  check_keys(j, p, {"dimension", "potential", "metric", "chart"});
  read(j, "dimension", p, g.dimension);
  if (j.contains("potential")) {
    const json& v = j.at("potential");
    const std::string pp = p + ".potential";
    check_keys(v, pp, {"preset", "params", "expression"});
    if (v.contains("preset") && v.contains("expression"))
      throw ConfigError(pp, "give either preset or expression, not both");
    if (v.contains("expression")) {
      g.preset.clear();
      read(v, "expression", pp, g.potential);
    } else {
      read(v, "preset", pp, g.preset);
      g.potential.clear();
    }
    if (v.contains("params")) {
      const json& params = v.at("params");
      if (!params.is_object()) throw ConfigError(pp + ".params", "expected an object");
      g.params.clear();
      for (auto it = params.begin(); it != params.end(); ++it)
        g.params[it.key()] = get_number(it.value(), pp + ".params." + it.key());
    }
  }
  if (j.contains("metric")) {
    const json& m = j.at("metric");
    const std::string mp = p + ".metric";
    check_keys(m, mp, {"kind", "expression"});
    read(m, "kind", mp, g.metric);
    read(m, "expression", mp, g.metric_expression);
  }
  if (j.contains("chart")) {
    const json& c = j.at("chart");
    const std::string cp = p + ".chart";
    check_keys(c, cp, {"periods", "box_lo", "box_hi", "half_width"});
    read(c, "half_width", cp, g.half_width);
    if (c.contains("periods")) {
      const json& a = c.at("periods");
      if (!a.is_array()) throw ConfigError(cp + ".periods", "expected an array of numbers or nulls");
      g.periods.clear();
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].is_null())
          g.periods.emplace_back();
        else
          g.periods.emplace_back(get_number(a[i], cp + ".periods[" + std::to_string(i) + "]"));
      }
    }
    if (c.contains("box_lo")) g.box_lo = read_vector(c.at("box_lo"), cp + ".box_lo");
    if (c.contains("box_hi")) g.box_hi = read_vector(c.at("box_hi"), cp + ".box_hi");
  }
}

void parse_linking(const json& j, LinkingConfig& l) {
  const std::string p = "linking";
  check_keys(j, p, {"base_points", "waypoints", "sigma1", "sigma2", "b", "margin", "dwell", "rho", "nu", "symmetry",
                    "rotation_order", "potential_samples"});
  if (j.contains("base_points")) l.base_points = read_points(j.at("base_points"), p + ".base_points");
  if (j.contains("waypoints")) l.waypoints = read_points(j.at("waypoints"), p + ".waypoints");
  read_optional(j, "sigma1", p, l.sigma1);
  read_optional(j, "sigma2", p, l.sigma2);
  read_optional(j, "b", p, l.b);
  read(j, "margin", p, l.margin);
  read(j, "dwell", p, l.dwell);
  read(j, "rho", p, l.rho);
  read(j, "nu", p, l.nu);
  if (j.contains("symmetry")) {
    std::string s;
    read(j, "symmetry", p, s);
    try {
      l.symmetry = parse_symmetry(s);
    } catch (const Error& e) {
      throw ConfigError(p + ".symmetry", e.what());
    }
  }
  read(j, "rotation_order", p, l.rotation_order);
  read(j, "potential_samples", p, l.potential_samples);
}

void parse_root(const json& j, RunConfig& c) {
  check_keys(j, "", {"geometry", "discretization", "linking", "penalty", "tolerances", "mountain_pass", "verification",
                     "regularity", "contact", "output", "seed"});
  if (j.contains("geometry")) parse_geometry(j.at("geometry"), c.geometry);
  if (j.contains("discretization")) {
    const json& d = j.at("discretization");
    check_keys(d, "discretization", {"samples", "scheme", "path_nodes"});
    read(d, "samples", "discretization", c.samples);
    read(d, "path_nodes", "discretization", c.path_nodes);
    if (d.contains("scheme")) {
      std::string s;
      read(d, "scheme", "discretization", s);
      try {
        c.scheme = parse_scheme(s);
      } catch (const Error& e) {
        throw ConfigError("discretization.scheme", e.what());
      }
    }
  }
  if (j.contains("linking")) parse_linking(j.at("linking"), c.linking);
  if (j.contains("penalty")) {
    const json& s = j.at("penalty");
    check_keys(s, "penalty", {"eps", "tolerances", "default_tolerance", "a1", "a2"});
    if (s.contains("eps")) c.schedule.eps = read_list(s.at("eps"), "penalty.eps");
    if (s.contains("tolerances")) c.schedule.tolerances = read_list(s.at("tolerances"), "penalty.tolerances");
    read(s, "default_tolerance", "penalty", c.schedule.default_tolerance);
    read(s, "a1", "penalty", c.schedule.a1);
    read(s, "a2", "penalty", c.schedule.a2);
  }
  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    const std::string p = "tolerances";
    check_keys(t, p, {"level", "euler_lagrange", "closure", "refine", "newton_basin", "tau_jump"});
    read(t, "level", p, c.tolerances.level);
    read(t, "euler_lagrange", p, c.tolerances.euler_lagrange);
    read(t, "closure", p, c.tolerances.closure);
    read(t, "refine", p, c.refine_tol);
    read(t, "newton_basin", p, c.newton_basin);
    read(t, "tau_jump", p, c.tau_jump);
  }
  if (j.contains("mountain_pass")) {
    const json& m = j.at("mountain_pass");
    const std::string p = "mountain_pass";
    check_keys(m, p, {"max_iter", "tol", "push_radius", "stall_window", "stall_tol"});
    read(m, "max_iter", p, c.mp_max_iter);
    read(m, "tol", p, c.mp_tol);
    read(m, "push_radius", p, c.push_radius);
    read(m, "stall_window", p, c.stall_window);
    read(m, "stall_tol", p, c.stall_tol);
  }
  if (j.contains("verification")) {
    const json& v = j.at("verification");
    check_keys(v, "verification", {"shooting_steps"});
    read(v, "shooting_steps", "verification", c.shooting_steps);
  }
  if (j.contains("regularity")) {
    const json& r = j.at("regularity");
    const std::string p = "regularity";
    check_keys(r, p, {"center", "inner_radius", "outer_radius", "shells", "samples_per_shell", "ratio_threshold",
                      "gradient_floor"});
    if (r.contains("center")) {
      c.regularity.center = r.at("center").is_null() ? Vector() : read_vector(r.at("center"), p + ".center");
    }
    read(r, "inner_radius", p, c.regularity.inner_radius);
    read(r, "outer_radius", p, c.regularity.outer_radius);
    read(r, "shells", p, c.regularity.shells);
    read(r, "samples_per_shell", p, c.regularity.samples_per_shell);
    read(r, "ratio_threshold", p, c.regularity.ratio_threshold);
    read(r, "gradient_floor", p, c.regularity.gradient_floor);
  }
  if (j.contains("contact")) {
    const json& k = j.at("contact");
    const std::string p = "contact";
    check_keys(k, p, {"enabled", "eps0", "kappa", "samples"});
    read(k, "enabled", p, c.contact.enabled);
    read(k, "eps0", p, c.contact.eps0);
    read_optional(k, "kappa", p, c.contact.kappa);
    read(k, "samples", p, c.contact.samples);
  }
  read(j, "output", "", c.output);
  read(j, "seed", "", c.seed);
}

json to_json(const RunConfig& c) {
  const GeometrySpec& g = c.geometry;
  json pot;
  if (g.preset.empty()) {
    pot["expression"] = g.potential;
  } else {
    pot["preset"] = g.preset;
    json params = json::object();
    for (const auto& [k, v] : g.params) params[k] = v;
    pot["params"] = params;
  }
  json chart;
  json periods = json::array();
  for (const auto& p : g.periods) periods.push_back(opt_json(p));
  chart["periods"] = periods;
  chart["half_width"] = g.half_width;
  if (g.box_lo) chart["box_lo"] = vec_json(*g.box_lo);
  if (g.box_hi) chart["box_hi"] = vec_json(*g.box_hi);

  json j;
  j["geometry"] = {{"dimension", g.dimension},
                   {"potential", pot},
                   {"metric", {{"kind", g.metric}, {"expression", g.metric_expression}}},
                   {"chart", chart}};
  j["discretization"] = {{"samples", c.samples}, {"scheme", to_string(c.scheme)}, {"path_nodes", c.path_nodes}};
  const LinkingConfig& l = c.linking;
  json base = json::array(), way = json::array();
  for (const Vector& v : l.base_points) base.push_back(vec_json(v));
  for (const Vector& v : l.waypoints) way.push_back(vec_json(v));
  j["linking"] = {{"base_points", base},
                  {"waypoints", way},
                  {"sigma1", opt_json(l.sigma1)},
                  {"sigma2", opt_json(l.sigma2)},
                  {"b", opt_json(l.b)},
                  {"margin", l.margin},
                  {"dwell", l.dwell},
                  {"rho", l.rho},
                  {"nu", l.nu},
                  {"symmetry", to_string(l.symmetry)},
                  {"rotation_order", l.rotation_order},
                  {"potential_samples", l.potential_samples}};
  j["penalty"] = {{"eps", c.schedule.eps},
                  {"tolerances", c.schedule.tolerances},
                  {"default_tolerance", c.schedule.default_tolerance},
                  {"a1", c.schedule.a1},
                  {"a2", c.schedule.a2}};
  j["tolerances"] = {{"level", c.tolerances.level},
                     {"euler_lagrange", c.tolerances.euler_lagrange},
                     {"closure", c.tolerances.closure},
                     {"refine", c.refine_tol},
                     {"newton_basin", c.newton_basin},
                     {"tau_jump", c.tau_jump}};
  j["mountain_pass"] = {{"max_iter", c.mp_max_iter},
                        {"tol", c.mp_tol},
                        {"push_radius", c.push_radius},
                        {"stall_window", c.stall_window},
                        {"stall_tol", c.stall_tol}};
  j["verification"] = {{"shooting_steps", c.shooting_steps}};
  const RegularityOptions& r = c.regularity;
  j["regularity"] = {{"center", r.center.size() ? vec_json(r.center) : json(nullptr)},
                     {"inner_radius", r.inner_radius},
                     {"outer_radius", r.outer_radius},
                     {"shells", r.shells},
                     {"samples_per_shell", r.samples_per_shell},
                     {"ratio_threshold", r.ratio_threshold},
                     {"gradient_floor", r.gradient_floor}};
  j["contact"] = {{"enabled", c.contact.enabled},
                  {"eps0", c.contact.eps0},
                  {"kappa", opt_json(c.contact.kappa)},
                  {"samples", c.contact.samples}};
  j["output"] = c.output;
  j["seed"] = c.seed;
  return j;
}

void check_points(const std::vector<Vector>& pts, int dim, const std::string& path) {
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (pts[i].size() != dim)
      throw ConfigError(path + "[" + std::to_string(i) + "]", "expected " + std::to_string(dim) + " coordinates");
}

}  // namespace

void validate(const RunConfig& c) {
  const GeometrySpec& g = c.geometry;
  const int n = g.dimension;
  if (n < 1) throw ConfigError("geometry.dimension", "must be >= 1");
  if (!g.preset.empty()) {
    const auto& names = potential_preset_names();
    if (std::find(names.begin(), names.end(), g.preset) == names.end())
      throw ConfigError("geometry.potential.preset", "unknown preset '" + g.preset + "'");
    const ParamMap defaults = potential_preset_defaults(g.preset);
    for (const auto& [k, v] : g.params)
      if (!defaults.count(k)) throw ConfigError("geometry.potential.params." + k, "unknown parameter of " + g.preset);
  } else if (g.potential.empty()) {
    throw ConfigError("geometry.potential", "needs a preset or an expression");
  }
  if (g.metric != "flat" && g.metric != "conformal" && g.metric != "warped")
    throw ConfigError("geometry.metric.kind", "expected flat, conformal or warped");
  if (g.metric != "flat" && g.metric_expression.empty())
    throw ConfigError("geometry.metric.expression", "required for a " + g.metric + " metric");
  if (!g.periods.empty() && static_cast<int>(g.periods.size()) != n)
    throw ConfigError("geometry.chart.periods", "expected " + std::to_string(n) + " entries");
  if (g.box_lo && g.box_lo->size() != n) throw ConfigError("geometry.chart.box_lo", "expected " + std::to_string(n) + " entries");
  if (g.box_hi && g.box_hi->size() != n) throw ConfigError("geometry.chart.box_hi", "expected " + std::to_string(n) + " entries");
  if (!(g.half_width > 0)) throw ConfigError("geometry.chart.half_width", "must be positive");

  if (c.samples < 4) throw ConfigError("discretization.samples", "must be >= 4");
  if (c.path_nodes < 3) throw ConfigError("discretization.path_nodes", "must be >= 3");

  const LinkingConfig& l = c.linking;
  if (l.base_points.empty()) throw ConfigError("linking.base_points", "at least one base point is required");
  if (l.waypoints.empty()) throw ConfigError("linking.waypoints", "at least one waypoint is required");
  check_points(l.base_points, n, "linking.base_points");
  check_points(l.waypoints, n, "linking.waypoints");
  if (l.sigma1 && l.sigma2 && !(*l.sigma1 < *l.sigma2))
    throw ConfigError("linking.sigma1, linking.sigma2",
                      "linking.sigma1 (" + std::to_string(*l.sigma1) + ") must be below linking.sigma2 (" +
                          std::to_string(*l.sigma2) + ")");
  if (l.b && !(*l.b > 0)) throw ConfigError("linking.b", "must be positive");
  if (!(l.dwell > 0 && l.dwell < 1)) throw ConfigError("linking.dwell", "must lie in (0, 1)");
  if (l.rotation_order < 2) throw ConfigError("linking.rotation_order", "must be >= 2");

  try {
    c.schedule.validate();
  } catch (const Error& e) {
    throw ConfigError("penalty", e.what());
  }
  if (!(c.tolerances.level > 0)) throw ConfigError("tolerances.level", "must be positive");
  if (!(c.tolerances.euler_lagrange > 0)) throw ConfigError("tolerances.euler_lagrange", "must be positive");
  if (!(c.tolerances.closure > 0)) throw ConfigError("tolerances.closure", "must be positive");
  if (!(c.refine_tol > 0)) throw ConfigError("tolerances.refine", "must be positive");
  if (c.shooting_steps < 1) throw ConfigError("verification.shooting_steps", "must be positive");
  if (c.mp_max_iter < 0) throw ConfigError("mountain_pass.max_iter", "must be >= 0");
  if (c.regularity.center.size() && c.regularity.center.size() != n)
    throw ConfigError("regularity.center", "expected " + std::to_string(n) + " entries");
  if (!(c.regularity.inner_radius < c.regularity.outer_radius))
    throw ConfigError("regularity.inner_radius, regularity.outer_radius", "inner_radius must be below outer_radius");
  if (c.contact.samples < 1) throw ConfigError("contact.samples", "must be positive");

  try {
    build_bundle(g);
  } catch (const GeometryError& e) {
    throw ConfigError("geometry", e.what());
  }
}

RunConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::string what = e.what();
    const auto pos = what.find("syntax error");
    throw ConfigError(line_col(text, e.byte), pos == std::string::npos ? what : what.substr(pos));
  }
  RunConfig c;
  parse_root(j, c);
  validate(c);
  return c;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string write_config(const RunConfig& c) { return to_json(c).dump(2) + "\n"; }

bool operator==(const RunConfig& a, const RunConfig& b) { return to_json(a) == to_json(b); }

GeometryBundle build_bundle(const GeometrySpec& g) {
  const int n = g.dimension;
  ChartDomain chart = ChartDomain::euclidean(n, g.half_width);
  if (!g.periods.empty()) chart.periods = g.periods;
  if (g.box_lo) chart.box_lo = *g.box_lo;
  if (g.box_hi) chart.box_hi = *g.box_hi;
  chart.validate();

  MetricField metric = MetricField::flat(n);
  if (g.metric == "conformal")
    metric = MetricField::conformal(Expression::parse(g.metric_expression, n));
  else if (g.metric == "warped")
    metric = MetricField::warped(Expression::parse(g.metric_expression, n));
  else if (g.metric != "flat")
    throw GeometryError("unknown metric kind '" + g.metric + "'");

  PotentialField v = g.preset.empty() ? make_potential_expression(g.potential, n)
                                      : make_potential_preset(g.preset, n, g.params);
  return GeometryBundle{chart, metric, v};
}

SolveOptions solve_options(const RunConfig& c) {
  SolveOptions o;
  o.samples = c.samples;
  o.scheme = c.scheme;
  o.path_nodes = c.path_nodes;
  o.mountain_pass.max_iter = c.mp_max_iter;
  o.mountain_pass.tol = c.mp_tol;
  o.mountain_pass.push_radius = c.push_radius;
  o.mountain_pass.stall_window = c.stall_window;
  o.mountain_pass.stall_tol = c.stall_tol;
  o.continuation.refine.tol = c.refine_tol;
  o.continuation.refine.basin = c.newton_basin;
  o.continuation.tolerances = c.tolerances;
  o.continuation.shooting_steps = c.shooting_steps;
  o.continuation.tau_jump = c.tau_jump;
  o.regularity = c.regularity;
  o.run_contact = c.contact.enabled;
  o.contact.eps0 = c.contact.eps0;
  o.contact.kappa = c.contact.kappa;
  o.contact.samples = c.contact.samples;
  o.contact.regularity = c.regularity;
  o.seed = c.seed;
  return o;
}

}  // namespace mechorbit
