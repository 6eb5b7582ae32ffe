#include "mechorbit/linking.hpp"

#include "mechorbit/errors.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace mechorbit {

std::string to_string(SymmetryMode m) {
  switch (m) {
    case SymmetryMode::kAuto: return "auto";
    case SymmetryMode::kReflection: return "reflection";
    case SymmetryMode::kRotation: return "rotation";
    case SymmetryMode::kNone: return "none";
  }
  return "auto";
}

SymmetryMode parse_symmetry(const std::string& s) {
  if (s == "auto") return SymmetryMode::kAuto;
  if (s == "reflection") return SymmetryMode::kReflection;
  if (s == "rotation") return SymmetryMode::kRotation;
  if (s == "none") return SymmetryMode::kNone;
  throw Error("unknown symmetry mode '" + s + "' (expected auto, reflection, rotation or none)");
}

Symmetry Symmetry::reflection(const Vector& center) {
  return Symmetry{true, center, -Matrix::Identity(center.size(), center.size()), 2};
}

Symmetry Symmetry::rotation_about(const Vector& center, int order) {
  if (center.size() < 2) throw Error("rotation symmetry needs at least two coordinates");
  if (order < 2) throw Error("rotation order must be at least 2");
  Matrix r = Matrix::Identity(center.size(), center.size());
  const double a = 2.0 * std::numbers::pi / order;
  r(0, 0) = std::cos(a);
  r(0, 1) = -std::sin(a);
  r(1, 0) = std::sin(a);
  r(1, 1) = std::cos(a);
  return Symmetry{true, center, r, order};
}

LoopPoint Symmetry::project(const LoopSpace& ls, const LoopPoint& p) const {
  if (!enabled) return p;
  return LoopPoint{ls.make_loop(symmetrize_positions(ls.unwrap(p.loop), center, rotation, order), p.loop.winding), p.tau};
}

TangentField Symmetry::project(const TangentField& f) const {
  if (!enabled) return f;
  return TangentField{symmetrize_field(f.xi, rotation, order), f.sigma};
}

namespace {

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

Vector box_sample(const ChartDomain& c, std::mt19937_64& rng) {
  Vector q(c.dimension);
  for (int k = 0; k < c.dimension; ++k) {
    const double lo = c.box_lo(k);
    const double hi = c.is_periodic(k) ? lo + c.period(k) : c.box_hi(k);
    q(k) = std::uniform_real_distribution<double>(lo, hi)(rng);
  }
  return q;
}

std::string fmt(const Vector& q) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index k = 0; k < q.size(); ++k) os << (k ? ", " : "") << q(k);
  os << ")";
  return os.str();
}

}  // namespace

DiscreteLoop seed_loop(const LoopSpace& ls, const std::vector<Vector>& waypoints, double dwell) {
  const ChartDomain& chart = ls.bundle().chart;
  const int n = ls.size(), dim = ls.dimension();
  const int m = static_cast<int>(waypoints.size());
  if (m == 0) throw Error("seed loop needs at least one waypoint");
  if (!(dwell > 0 && dwell < 1)) throw Error("seed dwell fraction must lie in (0, 1)");
  Matrix u(n, dim);
  for (int i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) * m / n;
    const int k = std::min(static_cast<int>(std::floor(x)), m - 1);
    const double t = x - k;
    const Vector& from = waypoints[k];
    const Vector& to = waypoints[(k + 1) % m];
    // Dwell centered on each waypoint: half before, half after the transition.
    const double h = 0.5 * dwell;
    double w = 0.0;
    if (t > h && t < 1.0 - h) w = smoothstep((t - h) / (1.0 - dwell));
    else if (t >= 1.0 - h) w = 1.0;
    Vector d(dim);
    for (int c = 0; c < dim; ++c) d(c) = chart.shortest(c, to(c) - from(c));
    u.row(i) = (from + w * d).transpose();
  }
  return ls.make_loop(u);
}

bool symmetry_invariant(const GeometryBundle& b, const Symmetry& sym, std::uint64_t seed, std::string* why) {
  auto fail = [&](const std::string& s) {
    if (why) *why = s;
    return false;
  };
  for (int k = 0; k < b.dimension(); ++k)
    if (b.chart.is_periodic(k)) return fail("periodic coordinate q" + std::to_string(k + 1));
  std::mt19937_64 rng(seed);
  int checked = 0;
  for (int t = 0; t < 200; ++t) {
    const Vector q = box_sample(b.chart, rng);
    const Vector r = sym.act(q);
    if (!b.chart.in_box(r)) continue;
    ++checked;
    const double vq = b.potential(q), vr = b.potential(r);
    if (std::abs(vq - vr) > 1e-10 * (1.0 + std::abs(vq))) return fail("potential not invariant at " + fmt(q));
    // g(Rq) = R g(q) R^T for an isometry.
    const Matrix gq = sym.rotation * b.metric(q) * sym.rotation.transpose(), gr = b.metric(r);
    if ((gq - gr).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + gq.cwiseAbs().maxCoeff())) return fail("metric not invariant at " + fmt(q));
  }
  if (checked == 0) return fail("no transformed sample inside the chart box");
  if (why) *why = "V and g invariant";
  return true;
}

LinkingEndpoints build_linking_endpoints(const LoopSpace& ls, const LinkingConfig& cfg, std::uint64_t seed) {
  const GeometryBundle& bundle = ls.bundle();
  if (cfg.base_points.empty()) throw SolverError("linking", "no base point given");
  if (cfg.waypoints.empty()) throw SolverError("linking", "no admissible waypoints");
  for (const Vector& q : cfg.base_points) {
    if (q.size() != bundle.dimension()) throw SolverError("linking", "base point has the wrong dimension");
    if (!(bundle.potential(q) < 0)) throw SolverError("linking", "base point " + fmt(q) + " has V >= 0");
  }
  for (const Vector& w : cfg.waypoints) {
    if (w.size() != bundle.dimension()) throw SolverError("linking", "waypoint has the wrong dimension");
    if (!(bundle.potential(w) > 0)) throw SolverError("linking", "waypoint " + fmt(w) + " has V <= 0");
  }

  LinkingEndpoints e;
  e.rho = cfg.rho;
  e.nu = cfg.nu;
  const Vector center = cfg.base_points.front();

  std::string why;
  Symmetry sym;
  if (cfg.symmetry == SymmetryMode::kRotation) {
    try {
      sym = Symmetry::rotation_about(center, cfg.rotation_order);
    } catch (const Error& e) {
      throw SolverError("linking", e.what());
    }
  } else if (cfg.symmetry != SymmetryMode::kNone) sym = Symmetry::reflection(center);
  bool invariant = false;
  if (cfg.symmetry == SymmetryMode::kNone) why = "disabled by config";
  else if (ls.size() % sym.order != 0) why = "symmetry order does not divide the number of samples";
  else invariant = symmetry_invariant(bundle, sym, seed, &why);
  if (cfg.symmetry != SymmetryMode::kAuto && cfg.symmetry != SymmetryMode::kNone && !invariant)
    throw SolverError("linking", to_string(cfg.symmetry) + " symmetry requested but unavailable: " + why);
  sym.enabled = invariant;
  e.symmetry = sym;
  e.symmetry_reason = why;

  // The seed must be symmetric: close the waypoint list under the group.
  std::vector<Vector> way = cfg.waypoints;
  if (e.symmetry.enabled) {
    const std::size_t m = way.size(), order = static_cast<std::size_t>(sym.order);
    bool closed = m % order == 0;
    for (std::size_t k = 0; closed && k + m / order < m; ++k)
      closed = (way[k + m / order] - sym.act(way[k])).norm() <= 1e-12 * (1.0 + way[k].norm());
    if (!closed) {
      way.clear();
      for (std::size_t j = 0; j < order; ++j)
        for (const Vector& w : cfg.waypoints) {
          Vector x = w;
          for (std::size_t p = 0; p < j; ++p) x = sym.act(x);
          way.push_back(x);
        }
    }
  }

  DiscreteLoop seed_lp = seed_loop(ls, way, cfg.dwell);
  if (e.symmetry.enabled) seed_lp = e.symmetry.project(ls, LoopPoint{seed_lp, 0.0}).loop;
  const ActionEval se = evaluate_action(ls, LoopPoint{seed_lp, 0.0}, false);
  e.seed_potential = se.potential;
  e.energy_max = se.energy;
  if (!(e.seed_potential > 0))
    throw SolverError("linking", "seed loop fails the positive potential average test (mean V = " +
                                     std::to_string(e.seed_potential) + ")");

  std::mt19937_64 rng(seed);
  double vmin = 0.0;
  for (const Vector& q : cfg.base_points) {
    vmin = std::min(vmin, bundle.potential(q));
    e.v_max = std::max(e.v_max, std::abs(bundle.potential(q)));
  }
  for (int t = 0; t < cfg.potential_samples; ++t) vmin = std::min(vmin, bundle.potential(box_sample(bundle.chart, rng)));
  e.min_potential = vmin;

  e.b = cfg.b.value_or(0.1 * std::abs(vmin));
  if (!(e.b > 0)) throw SolverError("linking", "b must be positive");
  e.a = 0.5 * e.b;
  e.sigma1 = cfg.sigma1.value_or(std::log(e.b / (2.0 * e.v_max)) - cfg.margin);
  e.sigma2 = cfg.sigma2.value_or(std::max(std::log(e.energy_max / e.b), e.sigma1) + cfg.margin);
  if (!(e.sigma1 < e.sigma2))
    throw SolverError("linking", "sigma1 = " + std::to_string(e.sigma1) + " must be below sigma2 = " + std::to_string(e.sigma2));

  e.low = LoopPoint{ls.constant_loop(center), e.sigma1};
  e.high = LoopPoint{seed_lp, e.sigma2};
  e.action_low = action(ls, e.low);
  e.action_high = action(ls, e.high);
  if (e.action_low > e.a || e.action_high > e.a)
    throw SolverError("linking", "endpoint actions " + std::to_string(e.action_low) + ", " + std::to_string(e.action_high) +
                                     " exceed a = " + std::to_string(e.a));
  return e;
}

}  // namespace mechorbit
