#include "mechorbit/minimax.hpp"

#include "mechorbit/errors.hpp"

#include <algorithm>
#include <cmath>

namespace mechorbit {

TangentField Objective::gradient(const LoopPoint& p, double* value) const {
  const PenalizedEval e = evaluate_penalized(*ls_, p, eps_);
  if (value) *value = e.value;
  return sym_.project(h1_representative(*ls_, e.base.partials(), e.d_tau));
}

LoopPoint Objective::move(const LoopPoint& p, const TangentField& f, double step) const {
  return sym_.project(*ls_, advance(*ls_, p, f, step));
}

LoopPoint Objective::interpolate(const LoopPoint& a, const LoopPoint& b, double t) const {
  return move(a, difference(*ls_, b, a), t);
}

double Objective::distance(const LoopPoint& a, const LoopPoint& b) const { return h1_norm(*ls_, difference(*ls_, b, a)); }

StepResult armijo_step(const Objective& obj, const LoopPoint& p, double value, const TangentField& g, double gnorm,
                       const StepPolicy& policy) {
  StepResult r{p, value, 0.0};
  if (!(gnorm > 0)) return r;
  double alpha = std::min(policy.initial, policy.max_step / gnorm);
  for (int k = 0; k <= policy.max_backtracks; ++k, alpha *= policy.factor) {
    LoopPoint q = obj.move(p, g, -alpha);
    const double v = obj.value(q);
    if (std::isfinite(v) && v <= value - policy.slope * alpha * gnorm * gnorm) {
      r.point = std::move(q);
      r.value = v;
      r.step = alpha;
      return r;
    }
  }
  return r;
}

DescentResult descend(const Objective& obj, const LoopPoint& start, const StepPolicy& policy, double tol, int max_iter) {
  if (!(tol > 0)) throw Error("descent tolerance must be positive");
  DescentResult r;
  r.point = obj.symmetry().project(obj.space(), start);
  double value = 0.0;
  TangentField g = obj.gradient(r.point, &value);
  double gn = h1_norm(obj.space(), g);
  for (; r.iterations < max_iter && std::isfinite(gn) && gn > tol; ++r.iterations) {
    const StepResult s = armijo_step(obj, r.point, value, g, gn, policy);
    if (s.step == 0.0) break;
    r.point = s.point;
    g = obj.gradient(r.point, &value);
    gn = h1_norm(obj.space(), g);
  }
  r.value = value;
  r.grad_norm = gn;
  r.converged = gn <= tol;
  return r;
}

int MinimaxPath::argmax() const {
  int k = 0;
  for (int i = 1; i < size(); ++i)
    if (values[i] > values[k]) k = i;
  return k;
}

MinimaxPath straight_path(const Objective& obj, const LoopPoint& a, const LoopPoint& b, int nodes) {
  if (nodes < 3) throw Error("a minimax path needs at least 3 nodes");
  MinimaxPath path;
  for (int j = 0; j < nodes; ++j) {
    const double t = static_cast<double>(j) / (nodes - 1);
    path.nodes.push_back(j == 0 ? a : j == nodes - 1 ? b : obj.interpolate(a, b, t));
    path.values.push_back(obj.value(path.nodes.back()));
  }
  return path;
}

namespace {

// Uniform arclength redistribution of the interior nodes of [lo, hi].
void redistribute(const Objective& obj, const MinimaxPath& old, int lo, int hi, MinimaxPath& out) {
  if (hi - lo < 2) return;
  std::vector<double> s(hi - lo + 1, 0.0);
  for (int j = lo; j < hi; ++j) s[j - lo + 1] = s[j - lo] + obj.distance(old.nodes[j], old.nodes[j + 1]);
  const double total = s.back();
  if (!(total > 0)) return;
  int seg = 0;
  for (int j = lo + 1; j < hi; ++j) {
    const double target = total * (j - lo) / (hi - lo);
    while (seg < hi - lo - 1 && s[seg + 1] < target) ++seg;
    const double len = s[seg + 1] - s[seg];
    const double t = len > 0 ? std::clamp((target - s[seg]) / len, 0.0, 1.0) : 0.0;
    out.nodes[j] = obj.interpolate(old.nodes[lo + seg], old.nodes[lo + seg + 1], t);
    out.values[j] = obj.value(out.nodes[j]);
  }
}

TangentField unit_tangent(const Objective& obj, const MinimaxPath& p, int j) {
  TangentField t = difference(obj.space(), p.nodes[j + 1], p.nodes[j - 1]);
  const double n = h1_norm(obj.space(), t);
  if (n > 0) {
    t.xi /= n;
    t.sigma /= n;
  }
  return t;
}

double mean_spacing(const Objective& obj, const MinimaxPath& p) {
  double s = 0.0;
  for (int j = 0; j + 1 < p.size(); ++j) s += obj.distance(p.nodes[j], p.nodes[j + 1]);
  return s / (p.size() - 1);
}

}  // namespace

MountainPassResult mountain_pass(const Objective& obj, MinimaxPath path, double a_bar, const MountainPassOptions& opt) {
  const int m = path.size();
  if (m < 3) throw SolverError("mountain_pass", "path needs at least 3 nodes");
  if (static_cast<int>(path.values.size()) != m) {
    path.values.resize(m);
    for (int j = 0; j < m; ++j) path.values[j] = obj.value(path.nodes[j]);
  }
  if (!(path.values.front() < a_bar && path.values.back() < a_bar))
    throw SolverError("mountain_pass", "path endpoints are not below the sublevel threshold");

  MountainPassResult r;
  r.a_bar = a_bar;
  r.initial_max = path.max();
  r.max_trace.push_back(r.initial_max);
  double gn = 0.0;
  for (; r.iterations < opt.max_iter; ++r.iterations) {
    const int k = path.argmax();
    if (k == 0 || k == m - 1) throw SolverError("mountain_pass", "linking violated: the path maximum reached an endpoint");
    const double current = path.values[k];
    double vk = 0.0;
    const TangentField gk = obj.gradient(path.nodes[k], &vk);
    gn = h1_norm(obj.space(), gk);
    if (gn <= opt.tol) {
      r.converged = true;
      break;
    }
    StepPolicy policy = opt.step;
    policy.max_step = std::min(policy.max_step, opt.step_fraction * mean_spacing(obj, path));
    for (int off = 0; off <= 2 * opt.push_radius; ++off) {
      const int j = k + (off % 2 ? (off + 1) / 2 : -off / 2);
      if (j <= 0 || j >= m - 1) continue;
      double v = vk;
      TangentField g = j == k ? gk : obj.gradient(path.nodes[j], &v);
      // Drop the component along the path so the node stays on its slice.
      const TangentField tan = unit_tangent(obj, path, j);
      const double along = h1_inner(obj.space(), g, tan);
      g.xi -= along * tan.xi;
      g.sigma -= along * tan.sigma;
      StepPolicy local = policy;
      for (int tries = 0; tries < 8; ++tries) {
        const StepResult s = armijo_step(obj, path.nodes[j], v, g, h1_norm(obj.space(), g), local);
        if (s.step == 0) break;
        // Reject pushes that carry a chord over the current maximum.
        if (obj.value(obj.interpolate(path.nodes[j - 1], s.point, 0.5)) <= current &&
            obj.value(obj.interpolate(s.point, path.nodes[j + 1], 0.5)) <= current) {
          path.nodes[j] = s.point;
          path.values[j] = s.value;
          break;
        }
        ++r.chord_rejected;
        local.max_step = 0.5 * s.step * h1_norm(obj.space(), g);
      }
    }
    MinimaxPath moved = path;
    redistribute(obj, path, 0, k, moved);
    redistribute(obj, path, k, m - 1, moved);
    if (moved.max() <= current) path = std::move(moved);
    else ++r.reparam_rejected;

    const double now = path.max();
    if (now > current) {
      r.monotone = false;
      throw SolverError("mountain_pass", "path maximum increased");
    }
    r.max_trace.push_back(now);
    const int t = static_cast<int>(r.max_trace.size()) - 1;
    if (t >= opt.stall_window && r.max_trace[t - opt.stall_window] - now <= opt.stall_tol * (1.0 + std::abs(now))) {
      r.status = "stalled";
      ++r.iterations;
      break;
    }
  }

  const int k = path.argmax();
  r.c_eps = path.values[k];
  r.candidate = path.nodes[k];
  r.candidate_value = path.values[k];
  r.grad_norm = r.converged ? gn : obj.gradient_norm(path.nodes[k]);

  if (r.converged) r.status = "converged";
  else if (r.status.empty()) r.status = "iteration cap";
  r.path = std::move(path);
  if (!(r.candidate_value > a_bar)) throw SolverError("mountain_pass", "linking violated: candidate at or below the sublevel threshold");
  return r;
}

double sublevel_threshold(const Objective& obj, const LinkingEndpoints& e) {
  const double top = std::max(obj.value(e.low), obj.value(e.high));
  return top < e.a ? e.a : top + 0.5 * e.a;
}

}  // namespace mechorbit
