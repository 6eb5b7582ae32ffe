#include "mechorbit/refine.hpp"

#include "mechorbit/errors.hpp"

#include <cmath>

namespace mechorbit {

namespace {

// Free coordinates: rows [0, free_rows) of the lifted samples and tau.
struct Chart {
  const Objective* obj;
  int n, dim, free_rows;
  Eigen::VectorXi winding;

  int size() const { return free_rows * dim + 1; }

  Vector encode(const LoopPoint& p) const {
    const Matrix u = obj->space().unwrap(p.loop);
    Vector x(size());
    for (int i = 0; i < free_rows; ++i)
      for (int k = 0; k < dim; ++k) x(i * dim + k) = u(i, k);
    x(size() - 1) = p.tau;
    return x;
  }

  LoopPoint decode(const Vector& x) const {
    const Symmetry& sym = obj->symmetry();
    Matrix u(n, dim);
    for (int i = 0; i < free_rows; ++i)
      for (int k = 0; k < dim; ++k) u(i, k) = x(i * dim + k);
    for (int j = 1; free_rows < n && j < sym.order; ++j)
      for (int i = 0; i < free_rows; ++i) u.row(i + j * free_rows) = sym.act(u.row(i + (j - 1) * free_rows).transpose()).transpose();
    return LoopPoint{obj->space().make_loop(u, winding), x(size() - 1)};
  }

  // Partials in the free coordinates, loop part scaled to an L2 density.
  Vector residual(const Vector& x) const {
    const LoopPoint p = decode(x);
    const PenalizedEval e = evaluate_penalized(obj->space(), p, obj->eps());
    Matrix part = e.base.partials();
    const Symmetry& sym = obj->symmetry();
    if (free_rows < n) {
      // Chain rule through u_{i + j n/m} = center + R^j (u_i - center).
      Matrix folded = Matrix::Zero(free_rows, dim);
      Matrix power = Matrix::Identity(dim, dim);
      for (int j = 0; j < sym.order; ++j) {
        folded += part.middleRows(j * free_rows, free_rows) * power;
        power = sym.rotation * power;
      }
      part = folded;
    }
    Vector r(size());
    for (int i = 0; i < free_rows; ++i)
      for (int k = 0; k < dim; ++k) r(i * dim + k) = n * part(i, k);
    r(size() - 1) = e.d_tau;
    return r;
  }
};

}  // namespace

RefineResult refine(const Objective& obj, const LoopPoint& start, const RefineOptions& opt) {
  const LoopSpace& ls = obj.space();
  RefineResult res;
  res.point = obj.symmetry().project(ls, start);
  res.grad_norm_initial = res.grad_norm = obj.gradient_norm(res.point);
  res.el_initial = res.el_final = euler_lagrange_residual(ls, res.point).l2;
  res.grad_trace.push_back(res.grad_norm);
  auto finish = [&]() {
    res.value = obj.value(res.point);
    res.el_final = euler_lagrange_residual(ls, res.point).l2;
    res.converged = res.grad_norm <= opt.tol;
    return res;
  };
  if (res.grad_norm <= opt.tol) {
    res.message = "already stationary";
    return finish();
  }
  if (!(res.grad_norm <= opt.basin)) {
    res.message = "outside the Newton basin (gradient norm " + std::to_string(res.grad_norm) + ")";
    return finish();
  }

  const Chart chart{&obj, ls.size(), ls.dimension(), obj.symmetry().free_rows(ls.size()), res.point.loop.winding};

  // Pin the free sample coordinate along which the loop moves fastest.
  const Matrix cp = loop_derivative(ls, res.point.loop);
  double best = -1.0;
  for (int i = 0; i < chart.free_rows; ++i)
    for (int k = 0; k < chart.dim; ++k)
      if (std::abs(cp(i, k)) > best) {
        best = std::abs(cp(i, k));
        res.pinned_sample = i;
        res.pinned_coordinate = k;
      }
  const int pinned = res.pinned_sample * chart.dim + res.pinned_coordinate;
  res.unknowns = chart.size() - 1;

  Vector x = chart.encode(res.point);
  Vector r = chart.residual(x);
  for (; res.iterations < opt.max_iter && res.grad_norm > opt.tol; ++res.iterations) {
    Matrix jac(chart.size(), res.unknowns);
    for (int c = 0, col = 0; c < chart.size(); ++c) {
      if (c == pinned) continue;
      Vector xp = x, xm = x;
      xp(c) += opt.fd_step;
      xm(c) -= opt.fd_step;
      jac.col(col++) = (chart.residual(xp) - chart.residual(xm)) / (2 * opt.fd_step);
    }
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(jac);
    cod.setThreshold(opt.rank_threshold);
    res.rank = static_cast<int>(cod.rank());
    const Vector delta = cod.solve(-r);

    double alpha = 1.0;
    bool accepted = false;
    for (int b = 0; b <= opt.max_backtracks; ++b, alpha *= 0.5) {
      Vector y = x;
      for (int c = 0, col = 0; c < chart.size(); ++c) {
        if (c == pinned) continue;
        y(c) += alpha * delta(col++);
      }
      const Vector ry = chart.residual(y);
      if (ry.allFinite() && ry.norm() < r.norm()) {
        x = y;
        r = ry;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    res.point = chart.decode(x);
    res.grad_norm = obj.gradient_norm(res.point);
    res.grad_trace.push_back(res.grad_norm);
  }
  if (res.grad_norm <= opt.tol) {
    res.message = "converged";
    return finish();
  }
  // Newton stalled: descend from the best point and report the fallback.
  res.fallback = true;
  const DescentResult d = descend(obj, res.point, StepPolicy{}, opt.tol, opt.fallback_iter);
  if (d.grad_norm < res.grad_norm) {
    res.point = d.point;
    res.grad_norm = d.grad_norm;
  }
  res.message = "Newton stalled (rank " + std::to_string(res.rank) + " of " + std::to_string(res.unknowns) + "), descent fallback";
  return finish();
}

}  // namespace mechorbit
