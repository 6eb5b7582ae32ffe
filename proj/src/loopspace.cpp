#include "mechorbit/loopspace.hpp"

#include "mechorbit/errors.hpp"

#include <cmath>
#include <numbers>

namespace mechorbit {

using std::numbers::pi;

std::string to_string(DerivativeScheme s) { return s == DerivativeScheme::kCentral ? "central" : "spectral"; }

DerivativeScheme parse_scheme(const std::string& s) {
  if (s == "central") return DerivativeScheme::kCentral;
  if (s == "spectral") return DerivativeScheme::kSpectral;
  throw Error("unknown derivative scheme '" + s + "'");
}

// ---------------------------------------------------------------- cyclic solver

CyclicH1Solver::CyclicH1Solver(int n) : n_(n) {
  if (n < 3) throw Error("cyclic solver needs at least 3 unknowns");
  const double nn = static_cast<double>(n) * n;
  diag_ = 1.0 + 2.0 * nn;
  off_ = -nn;
  gamma_ = -diag_;
  c_prime_.resize(n);
  denom_.resize(n);
  for (int i = 0; i < n; ++i) {
    double b = diag_;
    if (i == 0) b = diag_ - gamma_;
    if (i == n - 1) b = diag_ - off_ * off_ / gamma_;
    denom_(i) = i == 0 ? b : b - off_ * c_prime_(i - 1);
    c_prime_(i) = off_ / denom_(i);
  }
  Vector u = Vector::Zero(n);
  u(0) = gamma_;
  u(n - 1) = off_;
  z_ = thomas(u);
  vz_ = z_(0) + (off_ / gamma_) * z_(n - 1);
}

Vector CyclicH1Solver::thomas(const Vector& r) const {
  Vector d(n_);
  d(0) = r(0) / denom_(0);
  for (int i = 1; i < n_; ++i) d(i) = (r(i) - off_ * d(i - 1)) / denom_(i);
  for (int i = n_ - 2; i >= 0; --i) d(i) -= c_prime_(i) * d(i + 1);
  return d;
}

Vector CyclicH1Solver::solve(const Vector& r) const {
  const Vector y = thomas(r);
  const double factor = (y(0) + (off_ / gamma_) * y(n_ - 1)) / (1.0 + vz_);
  return y - factor * z_;
}

Vector CyclicH1Solver::apply(const Vector& x) const {
  Vector r(n_);
  for (int i = 0; i < n_; ++i) r(i) = diag_ * x(i) + off_ * (x((i + n_ - 1) % n_) + x((i + 1) % n_));
  return r;
}

// ---------------------------------------------------------------- spectral kernels

namespace {

// Trigonometric interpolation kernel on N (even) points of [0, 1).
double kernel(double x, int n) {
  const double sx = std::sin(pi * x);
  if (std::abs(sx) < 1e-14) return 1.0;
  return (std::sin(pi * (n - 1) * x) / sx + std::cos(pi * n * x)) / n;
}

double kernel_derivative(double x, int n) {
  const double sx = std::sin(pi * x), cx = std::cos(pi * x);
  if (std::abs(sx) < 1e-14) return 0.0;
  const double a = pi * (n - 1);
  const double num = a * std::cos(a * x) * sx - pi * std::sin(a * x) * cx;
  return (num / (sx * sx) - pi * n * std::sin(pi * n * x)) / n;
}

}  // namespace

// ---------------------------------------------------------------- loop space

LoopSpace::LoopSpace(const GeometryBundle& bundle, int n_samples, DerivativeScheme scheme)
    : bundle_(&bundle), n_(n_samples), scheme_(scheme), solver_(std::max(n_samples, 3)) {
  if (n_samples < 8) throw Error("loops need at least 8 samples");
  if (scheme == DerivativeScheme::kSpectral) {
    if (n_ % 2 != 0) throw Error("spectral scheme needs an even number of samples");
    s_mid_.resize(n_, n_);
    d_mid_.resize(n_, n_);
    d_node_.resize(n_, n_);
    d2_node_.resize(n_, n_);
    for (int j = 0; j < n_; ++j) {
      for (int i = 0; i < n_; ++i) {
        const double x = (j - i + 0.5) / n_;
        s_mid_(j, i) = kernel(x, n_);
        d_mid_(j, i) = kernel_derivative(x, n_);
        const int m = j - i;
        if (m == 0) {
          d_node_(j, i) = 0.0;
          d2_node_(j, i) = -(4.0 * pi * pi) * (static_cast<double>(n_) * n_ / 12.0 + 1.0 / 6.0);
        } else {
          const double sign = (m % 2 == 0) ? 1.0 : -1.0;
          const double t = pi * m / n_;
          d_node_(j, i) = sign * pi / std::tan(t);
          d2_node_(j, i) = -(4.0 * pi * pi) * sign / (2.0 * std::sin(t) * std::sin(t));
        }
      }
    }
  }
}

void LoopSpace::validate(const DiscreteLoop& loop) const {
  if (loop.size() != n_) throw Error("loop has " + std::to_string(loop.size()) + " samples, expected " + std::to_string(n_));
  if (loop.dimension() != dimension()) throw Error("loop dimension mismatch");
  if (!loop.samples.allFinite()) throw Error("loop samples must be finite");
  if (loop.winding.size() != dimension()) throw Error("loop winding size mismatch");
}

DiscreteLoop LoopSpace::make_loop(const Matrix& samples) const {
  const ChartDomain& c = bundle_->chart;
  Eigen::VectorXi w = Eigen::VectorXi::Zero(dimension());
  if (samples.cols() == dimension() && samples.rows() == n_) {
    for (int k = 0; k < dimension(); ++k) {
      if (!c.is_periodic(k)) continue;
      double total = 0.0;
      for (int i = 0; i < n_; ++i) total += c.shortest(k, samples((i + 1) % n_, k) - samples(i, k));
      w(k) = static_cast<int>(std::lround(total / c.period(k)));
    }
  }
  return make_loop(samples, w);
}

DiscreteLoop LoopSpace::make_loop(const Matrix& samples, const Eigen::VectorXi& winding) const {
  DiscreteLoop loop{samples, winding};
  validate(loop);
  for (int i = 0; i < n_; ++i) bundle_->chart.wrap_point(loop.samples.row(i).transpose());
  for (int k = 0; k < dimension(); ++k)
    if (!bundle_->chart.is_periodic(k) && winding(k) != 0) throw Error("winding on a non-periodic coordinate");
  return loop;
}

DiscreteLoop LoopSpace::constant_loop(const Vector& q) const {
  Matrix s(n_, dimension());
  for (int i = 0; i < n_; ++i) s.row(i) = q.transpose();
  return make_loop(s, Eigen::VectorXi::Zero(dimension()));
}

Matrix LoopSpace::unwrap(const DiscreteLoop& loop) const {
  const ChartDomain& c = bundle_->chart;
  Matrix u = loop.samples;
  for (int k = 0; k < dimension(); ++k) {
    if (!c.is_periodic(k)) continue;
    for (int i = 1; i < n_; ++i) u(i, k) = u(i - 1, k) + c.shortest(k, loop.samples(i, k) - loop.samples(i - 1, k));
    const double closing = u(n_ - 1, k) + c.shortest(k, loop.samples(0, k) - loop.samples(n_ - 1, k)) - u(0, k);
    if (std::lround(closing / c.period(k)) != loop.winding(k))
      throw Error("loop under-resolved: winding of q" + std::to_string(k + 1) + " inconsistent with samples");
  }
  return u;
}

Vector LoopSpace::drift(const DiscreteLoop& loop) const {
  Vector d = Vector::Zero(dimension());
  for (int k = 0; k < dimension(); ++k)
    if (bundle_->chart.is_periodic(k)) d(k) = loop.winding(k) * bundle_->chart.period(k);
  return d;
}

void LoopSpace::half_step(const Matrix& u, const Vector& drift, Matrix& mid, Matrix& vel) const {
  const int n = n_;
  mid.resize(n, u.cols());
  vel.resize(n, u.cols());
  if (scheme_ == DerivativeScheme::kCentral) {
    for (int j = 0; j < n; ++j) {
      const auto next = j + 1 < n ? (u.row(j + 1)).eval() : (u.row(0) + drift.transpose()).eval();
      mid.row(j) = 0.5 * (u.row(j) + next);
      vel.row(j) = n * (next - u.row(j));
    }
    return;
  }
  Matrix p = u;
  for (int i = 0; i < n; ++i) p.row(i) -= (static_cast<double>(i) / n) * drift.transpose();
  mid = s_mid_ * p;
  vel = d_mid_ * p;
  for (int j = 0; j < n; ++j) {
    mid.row(j) += ((j + 0.5) / n) * drift.transpose();
    vel.row(j) += drift.transpose();
  }
}

Matrix LoopSpace::half_step_adjoint(const Matrix& dm, const Matrix& dv) const {
  if (scheme_ == DerivativeScheme::kSpectral) return s_mid_.transpose() * dm + d_mid_.transpose() * dv;
  const int n = n_;
  Matrix g(n, dm.cols());
  for (int i = 0; i < n; ++i) {
    const int prev = (i + n - 1) % n;
    g.row(i) = 0.5 * (dm.row(i) + dm.row(prev)) + n * (dv.row(prev) - dv.row(i));
  }
  return g;
}

Matrix LoopSpace::node_derivative(const Matrix& u, const Vector& drift) const {
  const int n = n_;
  if (scheme_ == DerivativeScheme::kSpectral) {
    Matrix p = u;
    for (int i = 0; i < n; ++i) p.row(i) -= (static_cast<double>(i) / n) * drift.transpose();
    Matrix d = d_node_ * p;
    for (int i = 0; i < n; ++i) d.row(i) += drift.transpose();
    return d;
  }
  Matrix d(n, u.cols());
  for (int i = 0; i < n; ++i) {
    const auto next = i + 1 < n ? u.row(i + 1).eval() : (u.row(0) + drift.transpose()).eval();
    const auto prev = i > 0 ? u.row(i - 1).eval() : (u.row(n - 1) - drift.transpose()).eval();
    d.row(i) = (0.5 * n) * (next - prev);
  }
  return d;
}

Matrix LoopSpace::node_second_derivative(const Matrix& u, const Vector& drift) const {
  const int n = n_;
  if (scheme_ == DerivativeScheme::kSpectral) {
    Matrix p = u;
    for (int i = 0; i < n; ++i) p.row(i) -= (static_cast<double>(i) / n) * drift.transpose();
    return d2_node_ * p;
  }
  Matrix d(n, u.cols());
  const double nn = static_cast<double>(n) * n;
  for (int i = 0; i < n; ++i) {
    const auto next = i + 1 < n ? u.row(i + 1).eval() : (u.row(0) + drift.transpose()).eval();
    const auto prev = i > 0 ? u.row(i - 1).eval() : (u.row(n - 1) - drift.transpose()).eval();
    d.row(i) = nn * (next - 2.0 * u.row(i) + prev);
  }
  return d;
}

Vector LoopSpace::half_to_nodes(const Vector& half) const {
  if (scheme_ == DerivativeScheme::kSpectral) return s_mid_.transpose() * half;
  Vector r(n_);
  for (int i = 0; i < n_; ++i) r(i) = 0.5 * (half(i) + half((i + n_ - 1) % n_));
  return r;
}

// ---------------------------------------------------------------- functionals

namespace {

Vector wrapped(const ChartDomain& c, const Vector& q) {
  Vector x = q;
  c.wrap_point(x);
  return x;
}

}  // namespace

Matrix ActionEval::partials() const { return std::exp(-tau) * d_energy - std::exp(tau) * d_potential; }

ActionEval evaluate_action(const LoopSpace& ls, const LoopPoint& p, bool with_gradient) {
  const GeometryBundle& b = ls.bundle();
  const int n = ls.size(), dim = ls.dimension();
  ls.validate(p.loop);
  if (!std::isfinite(p.tau)) throw Error("tau must be finite");
  const Matrix u = ls.unwrap(p.loop);
  const Vector drift = ls.drift(p.loop);
  Matrix mid, vel;
  ls.half_step(u, drift, mid, vel);

  ActionEval ev;
  ev.tau = p.tau;
  ev.kinetic_half.resize(n);
  Matrix dm, dv;
  if (with_gradient) {
    dm = Matrix::Zero(n, dim);
    dv = Matrix::Zero(n, dim);
  }
  const bool flat = b.metric.is_flat();
  double kin = 0.0;
  for (int j = 0; j < n; ++j) {
    const Vector v = vel.row(j).transpose();
    if (flat) {
      ev.kinetic_half(j) = v.squaredNorm();
      if (with_gradient) dv.row(j) = v.transpose() / n;
    } else if (with_gradient) {
      const MetricJet mj = b.metric.jet(wrapped(b.chart, mid.row(j).transpose()));
      const Vector gv = mj.g * v;
      ev.kinetic_half(j) = v.dot(gv);
      for (int l = 0; l < dim; ++l) dm(j, l) = v.dot(mj.dg[l] * v) / (2.0 * n);
      dv.row(j) = gv.transpose() / n;
    } else {
      ev.kinetic_half(j) = v.dot(b.metric(wrapped(b.chart, mid.row(j).transpose())) * v);
    }
    kin += ev.kinetic_half(j);
  }
  ev.energy = kin / (2.0 * n);

  double pot = 0.0;
  if (with_gradient) ev.d_potential.resize(n, dim);
  for (int i = 0; i < n; ++i) {
    const Vector q = wrapped(b.chart, u.row(i).transpose());
    if (with_gradient) {
      const PotentialJet pj = b.potential.jet(q);
      pot += pj.value;
      ev.d_potential.row(i) = pj.differential.transpose() / n;
    } else {
      pot += b.potential(q);
    }
  }
  ev.potential = pot / n;
  const double em = std::exp(-p.tau), ep = std::exp(p.tau);
  ev.action = em * ev.energy - ep * ev.potential;
  ev.d_tau = -em * ev.energy - ep * ev.potential;
  if (with_gradient) ev.d_energy = ls.half_step_adjoint(dm, dv);
  return ev;
}

Matrix loop_derivative(const LoopSpace& ls, const DiscreteLoop& loop) {
  return ls.node_derivative(ls.unwrap(loop), ls.drift(loop));
}

Matrix covariant_derivative(const LoopSpace& ls, const DiscreteLoop& loop, const Matrix& xi) {
  const int n = ls.size();
  const int dim = ls.dimension();
  Matrix d = ls.node_derivative(xi, Vector::Zero(dim));
  if (ls.bundle().metric.is_flat()) return d;
  const Matrix cp = loop_derivative(ls, loop);
  for (int i = 0; i < n; ++i) {
    const Christoffel g = christoffel_at(ls.bundle(), loop.samples.row(i).transpose());
    d.row(i) += g.contract(cp.row(i).transpose(), xi.row(i).transpose()).transpose();
  }
  return d;
}

double energy(const LoopSpace& ls, const DiscreteLoop& loop) {
  return evaluate_action(ls, LoopPoint{loop, 0.0}, false).energy;
}

double potential_integral(const LoopSpace& ls, const DiscreteLoop& loop) {
  return evaluate_action(ls, LoopPoint{loop, 0.0}, false).potential;
}

double action(const LoopSpace& ls, const LoopPoint& p) { return evaluate_action(ls, p, false).action; }

double first_variation(const LoopSpace& ls, const LoopPoint& p, const TangentField& f) {
  const ActionEval ev = evaluate_action(ls, p, true);
  return ev.partials().cwiseProduct(f.xi).sum() + ev.d_tau * f.sigma;
}

double first_variation_formula(const LoopSpace& ls, const LoopPoint& p, const TangentField& f) {
  const GeometryBundle& b = ls.bundle();
  const int n = ls.size();
  const ActionEval ev = evaluate_action(ls, p, false);
  const Matrix cp = loop_derivative(ls, p.loop);
  const Matrix nabla = covariant_derivative(ls, p.loop, f.xi);
  double kinetic = 0.0, potential = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vector q = p.loop.samples.row(i).transpose();
    kinetic += cp.row(i).dot(b.metric(q) * nabla.row(i).transpose());
    potential += b.potential.jet(q).differential.dot(f.xi.row(i).transpose());
  }
  const double em = std::exp(-p.tau), ep = std::exp(p.tau);
  return em * kinetic / n - ep * potential / n - (em * ev.energy + ep * ev.potential) * f.sigma;
}

TangentField h1_representative(const LoopSpace& ls, const Matrix& partials, double d_tau) {
  TangentField g;
  g.xi.resize(partials.rows(), partials.cols());
  const double n = ls.size();
  for (Eigen::Index k = 0; k < partials.cols(); ++k) g.xi.col(k) = ls.h1_solver().solve(n * partials.col(k));
  g.sigma = d_tau;
  return g;
}

TangentField h1_gradient(const LoopSpace& ls, const LoopPoint& p) {
  const ActionEval ev = evaluate_action(ls, p, true);
  return h1_representative(ls, ev.partials(), ev.d_tau);
}

double h1_inner(const LoopSpace& ls, const TangentField& a, const TangentField& b) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < a.xi.cols(); ++k) s += a.xi.col(k).dot(ls.h1_solver().apply(b.xi.col(k)));
  return s / ls.size() + a.sigma * b.sigma;
}

double h1_norm(const LoopSpace& ls, const TangentField& a) { return std::sqrt(std::max(0.0, h1_inner(ls, a, a))); }

// ---------------------------------------------------------------- norms

double l2_norm(const LoopSpace& ls, const DiscreteLoop& loop, const Matrix& xi) {
  const GeometryBundle& b = ls.bundle();
  double s = 0.0;
  for (int i = 0; i < ls.size(); ++i) {
    const Vector x = xi.row(i).transpose();
    s += b.metric.is_flat() ? x.squaredNorm() : x.dot(b.metric(loop.samples.row(i).transpose()) * x);
  }
  return std::sqrt(s / ls.size());
}

double c0_norm(const LoopSpace& ls, const DiscreteLoop& loop, const Matrix& xi) {
  const GeometryBundle& b = ls.bundle();
  double m = 0.0;
  for (int i = 0; i < ls.size(); ++i) {
    const Vector x = xi.row(i).transpose();
    m = std::max(m, b.metric.is_flat() ? x.squaredNorm() : x.dot(b.metric(loop.samples.row(i).transpose()) * x));
  }
  return std::sqrt(m);
}

double perp_norm(const LoopSpace& ls, const DiscreteLoop& loop, const Matrix& xi) {
  const GeometryBundle& b = ls.bundle();
  const int n = ls.size(), dim = ls.dimension();
  Matrix sx, dx;
  ls.half_step(xi, Vector::Zero(dim), sx, dx);
  if (b.metric.is_flat()) return std::sqrt(dx.squaredNorm() / n);
  Matrix mid, vel;
  ls.half_step(ls.unwrap(loop), ls.drift(loop), mid, vel);
  double s = 0.0;
  for (int j = 0; j < n; ++j) {
    Vector q = mid.row(j).transpose();
    b.chart.wrap_point(q);
    const Christoffel g = christoffel_at(b, q);
    const Vector nab = dx.row(j).transpose() + g.contract(vel.row(j).transpose(), sx.row(j).transpose());
    s += nab.dot(b.metric(q) * nab);
  }
  return std::sqrt(s / n);
}

double h1_norm(const LoopSpace& ls, const DiscreteLoop& loop, const Matrix& xi) {
  const double a = l2_norm(ls, loop, xi), b = perp_norm(ls, loop, xi);
  return std::sqrt(a * a + b * b);
}

double c0_distance(const LoopSpace& ls, const DiscreteLoop& a, const DiscreteLoop& b) {
  const GeometryBundle& g = ls.bundle();
  double m = 0.0;
  for (int i = 0; i < ls.size(); ++i) {
    Vector d(ls.dimension());
    for (int k = 0; k < ls.dimension(); ++k) d(k) = g.chart.shortest(k, a.samples(i, k) - b.samples(i, k));
    Vector mid = b.samples.row(i).transpose() + 0.5 * d;
    g.chart.wrap_point(mid);
    m = std::max(m, g.metric.is_flat() ? d.squaredNorm() : d.dot(g.metric(mid) * d));
  }
  return std::sqrt(m);
}

// ---------------------------------------------------------------- diagnostics

HamiltonianProfile hamiltonian_along_loop(const LoopSpace& ls, const LoopPoint& p) {
  const ActionEval ev = evaluate_action(ls, p, false);
  const Vector kin = ls.half_to_nodes(ev.kinetic_half);
  HamiltonianProfile h;
  h.values.resize(ls.size());
  const double e2 = std::exp(-2.0 * p.tau);
  for (int i = 0; i < ls.size(); ++i)
    h.values(i) = 0.5 * e2 * kin(i) + ls.bundle().potential(p.loop.samples.row(i).transpose());
  h.mean = h.values.mean();
  h.max_abs = h.values.cwiseAbs().maxCoeff();
  h.max_deviation = (h.values.array() - h.mean).abs().maxCoeff();
  return h;
}

EulerLagrangeResidual euler_lagrange_residual(const LoopSpace& ls, const LoopPoint& p) {
  const GeometryBundle& b = ls.bundle();
  const int n = ls.size();
  const Matrix u = ls.unwrap(p.loop);
  const Vector drift = ls.drift(p.loop);
  const Matrix cp = ls.node_derivative(u, drift);
  const Matrix cpp = ls.node_second_derivative(u, drift);
  const double em = std::exp(-p.tau), ep = std::exp(p.tau);
  EulerLagrangeResidual r;
  r.values.resize(n, ls.dimension());
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vector q = p.loop.samples.row(i).transpose();
    const LocalGeometry lg = local_geometry(b, q);
    const Vector v = cp.row(i).transpose();
    const Vector acc = cpp.row(i).transpose() + lg.gamma.contract(v, v);
    const Vector e = em * acc + ep * lg.grad;
    r.values.row(i) = e.transpose();
    s += e.dot(lg.g * e);
  }
  r.l2 = std::sqrt(s / n);
  return r;
}

// ---------------------------------------------------------------- moves

LoopPoint advance(const LoopSpace& ls, const LoopPoint& p, const TangentField& f, double step) {
  LoopPoint out;
  out.loop = ls.make_loop(ls.unwrap(p.loop) + step * f.xi, p.loop.winding);
  out.tau = p.tau + step * f.sigma;
  return out;
}

TangentField difference(const LoopSpace& ls, const LoopPoint& a, const LoopPoint& b) {
  TangentField f;
  f.xi.resize(ls.size(), ls.dimension());
  for (int i = 0; i < ls.size(); ++i)
    for (int k = 0; k < ls.dimension(); ++k)
      f.xi(i, k) = ls.bundle().chart.shortest(k, a.loop.samples(i, k) - b.loop.samples(i, k));
  f.sigma = a.tau - b.tau;
  return f;
}

Matrix symmetrize_field(const Matrix& xi, const Matrix& rotation, int order) {
  const Eigen::Index n = xi.rows();
  if (order < 1 || n % order != 0) throw Error("symmetry order must divide the number of samples");
  const Eigen::Index step = n / order;
  Matrix r(n, xi.cols());
  for (Eigen::Index i = 0; i < step; ++i) {
    // Average of R^{-j} xi(s + j/m), then spread back with R^j.
    Vector avg = Vector::Zero(xi.cols());
    Matrix power = Matrix::Identity(xi.cols(), xi.cols());
    for (int j = 0; j < order; ++j) {
      avg += power.transpose() * xi.row(i + j * step).transpose();
      power = rotation * power;
    }
    avg /= order;
    power.setIdentity();
    for (int j = 0; j < order; ++j) {
      r.row(i + j * step) = (power * avg).transpose();
      power = rotation * power;
    }
  }
  return r;
}

Matrix symmetrize_positions(const Matrix& u, const Vector& center, const Matrix& rotation, int order) {
  return symmetrize_field(u.rowwise() - center.transpose(), rotation, order).rowwise() + center.transpose();
}

Matrix reflect_positions(const Matrix& u, const Vector& center) {
  if (u.rows() % 2 != 0) throw Error("reflection symmetry needs an even number of samples");
  return symmetrize_positions(u, center, -Matrix::Identity(u.cols(), u.cols()), 2);
}

Matrix reflect_field(const Matrix& xi) {
  if (xi.rows() % 2 != 0) throw Error("reflection symmetry needs an even number of samples");
  return symmetrize_field(xi, -Matrix::Identity(xi.cols(), xi.cols()), 2);
}

Vector flatten(const TangentField& f) {
  const Eigen::Index n = f.xi.rows(), d = f.xi.cols();
  Vector x(n * d + 1);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < d; ++k) x(i * d + k) = f.xi(i, k);
  x(n * d) = f.sigma;
  return x;
}

TangentField unflatten(const Vector& x, int n_samples, int dim) {
  TangentField f;
  f.xi.resize(n_samples, dim);
  for (int i = 0; i < n_samples; ++i)
    for (int k = 0; k < dim; ++k) f.xi(i, k) = x(i * dim + k);
  f.sigma = x(n_samples * dim);
  return f;
}

}  // namespace mechorbit
