#include "mechorbit/geometry.hpp"

#include "mechorbit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <sstream>

namespace mechorbit {

namespace {

std::string format_point(const Vector& q) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index i = 0; i < q.size(); ++i) os << (i ? ", " : "") << q(i);
  os << ")";
  return os.str();
}

Eigen::LLT<Matrix> checked_cholesky(const Matrix& g, const Vector& q) {
  const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
  if (!g.allFinite()) throw GeometryError("metric not finite at " + format_point(q));
  if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw GeometryError("metric not symmetric at " + format_point(q));
  Eigen::LLT<Matrix> llt(g);
  if (llt.info() != Eigen::Success) throw GeometryError("metric not positive definite at " + format_point(q));
  return llt;
}

}  // namespace

// ---------------------------------------------------------------- chart

ChartDomain ChartDomain::euclidean(int n, double half_width) {
  ChartDomain c;
  c.dimension = n;
  c.periods.assign(n, std::nullopt);
  c.box_lo = Vector::Constant(n, -half_width);
  c.box_hi = Vector::Constant(n, half_width);
  return c;
}

void ChartDomain::validate() const {
  if (dimension < 1) throw GeometryError("chart dimension must be >= 1");
  if (static_cast<int>(periods.size()) != dimension) throw GeometryError("chart periods size mismatch");
  if (box_lo.size() != dimension || box_hi.size() != dimension) throw GeometryError("chart box size mismatch");
  for (int i = 0; i < dimension; ++i) {
    if (periods[i] && !(*periods[i] > 0.0)) throw GeometryError("period of q" + std::to_string(i + 1) + " must be > 0");
    if (!(box_hi(i) > box_lo(i))) throw GeometryError("empty sampling box in q" + std::to_string(i + 1));
  }
}

double ChartDomain::shortest(int i, double delta) const {
  if (!is_periodic(i)) return delta;
  const double p = period(i);
  return delta - p * std::round(delta / p);
}

double ChartDomain::wrap(int i, double x) const {
  if (!is_periodic(i)) return x;
  const double p = period(i);
  double y = x - box_lo(i);
  y -= p * std::floor(y / p);
  if (y >= p) y = 0.0;
  return box_lo(i) + y;
}

void ChartDomain::wrap_point(Eigen::Ref<Vector, 0, Eigen::InnerStride<>> q) const {
  for (int i = 0; i < dimension; ++i) q(i) = wrap(i, q(i));
}

bool ChartDomain::in_box(const Vector& q) const {
  for (int i = 0; i < dimension; ++i) {
    if (is_periodic(i)) continue;
    if (q(i) < box_lo(i) || q(i) > box_hi(i)) return false;
  }
  return true;
}

// ---------------------------------------------------------------- metric

MetricField MetricField::flat(int n) {
  MetricField m;
  m.kind_ = Kind::kFlat;
  m.dim_ = n;
  return m;
}

MetricField MetricField::conformal(Expression factor) {
  MetricField m;
  m.kind_ = Kind::kConformal;
  m.dim_ = factor.dimension();
  m.factor_ = std::move(factor);
  return m;
}

MetricField MetricField::warped(Expression warp) {
  if (warp.dimension() < 2) throw GeometryError("warped metric needs dimension >= 2");
  MetricField m;
  m.kind_ = Kind::kWarped;
  m.dim_ = warp.dimension();
  m.factor_ = std::move(warp);
  return m;
}

MetricField MetricField::custom(int n, std::function<Matrix(const Vector&)> g, double fd_step) {
  MetricField m;
  m.kind_ = Kind::kCustom;
  m.dim_ = n;
  m.custom_ = std::move(g);
  m.fd_step_ = fd_step;
  return m;
}

Matrix MetricField::operator()(const Vector& q) const {
  switch (kind_) {
    case Kind::kFlat: return Matrix::Identity(dim_, dim_);
    case Kind::kConformal: return std::exp(2.0 * factor_(q)) * Matrix::Identity(dim_, dim_);
    case Kind::kWarped: {
      Matrix g = Matrix::Identity(dim_, dim_);
      const double w = factor_(q);
      for (int i = 0; i + 1 < dim_; ++i) g(i, i) = w;
      return g;
    }
    case Kind::kCustom: return custom_(q);
  }
  return Matrix::Identity(dim_, dim_);
}

MetricJet MetricField::jet(const Vector& q) const {
  MetricJet mj;
  switch (kind_) {
    case Kind::kFlat:
      mj.g = Matrix::Identity(dim_, dim_);
      mj.dg.assign(dim_, Matrix::Zero(dim_, dim_));
      return mj;
    case Kind::kConformal: {
      const Jet f = factor_.jet(q);
      const double e2f = std::exp(2.0 * f.v);
      mj.g = e2f * Matrix::Identity(dim_, dim_);
      mj.dg.resize(dim_);
      for (int l = 0; l < dim_; ++l) mj.dg[l] = (2.0 * f.d(l) * e2f) * Matrix::Identity(dim_, dim_);
      return mj;
    }
    case Kind::kWarped: {
      const Jet w = factor_.jet(q);
      mj.g = Matrix::Identity(dim_, dim_);
      for (int i = 0; i + 1 < dim_; ++i) mj.g(i, i) = w.v;
      mj.dg.assign(dim_, Matrix::Zero(dim_, dim_));
      for (int l = 0; l < dim_; ++l)
        for (int i = 0; i + 1 < dim_; ++i) mj.dg[l](i, i) = w.d(l);
      return mj;
    }
    case Kind::kCustom: return fd_jet(q, fd_step_);
  }
  return mj;
}

MetricJet MetricField::fd_jet(const Vector& q, double h) const {
  MetricJet mj;
  mj.g = (*this)(q);
  mj.dg.resize(dim_);
  for (int l = 0; l < dim_; ++l) {
    Vector qp = q, qm = q;
    qp(l) += h;
    qm(l) -= h;
    mj.dg[l] = ((*this)(qp) - (*this)(qm)) / (2.0 * h);
  }
  return mj;
}

// ---------------------------------------------------------------- potential

PotentialField PotentialField::from_expression(Expression e, std::string label) {
  PotentialField p;
  p.dim_ = e.dimension();
  p.label_ = std::move(label);
  auto shared = std::make_shared<Expression>(std::move(e));
  p.value_ = [shared](const Vector& q) { return (*shared)(q); };
  p.jet_ = [shared](const Vector& q) { return shared->jet(q); };
  return p;
}

PotentialField PotentialField::from_jet(int n, std::function<Jet(const Vector&)> f, std::string label) {
  PotentialField p;
  p.dim_ = n;
  p.label_ = std::move(label);
  p.value_ = [f](const Vector& q) { return f(q).v; };
  p.jet_ = std::move(f);
  return p;
}

PotentialField PotentialField::custom(int n, std::function<double(const Vector&)> f, std::string label, double fd_step) {
  PotentialField p;
  p.dim_ = n;
  p.label_ = std::move(label);
  p.value_ = std::move(f);
  p.fd_step_ = fd_step;
  return p;
}

double PotentialField::operator()(const Vector& q) const { return value_(q); }

PotentialJet PotentialField::jet(const Vector& q) const {
  if (!jet_) return fd_jet(q, fd_step_);
  const Jet j = jet_(q);
  PotentialJet pj;
  pj.value = j.v;
  pj.differential = j.d;
  pj.second = 0.5 * (j.h + j.h.transpose());
  return pj;
}

PotentialJet PotentialField::fd_jet(const Vector& q, double h) const {
  PotentialJet pj;
  pj.value = value_(q);
  pj.differential.resize(dim_);
  pj.second.resize(dim_, dim_);
  auto at = [&](int i, double di, int j, double dj) {
    Vector x = q;
    x(i) += di;
    x(j) += dj;
    return value_(x);
  };
  for (int i = 0; i < dim_; ++i) {
    const double vp = at(i, h, i, 0.0), vm = at(i, -h, i, 0.0);
    pj.differential(i) = (vp - vm) / (2.0 * h);
    pj.second(i, i) = (vp - 2.0 * pj.value + vm) / (h * h);
    for (int j = 0; j < i; ++j) {
      const double m = (at(i, h, j, h) - at(i, h, j, -h) - at(i, -h, j, h) + at(i, -h, j, -h)) / (4.0 * h * h);
      pj.second(i, j) = m;
      pj.second(j, i) = m;
    }
  }
  return pj;
}

// ---------------------------------------------------------------- local formulas

Vector Christoffel::contract(const Vector& a, const Vector& b) const {
  const Eigen::Index n = a.size();
  Vector r = Vector::Zero(n);
  if (gamma.empty()) return r;
  for (Eigen::Index k = 0; k < n; ++k) r(k) = a.dot(gamma[k] * b);
  return r;
}

Christoffel christoffel_from_jet(const MetricJet& mj, const Eigen::LLT<Matrix>& llt) {
  const int n = static_cast<int>(mj.g.rows());
  Christoffel c;
  bool zero = true;
  for (const auto& d : mj.dg) zero = zero && d.isZero(0.0);
  if (zero) {
    c.gamma.assign(n, Matrix::Zero(n, n));
    return c;
  }
  const Matrix ginv = llt.solve(Matrix::Identity(n, n));
  // lowered[l](i, j) = 1/2 (d_i g_lj + d_j g_il - d_l g_ij)
  std::vector<Matrix> lowered(n, Matrix(n, n));
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) lowered[l](i, j) = 0.5 * (mj.dg[i](l, j) + mj.dg[j](i, l) - mj.dg[l](i, j));
  c.gamma.assign(n, Matrix::Zero(n, n));
  for (int k = 0; k < n; ++k) {
    Matrix gk = Matrix::Zero(n, n);
    for (int l = 0; l < n; ++l) gk += ginv(k, l) * lowered[l];
    c.gamma[k] = 0.5 * (gk + gk.transpose());
  }
  return c;
}

LocalGeometry local_geometry(const GeometryBundle& b, const Vector& q) {
  LocalGeometry lg;
  const int n = b.dimension();
  const MetricJet mj = b.metric.jet(q);
  const auto llt = checked_cholesky(mj.g, q);
  lg.g = mj.g;
  lg.g_inv = llt.solve(Matrix::Identity(n, n));
  lg.gamma = christoffel_from_jet(mj, llt);
  lg.potential = b.potential.jet(q);
  lg.grad = lg.g_inv * lg.potential.differential;
  lg.hess = lg.potential.second;
  for (int k = 0; k < n; ++k) lg.hess -= lg.potential.differential(k) * lg.gamma.gamma[k];
  lg.hess = 0.5 * (lg.hess + lg.hess.transpose()).eval();
  return lg;
}

Matrix metric_at(const GeometryBundle& b, const Vector& q) {
  Matrix g = b.metric(q);
  checked_cholesky(g, q);
  return g;
}

Christoffel christoffel_at(const GeometryBundle& b, const Vector& q) {
  const MetricJet mj = b.metric.jet(q);
  return christoffel_from_jet(mj, checked_cholesky(mj.g, q));
}

Vector grad_potential(const GeometryBundle& b, const Vector& q) {
  const PotentialJet pj = b.potential.jet(q);
  const Matrix g = b.metric(q);
  return checked_cholesky(g, q).solve(pj.differential);
}

double grad_norm(const GeometryBundle& b, const Vector& q) {
  const PotentialJet pj = b.potential.jet(q);
  const Matrix g = b.metric(q);
  return std::sqrt(std::max(0.0, pj.differential.dot(checked_cholesky(g, q).solve(pj.differential))));
}

Matrix hess_potential(const GeometryBundle& b, const Vector& q) { return local_geometry(b, q).hess; }

double hess_norm(const LocalGeometry& lg) {
  const Eigen::LLT<Matrix> llt(lg.g);
  const Matrix L = llt.matrixL();
  const Matrix a = L.triangularView<Eigen::Lower>().solve(lg.hess);
  const Matrix m = L.triangularView<Eigen::Lower>().solve(a.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double hess_norm(const GeometryBundle& b, const Vector& q) { return hess_norm(local_geometry(b, q)); }

double nu_shrink_value(const GeometryBundle& b, const Vector& q) {
  const double gn = grad_norm(b, q);
  return b.potential(q) / std::sqrt(1.0 + gn * gn);
}

bool nu_member(const GeometryBundle& b, const Vector& q, double nu) {
  const double gn = grad_norm(b, q);
  return b.potential(q) <= -nu * std::sqrt(1.0 + gn * gn);
}

double hamiltonian(const GeometryBundle& b, const Vector& q, const Vector& theta) {
  const Matrix g = b.metric(q);
  return 0.5 * theta.dot(checked_cholesky(g, q).solve(theta)) + b.potential(q);
}

PhaseVelocity hamiltonian_vector_field(const GeometryBundle& b, const Vector& q, const Vector& theta) {
  const int n = b.dimension();
  const PotentialJet pj = b.potential.jet(q);
  PhaseVelocity x;
  if (b.metric.is_flat()) {
    x.dq = theta;
    x.dtheta = -pj.differential;
    return x;
  }
  const MetricJet mj = b.metric.jet(q);
  const auto llt = checked_cholesky(mj.g, q);
  x.dq = llt.solve(theta);
  x.dtheta.resize(n);
  // -d_i g^{ab} / 2 theta_a theta_b = 1/2 p^T (d_i g) p with p = g^{-1} theta
  for (int i = 0; i < n; ++i) x.dtheta(i) = -pj.differential(i) + 0.5 * x.dq.dot(mj.dg[i] * x.dq);
  return x;
}

double hamiltonian_drift(const GeometryBundle& b, const Vector& q, const Vector& theta) {
  const PhaseVelocity x = hamiltonian_vector_field(b, q, theta);
  const double speed = std::sqrt(x.dq.squaredNorm() + x.dtheta.squaredNorm());
  const double d = 1e-5 / (1.0 + speed);
  return (hamiltonian(b, q + d * x.dq, theta + d * x.dtheta) - hamiltonian(b, q - d * x.dq, theta - d * x.dtheta)) /
         (2.0 * d);
}

void rk4_step(const GeometryBundle& b, Vector& q, Vector& theta, double delta) {
  const PhaseVelocity k1 = hamiltonian_vector_field(b, q, theta);
  const PhaseVelocity k2 = hamiltonian_vector_field(b, q + 0.5 * delta * k1.dq, theta + 0.5 * delta * k1.dtheta);
  const PhaseVelocity k3 = hamiltonian_vector_field(b, q + 0.5 * delta * k2.dq, theta + 0.5 * delta * k2.dtheta);
  const PhaseVelocity k4 = hamiltonian_vector_field(b, q + delta * k3.dq, theta + delta * k3.dtheta);
  q += (delta / 6.0) * (k1.dq + 2.0 * k2.dq + 2.0 * k3.dq + k4.dq);
  theta += (delta / 6.0) * (k1.dtheta + 2.0 * k2.dtheta + 2.0 * k3.dtheta + k4.dtheta);
}

// ---------------------------------------------------------------- regularity

RegularityReport regularity_scan(const GeometryBundle& b, const RegularityOptions& opt) {
  const int n = b.dimension();
  if (opt.shells < 2) throw GeometryError("regularity scan needs at least 2 shells");
  if (opt.samples_per_shell < 1) throw GeometryError("regularity scan needs samples");
  if (!(opt.outer_radius > opt.inner_radius) || opt.inner_radius < 0.0)
    throw GeometryError("regularity scan needs 0 <= inner radius < outer radius");
  std::vector<int> radial;
  for (int i = 0; i < n; ++i)
    if (!b.chart.is_periodic(i)) radial.push_back(i);
  if (radial.empty()) throw GeometryError("regularity scan needs a non-periodic coordinate");
  const Vector center = opt.center.size() == n ? opt.center : Vector::Zero(n);

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  RegularityReport rep;
  const double width = (opt.outer_radius - opt.inner_radius) / opt.shells;
  for (int s = 0; s < opt.shells; ++s) {
    RegularityShell shell;
    shell.r_inner = opt.inner_radius + s * width;
    shell.r_outer = shell.r_inner + width;
    shell.min_grad = std::numeric_limits<double>::infinity();
    for (int k = 0; k < opt.samples_per_shell; ++k) {
      Vector dir(radial.size());
      do {
        for (Eigen::Index j = 0; j < dir.size(); ++j) dir(j) = normal(rng);
      } while (dir.norm() < 1e-12);
      dir.normalize();
      const double r = shell.r_inner + width * unit(rng);
      Vector q = center;
      for (std::size_t j = 0; j < radial.size(); ++j) q(radial[j]) += r * dir(j);
      for (int i = 0; i < n; ++i)
        if (b.chart.is_periodic(i)) q(i) = b.chart.box_lo(i) + b.chart.period(i) * unit(rng);
      if (!b.chart.in_box(q)) continue;
      const LocalGeometry lg = local_geometry(b, q);
      const double gn = std::sqrt(std::max(0.0, lg.potential.differential.dot(lg.grad)));
      const double hn = hess_norm(lg);
      const double ratio = gn > 0.0 ? hn / gn : std::numeric_limits<double>::infinity();
      shell.min_grad = std::min(shell.min_grad, gn);
      shell.max_ratio = std::max(shell.max_ratio, ratio);
      ++shell.samples;
    }
    rep.total_samples += shell.samples;
    if (shell.samples > 0) rep.shells.push_back(shell);
  }
  if (rep.total_samples == 0) throw GeometryError("all regularity samples fall outside the chart box");

  rep.v_infinity = std::numeric_limits<double>::infinity();
  for (const auto& sh : rep.shells) rep.v_infinity = std::min(rep.v_infinity, sh.min_grad);
  rep.ratio_decreasing = true;
  for (std::size_t j = 1; j < rep.shells.size(); ++j) {
    const double prev = rep.shells[j - 1].max_ratio, cur = rep.shells[j].max_ratio;
    if (!(cur <= prev * (1.0 + 1e-9) + 1e-12)) rep.ratio_decreasing = false;
  }
  const double last = rep.shells.back().max_ratio;
  if (!(rep.v_infinity >= opt.gradient_floor)) {
    rep.reason = "|grad V| drops to " + std::to_string(rep.v_infinity) + " outside R_K";
  } else if (!rep.ratio_decreasing) {
    rep.reason = "||Hess V||/|grad V| not decreasing across shells";
  } else if (!(last <= opt.ratio_threshold)) {
    rep.reason = "outer ratio " + std::to_string(last) + " above threshold";
  } else {
    rep.pass = true;
  }
  return rep;
}

}  // namespace mechorbit
