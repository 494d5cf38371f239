#include "css/quadrature.hpp"

#include <cmath>

#include "css/common.hpp"

namespace css {

namespace {

// Golub-Welsch: nodes/weights from the symmetric Jacobi matrix of the
// orthogonal polynomial recurrence.
Rule1D golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& sub,
                    double mu0) {
  const int n = static_cast<int>(diag.size());
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    j(i, i) = diag[i];
    if (i + 1 < n) {
      j(i, i + 1) = sub[i];
      j(i + 1, i) = sub[i];
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  Rule1D rule;
  rule.nodes = es.eigenvalues();
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    const double v = es.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v * v;
  }
  return rule;
}

}  // namespace

Rule1D gauss_legendre(int n, double a, double b) {
  if (n < 1) throw QuadratureFailure("gauss_legendre: n < 1");
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(n - 1 > 0 ? n - 1 : 0);
  for (int i = 1; i < n; ++i) {
    const double di = static_cast<double>(i);
    sub[i - 1] = di / std::sqrt(4.0 * di * di - 1.0);
  }
  Rule1D rule = golub_welsch(diag, sub, 2.0);
  // map [-1,1] -> [a,b]
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  rule.nodes = (rule.nodes.array() * half + mid).matrix();
  rule.weights *= half;
  return rule;
}

Rule1D gauss_jacobi01(int n, double alpha, double beta) {
  if (n < 1) throw QuadratureFailure("gauss_jacobi01: n < 1");
  if (alpha <= -1.0 || beta <= -1.0)
    throw QuadratureFailure("gauss_jacobi01: weight exponent <= -1");
  // Recurrence for Jacobi polynomials P^{(alpha,beta)} on [-1,1] with weight
  // (1-t)^alpha (1+t)^beta; note beta sits at t=-1 which maps to s=0.
  Eigen::VectorXd diag(n), sub(n - 1 > 0 ? n - 1 : 0);
  const double ab = alpha + beta;
  for (int i = 0; i < n; ++i) {
    const double di = static_cast<double>(i);
    double denom = (2.0 * di + ab) * (2.0 * di + ab + 2.0);
    if (i == 0)
      diag[0] = (beta - alpha) / (ab + 2.0);
    else
      diag[i] = (beta * beta - alpha * alpha) / denom;
  }
  for (int i = 1; i < n; ++i) {
    const double di = static_cast<double>(i);
    double num;
    if (i == 1)
      num = 4.0 * (alpha + 1.0) * (beta + 1.0) /
            ((ab + 2.0) * (ab + 2.0) * (ab + 3.0));
    else
      num = 4.0 * di * (di + alpha) * (di + beta) * (di + ab) /
            ((2.0 * di + ab) * (2.0 * di + ab) * (2.0 * di + ab + 1.0) *
             (2.0 * di + ab - 1.0));
    sub[i - 1] = std::sqrt(num);
  }
  // mu0 = int_{-1}^1 (1-t)^alpha (1+t)^beta dt = 2^{ab+1} B(alpha+1, beta+1)
  const double mu0 =
      std::pow(2.0, ab + 1.0) *
      std::exp(std::lgamma(alpha + 1.0) + std::lgamma(beta + 1.0) -
               std::lgamma(ab + 2.0));
  Rule1D rule = golub_welsch(diag, sub, mu0);
  // map t in [-1,1] -> s = (1+t)/2 in [0,1]; weight transforms by 2^{-ab-1}
  for (int i = 0; i < n; ++i) rule.nodes[i] = 0.5 * (1.0 + rule.nodes[i]);
  rule.weights *= std::pow(2.0, -ab - 1.0);
  return rule;
}

Rule1D trig_weighted_rule(int n, double a, double b) {
  // int_0^{pi/2} f(sin^2 phi) sin^a cos^b dphi
  //   = 1/2 int_0^1 f(s) s^{(a-1)/2} (1-s)^{(b-1)/2} ds.
  Rule1D gj = gauss_jacobi01(n, 0.5 * (b - 1.0), 0.5 * (a - 1.0));
  Rule1D rule;
  rule.nodes.resize(n);
  rule.weights = 0.5 * gj.weights;
  for (int i = 0; i < n; ++i) rule.nodes[i] = std::asin(std::sqrt(gj.nodes[i]));
  return rule;
}

Rule1D periodic_rule(int n) {
  // irrational phase keeps tensor nodes off the coordinate planes; the
  // trapezoid rule on periodic functions is translation invariant
  Rule1D rule;
  rule.nodes.resize(n);
  rule.weights = Eigen::VectorXd::Constant(n, 2.0 * M_PI / n);
  for (int i = 0; i < n; ++i)
    rule.nodes[i] = 2.0 * M_PI * (i + 0.3819660112501051) / n;
  return rule;
}

Eigen::VectorXd log_grid(double r_min, double r_max, int per_decade) {
  if (!(r_min > 0.0) || !(r_max > r_min))
    throw QuadratureFailure("log_grid: need 0 < r_min < r_max");
  const double decades = std::log10(r_max / r_min);
  const int n = std::max(2, static_cast<int>(std::ceil(decades * per_decade)) + 1);
  Eigen::VectorXd r(n);
  const double l0 = std::log(r_min), l1 = std::log(r_max);
  for (int i = 0; i < n; ++i)
    r[i] = std::exp(l0 + (l1 - l0) * i / (n - 1.0));
  r[0] = r_min;
  r[n - 1] = r_max;
  return r;
}

namespace {

// Exact integral of the power law through (r0,f0),(r1,f1) over [r0,r1].
double power_cell(double r0, double r1, double f0, double f1) {
  if (f0 == 0.0 && f1 == 0.0) return 0.0;
  if (f0 == 0.0 || f1 == 0.0 || (f0 > 0) != (f1 > 0)) {
    // sign change or zero: fall back to the trapezoid
    return 0.5 * (f0 + f1) * (r1 - r0);
  }
  const double p = std::log(f1 / f0) / std::log(r1 / r0);
  if (std::abs(p + 1.0) < 1e-8) {
    // f ~ c/s : integral = c log(r1/r0)
    const double c = f0 * r0;
    return c * std::log(r1 / r0);
  }
  // f(s) = f0 (s/r0)^p
  return f0 * r0 / (p + 1.0) * (std::pow(r1 / r0, p + 1.0) - 1.0);
}

}  // namespace

Eigen::VectorXd cumulative_power_integral(const Eigen::VectorXd& r,
                                          const Eigen::VectorXd& f,
                                          double head_exponent) {
  const int n = static_cast<int>(r.size());
  if (f.size() != n || n < 2)
    throw QuadratureFailure("cumulative_power_integral: bad sizes");
  Eigen::VectorXd out(n);
  // head: f ~ f(r0) (s/r0)^p on (0, r0]
  if (head_exponent <= -1.0 && f[0] != 0.0)
    throw DivergentIntegrand("cumulative_power_integral: head exponent <= -1");
  out[0] = (f[0] == 0.0) ? 0.0 : f[0] * r[0] / (head_exponent + 1.0);
  for (int i = 1; i < n; ++i)
    out[i] = out[i - 1] + power_cell(r[i - 1], r[i], f[i - 1], f[i]);
  return out;
}

double power_integral(const Eigen::VectorXd& r, const Eigen::VectorXd& f,
                      double head_exponent) {
  Eigen::VectorXd c = cumulative_power_integral(r, f, head_exponent);
  return c[c.size() - 1];
}

SphereRule sphere_rule(int dim_d, int degree) {
  if (dim_d < 1 || dim_d > 7) throw QuadratureFailure("sphere_rule: dim out of range");
  SphereRule rule;
  if (dim_d == 1) {
    // S^0 = {-1, +1} with counting measure
    rule.nodes.resize(1, 2);
    rule.nodes(0, 0) = 1.0;
    rule.nodes(0, 1) = -1.0;
    rule.weights = Eigen::VectorXd::Ones(2);
    return rule;
  }
  if (dim_d == 2) {
    Rule1D az = periodic_rule(std::max(4, 2 * degree + 2));
    rule.nodes.resize(2, az.nodes.size());
    rule.weights = az.weights;
    for (int i = 0; i < az.nodes.size(); ++i) {
      rule.nodes(0, i) = std::cos(az.nodes[i]);
      rule.nodes(1, i) = std::sin(az.nodes[i]);
    }
    return rule;
  }
  // recursive: theta = (cos(phi), sin(phi) * omega), omega in S^{d-2},
  // dS_d = sin^{d-2}(phi) dphi dS_{d-1}
  const int n_polar = std::max(2, degree + 1);
  Rule1D polar = trig_weighted_rule(n_polar, static_cast<double>(dim_d - 2), 0.0);
  // trig rule is on [0, pi/2] for sin^a cos^b; we need [0, pi]: use symmetry by
  // integrating f(cos phi) with phi in (0, pi): substitute u = cos(phi) with
  // Gauss-Jacobi on [0,1] twice, or simpler: Gauss rule in u = cos(phi) on
  // [-1, 1] with weight (1-u^2)^{(d-3)/2}.
  Rule1D gj = gauss_jacobi01(n_polar, 0.5 * (dim_d - 3), 0.5 * (dim_d - 3));
  SphereRule inner = sphere_rule(dim_d - 1, degree);
  const int m = static_cast<int>(gj.nodes.size()) * inner.size();
  rule.nodes.resize(dim_d, m);
  rule.weights.resize(m);
  int idx = 0;
  for (int i = 0; i < gj.nodes.size(); ++i) {
    const double u = 2.0 * gj.nodes[i] - 1.0;  // cos(phi) in (-1,1)
    // weight (1-u^2)^{(d-3)/2} du = jacobi weight * 2^{d-2} scaling
    const double w_polar = gj.weights[i] * std::pow(2.0, dim_d - 2);
    const double s = std::sqrt(std::max(0.0, 1.0 - u * u));
    for (int j = 0; j < inner.size(); ++j, ++idx) {
      rule.nodes(0, idx) = u;
      rule.nodes.block(1, idx, dim_d - 1, 1) = s * inner.nodes.col(j);
      rule.weights[idx] = w_polar * inner.weights[j];
    }
  }
  return rule;
}

CubicInterpolant::CubicInterpolant(Eigen::VectorXd x, Eigen::VectorXd y)
    : x_(std::move(x)), y_(std::move(y)) {
  const int n = static_cast<int>(x_.size());
  if (n < 2 || y_.size() != n)
    throw InterpolationGap("CubicInterpolant: need >= 2 matching samples");
  m_ = Eigen::VectorXd::Zero(n);
  if (n == 2) return;
  // natural spline: tridiagonal solve for second derivatives
  Eigen::VectorXd a(n), b(n), c(n), d(n);
  a[0] = 0;
  b[0] = 1;
  c[0] = 0;
  d[0] = 0;
  for (int i = 1; i + 1 < n; ++i) {
    const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
    a[i] = h0 / 6.0;
    b[i] = (h0 + h1) / 3.0;
    c[i] = h1 / 6.0;
    d[i] = (y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0;
  }
  a[n - 1] = 0;
  b[n - 1] = 1;
  c[n - 1] = 0;
  d[n - 1] = 0;
  // Thomas algorithm
  for (int i = 1; i < n; ++i) {
    const double w = a[i] / b[i - 1];
    b[i] -= w * c[i - 1];
    d[i] -= w * d[i - 1];
  }
  m_[n - 1] = d[n - 1] / b[n - 1];
  for (int i = n - 2; i >= 0; --i) m_[i] = (d[i] - c[i] * m_[i + 1]) / b[i];
}

int CubicInterpolant::cell(double x) const {
  const int n = static_cast<int>(x_.size());
  if (x <= x_[0]) return 0;
  if (x >= x_[n - 1]) return n - 2;
  int lo = 0, hi = n - 1;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    if (x_[mid] <= x)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

double CubicInterpolant::operator()(double x) const {
  const int i = cell(x);
  const double h = x_[i + 1] - x_[i];
  const double t0 = (x_[i + 1] - x) / h, t1 = (x - x_[i]) / h;
  return t0 * y_[i] + t1 * y_[i + 1] +
         ((t0 * t0 * t0 - t0) * m_[i] + (t1 * t1 * t1 - t1) * m_[i + 1]) * h *
             h / 6.0;
}

double CubicInterpolant::derivative(double x) const {
  const int i = cell(x);
  const double h = x_[i + 1] - x_[i];
  const double t0 = (x_[i + 1] - x) / h, t1 = (x - x_[i]) / h;
  return (y_[i + 1] - y_[i]) / h +
         ((1.0 - 3.0 * t0 * t0) * m_[i] + (3.0 * t1 * t1 - 1.0) * m_[i + 1]) *
             h / 6.0;
}

Eigen::MatrixXd quasi_random_points(int dim_d, int count, unsigned seed) {
  // Kronecker sequence with generalized golden-ratio generators.
  double gamma = 1.0;
  for (int it = 0; it < 64; ++it)
    gamma = std::pow(1.0 + gamma, 1.0 / (dim_d + 1));
  Eigen::VectorXd alpha(dim_d);
  double g = 1.0;
  for (int j = 0; j < dim_d; ++j) {
    g /= gamma;
    alpha[j] = g;
  }
  Eigen::MatrixXd pts(dim_d, count);
  for (int i = 0; i < count; ++i)
    for (int j = 0; j < dim_d; ++j) {
      double v = 0.5 + alpha[j] * (i + 1.0 + seed * 7919.0);
      pts(j, i) = v - std::floor(v);
    }
  return pts;
}

}  // namespace css
