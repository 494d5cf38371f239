#include "css/constants.hpp"

#include <Eigen/Dense>
#include <map>
#include <mutex>

#include "css/common.hpp"
#include "css/quadrature.hpp"

namespace css {

double sphere_area(int d) {
  if (d < 1) throw DimensionTooSmall("sphere_area: d < 1");
  if (d == 1) return 2.0;  // S^0 counting measure
  return 2.0 * std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d);
}

double ball_volume(int d) { return sphere_area(d) / d; }

double critical_exponent(int n) {
  if (n < 3) throw DimensionTooSmall("critical_exponent: N < 3");
  return 2.0 * n / (n - 2.0);
}

double sobolev_constant(int n) {
  if (n < 3) throw DimensionTooSmall("sobolev_constant: N < 3");
  return static_cast<double>(n) * (n - 2.0) * M_PI *
         std::pow(std::tgamma(0.5 * n) / std::tgamma(static_cast<double>(n)),
                  2.0 / n);
}

namespace {

// Rayleigh quotient (||u'||^2 + ||u||^2 weighted) / ||u||_{2*}^2 for radial
// profiles on B_1, discretized on a uniform grid with m interior cells.
double ball_quotient_min(int n, int m) {
  const double h = 1.0 / m;
  const double p = 2.0 * n / (n - 2.0);
  // nodes at cell centers, plus the ground-state style fixed-point iteration
  // u <- (-lap + 1)^{-1} (u^{p-1}), normalized; Neumann boundary.
  Eigen::VectorXd r(m);
  for (int i = 0; i < m; ++i) r[i] = (i + 0.5) * h;
  // flux coefficients r^{n-1} at faces
  Eigen::VectorXd face(m + 1);
  for (int i = 0; i <= m; ++i) face[i] = std::pow(i * h, n - 1.0);
  Eigen::VectorXd w(m);
  for (int i = 0; i < m; ++i) w[i] = std::pow(r[i], n - 1.0) * h;

  // tridiagonal operator A = -div(r^{n-1} d/dr)/r^{n-1} + 1 in weighted space
  Eigen::VectorXd diag(m), sub(m - 1);
  for (int i = 0; i < m; ++i) {
    double s = 0.0;
    if (i > 0) s += face[i] / h;
    if (i + 1 < m) s += face[i + 1] / h;
    diag[i] = s / w[i] * h + 1.0;  // note: (1/w) * flux/h * h = flux/(w)
  }
  for (int i = 0; i + 1 < m; ++i) sub[i] = -face[i + 1] / (h * w[i]);
  // the operator is not symmetric in the plain basis; symmetrize with sqrt(w)
  Eigen::VectorXd sq = w.array().sqrt();
  Eigen::VectorXd diag_s = diag;
  Eigen::VectorXd sub_s(m - 1);
  for (int i = 0; i + 1 < m; ++i)
    sub_s[i] = -face[i + 1] / h / (sq[i] * sq[i + 1]);

  auto apply_quotient = [&](const Eigen::VectorXd& u) {
    double grad = 0.0;
    for (int i = 0; i + 1 < m; ++i) {
      const double du = (u[i + 1] - u[i]) / h;
      grad += face[i + 1] * du * du * h;
    }
    double mass = 0.0, lp = 0.0;
    for (int i = 0; i < m; ++i) {
      mass += w[i] * u[i] * u[i];
      lp += w[i] * std::pow(std::abs(u[i]), p);
    }
    const double area = sphere_area(n);
    return (area * (grad + mass)) / std::pow(area * lp, 2.0 / p);
  };

  // Thomas solve for (A u = b) in the symmetrized variables
  auto solve = [&](Eigen::VectorXd b) {
    Eigen::VectorXd dd = diag_s, bb = std::move(b);
    for (int i = 1; i < m; ++i) {
      const double f = sub_s[i - 1] / dd[i - 1];
      dd[i] -= f * sub_s[i - 1];
      bb[i] -= f * bb[i - 1];
    }
    Eigen::VectorXd x(m);
    x[m - 1] = bb[m - 1] / dd[m - 1];
    for (int i = m - 2; i >= 0; --i)
      x[i] = (bb[i] - sub_s[i] * x[i + 1]) / dd[i];
    return x;
  };

  double best = 1e300;
  for (int start = 0; start < 2; ++start) {
    Eigen::VectorXd u(m);
    if (start == 0)
      u.setOnes();
    else
      for (int i = 0; i < m; ++i)
        u[i] = std::pow(1.0 + 25.0 * r[i] * r[i], -0.5 * (n - 2));
    double q = apply_quotient(u);
    for (int it = 0; it < 200; ++it) {
      Eigen::VectorXd rhs(m);
      for (int i = 0; i < m; ++i)
        rhs[i] = sq[i] * std::pow(std::abs(u[i]), p - 1.0);
      Eigen::VectorXd v = solve(rhs);
      for (int i = 0; i < m; ++i) u[i] = v[i] / sq[i];
      u /= u.cwiseAbs().maxCoeff();
      const double qn = apply_quotient(u);
      if (std::abs(qn - q) < 1e-12 * std::abs(q)) {
        q = qn;
        break;
      }
      q = qn;
    }
    best = std::min(best, q);
  }
  return best;
}

}  // namespace

double sobolev_ball_constant(int n) {
  if (n < 3) throw DimensionTooSmall("sobolev_ball_constant: N < 3");
  static std::mutex mu;
  static std::map<int, double> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  // refinement extrapolation from two grids (first-order in h)
  const double q1 = ball_quotient_min(n, 800);
  const double q2 = ball_quotient_min(n, 1600);
  const double q = q2 + (q2 - q1);
  cache[n] = q;
  return q;
}

}  // namespace css
