#include "css/harmonics.hpp"

#include <cmath>

#include "css/common.hpp"

namespace css {

namespace {

double binom(double n, double k) {
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                  std::lgamma(n - k + 1.0));
}

// norm^2 of sin^m(phi) C^{nu}_n(cos phi) against sin^{d-2}(phi) on (0, pi),
// with nu = m + (d-2)/2.
double gegenbauer_block_norm_sq(int n, int m, int d) {
  const double nu = m + 0.5 * (d - 2);
  // int_{-1}^{1} [C^nu_n(t)]^2 (1-t^2)^{nu-1/2} dt
  //   = pi 2^{1-2nu} Gamma(n+2nu) / (n! (n+nu) Gamma(nu)^2)
  return M_PI * std::pow(2.0, 1.0 - 2.0 * nu) *
         std::exp(std::lgamma(n + 2.0 * nu) - std::lgamma(n + 1.0) -
                  2.0 * std::lgamma(nu)) /
         (n + nu);
}

}  // namespace

int harmonic_space_dim(int d, int l) {
  if (l < 0) return 0;
  if (d == 1) return l <= 1 ? 1 : 0;
  if (d == 2) return l == 0 ? 1 : 2;
  if (l == 0) return 1;
  const double a = binom(l + d - 1.0, d - 1.0) - binom(l + d - 3.0, d - 1.0);
  return static_cast<int>(std::lround(a));
}

void gegenbauer_values(int n_max, double nu, double x, double* out) {
  out[0] = 1.0;
  if (n_max == 0) return;
  out[1] = 2.0 * nu * x;
  for (int n = 2; n <= n_max; ++n)
    out[n] = (2.0 * x * (n + nu - 1.0) * out[n - 1] -
              (n + 2.0 * nu - 2.0) * out[n - 2]) /
             n;
}

void jacobi_values(int n_max, double a, double b, double x, double* out) {
  out[0] = 1.0;
  if (n_max == 0) return;
  out[1] = 0.5 * (a - b + (a + b + 2.0) * x);
  for (int n = 2; n <= n_max; ++n) {
    const double dn = n;
    const double c1 = 2.0 * dn * (dn + a + b) * (2.0 * dn + a + b - 2.0);
    const double c2 = (2.0 * dn + a + b - 1.0) * (a * a - b * b);
    const double c3 = (2.0 * dn + a + b - 2.0) * (2.0 * dn + a + b - 1.0) *
                      (2.0 * dn + a + b);
    const double c4 =
        2.0 * (dn + a - 1.0) * (dn + b - 1.0) * (2.0 * dn + a + b);
    out[n] = ((c2 + c3 * x) * out[n - 1] - c4 * out[n - 2]) / c1;
  }
}

double jacobi_norm_sq(int n, double a, double b) {
  return std::pow(2.0, a + b + 1.0) / (2.0 * n + a + b + 1.0) *
         std::exp(std::lgamma(n + a + 1.0) + std::lgamma(n + b + 1.0) -
                  std::lgamma(n + a + b + 1.0) - std::lgamma(n + 1.0));
}

SphereHarmonics::SphereHarmonics(int dim_d, int max_degree)
    : dim_d_(dim_d), max_degree_(max_degree) {
  if (dim_d < 1 || dim_d > 7)
    throw DimensionTooSmall("SphereHarmonics: dim out of range");
  offsets_.assign(max_degree_ + 2, 0);
  for (int l = 0; l <= max_degree_; ++l) {
    offsets_[l] = static_cast<int>(degrees_.size());
    const int m = harmonic_space_dim(dim_d_, l);
    for (int i = 0; i < m; ++i) degrees_.push_back(l);
  }
  offsets_[max_degree_ + 1] = static_cast<int>(degrees_.size());
}

// Writes the values of all harmonics on S^{d-1} of degree <= max_l,
// ordered by (degree, inner index), into `out`.
void SphereHarmonics::eval_recursive(int d, const double* theta, int max_l,
                                     std::vector<double>& out) const {
  out.clear();
  if (d == 1) {
    const double c = 1.0 / std::sqrt(2.0);
    out.push_back(c);
    if (max_l >= 1) out.push_back(c * theta[0]);
    return;
  }
  if (d == 2) {
    const double phi = std::atan2(theta[1], theta[0]);
    out.push_back(1.0 / std::sqrt(2.0 * M_PI));
    const double c = 1.0 / std::sqrt(M_PI);
    for (int l = 1; l <= max_l; ++l) {
      out.push_back(c * std::cos(l * phi));
      out.push_back(c * std::sin(l * phi));
    }
    return;
  }
  // theta = (cos phi, sin phi * omega), omega in S^{d-2}
  const double u = theta[0];
  double s2 = 0.0;
  for (int i = 1; i < d; ++i) s2 += theta[i] * theta[i];
  const double s = std::sqrt(s2);
  std::vector<double> omega(d - 1);
  if (s > 1e-300)
    for (int i = 0; i < d - 1; ++i) omega[i] = theta[i + 1] / s;
  else {
    omega.assign(d - 1, 0.0);
    omega[0] = 1.0;
  }
  std::vector<double> inner;
  eval_recursive(d - 1, omega.data(), max_l, inner);
  // offsets into `inner` by degree
  std::vector<int> ioff(max_l + 2, 0);
  {
    int pos = 0;
    for (int l = 0; l <= max_l; ++l) {
      ioff[l] = pos;
      pos += harmonic_space_dim(d - 1, l);
    }
    ioff[max_l + 1] = pos;
  }
  // Gegenbauer ladders: for each inner degree m, values of
  // sin^m(phi) C^{m+(d-2)/2}_{l-m}(cos phi), normalized.
  std::vector<double> geg(max_l + 1);
  std::vector<double> spow(max_l + 1);
  spow[0] = 1.0;
  for (int m = 1; m <= max_l; ++m) spow[m] = spow[m - 1] * s;
  for (int l = 0; l <= max_l; ++l) {
    for (int m = 0; m <= l; ++m) {
      const int inner_count = ioff[m + 1] - ioff[m];
      if (inner_count == 0) continue;
      const double nu = m + 0.5 * (d - 2);
      gegenbauer_values(l - m, nu, u, geg.data());
      const double nrm =
          1.0 / std::sqrt(gegenbauer_block_norm_sq(l - m, m, d));
      const double factor = nrm * spow[m] * geg[l - m];
      for (int i = 0; i < inner_count; ++i)
        out.push_back(factor * inner[ioff[m] + i]);
    }
  }
}

Eigen::VectorXd SphereHarmonics::eval_all(const Eigen::VectorXd& theta) const {
  if (theta.size() != dim_d_)
    throw DimensionTooSmall("SphereHarmonics::eval_all: wrong point dim");
  std::vector<double> vals;
  eval_recursive(dim_d_, theta.data(), max_degree_, vals);
  Eigen::VectorXd out(count());
  for (int i = 0; i < count(); ++i) out[i] = vals[i];
  return out;
}

double SphereHarmonics::eval(int i, const Eigen::VectorXd& theta) const {
  return eval_all(theta)[i];
}

}  // namespace css
