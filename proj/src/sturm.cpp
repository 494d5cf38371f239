#include "css/sturm.hpp"

#include <algorithm>
#include <cmath>

#include "css/common.hpp"
#include "css/harmonics.hpp"
#include "css/quadrature.hpp"

namespace css {

namespace {

// number of eigenvalues of the symmetric tridiagonal strictly below x
int sturm_count(const Eigen::VectorXd& diag, const Eigen::VectorXd& sub,
                double x) {
  const int n = static_cast<int>(diag.size());
  int count = 0;
  double q = diag[0] - x;
  if (q < 0) ++count;
  for (int i = 1; i < n; ++i) {
    const double b2 = sub[i - 1] * sub[i - 1];
    if (q == 0.0) q = 1e-300;
    q = diag[i] - x - b2 / q;
    if (q < 0) ++count;
  }
  return count;
}

// solve (T - shift) x = b in place, tridiagonal LU with row scaling
Eigen::VectorXd shifted_solve(const Eigen::VectorXd& diag,
                              const Eigen::VectorXd& sub, double shift,
                              Eigen::VectorXd b) {
  const int n = static_cast<int>(diag.size());
  Eigen::VectorXd dd(n);
  for (int i = 0; i < n; ++i) dd[i] = diag[i] - shift;
  Eigen::VectorXd ss = sub;
  for (int i = 1; i < n; ++i) {
    double piv = dd[i - 1];
    if (std::abs(piv) < 1e-300) piv = (piv < 0 ? -1e-300 : 1e-300);
    const double f = ss[i - 1] / piv;
    dd[i] -= f * ss[i - 1];
    b[i] -= f * b[i - 1];
  }
  Eigen::VectorXd x(n);
  double piv = dd[n - 1];
  if (std::abs(piv) < 1e-300) piv = (piv < 0 ? -1e-300 : 1e-300);
  x[n - 1] = b[n - 1] / piv;
  for (int i = n - 2; i >= 0; --i) {
    piv = dd[i];
    if (std::abs(piv) < 1e-300) piv = (piv < 0 ? -1e-300 : 1e-300);
    x[i] = (b[i] - ss[i] * x[i + 1]) / piv;
  }
  return x;
}

double rayleigh_residual(const Eigen::VectorXd& diag,
                         const Eigen::VectorXd& sub, const Eigen::VectorXd& v,
                         double lambda) {
  const int n = static_cast<int>(diag.size());
  double r2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double t = (diag[i] - lambda) * v[i];
    if (i > 0) t += sub[i - 1] * v[i - 1];
    if (i + 1 < n) t += sub[i] * v[i + 1];
    r2 += t * t;
  }
  return std::sqrt(r2);
}

}  // namespace

TridiagEigen lowest_eigenpairs_tridiagonal(const Eigen::VectorXd& diag,
                                           const Eigen::VectorXd& sub,
                                           int count, bool want_vectors) {
  const int n = static_cast<int>(diag.size());
  if (count < 1 || count > n)
    throw NonConvergence("tridiagonal: bad eigenpair count");
  // Gershgorin bracket
  double lo = diag[0], hi = diag[0];
  for (int i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(sub[i - 1]);
    if (i + 1 < n) r += std::abs(sub[i]);
    lo = std::min(lo, diag[i] - r);
    hi = std::max(hi, diag[i] + r);
  }
  const double scale = std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
  TridiagEigen out;
  out.values.resize(count);
  if (want_vectors) out.vectors.resize(n, count);
  for (int j = 0; j < count; ++j) {
    double a = lo, b = hi;
    // bisection: find j-th smallest eigenvalue
    for (int it = 0;
         it < 600 && (b - a) > 1e-14 * std::max({1.0, std::abs(a), std::abs(b)});
         ++it) {
      const double mid = 0.5 * (a + b);
      if (sturm_count(diag, sub, mid) >= j + 1)
        b = mid;
      else
        a = mid;
    }
    double lambda = 0.5 * (a + b);
    out.values[j] = lambda;
    if (!want_vectors) continue;
    // inverse iteration with the bisected shift
    Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
    for (int i = 0; i < n; ++i) v[i] += 1e-3 * std::sin(1.0 + 7.0 * i);
    // deflate against previously found vectors (handles clusters)
    auto deflate = [&](Eigen::VectorXd& w) {
      for (int p = 0; p < j; ++p)
        if (std::abs(out.values[p] - lambda) < 1e-8 * std::max(1.0, std::abs(lambda)))
          w -= out.vectors.col(p).dot(w) * out.vectors.col(p);
    };
    double shift = lambda;
    bool ok = false;
    for (int it = 0; it < 50; ++it) {
      deflate(v);
      v.normalize();
      Eigen::VectorXd w = shifted_solve(diag, sub, shift, v);
      deflate(w);
      w.normalize();
      const double rq_num = [&] {
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
          double t = diag[i] * w[i];
          if (i > 0) t += sub[i - 1] * w[i - 1];
          if (i + 1 < n) t += sub[i] * w[i + 1];
          s += w[i] * t;
        }
        return s;
      }();
      v = w;
      const double res = rayleigh_residual(diag, sub, v, rq_num);
      if (res < 1e-10 * scale) {
        // the bisected value is already machine-accurate; keep it
        ok = true;
        break;
      }
    }
    if (!ok) throw NonConvergence("inverse iteration stalled");
    out.vectors.col(j) = v;
  }
  return out;
}

SturmLiouvilleReduction SturmLiouvilleReduction::make(int dim_n, int block_k,
                                                      double alpha, int l1,
                                                      int l2, int nodes) {
  SturmLiouvilleReduction red;
  red.dim_n = dim_n;
  red.block_k = block_k;
  red.alpha = alpha;
  red.l1 = l1;
  red.l2 = l2;
  const double h = 0.5 * M_PI / nodes;
  red.grid.resize(nodes);
  for (int i = 0; i < nodes; ++i) red.grid[i] = (i + 0.5) * h;
  return red;
}

double SturmLiouvilleReduction::weight(double phi) const {
  return std::pow(std::sin(phi), block_k - 1.0) *
         std::pow(std::cos(phi), dim_n - block_k - 1.0);
}

namespace {

double indicial_exponent(int block_k, double alpha, int l1) {
  const double c = 0.5 * (block_k - 2.0);
  const double rad = c * c + l1 * (l1 + block_k - 2.0) - alpha;
  if (rad < 0.0)
    throw SupercriticalAlpha("sector indicial exponent is complex");
  return -c + std::sqrt(rad);
}

struct GaugeOperator {
  Eigen::VectorXd diag, sub;   // symmetrized tridiagonal
  Eigen::VectorXd sqrt_w;      // sqrt of transformed weight at the nodes
  double h = 0.0;
};

// flux-form discretization of -(wt u')'/wt with natural closure, symmetrized
GaugeOperator build_operator(const Eigen::VectorXd& grid,
                             double s_exp, double c_exp) {
  const int m = static_cast<int>(grid.size());
  GaugeOperator op;
  op.h = grid[1] - grid[0];
  auto wt = [&](double phi) {
    return std::pow(std::sin(phi), s_exp) * std::pow(std::cos(phi), c_exp);
  };
  Eigen::VectorXd wc(m), wf(m + 1);
  for (int i = 0; i < m; ++i) wc[i] = wt(grid[i]);
  wf[0] = 0.0;
  wf[m] = 0.0;
  for (int i = 1; i < m; ++i) wf[i] = wt(0.5 * (grid[i - 1] + grid[i]));
  op.sqrt_w = wc.array().sqrt();
  op.diag.resize(m);
  op.sub.resize(m - 1);
  const double h2 = op.h * op.h;
  for (int i = 0; i < m; ++i)
    op.diag[i] = (wf[i] + wf[i + 1]) / (h2 * wc[i]);
  for (int i = 0; i + 1 < m; ++i)
    op.sub[i] = -wf[i + 1] / (h2 * op.sqrt_w[i] * op.sqrt_w[i + 1]);
  return op;
}

// nonuniform flux-form variant; faces at node midpoints, natural closure
GaugeOperator build_nonuniform_operator(const Eigen::VectorXd& grid,
                                        double s_exp, double c_exp) {
  const int m = static_cast<int>(grid.size());
  GaugeOperator op;
  auto wt = [&](double phi) {
    return std::pow(std::sin(phi), s_exp) * std::pow(std::cos(phi), c_exp);
  };
  Eigen::VectorXd face(m + 1), hstep(m + 1), cell(m);
  face[0] = 0.0;
  face[m] = 0.5 * M_PI;
  for (int i = 1; i < m; ++i) face[i] = 0.5 * (grid[i - 1] + grid[i]);
  for (int i = 0; i < m; ++i) cell[i] = face[i + 1] - face[i];
  hstep[0] = hstep[m] = 1.0;  // unused (zero flux)
  for (int i = 1; i < m; ++i) hstep[i] = grid[i] - grid[i - 1];
  Eigen::VectorXd wc(m), wfv(m + 1);
  for (int i = 0; i < m; ++i) wc[i] = wt(grid[i]) * cell[i];
  wfv[0] = wfv[m] = 0.0;
  for (int i = 1; i < m; ++i) wfv[i] = wt(face[i]) / hstep[i];
  op.sqrt_w = wc.array().sqrt();
  op.diag.resize(m);
  op.sub.resize(m - 1);
  for (int i = 0; i < m; ++i) op.diag[i] = (wfv[i] + wfv[i + 1]) / wc[i];
  for (int i = 0; i + 1 < m; ++i)
    op.sub[i] = -wfv[i + 1] / (op.sqrt_w[i] * op.sqrt_w[i + 1]);
  return op;
}

}  // namespace

double sector_ground_value(int dim_n, int block_k, double alpha, int l1,
                           int l2) {
  const double s = indicial_exponent(block_k, alpha, l1);
  const double t = s + l2;
  return t * (t + dim_n - 2.0);
}

std::vector<SectorEigenpair> solve_sector_sl(const SturmLiouvilleReduction& red,
                                             int count) {
  if (count < 1) throw NonConvergence("solve_sector_sl: count < 1");
  if (red.l1 < 0 || red.l2 < 0)
    throw NonConvergence("solve_sector_sl: negative sector degree");
  const int n = red.dim_n, k = red.block_k;
  const double s = indicial_exponent(k, red.alpha, red.l1);
  const double mu0 = sector_ground_value(n, k, red.alpha, red.l1, red.l2);
  const double s_exp = k - 1.0 + 2.0 * s;
  const double c_exp = n - k - 1.0 + 2.0 * red.l2;
  GaugeOperator op = build_operator(red.grid, s_exp, c_exp);
  TridiagEigen te = lowest_eigenpairs_tridiagonal(op.diag, op.sub, count);

  const int m = static_cast<int>(red.grid.size());
  const int mult = harmonic_space_dim(k, red.l1) *
                   harmonic_space_dim(n - k, red.l2);
  // quadrature for the transformed weight; the smooth parts are low-degree
  Rule1D norm_rule = trig_weighted_rule(std::max(40, m / 16), s_exp, c_exp);
  Rule1D pot_rule =
      trig_weighted_rule(std::max(40, m / 16), s_exp - 2.0, c_exp);

  std::vector<SectorEigenpair> out;
  std::vector<Eigen::VectorXd> smooth;
  for (int j = 0; j < count; ++j) {
    Eigen::VectorXd u = te.vectors.col(j).cwiseQuotient(op.sqrt_w);
    smooth.push_back(u);
  }
  // re-orthonormalize against the continuum quadrature Gram matrix so the
  // returned profiles are orthonormal under the module's own quadrature
  std::vector<CubicInterpolant> interp;
  for (int j = 0; j < count; ++j)
    interp.emplace_back(red.grid, smooth[j]);
  Eigen::MatrixXd gram(count, count);
  for (int a = 0; a < count; ++a)
    for (int b = a; b < count; ++b) {
      double g = 0.0;
      for (int q = 0; q < norm_rule.nodes.size(); ++q)
        g += norm_rule.weights[q] * interp[a](norm_rule.nodes[q]) *
             interp[b](norm_rule.nodes[q]);
      gram(a, b) = g;
      gram(b, a) = g;
    }
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success)
    throw NonConvergence("sector profile Gram not positive definite");
  Eigen::MatrixXd coeff =
      llt.matrixL().solve(Eigen::MatrixXd::Identity(count, count));
  // rows of coeff express the orthonormalized profiles in the raw ones

  for (int j = 0; j < count; ++j) {
    SectorEigenpair ep;
    ep.mu = mu0 + te.values[j];
    ep.l1 = red.l1;
    ep.l2 = red.l2;
    ep.overtone = j;
    ep.multiplicity = mult;
    ep.gauge_exponent = s;
    ep.grid = red.grid;
    Eigen::VectorXd u = Eigen::VectorXd::Zero(m);
    for (int b = 0; b <= j; ++b) u += coeff(j, b) * smooth[b];
    // fix sign: positive integral against the constant (ground convention)
    double integral = 0.0;
    {
      CubicInterpolant ui(red.grid, u);
      for (int q = 0; q < norm_rule.nodes.size(); ++q)
        integral += norm_rule.weights[q] * ui(norm_rule.nodes[q]);
    }
    double sign = integral >= 0.0 ? 1.0 : -1.0;
    if (integral == 0.0) sign = (u[m - 1] >= 0.0) ? 1.0 : -1.0;
    u *= sign;
    ep.smooth_part = u;
    const double floor_n = 0.25 * (n - 2.0) * (n - 2.0);
    if (ep.mu >= -floor_n)
      ep.sigma_plus = -0.5 * (n - 2.0) + std::sqrt(floor_n + ep.mu);
    else
      ep.sigma_plus = std::numeric_limits<double>::quiet_NaN();
    // angular Dirichlet integral: mu + int a psi^2 over the sphere
    {
      CubicInterpolant ui(red.grid, u);
      double pot = 0.0;
      for (int q = 0; q < pot_rule.nodes.size(); ++q) {
        const double uu = ui(pot_rule.nodes[q]);
        pot += pot_rule.weights[q] * uu * uu;
      }
      const double l1t = red.l1 * (red.l1 + k - 2.0);
      const double l2t = red.l2 * (red.l2 + n - k - 2.0);
      // int |grad_S psi|^2 = mu + alpha * int psi^2 / sin^2  with the sector
      // centrifugal terms part of the gradient; recover via the form:
      // int |grad psi|^2 = mu + int a psi^2, a = alpha / sin^2 here
      (void)l1t;
      (void)l2t;
      ep.angular_dirichlet = ep.mu + red.alpha * pot;
    }
    out.push_back(std::move(ep));
  }
  if (out[0].mu < -0.25 * (n - 2.0) * (n - 2.0) && red.l1 == 0 && red.l2 == 0)
    throw IndefiniteOperator("sector ground below the spectral floor");
  return out;
}

double SectorEigenpair::profile(double phi) const {
  CubicInterpolant ui(grid, smooth_part);
  return std::pow(std::sin(phi), gauge_exponent) *
         std::pow(std::cos(phi), static_cast<double>(l2)) * ui(phi);
}

double SectorEigenpair::profile_derivative(double phi) const {
  CubicInterpolant ui(grid, smooth_part);
  const double g = std::pow(std::sin(phi), gauge_exponent) *
                   std::pow(std::cos(phi), static_cast<double>(l2));
  const double logder =
      gauge_exponent / std::tan(phi) - l2 * std::tan(phi);
  return g * (logder * ui(phi) + ui.derivative(phi));
}

double sector_mu1_estimate(int dim_n, int block_k, double alpha, int nodes) {
  // gauge path when subcritical, graded raw path otherwise
  const double c = 0.5 * (block_k - 2.0);
  if (alpha < c * c) {
    SturmLiouvilleReduction red =
        SturmLiouvilleReduction::make(dim_n, block_k, alpha, 0, 0, nodes);
    const double s = indicial_exponent(block_k, alpha, 0);
    GaugeOperator op = build_operator(
        red.grid, block_k - 1.0 + 2.0 * s, dim_n - block_k - 1.0);
    TridiagEigen te = lowest_eigenpairs_tridiagonal(op.diag, op.sub, 1, false);
    return sector_ground_value(dim_n, block_k, alpha, 0, 0) + te.values[0];
  }
  // alpha at or beyond the Hardy-critical value: the continuum operator is
  // unbounded below. Certify with an explicit log-oscillation trial
  // function: u = sin^{-(k-2)/2}(phi) v(log phi), v one sine hump on a log
  // window; the Rayleigh quotient drops linearly in the window length.
  const double floor_n = 0.25 * (dim_n - 2.0) * (dim_n - 2.0);
  const double gap = alpha - c * c;
  auto trial_quotient = [&](double t_len) {
    const double tau1 = -3.0, tau0 = tau1 - t_len;
    const double om = M_PI / t_len;
    const double sc = -0.5 * (block_k - 2.0);
    // integrate in tau = log(phi); all magnitude factors assembled in log
    // space (the gauge cancels the weight's blow-up exactly)
    Rule1D rule = gauss_legendre(4000, tau0, tau1);
    double num = 0.0, den = 0.0;
    for (int q = 0; q < rule.nodes.size(); ++q) {
      const double tau = rule.nodes[q];
      const double phi = std::exp(tau);
      const double sn = std::sin(phi), cs = std::cos(phi);
      const double lsn = (phi > 1e-8) ? std::log(sn) : tau;
      const double lcs = std::log(cs);
      const double v = std::sin(om * (tau - tau0));
      const double vd = om * std::cos(om * (tau - tau0));
      // (du/dphi)^2 = sin^{2sc-2} (sc cos v + vd sin/phi)^2
      const double q1 = sc * cs * v + vd * sn / phi;
      const double lf_num = tau + (2.0 * sc + block_k - 3.0) * lsn +
                            (dim_n - block_k - 1.0) * lcs;
      const double lf_den = lf_num + 2.0 * lsn;
      num += rule.weights[q] * (q1 * q1 - alpha * v * v) * std::exp(lf_num);
      den += rule.weights[q] * v * v * std::exp(lf_den);
    }
    return num / den;
  };
  double t_len = std::max(8.0, 4.0 / std::sqrt(std::max(gap, 1e-12)));
  double best = trial_quotient(t_len);
  for (int it = 0; it < 24 && best > -2.0 * floor_n; ++it) {
    t_len *= 1.7;
    best = std::min(best, trial_quotient(t_len));
  }
  // fall back to a plain matrix estimate if the trial stalled (alpha exactly
  // critical: the operator is bounded below there)
  if (best > -2.0 * floor_n && gap <= 1e-12) {
    SturmLiouvilleReduction red =
        SturmLiouvilleReduction::make(dim_n, block_k, alpha, 0, 0, nodes);
    GaugeOperator op =
        build_operator(red.grid, block_k - 1.0, dim_n - block_k - 1.0);
    for (int i = 0; i < red.grid.size(); ++i) {
      const double si = std::sin(red.grid[i]);
      op.diag[i] -= alpha / (si * si);
    }
    TridiagEigen te = lowest_eigenpairs_tridiagonal(op.diag, op.sub, 1, false);
    return std::min(best, te.values[0]);
  }
  return best;
}

}  // namespace css
