#ifndef CSS_QUADRATURE_HPP
#define CSS_QUADRATURE_HPP

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace css {

struct Rule1D {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;

  double integrate(const std::function<double(double)>& f) const {
    double s = 0.0;
    for (int i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
    return s;
  }
};

// Gauss-Legendre rule on [a, b], exact for polynomials of degree 2n-1.
Rule1D gauss_legendre(int n, double a = -1.0, double b = 1.0);

// Gauss-Jacobi rule on [0, 1] with weight s^beta (1-s)^alpha folded into the
// weights, exact for f polynomial of degree 2n-1 in
//   int_0^1 f(s) s^beta (1-s)^alpha ds.
Rule1D gauss_jacobi01(int n, double alpha, double beta);

// Rule for int_0^{pi/2} f(phi) sin^a(phi) cos^b(phi) dphi, a,b > -1,
// exact when f is a polynomial in sin^2(phi) of degree <= n-1 or so.
Rule1D trig_weighted_rule(int n, double a, double b);

// Uniform periodic trapezoid rule on [0, 2*pi), exact for trigonometric
// polynomials of degree < n.
Rule1D periodic_rule(int n);

// Log-spaced grid on [r_min, r_max] with `per_decade` points per decade
// (endpoints included).
Eigen::VectorXd log_grid(double r_min, double r_max, int per_decade);

// Cumulative integral F(r_j) = int_0^{r_j} f(s) ds of samples on a positive
// increasing grid, where f behaves locally like a power law. Each cell is
// integrated with the exact antiderivative of the power fit through its
// endpoints (exact for pure powers, high order for smooth perturbations);
// `head_exponent` gives f ~ c s^p on (0, r_0] for the leading cell.
Eigen::VectorXd cumulative_power_integral(const Eigen::VectorXd& r,
                                          const Eigen::VectorXd& f,
                                          double head_exponent);

// Single definite integral of power-law-like samples over the full grid.
double power_integral(const Eigen::VectorXd& r, const Eigen::VectorXd& f,
                      double head_exponent);

// Tensor-product quadrature on the unit sphere S^{d-1} in R^d, 2 <= d <= 7.
// Exact for polynomials of degree <= `degree` restricted to the sphere.
struct SphereRule {
  Eigen::MatrixXd nodes;    // one column per node, d rows
  Eigen::VectorXd weights;  // sums to |S^{d-1}|

  int dim() const { return static_cast<int>(nodes.rows()); }
  int size() const { return static_cast<int>(nodes.cols()); }

  double integrate(const std::function<double(const Eigen::VectorXd&)>& f) const {
    double s = 0.0;
    for (int i = 0; i < nodes.cols(); ++i) s += weights[i] * f(nodes.col(i));
    return s;
  }
};

SphereRule sphere_rule(int dim_d, int degree);

// Natural cubic interpolation through (x_i, y_i) with x strictly increasing.
// Out-of-range queries clamp to the boundary polynomial.
class CubicInterpolant {
 public:
  CubicInterpolant() = default;
  CubicInterpolant(Eigen::VectorXd x, Eigen::VectorXd y);

  double operator()(double x) const;
  double derivative(double x) const;

  bool valid() const { return x_.size() >= 2; }

 private:
  int cell(double x) const;
  Eigen::VectorXd x_, y_, m_;  // m_ = second derivatives
};

// Low-discrepancy points in [0,1]^d (additive recurrence / Kronecker
// sequence); deterministic for a given seed offset.
Eigen::MatrixXd quasi_random_points(int dim_d, int count, unsigned seed = 1);

}  // namespace css

#endif  // CSS_QUADRATURE_HPP
