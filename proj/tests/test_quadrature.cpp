#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "css/constants.hpp"
#include "css/harmonics.hpp"
#include "css/quadrature.hpp"

using namespace css;

TEST_CASE("gauss-legendre integrates polynomials exactly") {
  Rule1D r = gauss_legendre(8, 0.0, 2.0);
  double v = r.integrate([](double x) { return x * x * x * x * x; });
  CHECK(v == doctest::Approx(64.0 / 6.0).epsilon(1e-13));
}

TEST_CASE("gauss-jacobi reproduces beta integrals") {
  // int_0^1 s^{1/2} (1-s)^{3/2} s^2 ds = B(7/2, 5/2)
  Rule1D r = gauss_jacobi01(6, 1.5, 0.5);
  double v = r.integrate([](double s) { return s * s; });
  const double expect = std::exp(std::lgamma(3.5) + std::lgamma(2.5) -
                                 std::lgamma(6.0));
  CHECK(v == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("trig weighted rule matches beta closed forms") {
  // int_0^{pi/2} sin^4 cos^2 dphi = (1/2) B(5/2, 3/2)
  Rule1D r = trig_weighted_rule(8, 4.0, 2.0);
  double v = r.integrate([](double) { return 1.0; });
  const double expect =
      0.5 * std::exp(std::lgamma(2.5) + std::lgamma(1.5) - std::lgamma(4.0));
  CHECK(v == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("sphere rule total mass and moments") {
  for (int d = 2; d <= 5; ++d) {
    SphereRule rule = sphere_rule(d, 8);
    double mass = rule.integrate([](const Eigen::VectorXd&) { return 1.0; });
    CHECK(mass == doctest::Approx(sphere_area(d)).epsilon(1e-12));
    // int x_1^2 = |S^{d-1}| / d
    double m2 = rule.integrate(
        [](const Eigen::VectorXd& th) { return th[0] * th[0]; });
    CHECK(m2 == doctest::Approx(sphere_area(d) / d).epsilon(1e-12));
  }
}

TEST_CASE("cumulative power integral exact on pure powers") {
  Eigen::VectorXd r = log_grid(1e-6, 1.0, 40);
  Eigen::VectorXd f(r.size());
  for (int i = 0; i < r.size(); ++i) f[i] = std::pow(r[i], 2.5);
  Eigen::VectorXd c = cumulative_power_integral(r, f, 2.5);
  for (int i : {0, 10, static_cast<int>(r.size()) - 1}) {
    const double expect = std::pow(r[i], 3.5) / 3.5;
    CHECK(c[i] == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("cubic interpolant reproduces smooth functions") {
  Eigen::VectorXd x(41), y(41);
  for (int i = 0; i <= 40; ++i) {
    x[i] = i / 40.0 * 3.0;
    y[i] = std::sin(x[i]);
  }
  CubicInterpolant ci(x, y);
  CHECK(ci(1.234) == doctest::Approx(std::sin(1.234)).epsilon(1e-6));
  CHECK(ci.derivative(1.234) == doctest::Approx(std::cos(1.234)).epsilon(1e-4));
}

TEST_CASE("sobolev constant matches the bubble quotient") {
  // U = (1+r^2)^{-(N-2)/2}: radial integrals have Beta closed forms
  auto beta_fn = [](double a, double b) {
    return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
  };
  for (int n : {3, 4, 5, 6}) {
    const double p = critical_exponent(n);
    const double nm2 = n - 2.0;
    // int_0^inf t^{n+1} (1+t^2)^{-n} dt = (1/2) B(n/2+1, n/2-1)
    const double grad =
        nm2 * nm2 * 0.5 * beta_fn(0.5 * n + 1.0, 0.5 * n - 1.0);
    // int_0^inf t^{n-1} (1+t^2)^{-n} dt = (1/2) B(n/2, n/2)
    const double lp = 0.5 * beta_fn(0.5 * n, 0.5 * n);
    const double area = sphere_area(n);
    const double quotient = area * grad / std::pow(area * lp, 2.0 / p);
    CHECK(quotient == doctest::Approx(sobolev_constant(n)).epsilon(1e-12));
  }
}

TEST_CASE("hyperspherical harmonics are orthonormal") {
  for (int d : {2, 3, 4, 5}) {
    SphereHarmonics h(d, 4);
    SphereRule rule = sphere_rule(d, 10);
    const int m = h.count();
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(m, m);
    for (int q = 0; q < rule.size(); ++q) {
      Eigen::VectorXd v = h.eval_all(rule.nodes.col(q));
      gram += rule.weights[q] * v * v.transpose();
    }
    CHECK((gram - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff() <
          1e-10);
  }
}

TEST_CASE("harmonic space dims sum to polynomial space dims") {
  // sum over parity-compatible degrees of dim H_l(d) equals the dimension of
  // degree-l polynomials restricted to the sphere
  CHECK(harmonic_space_dim(5, 0) == 1);
  CHECK(harmonic_space_dim(5, 1) == 5);
  CHECK(harmonic_space_dim(5, 2) == 14);
  CHECK(harmonic_space_dim(3, 7) == 15);
  CHECK(harmonic_space_dim(2, 3) == 2);
  CHECK(harmonic_space_dim(1, 1) == 1);
  CHECK(harmonic_space_dim(1, 2) == 0);
}
