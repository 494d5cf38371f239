#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "css/potential.hpp"
#include "css/quadrature.hpp"

using namespace css;

namespace {

AngularCoefficient cyl5(double alpha) {
  return AngularCoefficient(5, 3, {CylTerm{{{1, 2, 3}}, alpha}}, {});
}

AngularCoefficient pair6(double alpha) {
  PairIndex jj{{{1, 2, 3}}, {{4, 5, 6}}};
  return AngularCoefficient(6, 3, {}, {PairTerm{jj, alpha}});
}

}  // namespace

TEST_CASE("eval_a on axis points") {
  auto c = cyl5(1.0);
  Eigen::VectorXd th = Eigen::VectorXd::Zero(5);
  th[0] = 1.0;
  CHECK(eval_a(c, th) == doctest::Approx(1.0).epsilon(1e-14));

  Eigen::VectorXd sing = Eigen::VectorXd::Zero(5);
  sing[3] = 1.0;
  CHECK_THROWS_AS(eval_a(c, sing), SingularPoint);

  Eigen::VectorXd notunit = Eigen::VectorXd::Constant(5, 0.5);
  CHECK_THROWS_AS(eval_a(c, notunit), NotUnitVector);
}

TEST_CASE("eval_a pair term hand value") {
  auto c = pair6(1.0);
  Eigen::VectorXd th = Eigen::VectorXd::Zero(6);
  th[0] = 1.0 / std::sqrt(2.0);
  th[4] = 1.0 / std::sqrt(2.0);
  // |th_J1 - th_J2|^2 = (1/sqrt2)^2 + (1/sqrt2)^2 = 1
  CHECK(eval_a(c, th) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("eval_a_lambda regularization") {
  auto c = cyl5(1.0);
  Eigen::VectorXd sing = Eigen::VectorXd::Zero(5);
  sing[3] = 1.0;  // on the singular set
  CHECK(eval_a_lambda(c, sing, 0.5) == doctest::Approx(2.0).epsilon(1e-14));
  Eigen::VectorXd th = Eigen::VectorXd::Zero(5);
  th[0] = 0.5;  // |th_J|^2 = 0.25
  th[3] = std::sqrt(1.0 - 0.25);
  CHECK(eval_a_lambda(c, th, 0.75) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(eval_a_lambda(c, th, 0.0) == doctest::Approx(eval_a(c, th)));
  CHECK_THROWS_AS(eval_a_lambda(c, sing, 0.0), SingularPoint);
  // monotone from below as lambda decreases, positive alpha
  double prev = 0.0;
  for (double lam : {1.0, 0.5, 0.25, 0.125}) {
    const double v = eval_a_lambda(c, th, lam);
    CHECK(v >= prev);
    prev = v;
  }
  CHECK(prev <= eval_a(c, th));
}

TEST_CASE("positive part") {
  AngularCoefficient c(5, 3,
                       {CylTerm{{{1, 2, 3}}, -1.0}, CylTerm{{{2, 3, 4}}, 2.0}},
                       {});
  auto hat = c.positive_part();
  CHECK(hat.cyl_terms().size() == 1);
  CHECK(hat.cyl_terms()[0].alpha == 2.0);
  auto allneg = cyl5(-1.0).positive_part();
  CHECK(allneg.is_zero());
  auto allpos = cyl5(0.5).positive_part();
  CHECK(allpos.cyl_terms()[0].alpha == 0.5);
}

TEST_CASE("eval_V values and homogeneity") {
  auto c = cyl5(1.0);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(5);
  x[0] = 2.0;
  CHECK(eval_V(c, x) == doctest::Approx(0.25).epsilon(1e-14));

  auto cp = pair6(1.0);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(6);
  y[0] = 1.0;
  y[4] = 1.0;
  CHECK(eval_V(cp, y) == doctest::Approx(0.5).epsilon(1e-14));

  // homogeneity of degree -2
  Eigen::MatrixXd pts = quasi_random_points(5, 20);
  for (int i = 0; i < pts.cols(); ++i) {
    Eigen::VectorXd z = (pts.col(i).array() + 0.1).matrix();
    const double v = eval_V(c, z);
    for (double t : {0.5, 2.0}) {
      CHECK(eval_V(c, (t * z).eval()) ==
            doctest::Approx(v / (t * t)).epsilon(1e-12));
    }
  }
}

TEST_CASE("dist_to_singular") {
  auto c = cyl5(1.0);
  Eigen::VectorXd th = Eigen::VectorXd::Zero(5);
  th[0] = 1.0;
  CHECK(dist_to_singular(c, th) == doctest::Approx(1.0));
  Eigen::VectorXd s = Eigen::VectorXd::Zero(5);
  s[4] = 1.0;
  CHECK(dist_to_singular(c, s) == doctest::Approx(0.0));
  Eigen::VectorXd t(5);
  t << 0.6, 0.8, 0.0, 0.0, 0.0;
  CHECK(dist_to_singular(c, t) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("lambda upper bound") {
  CHECK(lambda_upper_bound(cyl5(1.0)) == doctest::Approx(4.0));
  CHECK(lambda_upper_bound(cyl5(-2.0)) == doctest::Approx(0.0));
  AngularCoefficient c(8, 4, {CylTerm{{{1, 2, 3, 4}}, 2.0}},
                       {PairTerm{{{{1, 2, 3, 4}}, {{5, 6, 7, 8}}}, 1.0}});
  CHECK(lambda_upper_bound(c) == doctest::Approx(3.0));
}

TEST_CASE("pair rotation reduces pair term to cylindrical") {
  PairIndex jj{{{1, 2, 3}}, {{4, 5, 6}}};
  auto cp = pair6(0.7);
  AngularCoefficient ccyl(6, 3, {CylTerm{{{1, 2, 3}}, 0.35}}, {});
  Eigen::MatrixXd q = pair_reduction_rotation(6, jj);
  CHECK((q * q.transpose() - Eigen::MatrixXd::Identity(6, 6))
            .cwiseAbs()
            .maxCoeff() < 1e-15);
  Eigen::MatrixXd pts = quasi_random_points(6, 50);
  for (int i = 0; i < pts.cols(); ++i) {
    Eigen::VectorXd th = (pts.col(i).array() - 0.3).matrix().normalized();
    double lhs, rhs;
    try {
      lhs = eval_a(cp, th);
      rhs = eval_a(ccyl, (q * th).eval());
    } catch (const SingularPoint&) {
      continue;
    }
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("invariants of index sets") {
  CHECK_THROWS_AS(AngularCoefficient(5, 3, {CylTerm{{{1, 2}}, 1.0}}, {}),
                  InvalidCoefficient);
  CHECK_THROWS_AS(AngularCoefficient(5, 3, {CylTerm{{{3, 2, 1}}, 1.0}}, {}),
                  InvalidCoefficient);
  // pair terms need 2k <= N
  PairIndex jj{{{1, 2, 3}}, {{3, 4, 5}}};
  CHECK_THROWS_AS(AngularCoefficient(6, 3, {}, {PairTerm{jj, 1.0}}),
                  InvalidCoefficient);  // not disjoint
  PairIndex swapped{{{4, 5, 6}}, {{1, 2, 3}}};
  CHECK_THROWS_AS(AngularCoefficient(6, 3, {}, {PairTerm{swapped, 1.0}}),
                  InvalidCoefficient);  // wrong order
}

TEST_CASE("json round trip") {
  AngularCoefficient c(6, 3, {CylTerm{{{1, 2, 4}}, -0.25}},
                       {PairTerm{{{{1, 2, 3}}, {{4, 5, 6}}}, 0.5}});
  auto back = AngularCoefficient::from_json(c.json());
  CHECK(back.json() == c.json());
  CHECK_THROWS_AS(AngularCoefficient::from_json("{not json"), ConfigInvalid);
  CHECK_THROWS_AS(AngularCoefficient::from_json("{\"N\":5}"), ConfigInvalid);
  CHECK(c.hash() == back.hash());
}

TEST_CASE("condition H sampled check") {
  auto c = cyl5(0.1);
  auto h = radial_power_perturbation(0.1, 0.5);
  CHECK_NOTHROW(check_condition_h(h, c, 1.0, 2000));
  // a perturbation violating (H): too singular
  PerturbationH bad;
  bad.evaluator = [](const Eigen::VectorXd& x) {
    return std::pow(x.norm(), -3.0);
  };
  bad.grad_dot_x = [](const Eigen::VectorXd& x) {
    return -3.0 * std::pow(x.norm(), -3.0);
  };
  bad.bound_c_h = 1.0;
  bad.exponent_eps = 0.5;
  CHECK_THROWS_AS(check_condition_h(bad, c, 1.0, 2000), FailedCondition);
}

TEST_CASE("condition F sampled check") {
  auto f = pure_power_nonlinearity(0.5, 3.0);
  CHECK_NOTHROW(check_condition_f(f, 5, 1.0, 500));
  NonlinearityF bad = pure_power_nonlinearity(0.5, 3.0);
  bad.primitive_F = [](const Eigen::VectorXd&, double s) {
    return 0.3 * s * s;  // wrong primitive
  };
  CHECK_THROWS_AS(check_condition_f(bad, 5, 1.0, 500), FailedCondition);
}
