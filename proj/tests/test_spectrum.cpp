#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "css/spectrum.hpp"
#include "css/quadrature.hpp"

using namespace css;

namespace {

AngularCoefficient cyl(int n, int k, double alpha) {
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i + 1;
  return AngularCoefficient(n, k, {CylTerm{{idx}, alpha}}, {});
}

}  // namespace

TEST_CASE("closed form mu1 hand values") {
  // (5,3,3/16): -1 - 3/16 + 2*sqrt(1/4 - 3/16) = -11/16
  auto v = mu1_closed_form_cylindrical(5, 3, 3.0 / 16.0);
  CHECK(v.mu1 == doctest::Approx(-11.0 / 16.0).epsilon(1e-14));
  CHECK(v.gamma_prime == doctest::Approx(-0.25).epsilon(1e-14));
  CHECK(mu1_closed_form_cylindrical(5, 3, 0.0).mu1 == doctest::Approx(0.0));
  CHECK_THROWS_AS(mu1_closed_form_cylindrical(5, 3, 0.25), SupercriticalAlpha);

  CHECK(mu1_closed_form_two_body(6, 3, 0.0).mu1 == doctest::Approx(0.0));
  for (double a : {0.1, 0.3}) {
    CHECK(mu1_closed_form_two_body(6, 3, a).mu1 ==
          doctest::Approx(mu1_closed_form_cylindrical(6, 3, 0.5 * a).mu1)
              .epsilon(1e-14));
  }
  CHECK_THROWS_AS(mu1_closed_form_two_body(5, 3, 0.1), DimensionTooSmall);
}

TEST_CASE("gamma exponents") {
  auto s = gamma_exponent(5, 0.0);
  CHECK(s.plus == doctest::Approx(0.0));
  CHECK(s.minus == doctest::Approx(-3.0));
  CHECK(gamma_exponent(5, -11.0 / 16.0).plus == doctest::Approx(-0.25));
  CHECK(gamma_exponent(5, 4.0).plus == doctest::Approx(1.0));
  CHECK(gamma_exponent(5, 4.0).minus == doctest::Approx(-4.0));
  CHECK_THROWS_AS(gamma_exponent(5, -3.0), BelowSpectralFloor);
}

TEST_CASE("sector solver reproduces closed forms") {
  struct Case {
    int n, k;
    double alpha;
  };
  for (const Case& c : {Case{5, 3, 3.0 / 16.0}, Case{6, 3, 0.2},
                        Case{7, 4, 0.5}, Case{4, 3, -1.0}}) {
    auto red = SturmLiouvilleReduction::make(c.n, c.k, c.alpha, 0, 0, 2048);
    auto eps = solve_sector_sl(red, 1);
    const double expect = mu1_closed_form_cylindrical(c.n, c.k, c.alpha).mu1;
    CHECK(std::abs(eps[0].mu - expect) <=
          1e-6 * std::max(1.0, std::abs(expect)));
  }
}

TEST_CASE("sector solver alpha=0 gives sphere harmonics") {
  auto red = SturmLiouvilleReduction::make(4, 3, 0.0, 0, 0, 512);
  auto eps = solve_sector_sl(red, 2);
  CHECK(eps[0].mu == doctest::Approx(0.0).epsilon(1e-10));
  // constant profile
  const double v0 = eps[0].profile(0.3), v1 = eps[0].profile(1.2);
  CHECK(v0 == doctest::Approx(v1).epsilon(1e-9));
  // second eigenvalue in the (0,0) sector of S^3 with k=3: l=2 radial-type
  // harmonic, mu = 2(2+2) = 8
  CHECK(eps[1].mu == doctest::Approx(8.0).epsilon(1e-5));
}

TEST_CASE("assemble spectrum for the laplacian on S^4") {
  auto dec = assemble_spectrum(cyl(5, 3, 0.0), 7);
  REQUIRE(dec.count() >= 6);
  CHECK(dec.mode(0).mu == doctest::Approx(0.0).epsilon(1e-9));
  auto cl = dec.clusters(1e-6);
  REQUIRE(cl.size() >= 2);
  CHECK(cl[0].multiplicity == 1);
  CHECK(cl[1].mu == doctest::Approx(4.0).epsilon(1e-8));
  CHECK(cl[1].multiplicity == 5);
}

TEST_CASE("assemble spectrum head for cylindrical 3/16") {
  auto dec = assemble_spectrum(cyl(5, 3, 3.0 / 16.0), 1);
  CHECK(dec.mode(0).mu == doctest::Approx(-11.0 / 16.0).epsilon(1e-9));
  CHECK(dec.mode(0).sigma_plus == doctest::Approx(-0.25).epsilon(1e-9));
}

TEST_CASE("pair spectrum equals half-alpha cylindrical spectrum") {
  PairIndex jj{{{1, 2, 3}}, {{4, 5, 6}}};
  AngularCoefficient cp(6, 3, {}, {PairTerm{jj, 0.3}});
  auto dp = assemble_spectrum(cp, 3);
  auto dc = assemble_spectrum(cyl(6, 3, 0.15), 3);
  for (int i = 0; i < 3; ++i)
    CHECK(dp.mode(i).mu == doctest::Approx(dc.mode(i).mu).epsilon(1e-10));
}

TEST_CASE("eigenfunction normalization and orthogonality") {
  auto dec = assemble_spectrum(cyl(5, 3, 3.0 / 16.0), 4);
  Eigen::MatrixXd g = dec.gram(20);
  for (int i = 0; i < g.rows(); ++i) CHECK(std::abs(g(i, i) - 1.0) < 1e-6);
  for (int i = 0; i < g.rows(); ++i)
    for (int j = 0; j < i; ++j) CHECK(std::abs(g(i, j)) < 1e-6);
}

TEST_CASE("ground eigenfunction is one-signed and matches the power law") {
  auto dec = assemble_spectrum(cyl(5, 3, 3.0 / 16.0), 1);
  const auto& m = dec.mode(0);
  // psi_1 = c |theta_J|^{-1/4}; check the ratio is constant over phi
  Eigen::VectorXd th(5);
  double ref = 0.0;
  for (double phi : {0.3, 0.6, 1.0, 1.4}) {
    th.setZero();
    th[0] = std::sin(phi);
    th[3] = std::cos(phi);
    const double val = m.eval(th);
    CHECK(val > 0.0);
    const double ratio = val / std::pow(std::sin(phi), -0.25);
    if (ref == 0.0)
      ref = ratio;
    else
      CHECK(ratio == doctest::Approx(ref).epsilon(1e-6));
  }
}

TEST_CASE("lambda_of closed forms") {
  // Lambda = alpha (2/(k-2))^2 for cylindrical
  CHECK(lambda_of(cyl(5, 3, 3.0 / 16.0)) ==
        doctest::Approx(0.75).epsilon(0.02));
  CHECK(lambda_of(cyl(5, 3, -1.0)) == doctest::Approx(0.0));
  PairIndex jj{{{1, 2, 3}}, {{4, 5, 6}}};
  AngularCoefficient cp(6, 3, {}, {PairTerm{jj, 0.2}});
  CHECK(lambda_of(cp) == doctest::Approx(0.4).epsilon(0.02));
}

TEST_CASE("positivity equivalence on a straddling sweep") {
  for (double frac : {0.3, 0.7, 0.9, 0.99, 1.01, 1.2, 2.0}) {
    const double alpha = frac * 0.25;  // critical at 1/4 for k=3
    auto c = cyl(5, 3, alpha);
    const double floor5 = 0.25 * 9.0;
    const double mu1 = sector_mu1_estimate(5, 3, alpha);
    const bool lam_lt_1 = lambda_of(c) < 1.0;
    const bool mu_above = mu1 > -floor5;
    CHECK(lam_lt_1 == mu_above);
  }
}

TEST_CASE("galerkin agrees with separated path for single term") {
  auto dec_sep = assemble_spectrum(cyl(5, 3, 0.01), 1);
  auto dec_gal = solve_general_galerkin(cyl(5, 3, 0.01), 12, 1);
  CHECK(std::abs(dec_gal.mode(0).mu - dec_sep.mode(0).mu) < 1e-4);
  // variational upper bound, monotone in L
  double prev = 1e9;
  for (int L : {6, 9, 12}) {
    auto d = solve_general_galerkin(cyl(5, 3, 0.05), L, 1);
    CHECK(d.mode(0).mu >= assemble_spectrum(cyl(5, 3, 0.05), 1).mode(0).mu -
                              1e-10);
    CHECK(d.mode(0).mu <= prev + 1e-12);
    prev = d.mode(0).mu;
  }
}

TEST_CASE("galerkin with alpha=0 reproduces the sphere spectrum") {
  auto d = solve_general_galerkin(cyl(5, 3, 0.0), 6, 7);
  CHECK(d.mode(0).mu == doctest::Approx(0.0).epsilon(1e-10));
  for (int i = 1; i <= 5; ++i)
    CHECK(d.mode(i).mu == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(d.mode(6).mu == doctest::Approx(10.0).epsilon(1e-9));
}

TEST_CASE("two overlapping terms push mu1 below the single-term value") {
  AngularCoefficient two(
      5, 3, {CylTerm{{{1, 2, 3}}, 0.05}, CylTerm{{{2, 3, 4}}, 0.05}}, {});
  auto d2a = solve_general_galerkin(two, 6, 1);
  auto d2b = solve_general_galerkin(two, 8, 1);
  auto d1 = solve_general_galerkin(cyl(5, 3, 0.05), 8, 1);
  CHECK(d2b.mode(0).mu <= d2a.mode(0).mu + 1e-12);  // variational in L
  CHECK(d2b.mode(0).mu < d1.mode(0).mu - 1e-4);
}
