#ifndef CSS_CONSTANTS_HPP
#define CSS_CONSTANTS_HPP

#include <cmath>

namespace css {

// Surface measure of the unit sphere S^{d-1} in R^d.
double sphere_area(int dim_d);

// Volume of the unit ball in R^d.
double ball_volume(int dim_d);

// Critical Sobolev exponent 2N/(N-2).
double critical_exponent(int dim_n);

// Best constant in  S ||u||_{2*}^2 <= ||grad u||_2^2  on D^{1,2}(R^N)
// (attained by the Aubin-Talenti bubbles).
double sobolev_constant(int dim_n);

// Best constant of the embedding H^1(B_1) in L^{2*}(B_1), i.e. the infimum
// of (||grad u||_2^2 + ||u||_2^2) / ||u||_{2*}^2 over H^1 of the unit ball.
// Estimated by discrete Rayleigh minimization over radial profiles with
// refinement extrapolation; the result is cached per dimension.
double sobolev_ball_constant(int dim_n);

}  // namespace css

#endif  // CSS_CONSTANTS_HPP
