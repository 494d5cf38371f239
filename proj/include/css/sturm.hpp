#ifndef CSS_STURM_HPP
#define CSS_STURM_HPP

#include <Eigen/Dense>
#include <vector>

namespace css {

// Lowest `count` eigenvalues of a symmetric tridiagonal matrix by Sturm
// bisection (robust for clustered low spectrum), refined eigenvectors by
// shifted inverse iteration with a 1e-10 Rayleigh-residual tolerance.
struct TridiagEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;  // one column per eigenpair
};

TridiagEigen lowest_eigenpairs_tridiagonal(const Eigen::VectorXd& diag,
                                           const Eigen::VectorXd& sub,
                                           int count,
                                           bool want_vectors = true);

// Separated 1-D reduction of the angular operator on S^{N-1} for a single
// cylindrical-form term: in the block coordinates theta = (sin(phi) w1,
// cos(phi) w2) the operator acts per harmonic sector (l1, l2) as
//   -w^{-1} (w psi')' + [ (l1(l1+k-2) - alpha)/sin^2 + l2(l2+N-k-2)/cos^2 ] psi
// with weight w = sin^{k-1} cos^{N-k-1} on (0, pi/2).
struct SturmLiouvilleReduction {
  int dim_n = 0;
  int block_k = 0;
  double alpha = 0.0;
  int l1 = 0;
  int l2 = 0;
  Eigen::VectorXd grid;  // interior nodes, strictly increasing in (0, pi/2)

  // uniform midpoint grid with `nodes` cells
  static SturmLiouvilleReduction make(int dim_n, int block_k, double alpha,
                                      int l1, int l2, int nodes = 2048);

  double weight(double phi) const;
};

struct SectorEigenpair {
  double mu = 0.0;          // eigenvalue of the angular operator
  double sigma_plus = 0.0;  // characteristic exponent for dim N
  int l1 = 0, l2 = 0;       // sector
  int overtone = 0;         // index within the sector
  int multiplicity = 1;     // harmonic degeneracy dim H_l1(k) * dim H_l2(N-k)
  double gauge_exponent = 0.0;   // s with profile = sin^s cos^{l2} * u
  Eigen::VectorXd grid;          // phi nodes
  Eigen::VectorXd smooth_part;   // u on the grid, normalized profile
  double angular_dirichlet = 0.0;  // int |grad_S psi|^2 over the sphere

  // profile value P(phi) with int_0^{pi/2} P^2 w dphi = 1
  double profile(double phi) const;
  double profile_derivative(double phi) const;
};

// Lowest `count` eigenpairs of the sector problem. The solver gauges out the
// indicial exponents at both endpoints (the transformed ground state is
// smooth), symmetrizes with the square root of the transformed weight and
// discretizes in flux form with natural endpoint closure. Throws
// IndefiniteOperator when mu_1 < -((N-2)/2)^2, NonConvergence on iteration
// failure, SupercriticalAlpha when the sector's indicial exponent is complex.
std::vector<SectorEigenpair> solve_sector_sl(const SturmLiouvilleReduction& red,
                                             int count);

// Exact ground value of the sector: (s + l2)(s + l2 + N - 2) with s the
// indicial exponent at phi = 0; equals the sector's lowest eigenvalue.
double sector_ground_value(int dim_n, int block_k, double alpha, int l1,
                           int l2);

// Non-throwing variant used by sweeps: lowest eigenvalue of the sector even
// when the operator is indefinite or alpha supercritical (falls back to the
// ungauged discretization, where the discrete value diverges to -infinity
// under refinement as it should).
double sector_mu1_estimate(int dim_n, int block_k, double alpha, int nodes = 2048);

}  // namespace css

#endif  // CSS_STURM_HPP
