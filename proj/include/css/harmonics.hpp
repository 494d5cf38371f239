#ifndef CSS_HARMONICS_HPP
#define CSS_HARMONICS_HPP

#include <Eigen/Dense>
#include <vector>

namespace css {

// Dimension of the space of spherical harmonics of degree l on S^{d-1}.
int harmonic_space_dim(int dim_d, int degree_l);

// Real orthonormal hyperspherical harmonics on S^{d-1}, all degrees <= L,
// built recursively from Gegenbauer ladders. Normalized against the surface
// measure (total mass |S^{d-1}|); on S^0 the two "harmonics" are the
// symmetric and antisymmetric indicators.
class SphereHarmonics {
 public:
  SphereHarmonics(int dim_d, int max_degree);

  int dim() const { return dim_d_; }
  int max_degree() const { return max_degree_; }
  int count() const { return static_cast<int>(degrees_.size()); }
  int degree(int i) const { return degrees_[i]; }
  // first basis index of degree l
  int degree_offset(int l) const { return offsets_[l]; }

  // values of every basis function at theta (|theta| = 1)
  Eigen::VectorXd eval_all(const Eigen::VectorXd& theta) const;

  double eval(int i, const Eigen::VectorXd& theta) const;

 private:
  void eval_recursive(int d, const double* theta, int max_l,
                      std::vector<double>& out) const;

  int dim_d_;
  int max_degree_;
  std::vector<int> degrees_;
  std::vector<int> offsets_;
};

// Values of Gegenbauer polynomials C^nu_0..C^nu_n at x (three-term
// recurrence).
void gegenbauer_values(int n_max, double nu, double x, double* out);

// Values of Jacobi polynomials P^{(a,b)}_0..P^{(a,b)}_n at x in [-1,1].
void jacobi_values(int n_max, double a, double b, double x, double* out);

// L2 norm^2 of P^{(a,b)}_n on [-1,1] against (1-x)^a (1+x)^b.
double jacobi_norm_sq(int n, double a, double b);

}  // namespace css

#endif  // CSS_HARMONICS_HPP
