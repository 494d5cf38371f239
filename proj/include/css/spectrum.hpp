#ifndef CSS_SPECTRUM_HPP
#define CSS_SPECTRUM_HPP

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "css/potential.hpp"
#include "css/sturm.hpp"

namespace css {

struct ClosedFormMu1 {
  double mu1 = 0.0;
  double gamma_prime = 0.0;  // homogeneity exponent of the ground profile
};

// Ground eigenvalue of -Delta_S - alpha/|theta_J|^2 on S^{N-1}:
//   mu_1 = -(k-2)(N-k)/2 - alpha + (N-k) sqrt(((k-2)/2)^2 - alpha).
// Requires alpha < ((k-2)/2)^2.
ClosedFormMu1 mu1_closed_form_cylindrical(int dim_n, int block_k, double alpha);

// Two-body analogue (requires N >= 2k, alpha < (k-2)^2/2): the cylindrical
// value at alpha/2.
ClosedFormMu1 mu1_closed_form_two_body(int dim_n, int block_k, double alpha);

// Characteristic exponents sigma^{+-} = -(N-2)/2 +- sqrt(((N-2)/2)^2 + mu).
struct CharacteristicExponents {
  double plus;
  double minus;
};
CharacteristicExponents gamma_exponent(int dim_n, double mu);

// One L2-normalized eigenfunction of the angular operator together with the
// data the radial machinery needs.
struct AngularMode {
  double mu = 0.0;
  double sigma_plus = 0.0;
  double angular_dirichlet = 0.0;  // int_S |grad_S psi|^2 dS
  // modes sharing a component id couple through the potential form; modes
  // with different ids are orthogonal in both L2 and the a-form
  long component_id = -1;
  int l1 = -1, l2 = -1, overtone = 0;  // separated bookkeeping, -1 if none
  std::function<double(const Eigen::VectorXd&)> eval;
  std::shared_ptr<const SectorEigenpair> sector;  // null for Galerkin modes
};

struct SpectrumCluster {
  double mu = 0.0;
  int multiplicity = 0;
  double sigma_plus = 0.0;
  int first_mode = 0;  // index into modes()
};

// Sorted eigen-decomposition of L_a = -Delta_S - a with evaluable
// eigenfunctions. Immutable once built.
class EigenDecomposition {
 public:
  int dim_n() const { return dim_n_; }
  int count() const { return static_cast<int>(modes_.size()); }
  const AngularMode& mode(int i) const { return modes_[i]; }
  const std::vector<AngularMode>& modes() const { return modes_; }

  // numerical clusters at the given threshold (flagged, not certified)
  std::vector<SpectrumCluster> clusters(double threshold = 1e-6) const;

  // potential-form cross term int_S a psi_i psi_j dS
  double a_cross(int i, int j) const;

  // Gram matrix of the eigenfunctions under the module's sphere quadrature
  Eigen::MatrixXd gram(int degree = 24) const;

  int dim_n_ = 0;
  std::vector<AngularMode> modes_;
  std::function<double(int, int)> a_cross_;
  std::optional<AngularCoefficient> coeff_;
};

// Merged sorted spectrum of a single-term (cylindrical or pair-reduced)
// potential from the separated solver; dispatches to the Galerkin solver for
// genuine multi-term coefficients. Completeness up to the count-th
// eigenvalue is certified through the exact per-sector ground values.
EigenDecomposition assemble_spectrum(const AngularCoefficient& coeff,
                                     int count, int max_sector_degree = 64,
                                     int grid_nodes = 2048);

// Rayleigh-Ritz in the hyperspherical-harmonic basis of degree <= basis_l
// (N <= 6). Eigenvalues are variational upper bounds, nonincreasing in
// basis_l.
EigenDecomposition solve_general_galerkin(const AngularCoefficient& coeff,
                                          int basis_degree_l, int count);

// Best constant Lambda(a) of the Hardy-type bound. Single-term path resolves
// the spectral equivalence mu_1(a/t) = -((N-2)/2)^2 by bisection against the
// separated solver; the multi-term path returns the largest generalized
// Rayleigh value over the Galerkin space.
double lambda_of(const AngularCoefficient& coeff, int galerkin_degree = 10);

// first eigenvalue of L_a, via the cheapest adequate path
double mu1_of(const AngularCoefficient& coeff, int galerkin_degree = 10);

// Geometry of the separated frame used by a decomposition (identity for
// plain cylindrical terms, the pair rotation otherwise).
struct SeparatedFrame {
  int dim_n = 0;
  int block_k = 0;
  Eigen::MatrixXd rotation;       // ambient -> frame
  std::vector<int> block;         // frame indices of the singular block (0-based)
  std::vector<int> complement;    // remaining indices, ascending

  // (phi, omega1, omega2) coordinates of a unit vector
  void split(const Eigen::VectorXd& theta, double& phi, Eigen::VectorXd& w1,
             Eigen::VectorXd& w2) const;

  static SeparatedFrame for_coefficient(const AngularCoefficient& coeff);
};

// Ground-sector sphere moment int_S F(psi(theta)) dS for a separated mode in
// sector (0,0): reduces to a graded 1-D integral over phi.
double ground_sector_moment(const EigenDecomposition& dec, int mode,
                            const std::function<double(double)>& f_of_psi);

}  // namespace css

#endif  // CSS_SPECTRUM_HPP
