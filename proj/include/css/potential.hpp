#ifndef CSS_POTENTIAL_HPP
#define CSS_POTENTIAL_HPP

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "css/common.hpp"

namespace css {

// Strictly increasing k-tuple of indices in {1..N} (1-based, as written in
// coefficient files). Ordering between multi-indices is the alphabetic one:
// first differing entry decides.
struct MultiIndex {
  std::vector<int> entries;

  int size() const { return static_cast<int>(entries.size()); }
  bool contains(int i) const;
  void validate(int dim_n) const;
  bool operator==(const MultiIndex& o) const { return entries == o.entries; }
  bool operator<(const MultiIndex& o) const;
  std::string str() const;
};

struct PairIndex {
  MultiIndex first;
  MultiIndex second;

  void validate(int dim_n) const;  // disjoint and first < second
  bool operator==(const PairIndex& o) const {
    return first == o.first && second == o.second;
  }
};

struct CylTerm {
  MultiIndex j;
  double alpha = 0.0;
};

struct PairTerm {
  PairIndex jj;
  double alpha = 0.0;
};

// The angular coefficient a(theta) of a homogeneous inverse-square potential:
// sum of cylindrical terms alpha_J / |theta_J|^2 and two-body terms
// alpha_{J1 J2} / |theta_{J1} - theta_{J2}|^2, with #J = k on the sphere
// S^{N-1}.
class AngularCoefficient {
 public:
  AngularCoefficient(int dim_n, int block_k, std::vector<CylTerm> cyl,
                     std::vector<PairTerm> pairs);

  int dim_n() const { return dim_n_; }
  int block_k() const { return block_k_; }
  const std::vector<CylTerm>& cyl_terms() const { return cyl_; }
  const std::vector<PairTerm>& pair_terms() const { return pairs_; }

  bool is_zero() const;
  bool single_cylindrical() const { return cyl_.size() == 1 && pairs_.empty(); }
  bool single_pair() const { return cyl_.empty() && pairs_.size() == 1; }

  // componentwise positive part (alpha -> max(alpha, 0)); terms that vanish
  // are dropped
  AngularCoefficient positive_part() const;
  // componentwise negative part, returned with positive weights
  AngularCoefficient negative_part() const;

  double sum_positive_alpha() const;

  std::string json() const;
  static AngularCoefficient from_json(const std::string& text);
  std::string hash() const;  // FNV-1a of the canonical JSON

 private:
  int dim_n_;
  int block_k_;
  std::vector<CylTerm> cyl_;
  std::vector<PairTerm> pairs_;
};

// |x_J|^2 for a point (not necessarily unit).
double block_norm_sq(const Eigen::VectorXd& x, const MultiIndex& j);
// |x_{J1} - x_{J2}|^2, components paired in increasing index order.
double pair_diff_sq(const Eigen::VectorXd& x, const PairIndex& jj);

// a(theta); requires |theta| = 1 within 1e-9 and theta away from the singular
// set (cutoff below which SingularPoint is raised).
double eval_a(const AngularCoefficient& coeff, const Eigen::VectorXd& theta,
              double singular_cutoff = 1e-14);

// Regularized coefficient a_lambda: denominators shifted by lambda for
// lambda > 0; plain a for lambda <= 0.
double eval_a_lambda(const AngularCoefficient& coeff,
                     const Eigen::VectorXd& theta, double lambda);

// V(x) = a(x/|x|) / |x|^2 evaluated directly from the defining sums.
double eval_V(const AngularCoefficient& coeff, const Eigen::VectorXd& x);

// Distance from theta to the singular set restricted to active terms:
// min over terms of |theta_J| and |theta_{J1}-theta_{J2}|/sqrt(2).
double dist_to_singular(const AngularCoefficient& coeff,
                        const Eigen::VectorXd& theta);

// A-priori bound (2/(k-2))^2 * sum of positive alphas for Lambda(a).
double lambda_upper_bound(const AngularCoefficient& coeff);

// Orthogonal map Q reducing a single pair term to a cylindrical one:
// z_{J1} = (x_{J1}-x_{J2})/sqrt2, z_{J2} = (x_{J1}+x_{J2})/sqrt2, identity
// elsewhere; eval_a(pair alpha, theta) == eval_a(cyl alpha/2 on J1, Q theta).
Eigen::MatrixXd pair_reduction_rotation(int dim_n, const PairIndex& jj);

// Linear perturbation h subject to condition (H):
// |h| + |grad h . x| <= C_h sum(|x_J|^{-2+eps} + |x_{J1}-x_{J2}|^{-2+eps}).
struct PerturbationH {
  std::function<double(const Eigen::VectorXd&)> evaluator;
  std::function<double(const Eigen::VectorXd&)> grad_dot_x;
  double bound_c_h = 0.0;
  double exponent_eps = 0.5;

  bool is_zero() const { return !evaluator; }
  double operator()(const Eigen::VectorXd& x) const {
    return evaluator ? evaluator(x) : 0.0;
  }
};

// radial power law h(x) = c |x|^{-2+eps}
PerturbationH radial_power_perturbation(double c, double eps);
PerturbationH zero_perturbation();

// Nonlinearity f(x, s) with primitive F and the bound of condition (F).
struct NonlinearityF {
  std::function<double(const Eigen::VectorXd&, double)> f;
  std::function<double(const Eigen::VectorXd&, double)> primitive_F;
  std::function<double(const Eigen::VectorXd&, double)> f_s;
  std::function<double(const Eigen::VectorXd&, double)> gradx_F_dot_x;
  double bound_c_f = 0.0;

  bool is_zero() const { return !f; }
};

NonlinearityF zero_nonlinearity();
// f(x,s) = c |s|^{p-2} s with 2 <= p <= 2*
NonlinearityF pure_power_nonlinearity(double c, double p);

// Sampled verification of condition (H) on a quasi-random cloud in B_radius
// minus an eta-tube around the singular set. Throws FailedCondition on a
// violating sample.
void check_condition_h(const PerturbationH& h, const AngularCoefficient& coeff,
                       double radius = 1.0, int samples = 10000,
                       double eta = 1e-3);

// Sampled verification of condition (F); also checks dF/ds = f by finite
// differences (1e-6 relative) and F(x, 0) = 0.
void check_condition_f(const NonlinearityF& f, int dim_n, double radius = 1.0,
                       int samples = 10000);

}  // namespace css

#endif  // CSS_POTENTIAL_HPP
