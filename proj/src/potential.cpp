#include "css/potential.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "css/quadrature.hpp"

namespace css {

bool MultiIndex::contains(int i) const {
  return std::binary_search(entries.begin(), entries.end(), i);
}

void MultiIndex::validate(int dim_n) const {
  if (entries.empty()) throw InvalidCoefficient("empty multi-index");
  for (size_t i = 0; i < entries.size(); ++i) {
    if (entries[i] < 1 || entries[i] > dim_n)
      throw InvalidCoefficient("multi-index entry out of [1,N] in " + str());
    if (i > 0 && entries[i] <= entries[i - 1])
      throw InvalidCoefficient("multi-index not strictly increasing: " + str());
  }
}

bool MultiIndex::operator<(const MultiIndex& o) const {
  return std::lexicographical_compare(entries.begin(), entries.end(),
                                      o.entries.begin(), o.entries.end());
}

std::string MultiIndex::str() const {
  std::ostringstream os;
  os << "{";
  for (size_t i = 0; i < entries.size(); ++i)
    os << (i ? "," : "") << entries[i];
  os << "}";
  return os.str();
}

void PairIndex::validate(int dim_n) const {
  first.validate(dim_n);
  second.validate(dim_n);
  if (first.size() != second.size())
    throw InvalidCoefficient("pair blocks of unequal size");
  for (int i : first.entries)
    if (second.contains(i))
      throw InvalidCoefficient("pair blocks not disjoint: " + first.str() +
                               ", " + second.str());
  if (!(first < second))
    throw InvalidCoefficient("pair not in alphabetic order: " + first.str() +
                             " !< " + second.str());
}

AngularCoefficient::AngularCoefficient(int dim_n, int block_k,
                                       std::vector<CylTerm> cyl,
                                       std::vector<PairTerm> pairs)
    : dim_n_(dim_n), block_k_(block_k), cyl_(std::move(cyl)),
      pairs_(std::move(pairs)) {
  if (dim_n_ < 3) throw InvalidCoefficient("N < 3");
  if (block_k_ < 3 || block_k_ > dim_n_)
    throw InvalidCoefficient("k outside [3, N]");
  for (const auto& t : cyl_) {
    t.j.validate(dim_n_);
    if (t.j.size() != block_k_)
      throw InvalidCoefficient("cyl block size != k at " + t.j.str());
  }
  if (!pairs_.empty() && 2 * block_k_ > dim_n_)
    throw InvalidCoefficient("pair terms require 2k <= N");
  for (const auto& t : pairs_) {
    t.jj.validate(dim_n_);
    if (t.jj.first.size() != block_k_)
      throw InvalidCoefficient("pair block size != k");
  }
}

bool AngularCoefficient::is_zero() const {
  for (const auto& t : cyl_)
    if (t.alpha != 0.0) return false;
  for (const auto& t : pairs_)
    if (t.alpha != 0.0) return false;
  return true;
}

AngularCoefficient AngularCoefficient::positive_part() const {
  std::vector<CylTerm> cyl;
  std::vector<PairTerm> pairs;
  for (const auto& t : cyl_)
    if (t.alpha > 0.0) cyl.push_back(t);
  for (const auto& t : pairs_)
    if (t.alpha > 0.0) pairs.push_back(t);
  return AngularCoefficient(dim_n_, block_k_, std::move(cyl), std::move(pairs));
}

AngularCoefficient AngularCoefficient::negative_part() const {
  std::vector<CylTerm> cyl;
  std::vector<PairTerm> pairs;
  for (const auto& t : cyl_)
    if (t.alpha < 0.0) cyl.push_back({t.j, -t.alpha});
  for (const auto& t : pairs_)
    if (t.alpha < 0.0) pairs.push_back({t.jj, -t.alpha});
  return AngularCoefficient(dim_n_, block_k_, std::move(cyl), std::move(pairs));
}

double AngularCoefficient::sum_positive_alpha() const {
  double s = 0.0;
  for (const auto& t : cyl_) s += std::max(t.alpha, 0.0);
  for (const auto& t : pairs_) s += std::max(t.alpha, 0.0);
  return s;
}

std::string AngularCoefficient::json() const {
  nlohmann::ordered_json j;
  j["N"] = dim_n_;
  j["k"] = block_k_;
  j["cyl"] = nlohmann::ordered_json::array();
  for (const auto& t : cyl_) {
    nlohmann::ordered_json e;
    e["J"] = t.j.entries;
    e["alpha"] = t.alpha;
    j["cyl"].push_back(e);
  }
  j["pairs"] = nlohmann::ordered_json::array();
  for (const auto& t : pairs_) {
    nlohmann::ordered_json e;
    e["J1"] = t.jj.first.entries;
    e["J2"] = t.jj.second.entries;
    e["alpha"] = t.alpha;
    j["pairs"].push_back(e);
  }
  return j.dump();
}

AngularCoefficient AngularCoefficient::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigInvalid(std::string("potential JSON: ") + e.what());
  }
  if (!j.contains("N") || !j.contains("k"))
    throw ConfigInvalid("potential JSON missing N or k");
  const int n = j.at("N").get<int>();
  const int k = j.at("k").get<int>();
  std::vector<CylTerm> cyl;
  std::vector<PairTerm> pairs;
  try {
    if (j.contains("cyl"))
      for (const auto& e : j.at("cyl")) {
        CylTerm t;
        t.j.entries = e.at("J").get<std::vector<int>>();
        t.alpha = e.at("alpha").get<double>();
        cyl.push_back(std::move(t));
      }
    if (j.contains("pairs"))
      for (const auto& e : j.at("pairs")) {
        PairTerm t;
        t.jj.first.entries = e.at("J1").get<std::vector<int>>();
        t.jj.second.entries = e.at("J2").get<std::vector<int>>();
        t.alpha = e.at("alpha").get<double>();
        pairs.push_back(std::move(t));
      }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigInvalid(std::string("potential JSON terms: ") + e.what());
  }
  return AngularCoefficient(n, k, std::move(cyl), std::move(pairs));
}

std::string AngularCoefficient::hash() const {
  const std::string s = json();
  unsigned long long h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

double block_norm_sq(const Eigen::VectorXd& x, const MultiIndex& j) {
  double s = 0.0;
  for (int i : j.entries) s += x[i - 1] * x[i - 1];
  return s;
}

double pair_diff_sq(const Eigen::VectorXd& x, const PairIndex& jj) {
  double s = 0.0;
  for (int i = 0; i < jj.first.size(); ++i) {
    const double d = x[jj.first.entries[i] - 1] - x[jj.second.entries[i] - 1];
    s += d * d;
  }
  return s;
}

namespace {

void require_unit(const Eigen::VectorXd& theta) {
  const double n = theta.norm();
  if (std::abs(n - 1.0) > 1e-9)
    throw NotUnitVector("|theta| = " + std::to_string(n));
}

double sum_terms(const AngularCoefficient& coeff, const Eigen::VectorXd& x,
                 double shift) {
  double s = 0.0;
  for (const auto& t : coeff.cyl_terms())
    s += t.alpha / (block_norm_sq(x, t.j) + shift);
  for (const auto& t : coeff.pair_terms())
    s += t.alpha / (pair_diff_sq(x, t.jj) + shift);
  return s;
}

}  // namespace

double eval_a(const AngularCoefficient& coeff, const Eigen::VectorXd& theta,
              double singular_cutoff) {
  require_unit(theta);
  if (dist_to_singular(coeff, theta) < singular_cutoff)
    throw SingularPoint("theta within cutoff of the singular set");
  return sum_terms(coeff, theta, 0.0);
}

double eval_a_lambda(const AngularCoefficient& coeff,
                     const Eigen::VectorXd& theta, double lambda) {
  require_unit(theta);
  if (lambda <= 0.0) return eval_a(coeff, theta);
  return sum_terms(coeff, theta, lambda);
}

double eval_V(const AngularCoefficient& coeff, const Eigen::VectorXd& x) {
  const double r2 = x.squaredNorm();
  if (r2 == 0.0) throw SingularPoint("origin");
  for (const auto& t : coeff.cyl_terms())
    if (t.alpha != 0.0 && block_norm_sq(x, t.j) < 1e-28 * r2)
      throw SingularPoint("x on cylinder " + t.j.str());
  for (const auto& t : coeff.pair_terms())
    if (t.alpha != 0.0 && pair_diff_sq(x, t.jj) < 1e-28 * r2)
      throw SingularPoint("x on collision set");
  return sum_terms(coeff, x, 0.0);
}

double dist_to_singular(const AngularCoefficient& coeff,
                        const Eigen::VectorXd& theta) {
  double d = 1.0;
  for (const auto& t : coeff.cyl_terms())
    if (t.alpha != 0.0)
      d = std::min(d, std::sqrt(block_norm_sq(theta, t.j)));
  for (const auto& t : coeff.pair_terms())
    if (t.alpha != 0.0)
      d = std::min(d, std::sqrt(pair_diff_sq(theta, t.jj) / 2.0));
  return d;
}

double lambda_upper_bound(const AngularCoefficient& coeff) {
  const double k = coeff.block_k();
  return 4.0 / ((k - 2.0) * (k - 2.0)) * coeff.sum_positive_alpha();
}

Eigen::MatrixXd pair_reduction_rotation(int dim_n, const PairIndex& jj) {
  Eigen::MatrixXd q = Eigen::MatrixXd::Identity(dim_n, dim_n);
  const double s = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < jj.first.size(); ++i) {
    const int a = jj.first.entries[i] - 1;
    const int b = jj.second.entries[i] - 1;
    q(a, a) = s;
    q(a, b) = -s;
    q(b, a) = s;
    q(b, b) = s;
  }
  return q;
}

PerturbationH radial_power_perturbation(double c, double eps) {
  if (!(eps > 0.0 && eps < 1.0))
    throw FailedCondition("perturbation exponent eps must lie in (0,1)");
  PerturbationH h;
  h.evaluator = [c, eps](const Eigen::VectorXd& x) {
    return c * std::pow(x.norm(), -2.0 + eps);
  };
  h.grad_dot_x = [c, eps](const Eigen::VectorXd& x) {
    return c * (-2.0 + eps) * std::pow(x.norm(), -2.0 + eps);
  };
  h.bound_c_h = std::abs(c) * 3.0;
  h.exponent_eps = eps;
  return h;
}

PerturbationH zero_perturbation() { return PerturbationH{}; }

NonlinearityF zero_nonlinearity() { return NonlinearityF{}; }

NonlinearityF pure_power_nonlinearity(double c, double p) {
  NonlinearityF f;
  f.f = [c, p](const Eigen::VectorXd&, double s) {
    return c * std::pow(std::abs(s), p - 2.0) * s;
  };
  f.primitive_F = [c, p](const Eigen::VectorXd&, double s) {
    return c * std::pow(std::abs(s), p) / p;
  };
  f.f_s = [c, p](const Eigen::VectorXd&, double s) {
    return c * (p - 1.0) * std::pow(std::abs(s), p - 2.0);
  };
  f.gradx_F_dot_x = [](const Eigen::VectorXd&, double) { return 0.0; };
  f.bound_c_f = std::abs(c) * p;
  return f;
}

namespace {

// singular-set weight appearing on the right of condition (H)
double condition_rhs(const AngularCoefficient& coeff, const Eigen::VectorXd& x,
                     double eps) {
  double s = 0.0;
  for (const auto& t : coeff.cyl_terms())
    s += std::pow(block_norm_sq(x, t.j), 0.5 * (-2.0 + eps));
  for (const auto& t : coeff.pair_terms())
    s += std::pow(pair_diff_sq(x, t.jj), 0.5 * (-2.0 + eps));
  // a coefficient with no terms at all still controls nothing; guard
  if (coeff.cyl_terms().empty() && coeff.pair_terms().empty())
    s = std::pow(x.norm(), -2.0 + eps);
  return s;
}

}  // namespace

void check_condition_h(const PerturbationH& h, const AngularCoefficient& coeff,
                       double radius, int samples, double eta) {
  if (h.is_zero()) return;
  if (!(h.exponent_eps > 0.0 && h.exponent_eps < 1.0))
    throw FailedCondition("condition (H): eps outside (0,1)");
  const int n = coeff.dim_n();
  Eigen::MatrixXd pts = quasi_random_points(n, samples);
  int used = 0;
  for (int i = 0; i < samples; ++i) {
    Eigen::VectorXd x = (pts.col(i).array() * 2.0 - 1.0).matrix() * radius;
    const double r = x.norm();
    if (r < 1e-6) continue;
    Eigen::VectorXd theta = x / r;
    if (dist_to_singular(coeff, theta) < eta) continue;
    ++used;
    const double lhs =
        std::abs(h.evaluator(x)) + (h.grad_dot_x ? std::abs(h.grad_dot_x(x)) : 0.0);
    const double rhs = h.bound_c_h * condition_rhs(coeff, x, h.exponent_eps);
    if (lhs > rhs * (1.0 + 1e-9))
      throw FailedCondition("condition (H) violated at sample " +
                            std::to_string(i));
  }
  if (used == 0) throw FailedCondition("condition (H): no usable samples");
}

void check_condition_f(const NonlinearityF& f, int dim_n, double radius,
                       int samples) {
  if (f.is_zero()) return;
  const double p_crit = 2.0 * dim_n / (dim_n - 2.0);
  Eigen::MatrixXd pts = quasi_random_points(dim_n + 1, samples);
  for (int i = 0; i < samples; ++i) {
    Eigen::VectorXd x =
        (pts.col(i).head(dim_n).array() * 2.0 - 1.0).matrix() * radius;
    const double s = (pts(dim_n, i) * 2.0 - 1.0) * 10.0;
    const double fs = f.f(x, s);
    const double fps = f.f_s ? f.f_s(x, s) : 0.0;
    const double gF = f.gradx_F_dot_x ? f.gradx_F_dot_x(x, s) : 0.0;
    const double lhs =
        std::abs(fs * s) + std::abs(fps * s * s) + std::abs(gF);
    const double rhs =
        f.bound_c_f * (s * s + std::pow(std::abs(s), p_crit));
    if (lhs > rhs * (1.0 + 1e-9))
      throw FailedCondition("condition (F) growth violated at sample " +
                            std::to_string(i));
    // F(x,0) = 0 and dF/ds = f (finite differences)
    if (f.primitive_F) {
      if (std::abs(f.primitive_F(x, 0.0)) > 1e-12)
        throw FailedCondition("condition (F): F(x,0) != 0");
      const double ds = 1e-5 * std::max(1.0, std::abs(s));
      const double fd =
          (f.primitive_F(x, s + ds) - f.primitive_F(x, s - ds)) / (2.0 * ds);
      const double scale = std::max({1.0, std::abs(fs), std::abs(fd)});
      if (std::abs(fd - fs) > 1e-6 * scale)
        throw FailedCondition("condition (F): dF/ds != f at sample " +
                              std::to_string(i));
    }
  }
}

}  // namespace css
