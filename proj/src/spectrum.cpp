#include "css/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>

#include "css/constants.hpp"
#include "css/harmonics.hpp"
#include "css/quadrature.hpp"

namespace css {

ClosedFormMu1 mu1_closed_form_cylindrical(int n, int k, double alpha) {
  const double c = 0.5 * (k - 2.0);
  if (alpha >= c * c)
    throw SupercriticalAlpha("alpha >= ((k-2)/2)^2");
  ClosedFormMu1 out;
  out.gamma_prime = -c + std::sqrt(c * c - alpha);
  out.mu1 = -0.5 * (k - 2.0) * (n - k) - alpha +
            (n - k) * std::sqrt(c * c - alpha);
  const double check = out.gamma_prime * (out.gamma_prime + n - 2.0);
  if (std::abs(check - out.mu1) > 1e-12 * std::max(1.0, std::abs(out.mu1)))
    throw ComputationFailed("closed-form mu1 self-check failed");
  return out;
}

ClosedFormMu1 mu1_closed_form_two_body(int n, int k, double alpha) {
  if (n < 2 * k) throw DimensionTooSmall("two-body closed form needs N >= 2k");
  const double c = 0.5 * (k - 2.0);
  if (alpha >= 2.0 * c * c)
    throw SupercriticalAlpha("alpha >= (k-2)^2/2");
  return mu1_closed_form_cylindrical(n, k, 0.5 * alpha);
}

CharacteristicExponents gamma_exponent(int n, double mu) {
  const double floor_n = 0.25 * (n - 2.0) * (n - 2.0);
  if (mu < -floor_n) throw BelowSpectralFloor("mu below -((N-2)/2)^2");
  const double root = std::sqrt(floor_n + mu);
  CharacteristicExponents s{-0.5 * (n - 2.0) + root, -0.5 * (n - 2.0) - root};
  const double check = s.plus * (s.plus + n - 2.0);
  if (std::abs(check - mu) > 1e-12 * std::max(1.0, std::abs(mu)))
    throw ComputationFailed("sigma(sigma+N-2) self-check failed");
  return s;
}

void SeparatedFrame::split(const Eigen::VectorXd& theta, double& phi,
                           Eigen::VectorXd& w1, Eigen::VectorXd& w2) const {
  Eigen::VectorXd xi = rotation.size() ? (rotation * theta).eval() : theta;
  const int k = static_cast<int>(block.size());
  const int m = static_cast<int>(complement.size());
  w1.resize(k);
  w2.resize(std::max(m, 0));
  double t2 = 0.0, c2 = 0.0;
  for (int i = 0; i < k; ++i) {
    w1[i] = xi[block[i]];
    t2 += w1[i] * w1[i];
  }
  for (int i = 0; i < m; ++i) {
    w2[i] = xi[complement[i]];
    c2 += w2[i] * w2[i];
  }
  const double t = std::sqrt(t2), c = std::sqrt(c2);
  phi = std::atan2(t, c);
  if (t > 1e-300)
    w1 /= t;
  else {
    w1.setZero();
    w1[0] = 1.0;
  }
  if (m > 0) {
    if (c > 1e-300)
      w2 /= c;
    else {
      w2.setZero();
      w2[0] = 1.0;
    }
  }
}

SeparatedFrame SeparatedFrame::for_coefficient(const AngularCoefficient& coeff) {
  SeparatedFrame f;
  f.dim_n = coeff.dim_n();
  f.block_k = coeff.block_k();
  std::vector<int> blk;
  if (coeff.single_pair()) {
    const PairIndex& jj = coeff.pair_terms()[0].jj;
    f.rotation = pair_reduction_rotation(f.dim_n, jj);
    for (int e : jj.first.entries) blk.push_back(e - 1);
  } else if (!coeff.cyl_terms().empty()) {
    for (int e : coeff.cyl_terms()[0].j.entries) blk.push_back(e - 1);
  } else {
    for (int i = 0; i < f.block_k; ++i) blk.push_back(i);
  }
  f.block = blk;
  std::vector<char> used(f.dim_n, 0);
  for (int i : blk) used[i] = 1;
  for (int i = 0; i < f.dim_n; ++i)
    if (!used[i]) f.complement.push_back(i);
  return f;
}

namespace {

// effective single-term data: alpha in the separated frame
double frame_alpha(const AngularCoefficient& coeff) {
  if (coeff.single_pair()) return 0.5 * coeff.pair_terms()[0].alpha;
  if (coeff.single_cylindrical()) return coeff.cyl_terms()[0].alpha;
  if (coeff.cyl_terms().empty() && coeff.pair_terms().empty()) return 0.0;
  throw ComputationFailed("frame_alpha: not a single-term coefficient");
}

bool separable(const AngularCoefficient& coeff) {
  return coeff.single_cylindrical() || coeff.single_pair() ||
         (coeff.cyl_terms().empty() && coeff.pair_terms().empty());
}

Rule1D graded_phi_rule(int levels = 40, int order = 8) {
  // geometric subdivision toward both endpoints of (0, pi/2)
  std::vector<double> nodes, weights;
  const double mid = 0.25 * M_PI;
  Rule1D base = gauss_legendre(order);
  auto add_cell = [&](double a, double b) {
    for (int i = 0; i < base.nodes.size(); ++i) {
      nodes.push_back(a + (b - a) * 0.5 * (base.nodes[i] + 1.0));
      weights.push_back(0.5 * (b - a) * base.weights[i]);
    }
  };
  double hi = mid;
  for (int l = 0; l < levels; ++l) {
    const double lo = hi * 0.5;
    add_cell(lo, hi);
    hi = lo;
  }
  add_cell(0.0, hi);  // innermost sliver (integrand must be integrable)
  double lo2 = mid;
  for (int l = 0; l < levels; ++l) {
    const double hi2 = 0.5 * (lo2 + 0.5 * M_PI);
    add_cell(lo2, hi2);
    lo2 = hi2;
  }
  add_cell(lo2, 0.5 * M_PI);
  Rule1D rule;
  rule.nodes = Eigen::Map<Eigen::VectorXd>(nodes.data(), nodes.size());
  rule.weights = Eigen::Map<Eigen::VectorXd>(weights.data(), weights.size());
  return rule;
}

struct SectorKey {
  int l1, l2;
  bool operator<(const SectorKey& o) const {
    return l1 != o.l1 ? l1 < o.l1 : l2 < o.l2;
  }
};

}  // namespace

std::vector<SpectrumCluster> EigenDecomposition::clusters(
    double threshold) const {
  std::vector<SpectrumCluster> out;
  for (int i = 0; i < count();) {
    SpectrumCluster c;
    c.mu = modes_[i].mu;
    c.sigma_plus = modes_[i].sigma_plus;
    c.first_mode = i;
    int j = i;
    while (j < count() && std::abs(modes_[j].mu - c.mu) <=
                              threshold * std::max(1.0, std::abs(c.mu)))
      ++j;
    c.multiplicity = j - i;
    out.push_back(c);
    i = j;
  }
  return out;
}

double EigenDecomposition::a_cross(int i, int j) const {
  if (a_cross_) return a_cross_(i, j);
  throw ComputationFailed("a_cross not available for this decomposition");
}

Eigen::MatrixXd EigenDecomposition::gram(int degree) const {
  bool separated = true;
  for (const auto& m : modes_)
    if (!m.sector) separated = false;
  if (separated && coeff_) {
    // exact component orthogonality; same-component overlaps are smooth 1-D
    // integrals of the gauged profiles
    const int n = dim_n_, k = coeff_->block_k();
    Eigen::MatrixXd g = Eigen::MatrixXd::Identity(count(), count());
    for (int i = 0; i < count(); ++i)
      for (int j = 0; j < i; ++j) {
        if (modes_[i].component_id != modes_[j].component_id) continue;
        const auto& si = *modes_[i].sector;
        const auto& sj = *modes_[j].sector;
        Rule1D rule = trig_weighted_rule(
            256, k - 1.0 + si.gauge_exponent + sj.gauge_exponent,
            n - k - 1.0 + 2.0 * modes_[i].l2);
        CubicInterpolant ui(si.grid, si.smooth_part);
        CubicInterpolant uj(sj.grid, sj.smooth_part);
        double v = 0.0;
        for (int q = 0; q < rule.nodes.size(); ++q)
          v += rule.weights[q] * ui(rule.nodes[q]) * uj(rule.nodes[q]);
        g(i, j) = v;
        g(j, i) = v;
      }
    // diagonal from the same quadrature
    for (int i = 0; i < count(); ++i) {
      const auto& si = *modes_[i].sector;
      Rule1D rule =
          trig_weighted_rule(256, k - 1.0 + 2.0 * si.gauge_exponent,
                             n - k - 1.0 + 2.0 * modes_[i].l2);
      CubicInterpolant ui(si.grid, si.smooth_part);
      double v = 0.0;
      for (int q = 0; q < rule.nodes.size(); ++q) {
        const double u = ui(rule.nodes[q]);
        v += rule.weights[q] * u * u;
      }
      g(i, i) = v;
    }
    return g;
  }
  SphereRule rule = sphere_rule(dim_n_, degree);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(count(), count());
  Eigen::VectorXd vals(count());
  for (int q = 0; q < rule.size(); ++q) {
    for (int i = 0; i < count(); ++i) vals[i] = modes_[i].eval(rule.nodes.col(q));
    g.selfadjointView<Eigen::Lower>().rankUpdate(vals, rule.weights[q]);
  }
  return Eigen::MatrixXd(g.selfadjointView<Eigen::Lower>());
}

EigenDecomposition assemble_spectrum(const AngularCoefficient& coeff,
                                     int count, int max_sector_degree,
                                     int grid_nodes) {
  if (count < 1) throw ComputationFailed("assemble_spectrum: count < 1");
  const int n = coeff.dim_n(), k = coeff.block_k();
  if (!separable(coeff))
    return solve_general_galerkin(coeff, 10, count);

  // k = N: the coefficient is constant on the sphere
  if (k == n) {
    double a_const = 0.0;
    for (const auto& t : coeff.cyl_terms()) a_const += t.alpha;
    EigenDecomposition dec;
    dec.dim_n_ = n;
    dec.coeff_ = coeff;
    auto harm = std::make_shared<SphereHarmonics>(n, max_sector_degree);
    int l = 0;
    while (static_cast<int>(dec.modes_.size()) < count) {
      const int m = harmonic_space_dim(n, l);
      for (int a = 0; a < m; ++a) {
        AngularMode mode;
        mode.mu = l * (l + n - 2.0) - a_const;
        mode.sigma_plus = gamma_exponent(n, mode.mu).plus;
        mode.angular_dirichlet = l * (l + n - 2.0);
        mode.component_id = harm->degree_offset(l) + a;
        const int idx = harm->degree_offset(l) + a;
        mode.eval = [harm, idx](const Eigen::VectorXd& th) {
          return harm->eval(idx, th);
        };
        dec.modes_.push_back(std::move(mode));
      }
      ++l;
      if (l > max_sector_degree)
        throw TruncationInsufficient("constant-coefficient sweep exhausted");
    }
    dec.a_cross_ = [a_const](int i, int j) { return i == j ? a_const : 0.0; };
    return dec;
  }

  const double alpha = frame_alpha(coeff);
  const double crit = 0.25 * (k - 2.0) * (k - 2.0);
  if (alpha >= crit)
    throw SupercriticalAlpha("assemble_spectrum: alpha at or beyond critical");
  SeparatedFrame frame = SeparatedFrame::for_coefficient(coeff);

  struct Entry {
    double mu;
    SectorKey key;
    int overtone;
    int mult;
  };
  std::map<SectorKey, std::vector<SectorEigenpair>> solved;
  std::vector<Entry> entries;

  auto sector_dims = [&](const SectorKey& s) {
    return harmonic_space_dim(k, s.l1) * harmonic_space_dim(n - k, s.l2);
  };
  // sectors ordered by exact ground value
  using QItem = std::pair<double, SectorKey>;
  std::priority_queue<QItem, std::vector<QItem>, std::greater<QItem>> pq;
  for (int l1 = 0; l1 <= max_sector_degree; ++l1) {
    if (harmonic_space_dim(k, l1) == 0) continue;
    for (int l2 = 0; l2 <= max_sector_degree; ++l2) {
      if (harmonic_space_dim(n - k, l2) == 0) continue;
      pq.push({sector_ground_value(n, k, alpha, l1, l2), SectorKey{l1, l2}});
    }
  }

  auto merged_kth = [&]() {
    // value of the count-th smallest entry with multiplicity, +inf if fewer
    std::vector<Entry> tmp = entries;
    std::sort(tmp.begin(), tmp.end(),
              [](const Entry& a, const Entry& b) { return a.mu < b.mu; });
    int c = 0;
    for (const auto& e : tmp) {
      c += e.mult;
      if (c >= count) return e.mu;
    }
    return std::numeric_limits<double>::infinity();
  };

  while (!pq.empty()) {
    const auto [mu0, key] = pq.top();
    if (mu0 > merged_kth()) break;
    pq.pop();
    SturmLiouvilleReduction red = SturmLiouvilleReduction::make(
        n, k, alpha, key.l1, key.l2, grid_nodes);
    const int overtones = count;  // lowest `count` within the sector suffice
    std::vector<SectorEigenpair> eps = solve_sector_sl(red, overtones);
    for (int j = 0; j < static_cast<int>(eps.size()); ++j)
      entries.push_back({eps[j].mu, key, j, sector_dims(key)});
    solved[key] = std::move(eps);
  }
  if (merged_kth() == std::numeric_limits<double>::infinity())
    throw TruncationInsufficient("sector sweep exhausted before count");

  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.mu != b.mu) return a.mu < b.mu;
    if (a.key.l1 != b.key.l1) return a.key.l1 < b.key.l1;
    if (a.key.l2 != b.key.l2) return a.key.l2 < b.key.l2;
    return a.overtone < b.overtone;
  });

  int max_l1 = 1, max_l2 = 1;
  {
    int c = 0;
    const double kth = merged_kth();
    for (const auto& e : entries) {
      if (c >= count && e.mu > kth + 1e-12 * std::max(1.0, std::abs(kth)))
        break;
      c += e.mult;
      max_l1 = std::max(max_l1, e.key.l1);
      max_l2 = std::max(max_l2, e.key.l2);
    }
  }
  auto h1 = std::make_shared<SphereHarmonics>(k, max_l1);
  auto h2 = std::make_shared<SphereHarmonics>(n - k, max_l2);
  auto frame_ptr = std::make_shared<SeparatedFrame>(frame);

  EigenDecomposition dec;
  dec.dim_n_ = n;
  dec.coeff_ = coeff;
  const double kth = merged_kth();
  int accumulated = 0;
  std::vector<std::shared_ptr<const SectorEigenpair>> sector_of_mode;
  std::vector<std::shared_ptr<CubicInterpolant>> interp_of_mode;
  for (const auto& e : entries) {
    if (accumulated >= count &&
        e.mu > kth + 1e-12 * std::max(1.0, std::abs(kth)))
      break;
    auto ep = std::make_shared<SectorEigenpair>(solved[e.key][e.overtone]);
    auto ui = std::make_shared<CubicInterpolant>(ep->grid, ep->smooth_part);
    const int d1 = harmonic_space_dim(k, e.key.l1);
    const int d2 = harmonic_space_dim(n - k, e.key.l2);
    for (int a = 0; a < d1; ++a)
      for (int b = 0; b < d2; ++b) {
        AngularMode mode;
        mode.mu = e.mu;
        mode.sigma_plus = ep->sigma_plus;
        mode.angular_dirichlet = ep->angular_dirichlet;
        mode.l1 = e.key.l1;
        mode.l2 = e.key.l2;
        mode.overtone = e.overtone;
        const int ia = h1->degree_offset(e.key.l1) + a;
        const int ib = h2->degree_offset(e.key.l2) + b;
        mode.component_id =
            ((static_cast<long>(e.key.l1) * 1024 + e.key.l2) * 4096 + ia) *
                4096 +
            ib;
        const double s_exp = ep->gauge_exponent;
        const int l2i = e.key.l2;
        mode.eval = [frame_ptr, h1, h2, ui, ia, ib, s_exp,
                     l2i](const Eigen::VectorXd& th) {
          double phi;
          Eigen::VectorXd w1, w2;
          frame_ptr->split(th, phi, w1, w2);
          const double p = std::pow(std::sin(phi), s_exp) *
                           std::pow(std::cos(phi), static_cast<double>(l2i)) *
                           (*ui)(phi);
          double y2 = 1.0;
          if (w2.size() > 0) y2 = h2->eval(ib, w2);
          return p * h1->eval(ia, w1) * y2;
        };
        mode.sector = ep;
        dec.modes_.push_back(std::move(mode));
        sector_of_mode.push_back(ep);
        interp_of_mode.push_back(ui);
      }
    accumulated += e.mult;
  }
  // potential-form cross terms: same component couples through
  // alpha/sin^2(phi), different components are orthogonal
  const double aeff = alpha;
  auto modes_copy = std::make_shared<std::vector<AngularMode>>(dec.modes_);
  auto sectors = std::make_shared<
      std::vector<std::shared_ptr<const SectorEigenpair>>>(sector_of_mode);
  dec.a_cross_ = [modes_copy, sectors, aeff, n, k](int i, int j) {
    const auto& mi = (*modes_copy)[i];
    const auto& mj = (*modes_copy)[j];
    if (mi.component_id != mj.component_id) return 0.0;
    const auto& si = *(*sectors)[i];
    const auto& sj = *(*sectors)[j];
    static thread_local std::map<std::pair<double, double>, Rule1D> cache;
    const double s2 = si.gauge_exponent + sj.gauge_exponent;
    const double a_exp = k - 3.0 + s2;
    const double b_exp = n - k - 1.0 + 2.0 * mi.l2;
    auto kk = std::make_pair(a_exp, b_exp);
    auto it = cache.find(kk);
    if (it == cache.end())
      it = cache.emplace(kk, trig_weighted_rule(200, a_exp, b_exp)).first;
    const Rule1D& rule = it->second;
    CubicInterpolant ui(si.grid, si.smooth_part);
    CubicInterpolant uj(sj.grid, sj.smooth_part);
    double v = 0.0;
    for (int q = 0; q < rule.nodes.size(); ++q)
      v += rule.weights[q] * ui(rule.nodes[q]) * uj(rule.nodes[q]);
    return aeff * v;
  };
  return dec;
}

// ---------------------------------------------------------------------------
// Galerkin path
// ---------------------------------------------------------------------------

namespace {

struct GalerkinBasis {
  SeparatedFrame frame;
  int max_degree = 0;
  std::shared_ptr<SphereHarmonics> h1, h2;
  struct Fn {
    int l;        // total degree
    int l1, l2, n;
    int ia, ib;   // absolute factor-harmonic indices
    double jac_a, jac_b;
    double inv_norm;
  };
  std::vector<Fn> fns;

  int size() const { return static_cast<int>(fns.size()); }

  void eval_all(const Eigen::VectorXd& theta, Eigen::VectorXd& out) const {
    const int nn = frame.dim_n, kk = frame.block_k;
    double phi;
    Eigen::VectorXd w1, w2;
    frame.split(theta, phi, w1, w2);
    Eigen::VectorXd y1 = h1->eval_all(w1);
    Eigen::VectorXd y2 =
        (nn - kk >= 1) ? h2->eval_all(w2) : Eigen::VectorXd::Ones(1);
    const double x = std::cos(2.0 * phi);
    const double sn = std::sin(phi), cs = std::cos(phi);
    out.resize(size());
    std::vector<double> jac(max_degree / 2 + 2);
    int i = 0;
    int cur_l1 = -1, cur_l2 = -1;
    double spow = 1.0, cpow = 1.0;
    while (i < size()) {
      const Fn& f0 = fns[i];
      if (f0.l1 != cur_l1 || f0.l2 != cur_l2) {
        cur_l1 = f0.l1;
        cur_l2 = f0.l2;
        spow = std::pow(sn, cur_l1);
        cpow = std::pow(cs, cur_l2);
        jacobi_values((max_degree - cur_l1 - cur_l2) / 2, f0.jac_a, f0.jac_b,
                      x, jac.data());
      }
      const Fn& f = fns[i];
      out[i] = f.inv_norm * spow * cpow * jac[f.n] * y1[f.ia] *
               (f.ib >= 0 ? y2[f.ib] : 1.0);
      ++i;
    }
  }
};

GalerkinBasis make_galerkin_basis(const AngularCoefficient& coeff, int L) {
  GalerkinBasis basis;
  basis.frame = SeparatedFrame::for_coefficient(coeff);
  basis.max_degree = L;
  const int n = coeff.dim_n(), k = coeff.block_k();
  basis.h1 = std::make_shared<SphereHarmonics>(k, L);
  basis.h2 = std::make_shared<SphereHarmonics>(std::max(n - k, 1), L);
  for (int l = 0; l <= L; ++l)
    for (int l1 = 0; l1 <= l; ++l1) {
      if (harmonic_space_dim(k, l1) == 0) continue;
      for (int l2 = 0; l2 + l1 <= l; ++l2) {
        if ((l - l1 - l2) % 2 != 0) continue;
        if (harmonic_space_dim(std::max(n - k, 1), l2) == 0) continue;
        const int nn = (l - l1 - l2) / 2;
        const double ja = l1 + 0.5 * (k - 2.0);
        const double jb = l2 + 0.5 * (n - k - 2.0);
        const double norm2 =
            std::pow(2.0, -ja - jb - 2.0) * jacobi_norm_sq(nn, ja, jb);
        const int d1 = harmonic_space_dim(k, l1);
        const int d2 = harmonic_space_dim(std::max(n - k, 1), l2);
        for (int a = 0; a < d1; ++a)
          for (int b = 0; b < d2; ++b) {
            GalerkinBasis::Fn f;
            f.l = l;
            f.l1 = l1;
            f.l2 = l2;
            f.n = nn;
            f.ia = basis.h1->degree_offset(l1) + a;
            f.ib = (n - k >= 1) ? basis.h2->degree_offset(l2) + b : -1;
            f.jac_a = ja;
            f.jac_b = jb;
            f.inv_norm = 1.0 / std::sqrt(norm2);
            basis.fns.push_back(f);
          }
      }
    }
  // order by (l, l1, l2, ia, ib) for determinism
  std::stable_sort(basis.fns.begin(), basis.fns.end(),
                   [](const auto& a, const auto& b) {
                     if (a.l != b.l) return a.l < b.l;
                     if (a.l1 != b.l1) return a.l1 < b.l1;
                     if (a.l2 != b.l2) return a.l2 < b.l2;
                     if (a.ia != b.ia) return a.ia < b.ia;
                     return a.ib < b.ib;
                   });
  return basis;
}

// exact in-frame potential blocks: alpha_eff / sin^2(phi)
void add_frame_term(const GalerkinBasis& basis, double alpha_eff,
                    Eigen::MatrixXd& a_mat) {
  const int n = basis.frame.dim_n, k = basis.frame.block_k;
  // group indices by (l1, l2, ia, ib); within a group the phi-overlap matrix
  // couples the Jacobi overtones
  std::map<std::tuple<int, int, int, int>, std::vector<int>> groups;
  for (int i = 0; i < basis.size(); ++i) {
    const auto& f = basis.fns[i];
    groups[{f.l1, f.l2, f.ia, f.ib}].push_back(i);
  }
  for (const auto& [key, idx] : groups) {
    const auto& f0 = basis.fns[idx[0]];
    const int m = static_cast<int>(idx.size());
    const double a_exp = 2.0 * f0.l1 + k - 3.0;
    const double b_exp = 2.0 * f0.l2 + n - k - 1.0;
    Rule1D rule = trig_weighted_rule(basis.max_degree + 2, a_exp, b_exp);
    // values of normalized Jacobi factors at the rule nodes
    Eigen::MatrixXd vals(m, rule.nodes.size());
    std::vector<double> jac(basis.max_degree / 2 + 2);
    for (int q = 0; q < rule.nodes.size(); ++q) {
      const double x = std::cos(2.0 * rule.nodes[q]);
      jacobi_values((basis.max_degree - f0.l1 - f0.l2) / 2, f0.jac_a, f0.jac_b,
                    x, jac.data());
      for (int r = 0; r < m; ++r)
        vals(r, q) = basis.fns[idx[r]].inv_norm * jac[basis.fns[idx[r]].n];
    }
    for (int r = 0; r < m; ++r)
      for (int s = r; s < m; ++s) {
        double v = 0.0;
        for (int q = 0; q < rule.nodes.size(); ++q)
          v += rule.weights[q] * vals(r, q) * vals(s, q);
        a_mat(idx[r], idx[s]) += alpha_eff * v;
        if (s != r) a_mat(idx[s], idx[r]) += alpha_eff * v;
      }
  }
}

// quadrature assembly of a non-frame term via nodes in the term's own
// separated geometry
void add_rotated_term(const GalerkinBasis& basis, const Eigen::MatrixXd& rot,
                      const std::vector<int>& blk, double alpha_eff,
                      Eigen::MatrixXd& a_mat) {
  const int n = basis.frame.dim_n, k = basis.frame.block_k;
  const int L = basis.max_degree;
  Rule1D phi_rule = trig_weighted_rule(L + 2, k - 3.0, n - k - 1.0);
  SphereRule s1 = sphere_rule(k, 2 * L);
  SphereRule s2 = sphere_rule(n - k, 2 * L);
  std::vector<int> comp;
  {
    std::vector<char> used(n, 0);
    for (int i : blk) used[i] = 1;
    for (int i = 0; i < n; ++i)
      if (!used[i]) comp.push_back(i);
  }
  const int chunk = 256;
  Eigen::MatrixXd bvals(basis.size(), chunk);
  Eigen::VectorXd wts(chunk);
  Eigen::VectorXd theta(n), bv;
  int fill = 0;
  auto flush = [&]() {
    if (fill == 0) return;
    a_mat.selfadjointView<Eigen::Lower>().rankUpdate(
        bvals.leftCols(fill) * wts.head(fill).cwiseSqrt().asDiagonal(), 1.0);
    fill = 0;
  };
  for (int qp = 0; qp < phi_rule.nodes.size(); ++qp) {
    const double phi = phi_rule.nodes[qp];
    const double sn = std::sin(phi), cs = std::cos(phi);
    for (int q1 = 0; q1 < s1.size(); ++q1)
      for (int q2 = 0; q2 < s2.size(); ++q2) {
        theta.setZero();
        for (int i = 0; i < k; ++i) theta[blk[i]] = sn * s1.nodes(i, q1);
        for (int i = 0; i < n - k; ++i)
          theta[comp[i]] = cs * s2.nodes(i, q2);
        Eigen::VectorXd th = rot.size() ? (rot.transpose() * theta).eval()
                                        : theta;
        basis.eval_all(th, bv);
        bvals.col(fill) = bv;
        wts[fill] =
            alpha_eff * phi_rule.weights[qp] * s1.weights[q1] * s2.weights[q2];
        if (++fill == chunk) flush();
      }
  }
  flush();
  a_mat = a_mat.selfadjointView<Eigen::Lower>();
}

Eigen::MatrixXd assemble_potential_matrix(const AngularCoefficient& coeff,
                                          const GalerkinBasis& basis) {
  const int n = coeff.dim_n();
  Eigen::MatrixXd a_mat = Eigen::MatrixXd::Zero(basis.size(), basis.size());
  bool frame_used = false;
  for (const auto& t : coeff.cyl_terms()) {
    std::vector<int> blk;
    for (int e : t.j.entries) blk.push_back(e - 1);
    if (!frame_used && basis.frame.rotation.size() == 0 &&
        blk == basis.frame.block) {
      add_frame_term(basis, t.alpha, a_mat);
      frame_used = true;
    } else {
      add_rotated_term(basis, Eigen::MatrixXd(), blk, t.alpha, a_mat);
    }
  }
  for (const auto& t : coeff.pair_terms()) {
    Eigen::MatrixXd rot = pair_reduction_rotation(n, t.jj);
    std::vector<int> blk;
    for (int e : t.jj.first.entries) blk.push_back(e - 1);
    if (!frame_used && basis.frame.rotation.size() &&
        (rot - basis.frame.rotation).norm() < 1e-14) {
      add_frame_term(basis, 0.5 * t.alpha, a_mat);
      frame_used = true;
    } else {
      add_rotated_term(basis, rot, blk, 0.5 * t.alpha, a_mat);
    }
  }
  return a_mat;
}

}  // namespace

namespace {

// true when every term lives in the basis frame (the Ritz matrix is then
// block-diagonal over (l1, l2, harmonic) components)
bool single_frame(const AngularCoefficient& coeff, const GalerkinBasis& basis) {
  int terms = 0;
  bool ok = true;
  for (const auto& t : coeff.cyl_terms()) {
    ++terms;
    std::vector<int> blk;
    for (int e : t.j.entries) blk.push_back(e - 1);
    if (basis.frame.rotation.size() != 0 || blk != basis.frame.block) ok = false;
  }
  for (const auto& t : coeff.pair_terms()) {
    ++terms;
    if (basis.frame.rotation.size() == 0) {
      ok = false;
      continue;
    }
    Eigen::MatrixXd rot = pair_reduction_rotation(coeff.dim_n(), t.jj);
    if ((rot - basis.frame.rotation).norm() > 1e-14) ok = false;
  }
  return ok || terms == 0;
}

}  // namespace

EigenDecomposition solve_general_galerkin(const AngularCoefficient& coeff,
                                          int basis_degree_l, int count) {
  const int n = coeff.dim_n();
  if (n > 6)
    throw DimensionTooSmall("general Galerkin limited to N <= 6");
  GalerkinBasis basis0 = make_galerkin_basis(coeff, basis_degree_l);
  const double floor_n = 0.25 * (n - 2.0) * (n - 2.0);

  EigenDecomposition dec;
  dec.dim_n_ = n;
  dec.coeff_ = coeff;

  if (single_frame(coeff, basis0)) {
    // block-diagonal path: each (l1, l2, harmonic pair) component couples
    // only through the Jacobi overtone ladder
    double alpha_eff = 0.0;
    for (const auto& t : coeff.cyl_terms()) alpha_eff += t.alpha;
    for (const auto& t : coeff.pair_terms()) alpha_eff += 0.5 * t.alpha;
    auto basis_ptr = std::make_shared<GalerkinBasis>(std::move(basis0));
    const int k = coeff.block_k();
    std::map<std::tuple<int, int, int, int>, std::vector<int>> groups;
    for (int i = 0; i < basis_ptr->size(); ++i) {
      const auto& f = basis_ptr->fns[i];
      groups[{f.l1, f.l2, f.ia, f.ib}].push_back(i);
    }
    struct Ritz {
      double mu;
      std::vector<int> idx;
      Eigen::VectorXd coeffs;
      std::shared_ptr<Eigen::MatrixXd> pot;
      int which;
      long comp;
    };
    std::vector<Ritz> ritz;
    long comp_counter = 0;
    for (const auto& [key, idx] : groups) {
      const auto& f0 = basis_ptr->fns[idx[0]];
      const int m = static_cast<int>(idx.size());
      Rule1D rule = trig_weighted_rule(
          basis_ptr->max_degree + 2, 2.0 * f0.l1 + k - 3.0,
          2.0 * f0.l2 + n - k - 1.0);
      Eigen::MatrixXd vals(m, rule.nodes.size());
      std::vector<double> jac(basis_ptr->max_degree / 2 + 2);
      for (int q = 0; q < rule.nodes.size(); ++q) {
        const double x = std::cos(2.0 * rule.nodes[q]);
        jacobi_values((basis_ptr->max_degree - f0.l1 - f0.l2) / 2, f0.jac_a,
                      f0.jac_b, x, jac.data());
        for (int r = 0; r < m; ++r)
          vals(r, q) = basis_ptr->fns[idx[r]].inv_norm *
                       jac[basis_ptr->fns[idx[r]].n];
      }
      auto pot = std::make_shared<Eigen::MatrixXd>(Eigen::MatrixXd::Zero(m, m));
      for (int r = 0; r < m; ++r)
        for (int s = r; s < m; ++s) {
          double v = 0.0;
          for (int q = 0; q < rule.nodes.size(); ++q)
            v += rule.weights[q] * vals(r, q) * vals(s, q);
          (*pot)(r, s) = v;
          (*pot)(s, r) = v;
        }
      Eigen::MatrixXd block = -alpha_eff * (*pot);
      for (int r = 0; r < m; ++r) {
        const auto& f = basis_ptr->fns[idx[r]];
        block(r, r) += f.l * (f.l + n - 2.0);
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block);
      const long comp = comp_counter++;
      for (int r = 0; r < m; ++r)
        ritz.push_back({es.eigenvalues()[r], idx,
                        es.eigenvectors().col(r), pot, r, comp});
    }
    std::sort(ritz.begin(), ritz.end(), [](const Ritz& a, const Ritz& b) {
      if (a.mu != b.mu) return a.mu < b.mu;
      if (a.comp != b.comp) return a.comp < b.comp;
      return a.which < b.which;
    });
    const int take = std::min<int>(count, static_cast<int>(ritz.size()));
    auto kept = std::make_shared<std::vector<Ritz>>(ritz.begin(),
                                                    ritz.begin() + take);
    for (int i = 0; i < take; ++i) {
      const Ritz& rz = (*kept)[i];
      AngularMode mode;
      mode.mu = rz.mu;
      mode.sigma_plus = (rz.mu >= -floor_n)
                            ? gamma_exponent(n, rz.mu).plus
                            : std::numeric_limits<double>::quiet_NaN();
      double dir = 0.0;
      for (int r = 0; r < rz.coeffs.size(); ++r) {
        const auto& f = basis_ptr->fns[rz.idx[r]];
        dir += rz.coeffs[r] * rz.coeffs[r] * f.l * (f.l + n - 2.0);
      }
      mode.angular_dirichlet = dir;
      mode.component_id = rz.comp;
      const int ii = i;
      mode.eval = [basis_ptr, kept, ii](const Eigen::VectorXd& th) {
        Eigen::VectorXd bv;
        basis_ptr->eval_all(th, bv);
        const Ritz& r = (*kept)[ii];
        double v = 0.0;
        for (int q = 0; q < r.coeffs.size(); ++q)
          v += r.coeffs[q] * bv[r.idx[q]];
        return v;
      };
      dec.modes_.push_back(std::move(mode));
    }
    dec.a_cross_ = [kept, alpha_eff](int i, int j) {
      const Ritz& a = (*kept)[i];
      const Ritz& b = (*kept)[j];
      if (a.comp != b.comp) return 0.0;
      return alpha_eff * a.coeffs.dot((*a.pot) * b.coeffs);
    };
    return dec;
  }

  // dense path for genuinely multi-frame coefficients
  Eigen::MatrixXd a_mat = assemble_potential_matrix(coeff, basis0);
  Eigen::VectorXd lap(basis0.size());
  for (int i = 0; i < basis0.size(); ++i)
    lap[i] = basis0.fns[i].l * (basis0.fns[i].l + n - 2.0);
  Eigen::MatrixXd op = -a_mat;
  op.diagonal() += lap;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op);
  if (es.info() != Eigen::Success)
    throw NonConvergence("Galerkin eigensolver failed");

  const int take = std::min<int>(count, basis0.size());
  auto basis_ptr = std::make_shared<GalerkinBasis>(std::move(basis0));
  auto a_ptr = std::make_shared<Eigen::MatrixXd>(std::move(a_mat));
  auto vec_ptr = std::make_shared<Eigen::MatrixXd>(
      es.eigenvectors().leftCols(take));
  for (int i = 0; i < take; ++i) {
    AngularMode mode;
    mode.mu = es.eigenvalues()[i];
    mode.sigma_plus = (mode.mu >= -floor_n)
                          ? gamma_exponent(n, mode.mu).plus
                          : std::numeric_limits<double>::quiet_NaN();
    Eigen::VectorXd c = vec_ptr->col(i);
    mode.angular_dirichlet = c.dot(lap.asDiagonal() * c);
    mode.component_id = -1;
    const int ii = i;
    mode.eval = [basis_ptr, vec_ptr, ii](const Eigen::VectorXd& th) {
      Eigen::VectorXd bv;
      basis_ptr->eval_all(th, bv);
      return vec_ptr->col(ii).dot(bv);
    };
    dec.modes_.push_back(std::move(mode));
  }
  dec.a_cross_ = [a_ptr, vec_ptr](int i, int j) {
    return vec_ptr->col(i).dot((*a_ptr) * vec_ptr->col(j));
  };
  return dec;
}

double mu1_of(const AngularCoefficient& coeff, int galerkin_degree) {
  if (separable(coeff)) {
    const int n = coeff.dim_n(), k = coeff.block_k();
    if (k == n) {
      double a_const = 0.0;
      for (const auto& t : coeff.cyl_terms()) a_const += t.alpha;
      return -a_const;
    }
    return sector_mu1_estimate(n, k, frame_alpha(coeff));
  }
  EigenDecomposition dec = solve_general_galerkin(coeff, galerkin_degree, 1);
  return dec.mode(0).mu;
}

double lambda_of(const AngularCoefficient& coeff, int galerkin_degree) {
  if (coeff.sum_positive_alpha() == 0.0) return 0.0;
  const int n = coeff.dim_n(), k = coeff.block_k();
  const double floor_n = 0.25 * (n - 2.0) * (n - 2.0);
  if (separable(coeff) && k < n) {
    const double alpha = frame_alpha(coeff);
    if (alpha <= 0.0) return 0.0;
    const double crit = 0.25 * (k - 2.0) * (k - 2.0);
    auto positive_definite = [&](double t) {
      const double b = alpha / t;
      if (b >= crit) return false;
      return sector_ground_value(n, k, b, 0, 0) > -floor_n;
    };
    double lo = 0.0, hi = std::max(lambda_upper_bound(coeff), 1e-12);
    if (positive_definite(hi) == false) {
      // expand (cannot happen for the a-priori bound, but stay safe)
      for (int it = 0; it < 60 && !positive_definite(hi); ++it) hi *= 2.0;
    }
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (positive_definite(mid))
        hi = mid;
      else
        lo = mid;
      if (hi - lo < 1e-15 * std::max(1.0, hi)) break;
    }
    return hi;
  }
  if (k == n) {
    double a_const = 0.0;
    for (const auto& t : coeff.cyl_terms()) a_const += t.alpha;
    // constant coefficient: Lambda = a_const / ((N-2)/2)^2 when positive
    return std::max(a_const, 0.0) / floor_n;
  }
  // multi-term: largest generalized Rayleigh value over the Galerkin space
  GalerkinBasis basis = make_galerkin_basis(coeff, galerkin_degree);
  Eigen::MatrixXd a_mat = assemble_potential_matrix(coeff, basis);
  Eigen::VectorXd bdiag(basis.size());
  for (int i = 0; i < basis.size(); ++i)
    bdiag[i] = basis.fns[i].l * (basis.fns[i].l + n - 2.0) + floor_n;
  Eigen::MatrixXd scaled =
      bdiag.cwiseSqrt().cwiseInverse().asDiagonal() * a_mat *
      bdiag.cwiseSqrt().cwiseInverse().asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(scaled);
  if (es.info() != Eigen::Success)
    throw NonConvergence("lambda_of: generalized eigensolver failed");
  return std::max(0.0, es.eigenvalues().maxCoeff());
}

double ground_sector_moment(const EigenDecomposition& dec, int mode,
                            const std::function<double(double)>& f_of_psi) {
  const AngularMode& m = dec.mode(mode);
  if (!m.sector || m.l1 != 0 || m.l2 != 0)
    throw ComputationFailed("ground_sector_moment: not a ground-sector mode");
  if (!dec.coeff_)
    throw ComputationFailed("ground_sector_moment: missing coefficient");
  const int n = dec.dim_n(), k = dec.coeff_->block_k();
  const double area1 = sphere_area(k), area2 = sphere_area(n - k);
  const double c0 = 1.0 / std::sqrt(area1 * area2);
  Rule1D rule = graded_phi_rule();
  CubicInterpolant ui(m.sector->grid, m.sector->smooth_part);
  const double s = m.sector->gauge_exponent;
  double total = 0.0;
  for (int q = 0; q < rule.nodes.size(); ++q) {
    const double phi = rule.nodes[q];
    const double w = std::pow(std::sin(phi), k - 1.0) *
                     std::pow(std::cos(phi), n - k - 1.0);
    const double psi = std::pow(std::sin(phi), s) * ui(phi) * c0;
    total += rule.weights[q] * w * f_of_psi(psi);
  }
  return area1 * area2 * total;
}

}  // namespace css
