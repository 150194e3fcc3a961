#include "greedy_sparse/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <iostream>
#include <limits>
#include <stdexcept>

#include "greedy_sparse/projection.hpp"

namespace gsparse {

BoundParams BoundParams::for_space(const LqSpace& space, double epsilon,
                                   double a_eps, WeaknessSequence tau) {
  BoundParams params;
  params.epsilon = epsilon;
  params.a_eps = a_eps;
  params.q = space.q();
  params.p = space.p();
  params.gamma = space.gamma();
  params.tau = std::move(tau);
  params.validate();
  return params;
}

void BoundParams::validate() const {
  if (!(epsilon >= 0.0)) throw std::invalid_argument("BoundParams: epsilon >= 0");
  if (!(a_eps > 0.0)) throw std::invalid_argument("BoundParams: A(eps) > 0");
  if (!(q > 1.0) || !(q <= 2.0)) throw std::invalid_argument("BoundParams: q in (1,2]");
  if (!(gamma > 0.0)) throw std::invalid_argument("BoundParams: gamma > 0");
  if (std::abs(p - q / (q - 1.0)) > 1e-9 * p) {
    throw std::invalid_argument("BoundParams: p must equal q/(q-1)");
  }
}

double bound_constant(double q, double gamma) {
  return 4.0 * std::pow(2.0 * gamma, 1.0 / q);
}

double sigma_bt1_exact(int m) {
  if (m < 0) throw std::invalid_argument("sigma_bt1_exact: m >= 0");
  return 1.0 / std::sqrt(2.0 * (m + 1));
}

std::pair<double, double> sigma_btq_bracket(int m, double q) {
  if (m < 1) throw std::invalid_argument("sigma_btq_bracket: m >= 1");
  if (!(q > 1.0) || !(q < 2.0)) {
    throw std::invalid_argument("sigma_btq_bracket: q in (1, 2)");
  }
  const double p = q / (q - 1.0);
  const double lower = std::pow(2.0, -1.0 - 1.0 / q) * std::pow(m, -1.0 / p);
  const double upper = std::pow(2.0, -1.0 / q) * std::pow(m + 1, -1.0 / p);
  return {lower, upper};
}

namespace {

// Binomial with saturation; only used for budget guards.
double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double v = 1.0;
  for (int i = 1; i <= k; ++i) {
    v *= double(n - k + i) / double(i);
    if (v > 1e18) return 1e18;
  }
  return v;
}

double subsets_up_to(int n, int m) {
  double total = 0.0;
  for (int k = 1; k <= std::min(m, n); ++k) {
    total += binom(n, k);
    if (total > 1e18) return 1e18;
  }
  return total;
}

[[noreturn]] void budget_error(const char* op, double need, double budget) {
  throw std::invalid_argument(
      std::string(op) + ": combinatorial budget exceeded (" +
      std::to_string(need) + " subsets > " + std::to_string(budget) +
      "); shrink N or m, or raise max_subsets");
}

// Depth-first scan of all atom subsets of size <= m_max over a Hilbert
// space, maintaining a Cholesky factor of the selected Gram block. Records
// the smallest projection residual per subset size. With target >= 0,
// branches that can no longer reach a subset of that size are skipped.
class HilbertSubsetScan {
 public:
  HilbertSubsetScan(const SeqVector& f, const Dictionary& dict, int m_max,
                    int target = -1)
      : n_(int(dict.size())), m_max_(std::min(m_max, n_)), target_(target) {
    Eigen::MatrixXd A(f.size(), n_);
    for (int j = 0; j < n_; ++j) A.col(j) = dict.atom(j);
    gram_ = A.transpose() * A;
    atf_ = A.transpose() * f;
    f2_ = f.squaredNorm();
    best_.assign(std::size_t(m_max_) + 1,
                 std::numeric_limits<double>::infinity());
    best_[0] = std::sqrt(f2_);
    chol_.assign(std::size_t(m_max_) * std::size_t(m_max_), 0.0);
    z_.assign(std::size_t(m_max_), 0.0);
    sel_.assign(std::size_t(m_max_), 0);
    r2_.assign(std::size_t(m_max_) + 1, 0.0);
    r2_[0] = f2_;
  }

  std::vector<double> run() {
    if (m_max_ > 0) dfs(0, 0, 0);
    for (std::size_t k = 1; k < best_.size(); ++k) {
      best_[k] = std::min(best_[k], best_[k - 1]);
    }
    return best_;
  }

 private:
  void dfs(int start, int size, int rank) {
    const int stride = m_max_;
    for (int j = start; j < n_; ++j) {
      if (target_ >= 0 && size + (n_ - j) < target_) break;
      // Extend the Cholesky factor by atom j against the current basis.
      double d = gram_(j, j);
      double zj = atf_[j];
      double* row = &chol_[std::size_t(rank) * std::size_t(stride)];
      for (int l = 0; l < rank; ++l) {
        double w = gram_(sel_[std::size_t(l)], j);
        const double* lrow = &chol_[std::size_t(l) * std::size_t(stride)];
        for (int t = 0; t < l; ++t) w -= lrow[t] * row[t];
        w /= lrow[l];
        row[l] = w;
        d -= w * w;
        zj -= w * z_[std::size_t(l)];
      }
      int new_rank = rank;
      double new_r2 = r2_[std::size_t(size)];
      if (d > 1e-20 * std::max(1.0, gram_(j, j))) {
        const double sq = std::sqrt(d);
        row[rank] = sq;
        sel_[std::size_t(rank)] = j;
        z_[std::size_t(rank)] = zj / sq;
        new_r2 = std::max(0.0, new_r2 - z_[std::size_t(rank)] * z_[std::size_t(rank)]);
        ++new_rank;
      }
      r2_[std::size_t(size) + 1] = new_r2;
      best_[std::size_t(size) + 1] =
          std::min(best_[std::size_t(size) + 1], std::sqrt(new_r2));
      if (size + 1 < m_max_) dfs(j + 1, size + 1, new_rank);
    }
  }

  int n_;
  int m_max_;
  int target_ = -1;
  Eigen::MatrixXd gram_;
  Eigen::VectorXd atf_;
  double f2_ = 0.0;
  std::vector<double> best_;
  std::vector<double> chol_;  // row-major lower triangle, m_max x m_max
  std::vector<double> z_;
  std::vector<int> sel_;
  std::vector<double> r2_;
};

class LqSubsetScan {
 public:
  LqSubsetScan(const SeqVector& f, const Dictionary& dict,
               const LqSpace& space, int m_max, int target = -1)
      : f_(f), dict_(dict), space_(space),
        n_(int(dict.size())), m_max_(std::min(m_max, n_)), target_(target) {
    best_.assign(std::size_t(m_max_) + 1,
                 std::numeric_limits<double>::infinity());
    best_[0] = norm(space_, f_);
  }

  std::vector<double> run() {
    prefix_.reserve(std::size_t(m_max_));
    if (m_max_ > 0) dfs(0);
    for (std::size_t k = 1; k < best_.size(); ++k) {
      best_[k] = std::min(best_[k], best_[k - 1]);
    }
    return best_;
  }

 private:
  void dfs(int start) {
    for (int j = start; j < n_; ++j) {
      if (target_ >= 0 && int(prefix_.size()) + (n_ - j) < target_) break;
      prefix_.push_back(dict_.atom(std::size_t(j)));
      const ProjectionResult proj = project_lq(f_, prefix_, space_);
      const std::size_t size = prefix_.size();
      best_[size] = std::min(best_[size], proj.residual_norm);
      if (int(size) < m_max_) dfs(j + 1);
      prefix_.pop_back();
    }
  }

  const SeqVector& f_;
  const Dictionary& dict_;
  const LqSpace& space_;
  int n_;
  int m_max_;
  int target_ = -1;
  std::vector<SeqVector> prefix_;
  std::vector<double> best_;
};

}  // namespace

std::vector<double> sigma_bruteforce_sweep(const SeqVector& f,
                                           const Dictionary& dict, int m_max,
                                           const LqSpace& space,
                                           std::size_t max_subsets) {
  if (m_max < 0) throw std::invalid_argument("sigma_bruteforce_sweep: m_max >= 0");
  if (f.size() != space.dim() || dict.dim() != space.dim()) {
    throw std::invalid_argument("sigma_bruteforce_sweep: dimension mismatch");
  }
  const double need = subsets_up_to(int(dict.size()), m_max);
  if (need > double(max_subsets)) {
    budget_error("sigma_bruteforce_sweep", need, double(max_subsets));
  }
  if (space.is_hilbert()) {
    return HilbertSubsetScan(f, dict, m_max).run();
  }
  return LqSubsetScan(f, dict, space, m_max).run();
}

double sigma_bruteforce(const SeqVector& f, const Dictionary& dict, int m,
                        const LqSpace& space, std::size_t max_subsets) {
  if (m < 0) throw std::invalid_argument("sigma_bruteforce: m >= 0");
  if (f.size() != space.dim() || dict.dim() != space.dim()) {
    throw std::invalid_argument("sigma_bruteforce: dimension mismatch");
  }
  const int m_eff = std::min(m, int(dict.size()));
  const double need = binom(int(dict.size()), m_eff);
  if (need > double(max_subsets)) {
    budget_error("sigma_bruteforce", need, double(max_subsets));
  }
  // Residuals only shrink as the span grows, so the minimum over subsets of
  // size exactly m_eff is also the minimum over sizes <= m_eff.
  const auto best = space.is_hilbert()
                        ? HilbertSubsetScan(f, dict, m_eff, m_eff).run()
                        : LqSubsetScan(f, dict, space, m_eff, m_eff).run();
  return best[std::size_t(m_eff)];
}

namespace {

double tail_factor(double p, double sum_rp) {
  return std::pow(1.0 + sum_rp, -1.0 / p);
}

}  // namespace

double apriori_bound(const BoundParams& params, std::span<const double> ts) {
  params.validate();
  double s = 0.0;
  for (double t : ts) {
    if (!(t >= 0.0) || !(t <= 1.0)) {
      throw std::invalid_argument("apriori_bound: t_k in [0, 1]");
    }
    s += std::pow(t, params.p);
  }
  const double body = bound_constant(params.q, params.gamma) *
                      (params.a_eps + params.epsilon) *
                      tail_factor(params.p, s);
  return std::max(2.0 * params.epsilon, body);
}

double apriori_bound(int m, const BoundParams& params) {
  if (m < 0) throw std::invalid_argument("apriori_bound: m >= 0");
  std::vector<double> ts(static_cast<std::size_t>(m));
  for (int k = 1; k <= m; ++k) ts[std::size_t(k) - 1] = params.tau.at(k);
  return apriori_bound(params, ts);
}

double aposteriori_bound(const BoundParams& params, std::span<const double> ts,
                         std::span<const double> defects) {
  params.validate();
  if (ts.size() != defects.size()) {
    throw std::invalid_argument("aposteriori_bound: one defect per t_k");
  }
  double s = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const double v = defects[k];
    if (v < 0.0) throw std::invalid_argument("aposteriori_bound: negative defect");
    if (v == 0.0) return 2.0 * params.epsilon;  // exact step: sum diverges
    s += std::pow(ts[k] / v, params.p);
    if (!std::isfinite(s)) return 2.0 * params.epsilon;
  }
  const double body = bound_constant(params.q, params.gamma) * params.a_eps *
                      tail_factor(params.p, s);
  return std::max(2.0 * params.epsilon, body);
}

double aposteriori_bound(int m, const BoundParams& params,
                         std::span<const double> defects) {
  if (m < 0) throw std::invalid_argument("aposteriori_bound: m >= 0");
  if (int(defects.size()) < m) {
    throw std::invalid_argument("aposteriori_bound: need m defects");
  }
  std::vector<double> ts(static_cast<std::size_t>(m));
  for (int k = 1; k <= m; ++k) ts[std::size_t(k) - 1] = params.tau.at(k);
  return aposteriori_bound(params, ts, defects.subspan(0, std::size_t(m)));
}

double wgafr_bound(int m, const BoundParams& params,
                   std::span<const double> defects) {
  return aposteriori_bound(m, params, defects);
}

namespace {

double golden_min(const std::function<double(double)>& fn, double lo,
                  double hi) {
  constexpr double invphi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = fn(x1), f2 = fn(x2);
  for (int it = 0; it < 200 && (b - a) > 1e-14 * (1.0 + b); ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = fn(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = fn(x2);
    }
  }
  return std::min(f1, f2);
}

}  // namespace

double error_reduction_rhs(double norm_fprime, double theta,
                           const BoundParams& params, const RhoFn& rho,
                           double* discrepancy) {
  params.validate();
  if (theta < 0.0) {
    throw std::invalid_argument("error_reduction_rhs: theta >= 0");
  }
  if (!(norm_fprime > 0.0)) {
    throw std::invalid_argument("error_reduction_rhs: ||f'|| > 0");
  }
  const double a = norm_fprime;
  const double c1 =
      theta / params.a_eps * (1.0 - params.epsilon / a);

  const RhoFn rho_fn =
      rho ? rho
          : RhoFn([q = params.q, g = params.gamma](double u) {
              return g * std::pow(u, q);
            });
  const auto objective = [&](double lambda) {
    return 1.0 - lambda * c1 + 2.0 * rho_fn(lambda / a);
  };

  double closed = std::numeric_limits<double>::quiet_NaN();
  double lambda_star = 0.0;
  if (!rho) {
    // Stationary point of 1 - c1 l + 2 gamma (l/a)^q.
    if (c1 > 0.0) {
      lambda_star = std::pow(
          c1 * std::pow(a, params.q) / (2.0 * params.gamma * params.q),
          1.0 / (params.q - 1.0));
    }
    closed = objective(lambda_star);
  }

  // Grid plus golden-section refinement over [0, hi].
  const double hi = std::max({4.0 * a, 2.0 * lambda_star, 1e-6});
  constexpr int kGrid = 2000;
  double best = objective(0.0);
  int best_i = 0;
  for (int i = 1; i <= kGrid; ++i) {
    const double l = hi * double(i) / double(kGrid);
    const double v = objective(l);
    if (v < best) {
      best = v;
      best_i = i;
    }
  }
  const double lo_b = hi * double(std::max(0, best_i - 1)) / double(kGrid);
  const double hi_b = hi * double(std::min(kGrid, best_i + 1)) / double(kGrid);
  const double numeric = std::min(best, golden_min(objective, lo_b, hi_b));

  if (!rho) {
    const double gap = std::abs(closed - numeric);
    if (discrepancy) *discrepancy = gap;
    if (gap > 1e-8) {
      std::cerr << "error_reduction_rhs: closed-form/numeric discrepancy "
                << gap << "\n";
    }
    return a * std::min(closed, numeric);
  }
  if (discrepancy) *discrepancy = 0.0;
  return a * numeric;
}

double el1_bound(double A, std::span<const double> r) {
  if (!(A > 0.0)) throw std::invalid_argument("el1_bound: A > 0");
  double s = 0.0;
  for (double rk : r) {
    if (rk < 0.0) throw std::invalid_argument("el1_bound: r_k >= 0");
    s += rk;
  }
  return A / (1.0 + s);
}

double el2_bound(double B, double gamma, double q, std::span<const double> r) {
  if (!(B > 0.0)) throw std::invalid_argument("el2_bound: B > 0");
  if (!(gamma > 0.0)) throw std::invalid_argument("el2_bound: gamma > 0");
  if (!(q > 1.0) || !(q <= 2.0)) throw std::invalid_argument("el2_bound: q in (1,2]");
  if (gamma * std::pow(2.0, q) < 1.0 - 1e-12) {
    throw std::invalid_argument("el2_bound: hypothesis gamma 2^q >= 1 violated");
  }
  const double p = q / (q - 1.0);
  double s = 0.0;
  for (double rk : r) {
    if (rk < 0.0) throw std::invalid_argument("el2_bound: r_k >= 0");
    s += std::pow(rk, p);
  }
  return 2.0 * std::pow(2.0 * gamma, 1.0 / q) * B * tail_factor(p, s);
}

void annotate_trace(GreedyTrace& trace, const BoundParams& params) {
  std::vector<double> ts, defects;
  ts.reserve(trace.rows.size());
  defects.reserve(trace.rows.size());
  bool have_defects = true;
  for (auto& row : trace.rows) {
    ts.push_back(row.tk);
    if (std::isnan(row.defect)) have_defects = false;
    defects.push_back(row.defect);
    row.apriori_bound = apriori_bound(params, ts);
    row.aposteriori_bound =
        have_defects ? aposteriori_bound(params, ts, defects) : kAbsent;
  }
}

}  // namespace gsparse
