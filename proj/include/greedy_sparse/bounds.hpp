/**
 * @file bounds.hpp
 * @brief Quantitative error bounds: exact and brute-force best m-term
 *        errors, a-priori and a-posteriori convergence bounds, the error
 *        reduction inequality and the two recurrence lemmas behind it.
 */
#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "greedy_sparse/dictionary.hpp"
#include "greedy_sparse/greedy.hpp"
#include "greedy_sparse/lq_space.hpp"

namespace gsparse {

/// Inputs common to the bound evaluators. `gamma` always comes from the
/// space configuration; the evaluators never re-derive it.
struct BoundParams {
  double epsilon = 0.0;  ///< approximation slack of the reference element
  double a_eps = 1.0;    ///< A(epsilon): f_eps / A(eps) lies in the unit hull
  double q = 2.0;
  double p = 2.0;        ///< q/(q-1)
  double gamma = 1.0;
  WeaknessSequence tau = WeaknessSequence::ones();

  static BoundParams for_space(const LqSpace& space, double epsilon,
                               double a_eps,
                               WeaknessSequence tau = WeaknessSequence::ones());
  void validate() const;
};

/// 4 (2 gamma)^{1/q}, the constant shared by both convergence bounds.
double bound_constant(double q, double gamma);

/// Exact best m-term error of the bt1 instance: 1/sqrt(2(m+1)).
double sigma_bt1_exact(int m);

/// (lower, upper) bracket for the btq instance, m >= 1:
/// 2^{-1-1/q} m^{-1/p} and 2^{-1/q} (m+1)^{-1/p}.
std::pair<double, double> sigma_btq_bracket(int m, double q);

/// Exact best m-term error over a finite dictionary by exhaustive subset
/// search plus projection. Guarded: C(|D|, m) must not exceed max_subsets.
double sigma_bruteforce(const SeqVector& f, const Dictionary& dict, int m,
                        const LqSpace& space,
                        std::size_t max_subsets = 1'000'000);

/// sigma_m for every m = 0..m_max in a single subset enumeration. Guarded
/// on the total number of visited subsets.
std::vector<double> sigma_bruteforce_sweep(const SeqVector& f,
                                           const Dictionary& dict, int m_max,
                                           const LqSpace& space,
                                           std::size_t max_subsets = 1'000'000);

/// A-priori bound: max{2 eps, C (A + eps) (1 + sum t_k^p)^{-1/p}}.
double apriori_bound(int m, const BoundParams& params);
double apriori_bound(const BoundParams& params, std::span<const double> ts);

/// A-posteriori bound sharpened by the measured defects:
/// max{2 eps, C A (1 + sum (t_k/v_k)^p)^{-1/p}}. A zero defect collapses
/// the bound to 2 eps.
double aposteriori_bound(int m, const BoundParams& params,
                         std::span<const double> defects);
double aposteriori_bound(const BoundParams& params, std::span<const double> ts,
                         std::span<const double> defects);

/// Same expression with the free-relaxation defects u_k.
double wgafr_bound(int m, const BoundParams& params,
                   std::span<const double> defects);

using RhoFn = std::function<double(double)>;

/// One step of the error reduction inequality:
/// ||f'|| * inf_{lambda >= 0} (1 - lambda theta A^{-1}(1 - eps/||f'||)
///                             + 2 rho(lambda/||f'||)).
/// With the default power modulus the infimum is evaluated both in closed
/// form and by grid + golden-section search; the smaller value is returned
/// and a discrepancy beyond 1e-8 is reported through `discrepancy`.
double error_reduction_rhs(double norm_fprime, double theta,
                           const BoundParams& params, const RhoFn& rho = {},
                           double* discrepancy = nullptr);

/// a_m <= A (1 + sum r_k)^{-1} for the linear recurrence.
double el1_bound(double A, std::span<const double> r);

/// a_m <= 2 (2 gamma)^{1/q} B (1 + sum r_k^p)^{-1/p} for the power
/// recurrence; requires gamma 2^q >= 1.
double el2_bound(double B, double gamma, double q, std::span<const double> r);

/// Fills the apriori/aposteriori columns of a trace from its recorded t_k
/// and defects. Rows without defects keep an empty a-posteriori column.
void annotate_trace(GreedyTrace& trace, const BoundParams& params);

}  // namespace gsparse
