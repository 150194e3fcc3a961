/**
 * @file greedy.hpp
 * @brief The four greedy algorithms (WCGA, OGA, RGA, WGAFR) and the two-part
 *        sparse approximant built from an absolutely convergent expansion.
 *        Each run produces a full per-iteration trace.
 */
#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "greedy_sparse/dictionary.hpp"
#include "greedy_sparse/lq_space.hpp"

namespace gsparse {

/// Per-iteration relaxation parameters t_k in [0, 1]. A finite list repeats
/// its last entry past the end.
class WeaknessSequence {
 public:
  static WeaknessSequence ones() { return constant(1.0); }
  static WeaknessSequence constant(double t);
  static WeaknessSequence list(std::vector<double> ts);

  double at(int k) const;  ///< 1-based iteration index
  bool is_constant() const { return constant_; }
  const std::vector<double>& values() const { return ts_; }

 private:
  std::vector<double> ts_;
  bool constant_ = true;
};

inline constexpr double kAbsent = std::numeric_limits<double>::quiet_NaN();

struct TraceRow {
  int m = 0;
  double residual_norm = 0.0;      ///< ||f_m|| after the update at step m
  std::size_t atom_index = 0;
  std::string atom_label;
  int sign = 1;
  double greedy_value = 0.0;       ///< ||F_{f_{m-1}}||_D driving the step
  double tk = 1.0;
  double defect = kAbsent;         ///< v_m (WCGA/OGA), u_m (WGAFR); NaN for RGA
  double apriori_bound = kAbsent;
  double aposteriori_bound = kAbsent;
  double exact_formula = kAbsent;
  double wall_clock_s = 0.0;
};

struct GreedyTrace {
  std::string algorithm;
  double initial_residual_norm = 0.0;
  std::vector<TraceRow> rows;
  SeqVector final_approximant;
  SeqVector final_residual;
  /// Signed coefficient per distinct atom of the final approximant,
  /// sorted by atom index.
  std::vector<std::pair<std::size_t, double>> combination;
  bool converged_exactly = false;
  bool truncated = false;
  std::string diagnostic;

  /// ||f_m||; m = 0 gives the initial norm.
  double residual_at(int m) const;
};

/// Weak Chebyshev Greedy Algorithm: weak greedy selection followed by
/// Chebyshev projection onto the accumulated span. Records v_m before each
/// span extension. Stops early once the residual is exactly zero.
GreedyTrace run_wcga(const SeqVector& f, const Dictionary& dict,
                     const WeaknessSequence& tau, int m_max,
                     const LqSpace& space, TieBreakMode policy,
                     double proj_tol = 1e-10);

/// WCGA with tau = {1} on the Hilbert space l2.
GreedyTrace run_oga(const SeqVector& f, const Dictionary& dict, int m_max,
                    TieBreakMode policy);

/// Relaxed Greedy Algorithm (Hilbert space): convex-combination update
/// G_m = (1 - 1/(m+1)) G_{m-1} + g(f_{m-1})/(m+1), no projections.
GreedyTrace run_rga(const SeqVector& f, const Dictionary& dict, int m_max,
                    TieBreakMode policy);

/// Weak Greedy Algorithm with Free Relaxation: weak greedy selection, then
/// the best update over span(G_{m-1}, phi_m). u_m is the defect of phi_m
/// against span(phi_{m-1}, G_{m-2}); u_1 = ||phi_1||.
GreedyTrace run_wgafr(const SeqVector& f, const Dictionary& dict,
                      const WeaknessSequence& tau, int m_max,
                      const LqSpace& space, TieBreakMode policy,
                      double proj_tol = 1e-10);

struct A1Term {
  std::size_t atom_index = 0;
  double coeff = 0.0;
};

/// Expansion f = sum c_i g_i with sum |c_i| <= 1.
struct A1Representation {
  std::vector<A1Term> terms;
  double mass() const;
};

SeqVector synthesize(const A1Representation& rep, const Dictionary& dict);

struct Al1Approximant {
  SeqVector s;            ///< two-part approximant, 2m-sparse
  double beta;            ///< tail mass past the first m terms
  A1Representation combination;  ///< expansion of s; mass <= 1
};

/// s_m = (first m terms) + beta_m * G_m((f - s_m^1)/beta_m), the inner G_m
/// realized by the RGA. Requires the Hilbert space. beta_m = 0 returns the
/// finite representation exactly.
Al1Approximant build_al1_approximant(const A1Representation& rep,
                                     const Dictionary& dict, int m,
                                     const LqSpace& space,
                                     TieBreakMode policy =
                                         TieBreakMode::LowestIndex);

}  // namespace gsparse
