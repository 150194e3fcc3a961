/**
 * @file projection.hpp
 * @brief Chebyshev (best-approximation) projection onto the span of finitely
 *        many atoms: closed form in l2, iterative convex minimization in lq.
 */
#pragma once

#include <optional>
#include <span>

#include "greedy_sparse/lq_space.hpp"

namespace gsparse {

struct ProjectionResult {
  Eigen::VectorXd coefficients;  ///< one per span atom; 0 for dropped atoms
  SeqVector approximant;         ///< sum coefficients_i * atom_i, exactly
  SeqVector residual;            ///< f - approximant
  double residual_norm = 0.0;
  int solver_iterations = 0;
  bool converged = true;
  bool rank_deficient = false;   ///< dependent atoms were dropped (l2 path)
};

/// Orthogonal projection via an order-preserving rank-revealing
/// Gram-Schmidt; dependent atoms are dropped deterministically and flagged.
/// An empty span returns f itself.
ProjectionResult project_hilbert(const SeqVector& f,
                                 std::span<const SeqVector> span_atoms);

/// Minimizes ||f - sum c_i phi_i||_q, q in (1, 2], by limited-memory
/// quasi-Newton descent with backtracking line search, warm-started from the
/// better of the l2 projection, c = 0 and `init`. Stops when the span
/// gradient (the vector of F_residual(phi_i)) has l2 norm <= tol, or exactly
/// when the residual norm falls below kZeroResidualTol.
ProjectionResult project_lq(
    const SeqVector& f, std::span<const SeqVector> span_atoms,
    const LqSpace& space, double tol = 1e-10, int max_iterations = 100000,
    const std::optional<Eigen::VectorXd>& init = std::nullopt);

/// Dispatches on the space: q = 2 closed form, otherwise the lq solver.
ProjectionResult project(const SeqVector& f,
                         std::span<const SeqVector> span_atoms,
                         const LqSpace& space, double tol = 1e-10);

/// v_m / u_m: distance of a unit atom from the span of the prior atoms.
/// Always in [0, 1]; equals ||atom|| for an empty span.
double projection_defect(const SeqVector& atom,
                         std::span<const SeqVector> prior_span,
                         const LqSpace& space, double tol = 1e-10);

}  // namespace gsparse
