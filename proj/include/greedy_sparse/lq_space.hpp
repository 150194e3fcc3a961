/**
 * @file lq_space.hpp
 * @brief Geometry of finite truncations of lq, 1 < q <= 2: norms, norming
 *        (peak) functionals and an empirical modulus-of-smoothness estimate.
 */
#pragma once

#include <Eigen/Dense>

#include <cstdint>

namespace gsparse {

/// Coefficient vector in the ambient truncation. Carries elements,
/// residuals and dictionary atoms alike.
using SeqVector = Eigen::VectorXd;

bool all_finite(const SeqVector& v);

/// The space lq^N plus its smoothness data: dual exponent p = q/(q-1) and
/// the constant gamma in rho(u) <= gamma * u^q. The default gamma is 1/q;
/// construction rejects any gamma with gamma * 2^q < 1.
class LqSpace {
 public:
  LqSpace(double q, int dim);
  LqSpace(double q, int dim, double gamma);

  double q() const { return q_; }
  double p() const { return p_; }
  double gamma() const { return gamma_; }
  int dim() const { return dim_; }
  bool is_hilbert() const { return q_ == 2.0; }

 private:
  double q_;
  double p_;
  double gamma_;
  int dim_;
};

/// Norming functional F_f: ||weights||_p = 1 and F_f(f) = ||f||_q.
struct DualFunctional {
  Eigen::VectorXd weights;
  double operator()(const SeqVector& x) const { return weights.dot(x); }
};

/// (sum |v_i|^q)^(1/q). Throws on dimension mismatch or non-finite entries.
double norm(const LqSpace& space, const SeqVector& v);

/// Explicit lq duality: weights_i = sign(f_i) |f_i|^(q-1) / ||f||^(q-1).
/// Throws when f = 0; callers treat that as exact convergence.
DualFunctional norming_functional(const LqSpace& space, const SeqVector& f);

/// (||x + u y|| + ||x - u y||) / 2 - 1 for one pair, the quantity whose
/// supremum over unit pairs defines the modulus of smoothness.
double modulus_pair_value(const LqSpace& space, const SeqVector& x,
                          const SeqVector& y, double u);

/// Lower estimate of rho(u): max of modulus_pair_value over `samples`
/// seeded random unit pairs. Deterministic for a fixed seed.
double estimate_modulus(const LqSpace& space, double u, int samples,
                        std::uint64_t seed);

/// Residual norms at or below this threshold are treated as exact zeros by
/// every algorithm (the norming functional is undefined at zero).
inline constexpr double kZeroResidualTol = 1e-13;

}  // namespace gsparse
