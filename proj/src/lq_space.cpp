#include "greedy_sparse/lq_space.hpp"

#include <cmath>
#include <stdexcept>

#include "greedy_sparse/rng.hpp"

namespace gsparse {

bool all_finite(const SeqVector& v) {
  return v.allFinite();
}

namespace {

double dual_exponent(double q) {
  return q / (q - 1.0);
}

void validate_space(double q, int dim, double gamma) {
  if (!(q > 1.0) || !(q <= 2.0)) {
    throw std::invalid_argument("LqSpace: q must lie in (1, 2]");
  }
  if (dim < 1) {
    throw std::invalid_argument("LqSpace: dimension must be positive");
  }
  if (!(gamma > 0.0)) {
    throw std::invalid_argument("LqSpace: gamma must be positive");
  }
  if (gamma * std::pow(2.0, q) < 1.0 - 1e-12) {
    throw std::invalid_argument(
        "LqSpace: gamma * 2^q >= 1 is required of any valid modulus constant");
  }
}

void require_dim(const LqSpace& space, const SeqVector& v, const char* op) {
  if (v.size() != space.dim()) {
    throw std::invalid_argument(std::string(op) + ": dimension mismatch");
  }
  if (!all_finite(v)) {
    throw std::invalid_argument(std::string(op) + ": non-finite entry");
  }
}

}  // namespace

LqSpace::LqSpace(double q, int dim) : LqSpace(q, dim, 1.0 / q) {}

LqSpace::LqSpace(double q, int dim, double gamma)
    : q_(q), p_(dual_exponent(q)), gamma_(gamma), dim_(dim) {
  validate_space(q, dim, gamma);
}

double norm(const LqSpace& space, const SeqVector& v) {
  require_dim(space, v, "norm");
  if (space.q() == 2.0) {
    return v.norm();
  }
  const double q = space.q();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    acc += std::pow(std::abs(v[i]), q);
  }
  return std::pow(acc, 1.0 / q);
}

DualFunctional norming_functional(const LqSpace& space, const SeqVector& f) {
  require_dim(space, f, "norming_functional");
  const double nf = norm(space, f);
  if (!(nf > 0.0)) {
    throw std::invalid_argument("norming functional undefined at zero");
  }
  // Scale first: the weights are 0-homogeneous in f, so this is stable at
  // any magnitude.
  const SeqVector u = f / nf;
  DualFunctional F;
  F.weights.resize(f.size());
  const double q = space.q();
  if (q == 2.0) {
    F.weights = u;
  } else {
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      const double a = std::abs(u[i]);
      F.weights[i] = (u[i] < 0.0 ? -1.0 : 1.0) * std::pow(a, q - 1.0);
    }
  }
  return F;
}

double modulus_pair_value(const LqSpace& space, const SeqVector& x,
                          const SeqVector& y, double u) {
  require_dim(space, x, "modulus_pair_value");
  require_dim(space, y, "modulus_pair_value");
  return (norm(space, x + u * y) + norm(space, x - u * y)) / 2.0 - 1.0;
}

double estimate_modulus(const LqSpace& space, double u, int samples,
                        std::uint64_t seed) {
  if (!(u > 0.0)) {
    throw std::invalid_argument("estimate_modulus: u must be positive");
  }
  if (samples < 1) {
    throw std::invalid_argument("estimate_modulus: samples must be >= 1");
  }
  std::mt19937_64 gen(seed);
  const int n = space.dim();
  SeqVector x(n), y(n);
  double best = 0.0;
  for (int s = 0; s < samples; ++s) {
    for (int i = 0; i < n; ++i) x[i] = gaussian(gen);
    for (int i = 0; i < n; ++i) y[i] = gaussian(gen);
    const double nx = norm(space, x);
    const double ny = norm(space, y);
    if (nx < 1e-12 || ny < 1e-12) continue;
    x /= nx;
    y /= ny;
    best = std::max(best, modulus_pair_value(space, x, y, u));
  }
  return best;
}

}  // namespace gsparse
