#include "greedy_sparse/projection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gsparse {

namespace {

constexpr double kPivotTol = 1e-10;

void require_span(const SeqVector& f, std::span<const SeqVector> span_atoms,
                  const char* op) {
  for (const auto& a : span_atoms) {
    if (a.size() != f.size()) {
      throw std::invalid_argument(std::string(op) + ": dimension mismatch");
    }
  }
}

ProjectionResult empty_projection(const SeqVector& f, double residual_norm) {
  ProjectionResult r;
  r.coefficients = Eigen::VectorXd::Zero(0);
  r.approximant = SeqVector::Zero(f.size());
  r.residual = f;
  r.residual_norm = residual_norm;
  return r;
}

}  // namespace

ProjectionResult project_hilbert(const SeqVector& f,
                                 std::span<const SeqVector> span_atoms) {
  require_span(f, span_atoms, "project_hilbert");
  const int k = int(span_atoms.size());
  if (k == 0) return empty_projection(f, f.norm());

  const Eigen::Index n = f.size();
  // Modified Gram-Schmidt in input order; dependent atoms get a zero
  // coefficient. R holds the factors of the kept atoms: A_kept = B R.
  Eigen::MatrixXd basis(n, k);
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(k, k);
  std::vector<int> kept;
  kept.reserve(k);
  bool rank_deficient = false;

  for (int j = 0; j < k; ++j) {
    SeqVector w = span_atoms[j];
    const double anorm = w.norm();
    Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(kept.size());
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t l = 0; l < kept.size(); ++l) {
        const double d = basis.col(int(l)).dot(w);
        coeffs[int(l)] += d;
        w -= d * basis.col(int(l));
      }
      if (pass == 0 && w.norm() > 0.3 * anorm) break;  // re-orthogonalize once
    }
    const double wn = w.norm();
    if (wn <= kPivotTol * std::max(1.0, anorm)) {
      rank_deficient = true;
      continue;
    }
    const int r = int(kept.size());
    for (int l = 0; l < r; ++l) R(l, r) = coeffs[l];
    R(r, r) = wn;
    basis.col(r) = w / wn;
    kept.push_back(j);
  }

  ProjectionResult out;
  out.coefficients = Eigen::VectorXd::Zero(k);
  out.rank_deficient = rank_deficient;
  const int r = int(kept.size());
  if (r > 0) {
    const Eigen::VectorXd y = basis.leftCols(r).transpose() * f;
    const Eigen::VectorXd c =
        R.topLeftCorner(r, r).triangularView<Eigen::Upper>().solve(y);
    for (int l = 0; l < r; ++l) out.coefficients[kept[l]] = c[l];
  }
  out.approximant = SeqVector::Zero(f.size());
  for (int j = 0; j < k; ++j) {
    if (out.coefficients[j] != 0.0) {
      out.approximant += out.coefficients[j] * span_atoms[j];
    }
  }
  out.residual = f - out.approximant;
  out.residual_norm = out.residual.norm();
  return out;
}

namespace {

// The smooth power objective psi(c) = sum_j |r_j|^q with r = f - A c.
// Its stationary points coincide with those of ||r||_q, and the norm's
// span gradient (the vector of F_residual(phi_i)) is recovered by the
// scaling grad ||r||_q = grad psi / (q ||r||_q^{q-1}).
struct LqObjective {
  const SeqVector& f;
  std::span<const SeqVector> atoms;
  double q;

  double residual_of(const Eigen::VectorXd& c, SeqVector& residual) const {
    residual = f;
    for (Eigen::Index j = 0; j < c.size(); ++j) {
      if (c[j] != 0.0) residual -= c[j] * atoms[std::size_t(j)];
    }
    double psi = 0.0;
    for (Eigen::Index i = 0; i < residual.size(); ++i) {
      psi += std::pow(std::abs(residual[i]), q);
    }
    return psi;
  }

  Eigen::VectorXd gradient(const SeqVector& residual) const {
    SeqVector s(residual.size());
    for (Eigen::Index i = 0; i < residual.size(); ++i) {
      const double a = std::abs(residual[i]);
      s[i] = (residual[i] < 0.0 ? -1.0 : 1.0) * std::pow(a, q - 1.0);
    }
    Eigen::VectorXd g(Eigen::Index(atoms.size()));
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      g[Eigen::Index(i)] = -q * s.dot(atoms[i]);
    }
    return g;
  }

  Eigen::MatrixXd hessian(const SeqVector& residual) const {
    const Eigen::Index k = Eigen::Index(atoms.size());
    Eigen::MatrixXd H(k, k);
    SeqVector d(residual.size());
    for (Eigen::Index i = 0; i < residual.size(); ++i) {
      // |r|^{q-2} blows up at zero coordinates; the clamp keeps the Newton
      // system finite while staying far steeper than any achievable scale.
      const double a = std::max(std::abs(residual[i]), 1e-30);
      d[i] = q * (q - 1.0) * std::pow(a, q - 2.0);
    }
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index j = i; j < k; ++j) {
        double acc = 0.0;
        const SeqVector& ai = atoms[std::size_t(i)];
        const SeqVector& aj = atoms[std::size_t(j)];
        for (Eigen::Index t = 0; t < residual.size(); ++t) {
          acc += d[t] * ai[t] * aj[t];
        }
        H(i, j) = acc;
        H(j, i) = acc;
      }
    }
    return H;
  }
};

}  // namespace

ProjectionResult project_lq(const SeqVector& f,
                            std::span<const SeqVector> span_atoms,
                            const LqSpace& space, double tol,
                            int max_iterations,
                            const std::optional<Eigen::VectorXd>& init) {
  require_span(f, span_atoms, "project_lq");
  if (!(tol > 0.0)) throw std::invalid_argument("project_lq: tol must be > 0");
  const int k = int(span_atoms.size());
  if (k == 0) return empty_projection(f, norm(space, f));

  const double q = space.q();
  LqObjective obj{f, span_atoms, q};
  SeqVector residual(f.size());

  // Start from the best of: zero, the l2 projection, and the caller's guess.
  Eigen::VectorXd c = Eigen::VectorXd::Zero(k);
  double psi = obj.residual_of(c, residual);
  {
    const ProjectionResult warm = project_hilbert(f, span_atoms);
    SeqVector r2(f.size());
    const double psi2 = obj.residual_of(warm.coefficients, r2);
    if (psi2 < psi) {
      c = warm.coefficients;
      psi = psi2;
      residual = r2;
    }
  }
  if (init && init->size() == k) {
    SeqVector r3(f.size());
    const double psi3 = obj.residual_of(*init, r3);
    if (psi3 < psi) {
      c = *init;
      psi = psi3;
      residual = r3;
    }
  }

  ProjectionResult out;
  out.converged = false;

  // Damped Newton with Armijo backtracking; the steepest direction is the
  // fallback when the Newton system is unusable.
  int iter = 0;
  for (; iter < max_iterations; ++iter) {
    const double hnorm = std::pow(psi, 1.0 / q);
    if (hnorm <= kZeroResidualTol) {
      out.converged = true;  // exact: the norm gradient is undefined at zero
      break;
    }
    const Eigen::VectorXd grad = obj.gradient(residual);
    const double norm_grad_scale = q * std::pow(hnorm, q - 1.0);
    if (grad.norm() / norm_grad_scale <= tol) {
      out.converged = true;
      break;
    }

    Eigen::MatrixXd H = obj.hessian(residual);
    const double ridge = 1e-12 * (H.trace() / double(k) + 1.0);
    H.diagonal().array() += ridge;
    Eigen::VectorXd d = -H.ldlt().solve(grad);
    double slope = grad.dot(d);
    if (!(slope < 0.0) || !d.allFinite()) {
      d = -grad;
      slope = -grad.squaredNorm();
    }

    double step = 1.0;
    Eigen::VectorXd c_new;
    SeqVector r_new(f.size());
    double psi_new = psi;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      c_new = c + step * d;
      psi_new = obj.residual_of(c_new, r_new);
      if (psi_new <= psi + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no measurable descent left at double precision
    c.swap(c_new);
    residual.swap(r_new);
    psi = psi_new;
  }

  out.coefficients = c;
  out.approximant = SeqVector::Zero(f.size());
  for (int j = 0; j < k; ++j) {
    if (c[j] != 0.0) out.approximant += c[j] * span_atoms[j];
  }
  out.residual = f - out.approximant;
  out.residual_norm = norm(space, out.residual);
  out.solver_iterations = iter;
  return out;
}

ProjectionResult project(const SeqVector& f,
                         std::span<const SeqVector> span_atoms,
                         const LqSpace& space, double tol) {
  if (space.is_hilbert()) return project_hilbert(f, span_atoms);
  return project_lq(f, span_atoms, space, tol);
}

double projection_defect(const SeqVector& atom,
                         std::span<const SeqVector> prior_span,
                         const LqSpace& space, double tol) {
  const double an = norm(space, atom);
  if (an > 1.0 + 1e-9) {
    throw std::invalid_argument("projection_defect: atom norm exceeds 1");
  }
  if (prior_span.empty()) return an;
  return project(atom, prior_span, space, tol).residual_norm;
}

}  // namespace gsparse
