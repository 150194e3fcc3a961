#include "greedy_sparse/greedy.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <stdexcept>

#include "greedy_sparse/projection.hpp"

namespace gsparse {

WeaknessSequence WeaknessSequence::constant(double t) {
  if (!(t >= 0.0) || !(t <= 1.0)) {
    throw std::invalid_argument("WeaknessSequence: t must lie in [0, 1]");
  }
  WeaknessSequence w;
  w.ts_ = {t};
  w.constant_ = true;
  return w;
}

WeaknessSequence WeaknessSequence::list(std::vector<double> ts) {
  if (ts.empty()) {
    throw std::invalid_argument("WeaknessSequence: empty list");
  }
  for (double t : ts) {
    if (!(t >= 0.0) || !(t <= 1.0)) {
      throw std::invalid_argument("WeaknessSequence: every t must lie in [0, 1]");
    }
  }
  WeaknessSequence w;
  w.ts_ = std::move(ts);
  w.constant_ = false;
  return w;
}

double WeaknessSequence::at(int k) const {
  if (k < 1) throw std::invalid_argument("WeaknessSequence: k is 1-based");
  const std::size_t i = std::min<std::size_t>(std::size_t(k) - 1, ts_.size() - 1);
  return ts_[i];
}

double GreedyTrace::residual_at(int m) const {
  if (m == 0) return initial_residual_norm;
  return rows.at(std::size_t(m) - 1).residual_norm;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void require_instance(const SeqVector& f, const Dictionary& dict, int m_max,
                      const LqSpace& space, const char* op) {
  if (dict.size() == 0) {
    throw std::invalid_argument(std::string(op) + ": empty dictionary");
  }
  if (f.size() != space.dim() || dict.dim() != space.dim()) {
    throw std::invalid_argument(std::string(op) + ": dimension mismatch");
  }
  if (m_max < 0) {
    throw std::invalid_argument(std::string(op) + ": m_max must be >= 0");
  }
}

std::vector<std::pair<std::size_t, double>> sorted_combination(
    const std::map<std::size_t, double>& acc) {
  std::vector<std::pair<std::size_t, double>> out(acc.begin(), acc.end());
  return out;
}

}  // namespace

GreedyTrace run_wcga(const SeqVector& f, const Dictionary& dict,
                     const WeaknessSequence& tau, int m_max,
                     const LqSpace& space, TieBreakMode policy,
                     double proj_tol) {
  require_instance(f, dict, m_max, space, "run_wcga");
  GreedyTrace trace;
  trace.algorithm = "wcga";
  trace.initial_residual_norm = norm(space, f);
  trace.final_approximant = SeqVector::Zero(f.size());
  trace.final_residual = f;
  if (trace.initial_residual_norm <= kZeroResidualTol) {
    trace.converged_exactly = true;
    return trace;
  }

  std::vector<SeqVector> span_atoms;
  std::vector<std::size_t> span_indices;
  std::vector<int> span_signs;
  SeqVector residual = f;
  Eigen::VectorXd prev_coeffs;
  ProjectionResult proj;

  for (int m = 1; m <= m_max; ++m) {
    const auto t0 = Clock::now();
    const DualFunctional F = norming_functional(space, residual);
    const double tk = tau.at(m);
    const DefectFn defect_of = [&](const SeqVector& candidate) {
      return projection_defect(candidate, span_atoms, space, proj_tol);
    };
    const Selection sel = greedy_select(dict, F, tk, policy, defect_of);
    const SeqVector phi = double(sel.sign) * dict.atom(sel.index);
    const double vm = projection_defect(phi, span_atoms, space, proj_tol);

    span_atoms.push_back(phi);
    span_indices.push_back(sel.index);
    span_signs.push_back(sel.sign);

    std::optional<Eigen::VectorXd> init;
    if (prev_coeffs.size() > 0) {
      Eigen::VectorXd padded = Eigen::VectorXd::Zero(span_atoms.size());
      padded.head(prev_coeffs.size()) = prev_coeffs;
      init = std::move(padded);
    }
    proj = space.is_hilbert()
               ? project_hilbert(f, span_atoms)
               : project_lq(f, span_atoms, space, proj_tol, 100000, init);
    prev_coeffs = proj.coefficients;

    TraceRow row;
    row.m = m;
    row.residual_norm = proj.residual_norm;
    row.atom_index = sel.index;
    row.atom_label = dict.label(sel.index);
    row.sign = sel.sign;
    row.greedy_value = sel.greedy_value;
    row.tk = tk;
    row.defect = vm;
    row.wall_clock_s = seconds_since(t0);
    trace.rows.push_back(std::move(row));

    residual = proj.residual;
    trace.final_approximant = proj.approximant;
    trace.final_residual = proj.residual;

    if (!proj.converged) {
      trace.truncated = true;
      trace.diagnostic = "projection solver did not converge at m=" +
                         std::to_string(m);
      break;
    }
    if (proj.residual_norm <= kZeroResidualTol) {
      trace.converged_exactly = true;
      break;
    }
  }

  std::map<std::size_t, double> acc;
  for (std::size_t j = 0; j < span_atoms.size(); ++j) {
    if (j < std::size_t(prev_coeffs.size())) {
      acc[span_indices[j]] += prev_coeffs[Eigen::Index(j)] * span_signs[j];
    }
  }
  trace.combination = sorted_combination(acc);
  return trace;
}

GreedyTrace run_oga(const SeqVector& f, const Dictionary& dict, int m_max,
                    TieBreakMode policy) {
  const LqSpace space(2.0, int(f.size()));
  GreedyTrace trace =
      run_wcga(f, dict, WeaknessSequence::ones(), m_max, space, policy);
  trace.algorithm = "oga";
  return trace;
}

GreedyTrace run_rga(const SeqVector& f, const Dictionary& dict, int m_max,
                    TieBreakMode policy) {
  const LqSpace space(2.0, int(f.size()));
  require_instance(f, dict, m_max, space, "run_rga");
  GreedyTrace trace;
  trace.algorithm = "rga";
  trace.initial_residual_norm = f.norm();
  trace.final_approximant = SeqVector::Zero(f.size());
  trace.final_residual = f;
  if (trace.initial_residual_norm <= kZeroResidualTol) {
    trace.converged_exactly = true;
    return trace;
  }

  SeqVector approximant = SeqVector::Zero(f.size());
  SeqVector residual = f;
  std::map<std::size_t, double> acc;

  for (int m = 1; m <= m_max; ++m) {
    const auto t0 = Clock::now();
    const DualFunctional F = norming_functional(space, residual);
    const Selection sel = greedy_select(dict, F, 1.0, policy);
    const double weight = 1.0 / double(m + 1);

    approximant *= 1.0 - weight;
    approximant += weight * double(sel.sign) * dict.atom(sel.index);
    for (auto& [idx, coeff] : acc) coeff *= 1.0 - weight;
    acc[sel.index] += weight * double(sel.sign);

    residual = f - approximant;

    TraceRow row;
    row.m = m;
    row.residual_norm = residual.norm();
    row.atom_index = sel.index;
    row.atom_label = dict.label(sel.index);
    row.sign = sel.sign;
    row.greedy_value = sel.greedy_value;
    row.tk = 1.0;
    row.wall_clock_s = seconds_since(t0);
    trace.rows.push_back(std::move(row));

    trace.final_approximant = approximant;
    trace.final_residual = residual;
    if (trace.rows.back().residual_norm <= kZeroResidualTol) {
      trace.converged_exactly = true;
      break;
    }
  }
  trace.combination = sorted_combination(acc);
  return trace;
}

GreedyTrace run_wgafr(const SeqVector& f, const Dictionary& dict,
                      const WeaknessSequence& tau, int m_max,
                      const LqSpace& space, TieBreakMode policy,
                      double proj_tol) {
  require_instance(f, dict, m_max, space, "run_wgafr");
  GreedyTrace trace;
  trace.algorithm = "wgafr";
  trace.initial_residual_norm = norm(space, f);
  trace.final_approximant = SeqVector::Zero(f.size());
  trace.final_residual = f;
  if (trace.initial_residual_norm <= kZeroResidualTol) {
    trace.converged_exactly = true;
    return trace;
  }

  SeqVector approximant = SeqVector::Zero(f.size());
  SeqVector residual = f;
  SeqVector prev_phi;        // phi_{m-1}
  SeqVector prev_prev_g;     // G_{m-2}
  std::map<std::size_t, double> acc;

  for (int m = 1; m <= m_max; ++m) {
    const auto t0 = Clock::now();
    const DualFunctional F = norming_functional(space, residual);
    const double tk = tau.at(m);

    std::vector<SeqVector> defect_span;
    if (m >= 2) {
      defect_span.push_back(prev_phi);
      defect_span.push_back(prev_prev_g);  // zero at m = 2, dropped as rank-deficient
    }
    const DefectFn defect_of = [&](const SeqVector& candidate) {
      return projection_defect(candidate, defect_span, space, proj_tol);
    };
    const Selection sel = greedy_select(dict, F, tk, policy, defect_of);
    const SeqVector phi = double(sel.sign) * dict.atom(sel.index);
    const double um = projection_defect(phi, defect_span, space, proj_tol);

    // Best update over span(G_{m-1}, phi_m); coefficients (1, 0) reproduce
    // G_{m-1}, so the residual never increases.
    const std::vector<SeqVector> update_span = {approximant, phi};
    Eigen::VectorXd keep(2);
    keep << 1.0, 0.0;
    const ProjectionResult proj =
        space.is_hilbert()
            ? project_hilbert(f, update_span)
            : project_lq(f, update_span, space, proj_tol, 100000, keep);

    const double scale = proj.coefficients[0];
    const double lambda = proj.coefficients[1];
    for (auto& [idx, coeff] : acc) coeff *= scale;
    acc[sel.index] += lambda * double(sel.sign);

    prev_prev_g = approximant;
    prev_phi = phi;
    approximant = proj.approximant;
    residual = proj.residual;

    TraceRow row;
    row.m = m;
    row.residual_norm = proj.residual_norm;
    row.atom_index = sel.index;
    row.atom_label = dict.label(sel.index);
    row.sign = sel.sign;
    row.greedy_value = sel.greedy_value;
    row.tk = tk;
    row.defect = um;
    row.wall_clock_s = seconds_since(t0);
    trace.rows.push_back(std::move(row));

    trace.final_approximant = approximant;
    trace.final_residual = residual;

    if (!proj.converged) {
      trace.truncated = true;
      trace.diagnostic = "relaxation solver did not converge at m=" +
                         std::to_string(m);
      break;
    }
    if (proj.residual_norm <= kZeroResidualTol) {
      trace.converged_exactly = true;
      break;
    }
  }
  trace.combination = sorted_combination(acc);
  return trace;
}

double A1Representation::mass() const {
  double s = 0.0;
  for (const auto& t : terms) s += std::abs(t.coeff);
  return s;
}

SeqVector synthesize(const A1Representation& rep, const Dictionary& dict) {
  SeqVector f = SeqVector::Zero(dict.dim());
  for (const auto& t : rep.terms) {
    f += t.coeff * dict.atom(t.atom_index);
  }
  return f;
}

Al1Approximant build_al1_approximant(const A1Representation& rep,
                                     const Dictionary& dict, int m,
                                     const LqSpace& space,
                                     TieBreakMode policy) {
  if (!space.is_hilbert()) {
    throw std::invalid_argument(
        "build_al1_approximant: the inner relaxed greedy stage requires q = 2");
  }
  if (m < 1) throw std::invalid_argument("build_al1_approximant: m >= 1");
  if (rep.mass() > 1.0 + 1e-12) {
    throw std::invalid_argument(
        "build_al1_approximant: representation mass exceeds 1");
  }
  for (const auto& t : rep.terms) {
    if (t.atom_index >= dict.size()) {
      throw std::invalid_argument("build_al1_approximant: atom index out of range");
    }
  }

  const SeqVector f = synthesize(rep, dict);
  const std::size_t head = std::min<std::size_t>(std::size_t(m), rep.terms.size());

  Al1Approximant out;
  out.s = SeqVector::Zero(dict.dim());
  double beta = 0.0;
  for (std::size_t i = 0; i < rep.terms.size(); ++i) {
    if (i < head) {
      out.s += rep.terms[i].coeff * dict.atom(rep.terms[i].atom_index);
      out.combination.terms.push_back(rep.terms[i]);
    } else {
      beta += std::abs(rep.terms[i].coeff);
    }
  }
  out.beta = beta;
  if (beta == 0.0) return out;  // finite representation: s = f exactly

  const SeqVector h = (f - out.s) / beta;
  const GreedyTrace inner = run_rga(h, dict, m, policy);
  out.s += beta * inner.final_approximant;
  for (const auto& [idx, coeff] : inner.combination) {
    out.combination.terms.push_back({idx, beta * coeff});
  }
  return out;
}

}  // namespace gsparse
