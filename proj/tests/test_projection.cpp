#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "greedy_sparse/dictionary.hpp"
#include "greedy_sparse/projection.hpp"
#include "greedy_sparse/rng.hpp"

using namespace gsparse;

namespace {

// Independent 1-D oracle: coarse grid then golden-section refinement.
double golden_min_1d(const std::function<double(double)>& fn, double lo,
                     double hi) {
  constexpr int kGrid = 2000;
  double best = fn(lo);
  int best_i = 0;
  for (int i = 1; i <= kGrid; ++i) {
    const double x = lo + (hi - lo) * double(i) / kGrid;
    const double v = fn(x);
    if (v < best) {
      best = v;
      best_i = i;
    }
  }
  double a = lo + (hi - lo) * double(std::max(0, best_i - 1)) / kGrid;
  double b = lo + (hi - lo) * double(std::min(kGrid, best_i + 1)) / kGrid;
  constexpr double invphi = 0.6180339887498949;
  double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
  double f1 = fn(x1), f2 = fn(x2);
  for (int it = 0; it < 200; ++it) {
    if (f1 < f2) {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = fn(x1);
    } else {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = fn(x2);
    }
  }
  return std::min(f1, f2);
}

SeqVector random_vector(std::mt19937_64& gen, int dim) {
  SeqVector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = gaussian(gen);
  return v;
}

}  // namespace

TEST_CASE("hilbert projection on the bt1 instance") {
  const auto [dict, f] = build_bt1(8);
  std::vector<SeqVector> span(dict.atoms().begin(), dict.atoms().begin() + 3);
  const auto proj = project_hilbert(f, span);
  for (int i = 0; i < 3; ++i) {
    CHECK(proj.coefficients[i] == doctest::Approx(0.25).epsilon(1e-12));
  }
  CHECK(proj.residual_norm ==
        doctest::Approx(1.0 / std::sqrt(8.0)).epsilon(1e-12));
  CHECK_FALSE(proj.rank_deficient);
  // orthogonality of the residual
  for (const auto& atom : span) {
    CHECK(std::abs(proj.residual.dot(atom)) <= 1e-10);
  }
}

TEST_CASE("hilbert projection edge cases") {
  std::mt19937_64 gen(3);
  const SeqVector f = random_vector(gen, 5);
  SUBCASE("empty span returns f") {
    const auto proj = project_hilbert(f, {});
    CHECK(proj.residual_norm == doctest::Approx(f.norm()).epsilon(1e-15));
    CHECK(proj.approximant.norm() == 0.0);
  }
  SUBCASE("f in span gives zero residual") {
    const std::vector<SeqVector> span = {f};
    const auto proj = project_hilbert(f, span);
    CHECK(proj.residual_norm <= 1e-12);
    CHECK(proj.coefficients[0] == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("duplicate atoms are dropped deterministically") {
    const SeqVector a = random_vector(gen, 5);
    const std::vector<SeqVector> span = {a, a, f};
    const auto proj = project_hilbert(f, span);
    CHECK(proj.rank_deficient);
    CHECK(proj.coefficients[1] == 0.0);  // the second copy is the dropped one
    CHECK(proj.residual_norm <= 1e-12);
  }
  SUBCASE("zero atom is dropped") {
    const std::vector<SeqVector> span = {SeqVector::Zero(5)};
    const auto proj = project_hilbert(f, span);
    CHECK(proj.rank_deficient);
    CHECK(proj.residual_norm == doctest::Approx(f.norm()).epsilon(1e-15));
  }
}

TEST_CASE("lq projection on the btq instance, single atom") {
  const double q = 1.5;
  const LqSpace space(q, 6);
  const auto [dict, f] = build_btq(6, q);
  const std::vector<SeqVector> span = {dict.atom(0)};
  const auto proj = project_lq(f, span, space);
  CHECK(proj.converged);
  CHECK(proj.coefficients[0] == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(proj.residual_norm == doctest::Approx(0.5).epsilon(1e-9));

  // oracle: 1-D convex problem min_c 2^{-1/q}(|1-c|^q + |c|^q)^{1/q}
  const double oracle = golden_min_1d(
      [&](double c) {
        SeqVector r = f - c * dict.atom(0);
        return norm(space, r);
      },
      -2.0, 2.0);
  CHECK(proj.residual_norm == doctest::Approx(oracle).epsilon(1e-9));
}

TEST_CASE("lq projection reaches the symmetric optimum on btq spans") {
  for (double q : {1.2, 1.5, 1.8}) {
    const LqSpace space(q, 10);
    const auto [dict, f] = build_btq(10, q);
    std::vector<SeqVector> span;
    for (int m = 1; m <= 6; ++m) {
      span.push_back(dict.atom(std::size_t(m) - 1));
      const auto proj = project_lq(f, span, space);
      const double expected =
          std::pow(2.0, -1.0 / q) * std::pow(m + 1, -1.0 / space.p());
      CHECK(proj.converged);
      CHECK(proj.residual_norm == doctest::Approx(expected).epsilon(1e-9));
      for (int i = 0; i < m; ++i) {
        CHECK(proj.coefficients[i] ==
              doctest::Approx(1.0 / (m + 1)).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("lq projection edge cases") {
  const LqSpace space(1.5, 5);
  std::mt19937_64 gen(5);
  const SeqVector f = random_vector(gen, 5);
  SUBCASE("f in span") {
    const std::vector<SeqVector> span = {f};
    const auto proj = project_lq(f, span, space);
    CHECK(proj.converged);
    CHECK(proj.residual_norm <= 1e-12);
    CHECK(proj.coefficients[0] == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("empty span") {
    const auto proj = project_lq(f, {}, space);
    CHECK(proj.residual_norm == doctest::Approx(norm(space, f)).epsilon(1e-15));
  }
  SUBCASE("bad tolerance") {
    CHECK_THROWS(project_lq(f, {}, space, 0.0));
  }
}

TEST_CASE("lq optimality certificate: residual functional annihilates the span") {
  std::mt19937_64 gen(17);
  const double tol = 1e-10;
  for (int trial = 0; trial < 30; ++trial) {
    const double q = uniform(gen, 1.15, 1.95);
    const LqSpace space(q, 8);
    const Dictionary dict = random_dictionary(space, 8, gen());
    std::vector<SeqVector> span;
    for (int j = 0; j < 4; ++j) span.push_back(dict.atom(std::size_t(j)));
    const SeqVector f = random_vector(gen, 8);
    const auto proj = project_lq(f, span, space, tol);
    REQUIRE(proj.converged);
    if (proj.residual_norm <= kZeroResidualTol) continue;
    const auto F = norming_functional(space, proj.residual);
    for (const auto& atom : span) {
      CHECK(std::abs(F(atom)) <= tol * 10.0);
    }
  }
}

TEST_CASE("lq projection agrees with hilbert as q -> 2") {
  std::mt19937_64 gen(19);
  const LqSpace space(1.999, 8);
  for (int trial = 0; trial < 20; ++trial) {
    const Dictionary dict = random_dictionary(space, 6, gen());
    std::vector<SeqVector> span;
    for (int j = 0; j < 3; ++j) span.push_back(dict.atom(std::size_t(j)));
    const SeqVector f = random_vector(gen, 8);
    const auto lq = project_lq(f, span, space);
    const auto h = project_hilbert(f, span);
    REQUIRE(lq.converged);
    // compare both minimizers through the l2 lens: second-order flatness
    const double e2 = (f - lq.approximant).norm();
    CHECK(std::abs(e2 - h.residual_norm) <= 1e-6 * std::max(h.residual_norm, 1e-12));
  }
}

TEST_CASE("adding an atom never increases the lq residual") {
  std::mt19937_64 gen(31);
  const double tol = 1e-10;
  for (int trial = 0; trial < 20; ++trial) {
    const double q = uniform(gen, 1.2, 1.95);
    const LqSpace space(q, 8);
    const Dictionary dict = random_dictionary(space, 6, gen());
    const SeqVector f = random_vector(gen, 8);
    std::vector<SeqVector> span;
    double prev = norm(space, f);
    for (int j = 0; j < 5; ++j) {
      span.push_back(dict.atom(std::size_t(j)));
      const auto proj = project_lq(f, span, space, tol);
      CHECK(proj.residual_norm <= prev + 2.0 * tol);
      prev = proj.residual_norm;
    }
  }
}

TEST_CASE("projection defect") {
  const auto [dict, f] = build_bt1(8);
  const LqSpace space(2.0, 8);
  SUBCASE("empty span gives the atom norm") {
    CHECK(projection_defect(dict.atom(0), {}, space) ==
          doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("atom in span gives zero") {
    const std::vector<SeqVector> span = {dict.atom(0)};
    CHECK(projection_defect(dict.atom(0), span, space) <= 1e-12);
  }
  SUBCASE("bt1: defect of g2 against g1 is sqrt(3)/2") {
    const std::vector<SeqVector> span = {dict.atom(0)};
    CHECK(projection_defect(dict.atom(1), span, space) ==
          doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-12));
  }
  SUBCASE("oversized atoms are rejected") {
    CHECK_THROWS(projection_defect(2.0 * dict.atom(0), {}, space));
  }
}

TEST_CASE("defects of unit atoms stay within [0, 1]") {
  std::mt19937_64 gen(37);
  for (int trial = 0; trial < 30; ++trial) {
    const double q = trial % 2 == 0 ? 2.0 : uniform(gen, 1.2, 1.95);
    const LqSpace space(q, 6);
    const Dictionary dict = random_dictionary(space, 8, gen());
    std::vector<SeqVector> span;
    for (int j = 0; j < 3; ++j) span.push_back(dict.atom(std::size_t(j)));
    const double d = projection_defect(dict.atom(5), span, space);
    CHECK(d >= 0.0);
    CHECK(d <= 1.0 + 1e-12);
  }
}
