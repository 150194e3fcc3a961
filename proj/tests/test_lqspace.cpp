#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "greedy_sparse/lq_space.hpp"
#include "greedy_sparse/rng.hpp"

using namespace gsparse;

namespace {

SeqVector vec(std::initializer_list<double> vals, int dim) {
  SeqVector v = SeqVector::Zero(dim);
  int i = 0;
  for (double x : vals) v[i++] = x;
  return v;
}

SeqVector random_vector(std::mt19937_64& gen, int dim) {
  SeqVector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = gaussian(gen);
  return v;
}

}  // namespace

TEST_CASE("space construction validates its parameters") {
  CHECK_NOTHROW(LqSpace(2.0, 4));
  CHECK_NOTHROW(LqSpace(1.0001, 4));
  CHECK_THROWS(LqSpace(1.0, 4));
  CHECK_THROWS(LqSpace(2.5, 4));
  CHECK_THROWS(LqSpace(0.5, 4));
  CHECK_THROWS(LqSpace(2.0, 0));
  // gamma * 2^q >= 1 is enforced
  CHECK_THROWS(LqSpace(2.0, 4, 0.2));
  CHECK_NOTHROW(LqSpace(2.0, 4, 0.25));
  CHECK_THROWS(LqSpace(1.5, 4, -1.0));
}

TEST_CASE("dual exponent satisfies 1/p + 1/q = 1") {
  for (double q : {1.1, 1.2, 1.5, 1.8, 1.999, 2.0}) {
    const LqSpace space(q, 3);
    CHECK(std::abs(1.0 / space.p() + 1.0 / space.q() - 1.0) <= 1e-12);
  }
  CHECK(LqSpace(2.0, 3).gamma() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(LqSpace(1.5, 3).gamma() == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("norm on closed-form inputs") {
  const LqSpace l2(2.0, 4);
  CHECK(norm(l2, vec({3.0, 4.0}, 4)) == doctest::Approx(5.0).epsilon(1e-12));

  const LqSpace l15(1.5, 4);
  CHECK(norm(l15, vec({1.0, 1.0}, 4)) ==
        doctest::Approx(std::pow(2.0, 2.0 / 3.0)).epsilon(1e-12));

  for (double q : {1.2, 1.5, 2.0}) {
    CHECK(norm(LqSpace(q, 4), SeqVector::Zero(4)) == 0.0);
  }
}

TEST_CASE("norm rejects bad input") {
  const LqSpace space(2.0, 4);
  CHECK_THROWS(norm(space, SeqVector::Zero(3)));
  SeqVector bad = SeqVector::Zero(4);
  bad[1] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS(norm(space, bad));
}

TEST_CASE("norm homogeneity over random inputs") {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 200; ++trial) {
    const double q = uniform(gen, 1.05, 2.0);
    const LqSpace space(q, 8);
    const SeqVector v = random_vector(gen, 8);
    const double c = uniform(gen, -5.0, 5.0);
    CHECK(norm(space, c * v) ==
          doctest::Approx(std::abs(c) * norm(space, v)).epsilon(1e-12));
  }
}

TEST_CASE("norming functional on closed-form inputs") {
  const int n = 4;
  SUBCASE("single coordinate, q = 1.5") {
    const LqSpace space(1.5, n);
    const auto F = norming_functional(space, vec({1.0}, n));
    CHECK(F.weights[0] == doctest::Approx(1.0).epsilon(1e-15));
    for (int i = 1; i < n; ++i) CHECK(F.weights[i] == 0.0);
  }
  SUBCASE("two equal coordinates, q = 2") {
    const LqSpace space(2.0, n);
    const auto F = norming_functional(space, vec({1.0, 1.0}, n));
    CHECK(F.weights[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(F.weights[1] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  }
  SUBCASE("q = 1.5, f = (2,1): both defining identities hold") {
    const LqSpace space(1.5, n);
    const SeqVector f = vec({2.0, 1.0}, n);
    const auto F = norming_functional(space, f);
    // oracle: evaluate the two defining equations directly (p = 3 here)
    double wp = 0.0;
    for (int i = 0; i < n; ++i) wp += std::pow(std::abs(F.weights[i]), space.p());
    CHECK(std::pow(wp, 1.0 / space.p()) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(F(f) == doctest::Approx(norm(space, f)).epsilon(1e-12));
  }
  SUBCASE("zero input is rejected") {
    const LqSpace space(1.5, n);
    CHECK_THROWS_WITH(norming_functional(space, SeqVector::Zero(n)),
                      doctest::Contains("undefined at zero"));
  }
}

TEST_CASE("norming functional invariants over random inputs") {
  std::mt19937_64 gen(11);
  for (double q : {1.15, 1.5, 1.8, 2.0}) {
    const LqSpace space(q, 10);
    for (int trial = 0; trial < 100; ++trial) {
      const SeqVector f = random_vector(gen, 10) * uniform(gen, 0.01, 10.0);
      const auto F = norming_functional(space, f);
      double wp = 0.0;
      for (int i = 0; i < 10; ++i) {
        wp += std::pow(std::abs(F.weights[i]), space.p());
      }
      CHECK(std::pow(wp, 1.0 / space.p()) ==
            doctest::Approx(1.0).epsilon(1e-9));
      CHECK(F(f) == doctest::Approx(norm(space, f)).epsilon(1e-9));
    }
  }
}

TEST_CASE("duality alignment in l2") {
  std::mt19937_64 gen(13);
  const LqSpace space(2.0, 6);
  for (int trial = 0; trial < 50; ++trial) {
    const SeqVector f = random_vector(gen, 6);
    const auto F = norming_functional(space, f);
    const SeqVector expected = f / f.norm();
    for (int i = 0; i < 6; ++i) {
      CHECK(F.weights[i] == doctest::Approx(expected[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("collinear pairs have zero smoothness value for u <= 1") {
  const LqSpace space(1.5, 5);
  SeqVector x = vec({0.3, -0.2, 0.1}, 5);
  x /= norm(space, x);
  for (double u : {0.1, 0.5, 1.0}) {
    CHECK(modulus_pair_value(space, x, x, u) ==
          doctest::Approx(0.0).epsilon(1e-14));
  }
}

TEST_CASE("sampled modulus never exceeds gamma u^q") {
  for (double q : {1.3, 1.5, 2.0}) {
    const LqSpace space(q, 8);  // gamma = 1/q
    for (double u : {0.1, 0.25, 0.5, 1.0}) {
      const double est = estimate_modulus(space, u, 400, 42);
      CHECK(est >= 0.0);
      CHECK(est <= space.gamma() * std::pow(u, q) + 1e-12);
    }
  }
}

TEST_CASE("sampled modulus at u = 2 stays below gamma 2^q") {
  const LqSpace space(2.0, 8);
  const double est = estimate_modulus(space, 2.0, 400, 7);
  CHECK(est <= space.gamma() * 4.0 + 1e-12);
}

TEST_CASE("modulus estimate is deterministic and validated") {
  const LqSpace space(1.5, 6);
  CHECK(estimate_modulus(space, 0.5, 100, 3) ==
        estimate_modulus(space, 0.5, 100, 3));
  CHECK_THROWS(estimate_modulus(space, 0.0, 100, 3));
  CHECK_THROWS(estimate_modulus(space, 0.5, 0, 3));
}
