#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "greedy_sparse/dictionary.hpp"
#include "greedy_sparse/rng.hpp"

using namespace gsparse;

namespace {

const double kSqrt2 = std::sqrt(2.0);

struct TempFile {
  std::filesystem::path path;
  explicit TempFile(const std::string& contents) {
    path = std::filesystem::temp_directory_path() /
           ("gsparse_dict_" + std::to_string(std::rand()) + ".csv");
    std::ofstream out(path);
    out << contents;
  }
  ~TempFile() { std::filesystem::remove(path); }
};

}  // namespace

TEST_CASE("bt1 construction") {
  CHECK_THROWS(build_bt1(2));
  const auto [dict, f] = build_bt1(4);
  const LqSpace space(2.0, 4);
  REQUIRE(dict.size() == 3);
  check_unit_norms(dict, space);

  // g_1 = (-1/sqrt2, 1/sqrt2, 0, 0)
  CHECK(dict.atom(0)[0] == doctest::Approx(-1.0 / kSqrt2).epsilon(1e-15));
  CHECK(dict.atom(0)[1] == doctest::Approx(1.0 / kSqrt2).epsilon(1e-15));
  CHECK(dict.atom(0)[2] == 0.0);
  CHECK(dict.label(0) == "g1");

  CHECK(f.norm() == doctest::Approx(1.0 / kSqrt2).epsilon(1e-15));
  CHECK(dict.atom(0).dot(dict.atom(1)) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("btq construction") {
  CHECK_THROWS(build_btq(8, 2.0));
  CHECK_THROWS(build_btq(8, 1.0));
  const double q = 1.5;
  const auto [dict, f] = build_btq(4, q);
  const LqSpace space(q, 4);
  check_unit_norms(dict, space);
  CHECK(norm(space, f) == doctest::Approx(std::pow(2.0, -1.0 / q)).epsilon(1e-15));
  // f + 2^{-1/q} e_1 = 0
  SeqVector shifted = f;
  shifted[0] += std::pow(2.0, -1.0 / q);
  CHECK(shifted.norm() == 0.0);
}

TEST_CASE("bt3 construction") {
  CHECK_THROWS(build_bt3(3));
  const auto [dict, f] = build_bt3(6);
  const LqSpace space(2.0, 6);
  REQUIRE(dict.size() == 6);  // u1, u2, g1..g4
  check_unit_norms(dict, space);
  CHECK(dict.label(0) == "u1");
  CHECK(dict.label(1) == "u2");
  CHECK(dict.label(2) == "g1");

  // f = (u1+u2)/2 exactly, and f = -e_2/sqrt2
  const SeqVector expect = (dict.atom(0) + dict.atom(1)) / 2.0;
  CHECK((f - expect).norm() == 0.0);
  CHECK(f[1] == doctest::Approx(-1.0 / kSqrt2).epsilon(1e-15));
  CHECK(f[0] == 0.0);

  // the tie the adversarial realization exploits
  CHECK(f.dot(dict.atom(2)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(f.dot(dict.atom(0)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(dict.atom(1).norm() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("br1 construction") {
  CHECK_THROWS(build_br1(3, 0.1));
  CHECK_THROWS(build_br1(8, 0.0));
  CHECK_THROWS(build_br1(8, 1.0 / kSqrt2));

  const double delta = 0.1;
  const auto [dict, f] = build_br1(8, delta);
  const LqSpace space(2.0, 8);
  check_unit_norms(dict, space, 1e-12);

  // delta' solves the normalization constraint in closed form
  const double dprime =
      std::sqrt(1.0 - (1.0 / kSqrt2 - delta) * (1.0 / kSqrt2 - delta)) -
      1.0 / kSqrt2;
  CHECK(dict.atom(0)[0] == doctest::Approx(1.0 / kSqrt2 + dprime).epsilon(1e-15));
  CHECK(dict.atom(0)[1] == doctest::Approx(-1.0 / kSqrt2 + delta).epsilon(1e-15));

  // first coordinates cancel: f is supported on coordinate 2 only
  CHECK(f[0] == 0.0);
  CHECK(f[1] == doctest::Approx(-1.0 / kSqrt2 + delta).epsilon(1e-15));
  for (int i = 2; i < 8; ++i) CHECK(f[i] == 0.0);

  // continuity at the excluded endpoint: delta -> 0 recovers bt3's u-atoms
  const auto [dict0, f0] = build_br1(8, 1e-9);
  const auto [dict3, f3] = build_bt3(8);
  CHECK((dict0.atom(0) - dict3.atom(0)).norm() <= 1e-8);
  CHECK((dict0.atom(1) - dict3.atom(1)).norm() <= 1e-8);
}

TEST_CASE("csv loading") {
  const LqSpace space(2.0, 2);
  SUBCASE("orthonormal pair with autogenerated labels") {
    TempFile file("# label,coords\n1,0\n0,1\n");
    const Dictionary dict = load_dictionary(file.path, space);
    REQUIRE(dict.size() == 2);
    CHECK(dict.label(0) == "a1");
    CHECK(dict.label(1) == "a2");
    CHECK(dict.atom(0)[0] == 1.0);
    CHECK(dict.atom(1)[1] == 1.0);
  }
  SUBCASE("labelled rows are renormalized") {
    TempFile file("u1,3,4\n");
    const LqSpace s2(2.0, 2);
    const Dictionary dict = load_dictionary(file.path, s2);
    CHECK(dict.label(0) == "u1");
    CHECK(dict.atom(0).norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(dict.atom(0)[0] == doctest::Approx(0.6).epsilon(1e-12));
  }
  SUBCASE("malformed value") {
    TempFile file("1,oops\n");
    CHECK_THROWS_WITH(load_dictionary(file.path, space),
                      doctest::Contains("malformed"));
  }
  SUBCASE("zero atom") {
    TempFile file("0,0\n");
    CHECK_THROWS_WITH(load_dictionary(file.path, space),
                      doctest::Contains("zero atom"));
  }
  SUBCASE("dimension mismatch") {
    TempFile file("1,0,0\n");
    CHECK_THROWS(load_dictionary(file.path, space));
  }
  SUBCASE("missing file") {
    CHECK_THROWS(load_dictionary("/nonexistent/dict.csv", space));
  }
}

TEST_CASE("random dictionaries are deterministic and unit norm") {
  const LqSpace space(1.5, 8);
  const Dictionary a = random_dictionary(space, 20, 1);
  const Dictionary b = random_dictionary(space, 20, 1);
  REQUIRE(a.size() == 20);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK((a.atom(i) - b.atom(i)).norm() == 0.0);
    CHECK(norm(space, a.atom(i)) == doctest::Approx(1.0).epsilon(1e-12));
  }
  const Dictionary c = random_dictionary(space, 20, 2);
  CHECK((a.atom(0) - c.atom(0)).norm() > 0.0);
}

TEST_CASE("greedy selection on the bt3 tie") {
  const auto [dict, f] = build_bt3(8);
  const LqSpace space(2.0, 8);
  const auto F = norming_functional(space, f);

  SUBCASE("prefer-g-ascending picks g1 at the all-atom tie") {
    const Selection sel =
        greedy_select(dict, F, 1.0, TieBreakMode::PreferGAscending);
    CHECK(dict.label(sel.index) == "g1");
    CHECK(sel.sign == 1);
    CHECK(sel.greedy_value == doctest::Approx(1.0 / kSqrt2).epsilon(1e-12));
  }
  SUBCASE("lowest-index picks u1 instead") {
    const Selection sel =
        greedy_select(dict, F, 1.0, TieBreakMode::LowestIndex);
    CHECK(dict.label(sel.index) == "u1");
  }
  SUBCASE("after n adversarial steps g_{n+1} is selected") {
    const int n = 3;
    SeqVector residual = SeqVector::Zero(8);
    for (int k = 2; k <= n + 2; ++k) {
      residual[k - 1] = -1.0 / (kSqrt2 * (n + 1));
    }
    const auto Fr = norming_functional(space, residual);
    const Selection sel =
        greedy_select(dict, Fr, 1.0, TieBreakMode::PreferGAscending);
    CHECK(dict.label(sel.index) == "g" + std::to_string(n + 1));
  }
}

TEST_CASE("greedy selection basics") {
  std::vector<SeqVector> atoms = {SeqVector::Zero(3), SeqVector::Zero(3)};
  atoms[0][0] = 1.0;
  atoms[1][1] = 1.0;
  const Dictionary dict(std::move(atoms), {"e1", "e2"});
  const LqSpace space(2.0, 3);

  SeqVector f = SeqVector::Zero(3);
  f[0] = 1.0;
  const auto F = norming_functional(space, f);
  const Selection sel = greedy_select(dict, F, 1.0, TieBreakMode::LowestIndex);
  CHECK(sel.index == 0);
  CHECK(sel.sign == 1);
  CHECK(sel.greedy_value == doctest::Approx(1.0).epsilon(1e-14));

  SUBCASE("symmetric closure flips the sign") {
    const auto Fneg = norming_functional(space, SeqVector(-f));
    const Selection s = greedy_select(dict, Fneg, 1.0, TieBreakMode::LowestIndex);
    CHECK(s.index == 0);
    CHECK(s.sign == -1);
    CHECK(s.achieved == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("t = 0 admits the first atom deterministically") {
    SeqVector g = SeqVector::Zero(3);
    g[1] = 1.0;
    const auto Fg = norming_functional(space, g);
    const Selection s = greedy_select(dict, Fg, 0.0, TieBreakMode::LowestIndex);
    CHECK(s.index == 0);
  }
  SUBCASE("empty dictionary and bad t are rejected") {
    CHECK_THROWS(greedy_select(Dictionary(), F, 1.0, TieBreakMode::LowestIndex));
    CHECK_THROWS(greedy_select(dict, F, -0.1, TieBreakMode::LowestIndex));
    CHECK_THROWS(greedy_select(dict, F, 1.1, TieBreakMode::LowestIndex));
  }
  SUBCASE("v-minimizing needs a callback and honors it") {
    CHECK_THROWS(greedy_select(dict, F, 0.0, TieBreakMode::VMinimizing));
    // defect callback favoring e2 even though e1 has the larger value
    const DefectFn defect = [&](const SeqVector& atom) {
      return atom[1] != 0.0 ? 0.0 : 1.0;
    };
    const Selection s =
        greedy_select(dict, F, 0.0, TieBreakMode::VMinimizing, defect);
    CHECK(s.index == 1);
  }
}

TEST_CASE("weak-greedy certificate over random instances") {
  std::mt19937_64 gen(23);
  for (int trial = 0; trial < 100; ++trial) {
    const double q = uniform(gen, 1.1, 2.0);
    const LqSpace space(q, 6);
    const Dictionary dict = random_dictionary(space, 12, gen());
    SeqVector f(6);
    for (int i = 0; i < 6; ++i) f[i] = gaussian(gen);
    const auto F = norming_functional(space, f);
    const double t = uniform(gen, 0.0, 1.0);
    for (TieBreakMode mode :
         {TieBreakMode::LowestIndex, TieBreakMode::PreferGAscending}) {
      const Selection sel = greedy_select(dict, F, t, mode);
      CHECK(sel.achieved >= t * sel.greedy_value - 1e-12);
    }
  }
}

TEST_CASE("dual dictionary norm is symmetric under atom negation") {
  std::mt19937_64 gen(29);
  const LqSpace space(2.0, 5);
  const Dictionary dict = random_dictionary(space, 8, 77);
  SeqVector f(5);
  for (int i = 0; i < 5; ++i) f[i] = gaussian(gen);
  const auto F = norming_functional(space, f);
  const double base =
      greedy_select(dict, F, 1.0, TieBreakMode::LowestIndex).greedy_value;

  std::vector<SeqVector> flipped(dict.atoms());
  flipped[3] = -flipped[3];
  const Dictionary dict2 = Dictionary::with_auto_labels(std::move(flipped));
  const double again =
      greedy_select(dict2, F, 1.0, TieBreakMode::LowestIndex).greedy_value;
  CHECK(base == doctest::Approx(again).epsilon(1e-14));
}

TEST_CASE("initial dual norm of bt1/bt3 instances is 1/sqrt(2)") {
  for (bool three : {false, true}) {
    const auto [dict, f] = three ? build_bt3(8) : build_bt1(8);
    const LqSpace space(2.0, 8);
    const auto F = norming_functional(space, f);
    const Selection sel = greedy_select(dict, F, 1.0, TieBreakMode::LowestIndex);
    CHECK(sel.greedy_value == doctest::Approx(1.0 / kSqrt2).epsilon(1e-12));
    // every atom ties at the first step
    for (std::size_t i = 0; i < dict.size(); ++i) {
      CHECK(std::abs(F(dict.atom(i))) ==
            doctest::Approx(1.0 / kSqrt2).epsilon(1e-12));
    }
  }
}

TEST_CASE("selection is deterministic") {
  const auto [dict, f] = build_bt3(10);
  const LqSpace space(2.0, 10);
  const auto F = norming_functional(space, f);
  for (TieBreakMode mode :
       {TieBreakMode::LowestIndex, TieBreakMode::PreferGAscending}) {
    const Selection a = greedy_select(dict, F, 0.5, mode);
    const Selection b = greedy_select(dict, F, 0.5, mode);
    CHECK(a.index == b.index);
    CHECK(a.sign == b.sign);
  }
}

TEST_CASE("policy names round-trip") {
  for (TieBreakMode mode :
       {TieBreakMode::LowestIndex, TieBreakMode::PreferGAscending,
        TieBreakMode::VMinimizing}) {
    CHECK(tie_break_from_string(to_string(mode)) == mode);
  }
  CHECK_THROWS(tie_break_from_string("nonsense"));
}
