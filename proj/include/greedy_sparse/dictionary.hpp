/**
 * @file dictionary.hpp
 * @brief Symmetric dictionaries as indexed atom families: the four explicit
 *        counterexample constructions, CSV/random sources, and greedy atom
 *        selection with pluggable tie-breaking.
 */
#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "greedy_sparse/lq_space.hpp"

namespace gsparse {

/// How a greedy step resolves among atoms meeting the weakness threshold.
///
///  - LowestIndex: smallest atom index meeting the threshold.
///  - PreferGAscending: smallest-index "g"-labelled atom among the exact
///    maximizers (the adversarial realization of the counterexample runs).
///  - VMinimizing: among threshold-meeting atoms, one minimizing the
///    projection defect supplied by a callback.
enum class TieBreakMode { LowestIndex, PreferGAscending, VMinimizing };

TieBreakMode tie_break_from_string(std::string_view name);
std::string to_string(TieBreakMode mode);

/// Two greedy values are treated as tied when they differ by at most this.
inline constexpr double kTieTol = 1e-10;

class Dictionary {
 public:
  Dictionary() = default;
  Dictionary(std::vector<SeqVector> atoms, std::vector<std::string> labels,
             bool symmetric = true);

  /// Labels the atoms "a1".."an".
  static Dictionary with_auto_labels(std::vector<SeqVector> atoms,
                                     bool symmetric = true);

  std::size_t size() const { return atoms_.size(); }
  int dim() const { return atoms_.empty() ? 0 : int(atoms_[0].size()); }
  const SeqVector& atom(std::size_t i) const { return atoms_.at(i); }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  const std::vector<SeqVector>& atoms() const { return atoms_; }
  bool symmetric() const { return symmetric_; }

 private:
  std::vector<SeqVector> atoms_;
  std::vector<std::string> labels_;
  bool symmetric_ = true;
};

/// A dictionary together with the element it is built to approximate.
struct DictionaryInstance {
  Dictionary dictionary;
  SeqVector target;
};

/// g_k = (e_{k+1} - e_1)/sqrt(2), k = 1..N-1, with target -e_1/sqrt(2).
/// Exact best m-term error 1/sqrt(2(m+1)) for every m <= N-2.
DictionaryInstance build_bt1(int N);

/// lq analogue, q in (1,2): g_k = 2^{-1/q}(e_{k+1} - e_1), target
/// -2^{-1/q} e_1.
DictionaryInstance build_btq(int N, double q);

/// g_k = (e_{k+2} - e_2)/sqrt(2) plus u_1 = (e_1 - e_2)/sqrt(2) and
/// u_2 = (-e_1 - e_2)/sqrt(2); target -e_2/sqrt(2) = (u_1 + u_2)/2.
/// The u-atoms come first, so LowestIndex converges in two steps while
/// PreferGAscending realizes the adversarial g-run.
DictionaryInstance build_bt3(int N);

/// BT3 with the u-atoms perturbed by delta in (0, 1/sqrt(2)) so that every
/// realization follows the g-run; target (u_1 + u_2)/2.
DictionaryInstance build_br1(int N, double delta);

/// CSV loader: one atom per row, comma-separated reals; a row may start
/// with a non-numeric label field; '#' lines are skipped. Atoms are
/// renormalized to unit norm in `space`; labels default to "a<i>".
Dictionary load_dictionary(const std::filesystem::path& path,
                           const LqSpace& space);

/// `count` seeded Gaussian atoms, renormalized to unit norm in `space`.
Dictionary random_dictionary(const LqSpace& space, int count,
                             std::uint64_t seed);

/// Throws unless every atom has unit norm to within tol.
void check_unit_norms(const Dictionary& dict, const LqSpace& space,
                      double tol = 1e-12);

struct Selection {
  std::size_t index = 0;   ///< atom index in the dictionary
  int sign = 1;            ///< +1 or -1 (symmetric closure)
  double greedy_value = 0; ///< ||F||_D over the (symmetric) dictionary
  double achieved = 0;     ///< F evaluated at the selected signed atom
};

using DefectFn = std::function<double(const SeqVector&)>;

/// Weak greedy step: returns a signed atom phi with F(phi) >= t ||F||_D.
/// `defect` is consulted only by the VMinimizing policy.
Selection greedy_select(const Dictionary& dict, const DualFunctional& F,
                        double t, TieBreakMode policy,
                        const DefectFn& defect = {});

}  // namespace gsparse
