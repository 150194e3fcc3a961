#include "greedy_sparse/dictionary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "greedy_sparse/rng.hpp"

namespace gsparse {

TieBreakMode tie_break_from_string(std::string_view name) {
  if (name == "lowest-index") return TieBreakMode::LowestIndex;
  if (name == "prefer-g-ascending") return TieBreakMode::PreferGAscending;
  if (name == "v-minimizing") return TieBreakMode::VMinimizing;
  throw std::invalid_argument("unknown tie-break policy: " + std::string(name));
}

std::string to_string(TieBreakMode mode) {
  switch (mode) {
    case TieBreakMode::LowestIndex: return "lowest-index";
    case TieBreakMode::PreferGAscending: return "prefer-g-ascending";
    case TieBreakMode::VMinimizing: return "v-minimizing";
  }
  return "?";
}

Dictionary::Dictionary(std::vector<SeqVector> atoms,
                       std::vector<std::string> labels, bool symmetric)
    : atoms_(std::move(atoms)), labels_(std::move(labels)),
      symmetric_(symmetric) {
  if (atoms_.size() != labels_.size()) {
    throw std::invalid_argument("Dictionary: one label per atom required");
  }
  for (const auto& a : atoms_) {
    if (a.size() != atoms_[0].size()) {
      throw std::invalid_argument("Dictionary: atom dimensions differ");
    }
    if (!all_finite(a)) {
      throw std::invalid_argument("Dictionary: non-finite atom entry");
    }
  }
}

Dictionary Dictionary::with_auto_labels(std::vector<SeqVector> atoms,
                                        bool symmetric) {
  std::vector<std::string> labels;
  labels.reserve(atoms.size());
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    labels.push_back("a" + std::to_string(i + 1));
  }
  return Dictionary(std::move(atoms), std::move(labels), symmetric);
}

void check_unit_norms(const Dictionary& dict, const LqSpace& space,
                      double tol) {
  for (std::size_t i = 0; i < dict.size(); ++i) {
    if (std::abs(norm(space, dict.atom(i)) - 1.0) > tol) {
      throw std::runtime_error("atom " + dict.label(i) + " is not unit norm");
    }
  }
}

namespace {

std::vector<std::string> g_labels(int count, int from = 1) {
  std::vector<std::string> labels;
  labels.reserve(count);
  for (int k = from; k < from + count; ++k) {
    labels.push_back("g" + std::to_string(k));
  }
  return labels;
}

}  // namespace

DictionaryInstance build_bt1(int N) {
  if (N < 3) throw std::invalid_argument("build_bt1: N >= 3 required");
  const double s = 1.0 / std::sqrt(2.0);
  std::vector<SeqVector> atoms;
  atoms.reserve(N - 1);
  for (int k = 1; k <= N - 1; ++k) {
    SeqVector g = SeqVector::Zero(N);
    g[0] = -s;
    g[k] = s;
    atoms.push_back(std::move(g));
  }
  SeqVector f = SeqVector::Zero(N);
  f[0] = -s;
  return {Dictionary(std::move(atoms), g_labels(N - 1)), std::move(f)};
}

DictionaryInstance build_btq(int N, double q) {
  if (N < 3) throw std::invalid_argument("build_btq: N >= 3 required");
  if (!(q > 1.0) || !(q < 2.0)) {
    throw std::invalid_argument("build_btq: q must lie in (1, 2)");
  }
  const double s = std::pow(2.0, -1.0 / q);
  std::vector<SeqVector> atoms;
  atoms.reserve(N - 1);
  for (int k = 1; k <= N - 1; ++k) {
    SeqVector g = SeqVector::Zero(N);
    g[0] = -s;
    g[k] = s;
    atoms.push_back(std::move(g));
  }
  SeqVector f = SeqVector::Zero(N);
  f[0] = -s;
  return {Dictionary(std::move(atoms), g_labels(N - 1)), std::move(f)};
}

DictionaryInstance build_bt3(int N) {
  if (N < 4) throw std::invalid_argument("build_bt3: N >= 4 required");
  const double s = 1.0 / std::sqrt(2.0);
  std::vector<SeqVector> atoms;
  std::vector<std::string> labels;
  atoms.reserve(N);
  SeqVector u1 = SeqVector::Zero(N);
  u1[0] = s;
  u1[1] = -s;
  SeqVector u2 = SeqVector::Zero(N);
  u2[0] = -s;
  u2[1] = -s;
  atoms.push_back(std::move(u1));
  labels.emplace_back("u1");
  atoms.push_back(std::move(u2));
  labels.emplace_back("u2");
  for (int k = 1; k <= N - 2; ++k) {
    SeqVector g = SeqVector::Zero(N);
    g[1] = -s;
    g[k + 1] = s;
    atoms.push_back(std::move(g));
    labels.push_back("g" + std::to_string(k));
  }
  Dictionary dict(std::move(atoms), std::move(labels));
  SeqVector f = (dict.atom(0) + dict.atom(1)) / 2.0;  // = -e_2/sqrt(2)
  return {std::move(dict), std::move(f)};
}

DictionaryInstance build_br1(int N, double delta) {
  if (N < 4) throw std::invalid_argument("build_br1: N >= 4 required");
  const double s = 1.0 / std::sqrt(2.0);
  if (!(delta > 0.0) || !(delta < s)) {
    throw std::invalid_argument("build_br1: delta must lie in (0, 1/sqrt(2))");
  }
  // delta' making both u-atoms unit norm.
  const double dprime = std::sqrt(1.0 - (s - delta) * (s - delta)) - s;
  std::vector<SeqVector> atoms;
  std::vector<std::string> labels;
  atoms.reserve(N);
  SeqVector u1 = SeqVector::Zero(N);
  u1[0] = s + dprime;
  u1[1] = -s + delta;
  SeqVector u2 = SeqVector::Zero(N);
  u2[0] = -s - dprime;
  u2[1] = -s + delta;
  atoms.push_back(std::move(u1));
  labels.emplace_back("u1");
  atoms.push_back(std::move(u2));
  labels.emplace_back("u2");
  for (int k = 1; k <= N - 2; ++k) {
    SeqVector g = SeqVector::Zero(N);
    g[1] = -s;
    g[k + 1] = s;
    atoms.push_back(std::move(g));
    labels.push_back("g" + std::to_string(k));
  }
  Dictionary dict(std::move(atoms), std::move(labels));
  SeqVector f = (dict.atom(0) + dict.atom(1)) / 2.0;
  return {std::move(dict), std::move(f)};
}

namespace {

bool parse_double(const std::string& field, double& out) {
  const char* begin = field.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  if (end == begin) return false;
  while (*end == ' ' || *end == '\t') ++end;
  return *end == '\0';
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

Dictionary load_dictionary(const std::filesystem::path& path,
                           const LqSpace& space) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_dictionary: cannot open " + path.string());
  }
  std::vector<SeqVector> atoms;
  std::vector<std::string> labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    if (fields.empty()) continue;

    std::string label;
    std::size_t first_coord = 0;
    double probe;
    if (!parse_double(fields[0], probe)) {
      label = fields[0];
      first_coord = 1;
    }
    if (fields.size() == first_coord) {
      throw std::runtime_error("load_dictionary: row " +
                               std::to_string(lineno) + " has no coordinates");
    }
    SeqVector atom(fields.size() - first_coord);
    for (std::size_t i = first_coord; i < fields.size(); ++i) {
      double v;
      if (!parse_double(fields[i], v)) {
        throw std::runtime_error("load_dictionary: malformed value '" +
                                 fields[i] + "' on row " +
                                 std::to_string(lineno));
      }
      atom[i - first_coord] = v;
    }
    if (atom.size() != space.dim()) {
      throw std::runtime_error(
          "load_dictionary: row " + std::to_string(lineno) + " has " +
          std::to_string(atom.size()) + " coordinates, expected " +
          std::to_string(space.dim()));
    }
    const double n = norm(space, atom);
    if (n < 1e-14) {
      throw std::runtime_error("load_dictionary: zero atom on row " +
                               std::to_string(lineno));
    }
    atoms.push_back(atom / n);
    labels.push_back(label.empty() ? "a" + std::to_string(atoms.size())
                                   : label);
  }
  if (atoms.empty()) {
    throw std::runtime_error("load_dictionary: no atoms in " + path.string());
  }
  return Dictionary(std::move(atoms), std::move(labels));
}

Dictionary random_dictionary(const LqSpace& space, int count,
                             std::uint64_t seed) {
  if (count < 1) {
    throw std::invalid_argument("random_dictionary: count must be >= 1");
  }
  std::mt19937_64 gen(seed);
  std::vector<SeqVector> atoms;
  atoms.reserve(count);
  while (int(atoms.size()) < count) {
    SeqVector a(space.dim());
    for (int i = 0; i < space.dim(); ++i) a[i] = gaussian(gen);
    const double n = norm(space, a);
    if (n < 1e-12) continue;
    atoms.push_back(a / n);
  }
  return Dictionary::with_auto_labels(std::move(atoms));
}

Selection greedy_select(const Dictionary& dict, const DualFunctional& F,
                        double t, TieBreakMode policy, const DefectFn& defect) {
  if (dict.size() == 0) {
    throw std::invalid_argument("greedy_select: empty dictionary");
  }
  if (!(t >= 0.0) || !(t <= 1.0)) {
    throw std::invalid_argument("greedy_select: t must lie in [0, 1]");
  }
  const std::size_t n = dict.size();
  std::vector<double> value(n);
  std::vector<int> sign(n, 1);
  double maxval = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double raw = F(dict.atom(i));
    if (dict.symmetric() && raw < 0.0) {
      value[i] = -raw;
      sign[i] = -1;
    } else {
      value[i] = raw;
    }
    maxval = std::max(maxval, value[i]);
  }
  const double threshold = t * maxval;

  std::size_t chosen = n;
  switch (policy) {
    case TieBreakMode::LowestIndex: {
      for (std::size_t i = 0; i < n; ++i) {
        if (value[i] >= threshold) {
          chosen = i;
          break;
        }
      }
      break;
    }
    case TieBreakMode::PreferGAscending: {
      std::size_t first_max = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (value[i] >= maxval - kTieTol) {
          if (first_max == n) first_max = i;
          if (!dict.label(i).empty() && dict.label(i)[0] == 'g') {
            chosen = i;
            break;
          }
        }
      }
      if (chosen == n) chosen = first_max;  // no g-labelled maximizer
      break;
    }
    case TieBreakMode::VMinimizing: {
      if (!defect) {
        throw std::invalid_argument(
            "greedy_select: v-minimizing policy needs a projection callback");
      }
      double best_defect = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i) {
        if (value[i] < threshold) continue;
        const double d = defect(dict.atom(i));
        if (d < best_defect - kTieTol) {
          best_defect = d;
          chosen = i;
        }
      }
      break;
    }
  }
  if (chosen == n) {
    throw std::logic_error("greedy_select: no atom met the threshold");
  }
  return {chosen, sign[chosen], maxval, value[chosen]};
}

}  // namespace gsparse
