/**
 * @file experiments.hpp
 * @brief Reproducible experiment harness: one named experiment per
 *        counterexample or bound theorem, plus generic runs from config.
 */
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "greedy_sparse/bounds.hpp"
#include "greedy_sparse/dictionary.hpp"
#include "greedy_sparse/greedy.hpp"

namespace gsparse {

/// Exit codes of run_experiment (and of the CLI).
enum ExitCode : int {
  kExitPass = 0,
  kExitToleranceFail = 2,
  kExitNumericalFailure = 3,
  kExitBadConfig = 4,
};

struct ExperimentConfig {
  std::string experiment;  ///< bt1|btq|bt3|bt4|br1|obound|posteriori|custom
  int N = 0;               ///< ambient dimension; 0 = experiment default
  int m_max = 0;           ///< 0 = experiment default
  double q = 2.0;
  double gamma = 0.0;      ///< 0 = default 1/q
  double delta = 0.1;      ///< br1 perturbation
  double epsilon = 0.0;
  double a_eps = 1.0;
  std::string tau_mode = "constant";  ///< constant | list
  double tau_value = 1.0;
  std::vector<double> tau_list;
  std::string policy;             ///< empty = experiment default
  std::string algo = "wcga";     ///< posteriori/custom: wcga|oga|rga|wgafr
  std::string dict = "random";   ///< custom: "random" or a CSV path
  int instances = 20;            ///< posteriori instance count
  int natoms = 64;               ///< random dictionary size
  std::uint64_t seed = 1;
  std::string output;            ///< base path for emitted files; may be empty
  std::string format = "csv";    ///< csv | json | both

  bool operator==(const ExperimentConfig&) const = default;
};

void to_json(nlohmann::json& j, const ExperimentConfig& cfg);
void from_json(const nlohmann::json& j, ExperimentConfig& cfg);

WeaknessSequence weakness_from_config(const ExperimentConfig& cfg);

/// Runs one experiment: writes the trace table(s) when an output path is
/// set, prints a summary with the maximum deviation from the relevant
/// formula, and returns the exit code. GREEDY_SPARSE_SEED in the
/// environment overrides the configured seed.
int run_experiment(const ExperimentConfig& cfg);

/// A dictionary and an element of its unit convex hull (so A(0) = 1).
struct A1Instance {
  Dictionary dictionary;
  SeqVector f;
  A1Representation representation;
};

A1Instance make_random_a1_instance(const LqSpace& space, int natoms,
                                   std::uint64_t seed);

}  // namespace gsparse
