// Command-line entry point: one subcommand per named experiment, plus
// --config for running a JSON-described experiment.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "greedy_sparse/experiments.hpp"

namespace {

using gsparse::ExperimentConfig;

void add_common_options(CLI::App* cmd, ExperimentConfig& cfg) {
  cmd->add_option("--N", cfg.N, "ambient dimension (0 = default)");
  cmd->add_option("--m-max", cfg.m_max, "number of iterations / terms");
  cmd->add_option("--gamma", cfg.gamma, "smoothness constant (0 = default)");
  cmd->add_option("--epsilon", cfg.epsilon, "approximation slack epsilon");
  cmd->add_option("--a-eps", cfg.a_eps, "A(epsilon)");
  cmd->add_option("--tau", cfg.tau_value, "constant weakness parameter");
  cmd->add_option("--tau-list", cfg.tau_list, "explicit weakness sequence")
      ->expected(-1);
  cmd->add_option("--policy", cfg.policy,
                  "lowest-index | prefer-g-ascending | v-minimizing");
  cmd->add_option("--seed", cfg.seed, "random seed");
  cmd->add_option("--out", cfg.output, "output base path (no extension)");
  cmd->add_option("--format", cfg.format, "csv | json | both");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"m-term sparse approximation by greedy algorithms"};
  app.require_subcommand(0, 1);

  std::string config_path;
  app.add_option("--config", config_path, "run an experiment from a JSON file");

  ExperimentConfig cfg;
  bool tau_list_used = false;

  auto make = [&](const std::string& name, const std::string& desc) {
    CLI::App* cmd = app.add_subcommand(name, desc);
    add_common_options(cmd, cfg);
    cmd->callback([&cfg, name] { cfg.experiment = name; });
    return cmd;
  };

  CLI::App* bt1 = make("bt1", "best m-term error of the rank-one Hilbert instance");
  CLI::App* btq = make("btq", "best m-term bracket of the lq instance");
  btq->add_option("--q", cfg.q, "exponent q in (1, 2)");
  make("bt3", "adversarial orthogonal greedy run on the two-atom target");
  make("bt4", "adversarial relaxed greedy run on the two-atom target");
  CLI::App* br1 = make("br1", "perturbed two-atom target, all policies");
  br1->add_option("--delta", cfg.delta, "perturbation in (0, 1/sqrt(2))");
  make("obound", "two-part approximant decay trend");
  CLI::App* post = make("posteriori", "bound domination on random instances");
  post->add_option("--algo", cfg.algo, "wcga | wgafr");
  post->add_option("--instances", cfg.instances, "instance count");
  post->add_option("--natoms", cfg.natoms, "random dictionary size");
  post->add_option("--dict", cfg.dict, "dictionary source (random)");
  CLI::App* custom = make("custom", "generic run from options");
  custom->add_option("--q", cfg.q, "exponent q in (1, 2]");
  custom->add_option("--algo", cfg.algo, "wcga | oga | rga | wgafr");
  custom->add_option("--dict", cfg.dict, "random or a CSV path");
  custom->add_option("--natoms", cfg.natoms, "random dictionary size");
  (void)bt1;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : gsparse::kExitBadConfig;
  }

  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "cannot open config file " << config_path << "\n";
      return gsparse::kExitBadConfig;
    }
    try {
      nlohmann::json j;
      in >> j;
      cfg = j.get<ExperimentConfig>();
    } catch (const std::exception& e) {
      std::cerr << "bad config file: " << e.what() << "\n";
      return gsparse::kExitBadConfig;
    }
  } else if (cfg.experiment.empty()) {
    std::cerr << app.help();
    return gsparse::kExitBadConfig;
  }

  for (const auto* sub : app.get_subcommands()) {
    if (sub->count("--tau-list") > 0) tau_list_used = true;
  }
  if (tau_list_used) cfg.tau_mode = "list";

  return gsparse::run_experiment(cfg);
}
