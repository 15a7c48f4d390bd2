// dualdyn: run, verify and reproduce dual-space game dynamics experiments.
//
//   dualdyn run <config> [-s key=value]...
//   dualdyn reproduce {adversarial|network-mp|rps} [--out DIR] [--configs DIR]
//   dualdyn analyze <config>
//   dualdyn solve-ne <config>
//
// Exit status: 0 pass, 2 bound violation, 3 config error, 4 solver or
// integrator failure.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dualdyn/cli/config.h"
#include "dualdyn/cli/experiment.h"
#include "dualdyn/error.h"

namespace {

using dualdyn::cli::ExperimentConfig;
using dualdyn::cli::KeyValueConfig;

ExperimentConfig LoadWithOverrides(const std::string& path,
                                   const std::vector<std::string>& overrides) {
  KeyValueConfig kv = KeyValueConfig::Load(path);
  for (const std::string& item : overrides) {
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      dualdyn::Fail(dualdyn::ErrorCode::kConfig, "override '" + item + "' is not key=value");
    }
    kv.Set(item.substr(0, eq), item.substr(eq + 1));
  }
  return dualdyn::cli::ParseExperimentConfig(kv);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continuous-time mirror descent dynamics for concave games"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "experiment config file")->required();
    sub->add_option("-s,--set", overrides, "override a config key (key=value)");
  };

  CLI::App* run = app.add_subcommand("run", "integrate one experiment and verify its bound");
  add_config(run);
  CLI::App* analyze = app.add_subcommand("analyze", "sample monotonicity moduli");
  add_config(analyze);
  CLI::App* solve = app.add_subcommand("solve-ne", "compute the NE and the perturbed NE");
  add_config(solve);

  CLI::App* reproduce = app.add_subcommand("reproduce", "rerun a pinned case study");
  std::string case_name;
  dualdyn::cli::ReproduceOptions options;
  reproduce->add_option("case", case_name, "adversarial, network-mp or rps")
      ->required()
      ->check(CLI::IsMember({"adversarial", "network-mp", "rps"}));
  reproduce->add_option("--out", options.out_dir, "output directory");
  reproduce->add_option("--configs", options.config_dir, "directory of pinned configs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : dualdyn::cli::kExitConfigError;
  }

  try {
    if (*run) return dualdyn::cli::RunCommand(LoadWithOverrides(config_path, overrides), std::cout);
    if (*analyze) {
      return dualdyn::cli::AnalyzeCommand(LoadWithOverrides(config_path, overrides), std::cout);
    }
    if (*solve) {
      return dualdyn::cli::SolveNeCommand(LoadWithOverrides(config_path, overrides), std::cout);
    }
    return dualdyn::cli::ReproduceCommand(dualdyn::cli::ParseReproduceCase(case_name), options,
                                          std::cout);
  } catch (const dualdyn::Error& e) {
    std::cerr << "dualdyn: " << e.what() << "\n";
    return dualdyn::cli::ExitCodeFor(e);
  } catch (const std::exception& e) {
    std::cerr << "dualdyn: " << e.what() << "\n";
    return dualdyn::cli::kExitSolverFailure;
  }
}
