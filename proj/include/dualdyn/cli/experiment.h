#ifndef DUALDYN_CLI_EXPERIMENT_H_
#define DUALDYN_CLI_EXPERIMENT_H_

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "dualdyn/analysis.h"
#include "dualdyn/cli/config.h"
#include "dualdyn/cli/json_output.h"
#include "dualdyn/dynamics.h"
#include "dualdyn/error.h"
#include "dualdyn/games.h"

namespace dualdyn::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitBoundViolation = 2;
inline constexpr int kExitConfigError = 3;
inline constexpr int kExitSolverFailure = 4;

// Configuration and precondition problems map to 3, numerical failures
// (solver, divergence, domain) to 4.
int ExitCodeFor(const Error& error);

Game BuildGame(const GameConfig& config);
MirrorSpec BuildMirror(const ExperimentConfig& config, const Game& game);
// Stacks per-player blocks; a missing value gives the zero vector.
Eigen::VectorXd StackBlocks(const std::optional<std::vector<std::vector<double>>>& blocks,
                            const Game& game, const std::string& key);

struct RunResult {
  Game game;
  MirrorSpec mirror;
  Trajectory trajectory;
  std::optional<StrategyProfile> target;
  // Every bound available for the configured dynamics; `bound` is the one
  // requested by bound.metric.
  std::vector<RateBound> bounds;
  std::optional<RateBound> bound;
  BoundReport report;
  std::vector<double> metric;
};

// Equilibrium a bound of the given kind is measured against: the NE for MD and
// AC, the perturbed NE C(U(x)) = x for DMD.
StrategyProfile BoundTarget(BoundKind kind, const Game& game, const MirrorSpec& mirror);

RunResult RunExperiment(const ExperimentConfig& config);

// Columns t, x_0..x_{n-1}, then metric and bound when given.
std::string TrajectoryCsv(const Trajectory& trajectory, const std::vector<double>* metric,
                          const RateBound* bound);

// Writes <output>_trajectory.csv and <output>_report.json.
int RunCommand(const ExperimentConfig& config, std::ostream& log);

enum class ReproduceCase { kAdversarial, kNetworkMp, kRps };
ReproduceCase ParseReproduceCase(std::string_view name);
std::string_view ReproduceCaseName(ReproduceCase which);

struct ReproduceOptions {
  std::string config_dir = DUALDYN_CONFIG_DIR;
  std::string out_dir = ".";
};

// Runs the pinned configs of a case study, writing one CSV per variant and
// metric plus <case>_summary.json. Returns the summary.
Json Reproduce(ReproduceCase which, const ReproduceOptions& options, std::ostream& log);
int ReproduceCommand(ReproduceCase which, const ReproduceOptions& options, std::ostream& log);

Json Analyze(const ExperimentConfig& config);
int AnalyzeCommand(const ExperimentConfig& config, std::ostream& log);

Json SolveEquilibria(const ExperimentConfig& config);
int SolveNeCommand(const ExperimentConfig& config, std::ostream& log);

}  // namespace dualdyn::cli

#endif  // DUALDYN_CLI_EXPERIMENT_H_
