#include "dualdyn/cli/experiment.h"

#include <cmath>
#include <filesystem>
#include <sstream>

namespace dualdyn::cli {

namespace {

// Bound targets must resolve metrics far below the integrator error.
constexpr double kTargetTolerance = 1e-13;
constexpr int kTargetIterations = 2'000'000;

std::string JoinPath(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

Eigen::VectorXd InitialPrimal(const ExperimentConfig& config, const Game& game,
                              const MirrorSpec& mirror, const Eigen::VectorXd& z0) {
  if (config.dynamics.is_actor_critic() && config.x0) return StackBlocks(config.x0, game, "x0");
  return MirrorMap(mirror, z0);
}

std::vector<RateBound> BuildBounds(const ExperimentConfig& config, const Game& game,
                                   const StrategyProfile& target, const Eigen::VectorXd& x0,
                                   const std::vector<Regularizer>& h) {
  const BoundConfig& b = config.bound;
  const double d0 = Bregman(h, target.values(), x0);
  const double gamma = config.dynamics.gamma;
  switch (b.kind) {
    case BoundKind::kMd: {
      const auto pair = MdRateBound(gamma, *b.eta, config.epsilon, d0, b.rho, target, b.mode);
      return {pair.bregman, pair.euclid_sq};
    }
    case BoundKind::kDmd: {
      const auto pair = DmdRateBound(gamma, *b.mu, config.epsilon, d0, b.rho, target, b.mode);
      return {pair.bregman, pair.euclid_sq};
    }
    case BoundKind::kAc: {
      if (!game.has_potential()) {
        Fail(ErrorCode::kConfig, "the ac bound needs a potential game");
      }
      const double gap0 = game.Potential(target.values()) - game.Potential(x0);
      const auto triple = AcRateBound(gamma, *b.eta, config.epsilon, config.dynamics.r,
                                      std::max(gap0, 0.0), d0, b.rho, target, b.mode);
      return {triple.potential_gap, triple.bregman, triple.euclid_sq};
    }
    case BoundKind::kNone:
      break;
  }
  return {};
}

const RateBound& FindBound(const std::vector<RateBound>& bounds, BoundMetric metric) {
  for (const auto& bound : bounds) {
    if (bound.metric == metric) return bound;
  }
  Fail(ErrorCode::kConfig, "bound.metric '" + std::string(BoundMetricName(metric)) +
                               "' is not available for this bound");
}

std::optional<double> TryFit(const std::vector<double>& times, const std::vector<double>& values) {
  try {
    return FitDecayExponent(times, values);
  } catch (const Error&) {
    return std::nullopt;
  }
}

Json OptionalNumber(std::optional<double> value) {
  return value ? Json(*value) : Json(nullptr);
}

}  // namespace

int ExitCodeFor(const Error& error) {
  switch (error.code()) {
    case ErrorCode::kSolverFailure:
    case ErrorCode::kDivergence:
    case ErrorCode::kDomainError:
      return kExitSolverFailure;
    default:
      return kExitConfigError;
  }
}

Game BuildGame(const GameConfig& config) {
  if (config.name == "rps") return BuildRps(config.rps_w, config.rps_l, config.rps_order);
  if (config.name == "network-mp") return BuildThreePlayerMatchingPennies();
  if (config.name == "adversarial") {
    return BuildAdversarialAttack(LoadDataset(config.dataset), config.weights, config.r_reg,
                                  config.box_lo, config.box_hi);
  }
  if (config.name == "quadratic") {
    std::vector<Domain> domains;
    for (Eigen::Index i = 0; i < config.quadratic_q.rows(); ++i) {
      domains.push_back(Domain::Interval(config.box_lo, config.box_hi));
    }
    return BuildQuadraticPotential(config.quadratic_q, config.quadratic_b, std::move(domains));
  }
  Fail(ErrorCode::kConfig, "unknown game '" + config.name + "'");
}

MirrorSpec BuildMirror(const ExperimentConfig& config, const Game& game) {
  const std::size_t players = game.num_players();
  if (config.regularizers.size() != 1 && config.regularizers.size() != players) {
    Fail(ErrorCode::kConfig, "regularizer: give one kind or one per player (" +
                                 std::to_string(players) + ")");
  }
  std::vector<Regularizer> blocks;
  for (std::size_t p = 0; p < players; ++p) {
    const RegularizerKind kind =
        config.regularizers.size() == 1 ? config.regularizers.front() : config.regularizers[p];
    if (kind == RegularizerKind::kEntropy && !game.domains()[p].is_simplex()) {
      Fail(ErrorCode::kConfig, "regularizer: entropy needs a simplex domain (player " +
                                   std::to_string(p) + ")");
    }
    blocks.emplace_back(kind, game.domains()[p]);
  }
  return MirrorSpec(std::move(blocks), config.epsilon);
}

Eigen::VectorXd StackBlocks(const std::optional<std::vector<std::vector<double>>>& blocks,
                            const Game& game, const std::string& key) {
  const BlockPartition& partition = game.partition();
  if (!blocks) return Eigen::VectorXd::Zero(partition.total());
  if (blocks->size() != partition.num_blocks()) {
    Fail(ErrorCode::kConfig, key + ": expected " + std::to_string(partition.num_blocks()) +
                                 " player blocks separated by ';'");
  }
  Eigen::VectorXd out(partition.total());
  for (std::size_t p = 0; p < blocks->size(); ++p) {
    const auto& block = (*blocks)[p];
    if (static_cast<Eigen::Index>(block.size()) != partition.size(p)) {
      Fail(ErrorCode::kConfig, key + ": block " + std::to_string(p) + " needs " +
                                   std::to_string(partition.size(p)) + " entries");
    }
    for (std::size_t i = 0; i < block.size(); ++i) {
      out[partition.offset(p) + static_cast<Eigen::Index>(i)] = block[i];
    }
  }
  return out;
}

StrategyProfile BoundTarget(BoundKind kind, const Game& game, const MirrorSpec& mirror) {
  if (kind != BoundKind::kDmd) return SolveNe(game, kTargetTolerance, kTargetIterations);
  if (mirror.all_steep()) return SolvePerturbedNe(game, mirror);
  // With a projection map C(U(x)) = x is the variational inequality of the
  // penalized game.
  return SolveNe(PerturbGame(game, mirror), kTargetTolerance, kTargetIterations);
}

RunResult RunExperiment(const ExperimentConfig& config) {
  Game game = BuildGame(config.game);
  MirrorSpec mirror = BuildMirror(config, game);
  const Eigen::VectorXd z0 = StackBlocks(config.z0, game, "z0");
  std::optional<Eigen::VectorXd> x0;
  if (config.dynamics.is_actor_critic() && config.x0) x0 = StackBlocks(config.x0, game, "x0");

  Trajectory trajectory = Integrate(config.dynamics, game, mirror, z0, config.integrator, x0);
  RunResult result{std::move(game), std::move(mirror), std::move(trajectory), std::nullopt,
                   {}, std::nullopt, {}, {}};
  if (config.bound.kind == BoundKind::kNone) return result;

  result.target = BoundTarget(config.bound.kind, result.game, result.mirror);
  const std::vector<Regularizer>& h = result.mirror.blocks();
  result.bounds = BuildBounds(config, result.game, *result.target,
                              InitialPrimal(config, result.game, result.mirror, z0), h);
  result.bound = FindBound(result.bounds, config.bound.metric);
  result.report = VerifyBound(result.trajectory, *result.bound, result.game, h, config.bound.slack,
                              config.bound.t_min);
  result.metric = MeasureMetric(result.trajectory, result.bound->metric, *result.target,
                                result.game, h);
  return result;
}

std::string TrajectoryCsv(const Trajectory& trajectory, const std::vector<double>* metric,
                          const RateBound* bound) {
  std::ostringstream out;
  const Eigen::Index n = trajectory.partition.total();
  out << "t";
  for (Eigen::Index i = 0; i < n; ++i) out << ",x_" << i;
  if (metric) out << ",metric";
  if (bound) out << ",bound";
  out << "\n";
  for (std::size_t k = 0; k < trajectory.size(); ++k) {
    out << FormatDouble(trajectory.times[k]);
    for (Eigen::Index i = 0; i < n; ++i) out << "," << FormatDouble(trajectory.x_samples[k][i]);
    if (metric) out << "," << FormatDouble((*metric)[k]);
    if (bound) out << "," << FormatDouble(bound->Evaluate(trajectory.times[k]));
    out << "\n";
  }
  return out.str();
}

int RunCommand(const ExperimentConfig& config, std::ostream& log) {
  const RunResult result = RunExperiment(config);
  const bool has_bound = result.bound.has_value();
  const std::string csv_path = config.output + "_trajectory.csv";
  const std::string report_path = config.output + "_report.json";
  WriteTextFile(csv_path, TrajectoryCsv(result.trajectory, has_bound ? &result.metric : nullptr,
                                        has_bound ? &*result.bound : nullptr));
  BoundReport report = result.report;
  if (!has_bound) report.mode = Validity::kAllT;
  WriteTextFile(report_path, DumpJson(ToJson(report)));

  log << result.game.name() << ": " << DynamicsKindName(config.dynamics.kind) << ", "
      << result.trajectory.size() << " samples, t_end = " << config.integrator.t_end << "\n";
  if (has_bound) {
    log << "bound " << BoundMetricName(result.bound->metric) << " (exponent "
        << FormatDouble(result.bound->exponent) << "): checked " << report.checked_times
        << ", violations " << report.violations.size() << ", max ratio "
        << FormatDouble(report.max_ratio) << " -> " << (report.pass() ? "pass" : "FAIL") << "\n";
  }
  log << "wrote " << csv_path << " and " << report_path << "\n";
  return report.pass() ? kExitPass : kExitBoundViolation;
}

ReproduceCase ParseReproduceCase(std::string_view name) {
  if (name == "adversarial") return ReproduceCase::kAdversarial;
  if (name == "network-mp") return ReproduceCase::kNetworkMp;
  if (name == "rps") return ReproduceCase::kRps;
  Fail(ErrorCode::kConfig,
       "unknown case '" + std::string(name) + "' (expected adversarial, network-mp, rps)");
}

std::string_view ReproduceCaseName(ReproduceCase which) {
  switch (which) {
    case ReproduceCase::kAdversarial:
      return "adversarial";
    case ReproduceCase::kNetworkMp:
      return "network-mp";
    case ReproduceCase::kRps:
      return "rps";
  }
  return "rps";
}

Json Reproduce(ReproduceCase which, const ReproduceOptions& options, std::ostream& log) {
  std::vector<std::string> variants;
  switch (which) {
    case ReproduceCase::kAdversarial:
      variants = {"adversarial_md", "adversarial_dmd"};
      break;
    case ReproduceCase::kNetworkMp:
      variants = {"network_mp_dmd_projection", "network_mp_dmd_softmax"};
      break;
    case ReproduceCase::kRps:
      variants = {"rps_dmd_projection", "rps_dmd_softmax"};
      break;
  }
  std::filesystem::create_directories(options.out_dir);

  Json summary;
  summary["case"] = std::string(ReproduceCaseName(which));
  Json runs = Json::object();
  bool all_pass = true;
  std::vector<RunResult> results;
  for (const std::string& variant : variants) {
    const ExperimentConfig config =
        LoadExperimentConfig(JoinPath(options.config_dir, variant + ".cfg"));
    RunResult result = RunExperiment(config);
    const std::vector<Regularizer>& h = result.mirror.blocks();

    Json run;
    run["dynamics"] = std::string(DynamicsKindName(config.dynamics.kind));
    run["regularizer"] =
        std::string(RegularizerKindName(result.mirror.blocks().back().kind()));
    run["epsilon"] = config.epsilon;
    run["gamma"] = config.dynamics.gamma;
    run["final_x"] = ToJson(result.trajectory.profile(result.trajectory.size() - 1));
    run["final_primal_speed"] = FinalPrimalSpeed(result.trajectory);
    if (result.target) run["target"] = ToJson(*result.target);

    Json metrics = Json::object();
    for (const RateBound& bound : result.bounds) {
      const std::string metric_name(BoundMetricName(bound.metric));
      const std::vector<double> series =
          MeasureMetric(result.trajectory, bound.metric, bound.target, result.game, h);
      const BoundReport report =
          VerifyBound(result.trajectory, bound, result.game, h, config.bound.slack,
                      config.bound.t_min);
      const std::string csv = JoinPath(options.out_dir, variant + "_" + metric_name + ".csv");
      WriteTextFile(csv, TrajectoryCsv(result.trajectory, &series, &bound));
      const std::optional<double> fitted = TryFit(result.trajectory.times, series);
      Json entry;
      entry["theoretical_exponent"] = bound.exponent;
      entry["bound_constant"] = bound.constant;
      entry["fitted_exponent"] = OptionalNumber(fitted);
      entry["final_value"] = series.back();
      entry["report"] = ToJson(report);
      metrics[metric_name] = entry;
      if (bound.metric == result.bound->metric) all_pass = all_pass && report.pass();
      log << variant << " " << metric_name << ": exponent " << FormatDouble(bound.exponent)
          << ", fitted " << (fitted ? FormatDouble(*fitted) : "n/a") << ", "
          << (report.pass() ? "pass" : "FAIL") << " (" << ValidityName(report.mode) << ")\n";
    }
    run["metrics"] = metrics;
    runs[variant] = run;
    results.push_back(std::move(result));
  }
  summary["runs"] = runs;

  if (which == ReproduceCase::kRps) {
    const auto fit = [&](const std::string& v) {
      return runs[v]["metrics"]["euclid_sq"]["fitted_exponent"];
    };
    const Json proj = fit("rps_dmd_projection");
    const Json soft = fit("rps_dmd_softmax");
    summary["softmax_not_slower"] =
        proj.is_number() && soft.is_number() && soft.get<double>() >= proj.get<double>();
  } else if (which == ReproduceCase::kAdversarial) {
    const double iota_md = results[0].trajectory.x_samples.back()[0];
    const double iota_dmd = results[1].trajectory.x_samples.back()[0];
    const ExperimentConfig md_config =
        LoadExperimentConfig(JoinPath(options.config_dir, variants[0] + ".cfg"));
    summary["grid_eta"] =
        AdversarialGridEta(LoadDataset(md_config.game.dataset), md_config.game.weights,
                           md_config.game.r_reg, 20001, md_config.game.box_lo,
                           md_config.game.box_hi);
    summary["iota_md"] = iota_md;
    summary["iota_dmd"] = iota_dmd;
    summary["dmd_perturbation_smaller"] = std::abs(iota_dmd) < std::abs(iota_md);
  }
  summary["pass"] = all_pass;

  const std::string path =
      JoinPath(options.out_dir, std::string(ReproduceCaseName(which)) + "_summary.json");
  WriteTextFile(path, DumpJson(summary));
  log << "wrote " << path << "\n";
  return summary;
}

int ReproduceCommand(ReproduceCase which, const ReproduceOptions& options, std::ostream& log) {
  const Json summary = Reproduce(which, options, log);
  return summary["pass"].get<bool>() ? kExitPass : kExitBoundViolation;
}

Json Analyze(const ExperimentConfig& config) {
  const Game game = BuildGame(config.game);
  const MirrorSpec mirror = BuildMirror(config, game);
  const MonotonicityReport report =
      EstimateMonotonicity(game, mirror.blocks(), config.samples, config.seed);
  Json out;
  out["game"] = game.name();
  out["h"] = std::string(RegularizerKindName(mirror.blocks().back().kind()));
  out["seed"] = config.seed;
  out["report"] = ToJson(report);
  if (config.game.name == "adversarial") {
    out["grid_eta"] = AdversarialGridEta(LoadDataset(config.game.dataset), config.game.weights,
                                         config.game.r_reg, 20001, config.game.box_lo,
                                         config.game.box_hi);
  }
  return out;
}

int AnalyzeCommand(const ExperimentConfig& config, std::ostream& log) {
  const std::string text = DumpJson(Analyze(config));
  WriteTextFile(config.output + "_monotonicity.json", text);
  log << text;
  return kExitPass;
}

Json SolveEquilibria(const ExperimentConfig& config) {
  const Game game = BuildGame(config.game);
  const MirrorSpec mirror = BuildMirror(config, game);
  const StrategyProfile ne = SolveNe(game);
  const StrategyProfile perturbed = BoundTarget(BoundKind::kDmd, game, mirror);
  const Eigen::VectorXd u = game.PseudoGradient(ne.values());
  Json out;
  out["game"] = game.name();
  out["ne"] = ToJson(ne);
  out["ne_residual"] = (ne.values() - game.Project(ne.values() + u)).norm();
  out["epsilon"] = config.epsilon;
  out["perturbed_ne"] = ToJson(perturbed);
  out["perturbed_gap"] =
      (perturbed.values() - MirrorMap(mirror, game.PseudoGradient(perturbed.values())))
          .cwiseAbs()
          .maxCoeff();
  return out;
}

int SolveNeCommand(const ExperimentConfig& config, std::ostream& log) {
  const std::string text = DumpJson(SolveEquilibria(config));
  WriteTextFile(config.output + "_ne.json", text);
  log << text;
  return kExitPass;
}

}  // namespace dualdyn::cli
