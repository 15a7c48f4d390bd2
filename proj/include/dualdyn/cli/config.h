#ifndef DUALDYN_CLI_CONFIG_H_
#define DUALDYN_CLI_CONFIG_H_

// Flat "key = value" experiment files. Lines starting with '#' are comments.
// Vector values separate entries with ',' and player blocks with ';', e.g.
//
//   game = rps
//   rps.w = 1
//   rps.l = 5
//   regularizer = entropy
//   epsilon = 2.1
//   dynamics = dmd
//   z0 = 1,2,3; 1,2,3
//   bound = dmd
//   bound.mu = 2

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "dualdyn/analysis.h"
#include "dualdyn/dynamics.h"
#include "dualdyn/games.h"
#include "dualdyn/geometry.h"

namespace dualdyn::cli {

class KeyValueConfig {
 public:
  static KeyValueConfig Parse(std::string_view text, std::string source = "<string>");
  static KeyValueConfig Load(const std::string& path);

  const std::string& source() const { return source_; }
  bool Has(const std::string& key) const { return values_.count(key) > 0; }

  std::string GetString(const std::string& key, const std::string& fallback) const;
  std::optional<std::string> FindString(const std::string& key) const;
  double GetDouble(const std::string& key, double fallback) const;
  std::optional<double> FindDouble(const std::string& key) const;
  std::int64_t GetInt(const std::string& key, std::int64_t fallback) const;
  // Blocks separated by ';', entries by ','.
  std::optional<std::vector<std::vector<double>>> FindBlocks(const std::string& key) const;

  // Fails with a config error naming the first key that was never read.
  void RejectUnused() const;

  // Overrides or adds a key; used for command-line "-s key=value".
  void Set(const std::string& key, const std::string& value) { values_[key] = value; }

 private:
  [[noreturn]] void FailKey(const std::string& key, const std::string& what) const;

  std::string source_;
  std::map<std::string, std::string> values_;
  std::map<std::string, int> lines_;
  mutable std::set<std::string> used_;
};

struct GameConfig {
  std::string name;  // rps, network-mp, adversarial, quadratic
  double rps_w = 1.0;
  double rps_l = 5.0;
  RpsPayoffOrder rps_order = RpsPayoffOrder::kCrossPlay;
  Eigen::MatrixXd quadratic_q;
  Eigen::VectorXd quadratic_b;
  double box_lo = -1.0;
  double box_hi = 1.0;
  std::string dataset;
  LogisticWeights weights{0.8484, 0.8947};
  double r_reg = 10.0;
};

enum class BoundKind { kNone, kMd, kDmd, kAc };

struct BoundConfig {
  BoundKind kind = BoundKind::kNone;
  BoundMetric metric = BoundMetric::kBregmanToTarget;
  std::optional<double> eta;
  std::optional<double> mu;
  double rho = 1.0;
  Validity mode = Validity::kAllT;
  std::optional<double> t_min;
  double slack = 1e-6;
};

struct ExperimentConfig {
  GameConfig game;
  // One entry applies to every player.
  std::vector<RegularizerKind> regularizers{RegularizerKind::kEntropy};
  double epsilon = 1.0;
  DynamicsSpec dynamics;
  std::optional<std::vector<std::vector<double>>> z0;
  std::optional<std::vector<std::vector<double>>> x0;
  IntegratorConfig integrator;
  BoundConfig bound;
  std::string output = "dualdyn";
  std::uint64_t seed = 0;
  std::int64_t samples = 10000;
};

// Reads and validates every key; unknown keys are config errors.
ExperimentConfig ParseExperimentConfig(const KeyValueConfig& kv);
ExperimentConfig LoadExperimentConfig(const std::string& path);

}  // namespace dualdyn::cli

#endif  // DUALDYN_CLI_CONFIG_H_
