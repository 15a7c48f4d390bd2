#include "dualdyn/cli/config.h"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "dualdyn/error.h"

namespace dualdyn::cli {

namespace {

std::string Trim(std::string_view s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return std::string(s.substr(begin, end - begin));
}

std::vector<std::string> Split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    parts.push_back(Trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::optional<double> ParseDouble(const std::string& text) {
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return value;
}

}  // namespace

KeyValueConfig KeyValueConfig::Parse(std::string_view text, std::string source) {
  KeyValueConfig config;
  config.source_ = std::move(source);
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string trimmed = Trim(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    const std::size_t eq = trimmed.find('=');
    if (eq == std::string::npos) {
      Fail(ErrorCode::kConfig, config.source_ + ":" + std::to_string(line_no) +
                                   ": expected 'key = value'");
    }
    const std::string key = Trim(std::string_view(trimmed).substr(0, eq));
    std::string value = Trim(std::string_view(trimmed).substr(eq + 1));
    if (const std::size_t hash = value.find('#'); hash != std::string::npos) {
      value = Trim(std::string_view(value).substr(0, hash));
    }
    if (key.empty()) {
      Fail(ErrorCode::kConfig, config.source_ + ":" + std::to_string(line_no) + ": empty key");
    }
    if (config.values_.count(key)) {
      Fail(ErrorCode::kConfig, config.source_ + ":" + std::to_string(line_no) +
                                   ": duplicate key '" + key + "'");
    }
    config.values_[key] = value;
    config.lines_[key] = line_no;
  }
  return config;
}

KeyValueConfig KeyValueConfig::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kConfig, "cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return Parse(buffer.str(), path);
}

void KeyValueConfig::FailKey(const std::string& key, const std::string& what) const {
  std::ostringstream msg;
  msg << source_;
  if (auto it = lines_.find(key); it != lines_.end()) msg << ":" << it->second;
  msg << ": " << key << ": " << what;
  Fail(ErrorCode::kConfig, msg.str());
}

std::optional<std::string> KeyValueConfig::FindString(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  used_.insert(key);
  return it->second;
}

std::string KeyValueConfig::GetString(const std::string& key, const std::string& fallback) const {
  return FindString(key).value_or(fallback);
}

std::optional<double> KeyValueConfig::FindDouble(const std::string& key) const {
  const auto text = FindString(key);
  if (!text) return std::nullopt;
  const auto value = ParseDouble(*text);
  if (!value) FailKey(key, "expected a number, got '" + *text + "'");
  return value;
}

double KeyValueConfig::GetDouble(const std::string& key, double fallback) const {
  return FindDouble(key).value_or(fallback);
}

std::int64_t KeyValueConfig::GetInt(const std::string& key, std::int64_t fallback) const {
  const auto text = FindString(key);
  if (!text) return fallback;
  std::int64_t value = 0;
  const char* last = text->data() + text->size();
  auto [ptr, ec] = std::from_chars(text->data(), last, value);
  if (text->empty() || ec != std::errc() || ptr != last) {
    FailKey(key, "expected an integer, got '" + *text + "'");
  }
  return value;
}

std::optional<std::vector<std::vector<double>>> KeyValueConfig::FindBlocks(
    const std::string& key) const {
  const auto text = FindString(key);
  if (!text) return std::nullopt;
  std::vector<std::vector<double>> blocks;
  for (const std::string& block : Split(*text, ';')) {
    std::vector<double> values;
    for (const std::string& entry : Split(block, ',')) {
      const auto value = ParseDouble(entry);
      if (!value) FailKey(key, "bad vector entry '" + entry + "'");
      values.push_back(*value);
    }
    blocks.push_back(std::move(values));
  }
  return blocks;
}

void KeyValueConfig::RejectUnused() const {
  for (const auto& [key, value] : values_) {
    if (!used_.count(key)) FailKey(key, "unknown key");
  }
}

namespace {

void Require(bool ok, const KeyValueConfig& kv, const std::string& key, const std::string& what) {
  if (!ok) Fail(ErrorCode::kConfig, kv.source() + ": " + key + ": " + what);
}

template <typename Parser>
auto ParseNamed(const KeyValueConfig& kv, const std::string& key, const std::string& fallback,
                Parser parser) {
  const std::string text = kv.GetString(key, fallback);
  try {
    return parser(text);
  } catch (const Error& e) {
    Fail(ErrorCode::kConfig, kv.source() + ": " + key + ": " + e.what());
  }
}

BoundKind ParseBoundKind(const std::string& name) {
  if (name == "none") return BoundKind::kNone;
  if (name == "md") return BoundKind::kMd;
  if (name == "dmd") return BoundKind::kDmd;
  if (name == "ac") return BoundKind::kAc;
  Fail(ErrorCode::kInvalidParameter, "unknown bound '" + name + "' (expected none, md, dmd, ac)");
}

GameConfig ParseGame(const KeyValueConfig& kv) {
  GameConfig game;
  const auto name = kv.FindString("game");
  Require(name.has_value(), kv, "game", "missing");
  game.name = *name;
  if (game.name == "rps") {
    game.rps_w = kv.GetDouble("rps.w", game.rps_w);
    game.rps_l = kv.GetDouble("rps.l", game.rps_l);
    Require(game.rps_w > 0.0, kv, "rps.w", "must be positive");
    Require(game.rps_l > 0.0, kv, "rps.l", "must be positive");
    const std::string order = kv.GetString("rps.order", "cross_play");
    Require(order == "cross_play" || order == "own_strategy", kv, "rps.order",
            "expected cross_play or own_strategy");
    game.rps_order =
        order == "cross_play" ? RpsPayoffOrder::kCrossPlay : RpsPayoffOrder::kOwnStrategy;
  } else if (game.name == "network-mp") {
    // fixed instance, no parameters
  } else if (game.name == "adversarial") {
    game.dataset = kv.GetString("adversarial.dataset",
                                std::string(DUALDYN_DATA_DIR) + "/adversarial_dataset.csv");
    game.weights.w0 = kv.GetDouble("adversarial.w0", game.weights.w0);
    game.weights.w1 = kv.GetDouble("adversarial.w1", game.weights.w1);
    game.r_reg = kv.GetDouble("adversarial.r_reg", game.r_reg);
    Require(game.r_reg > 0.0, kv, "adversarial.r_reg", "must be positive");
    game.box_lo = kv.GetDouble("adversarial.iota_lo", game.box_lo);
    game.box_hi = kv.GetDouble("adversarial.iota_hi", game.box_hi);
    Require(game.box_lo <= game.box_hi, kv, "adversarial.iota_lo", "exceeds iota_hi");
  } else if (game.name == "quadratic") {
    const auto rows = kv.FindBlocks("quadratic.q");
    Require(rows.has_value(), kv, "quadratic.q", "missing");
    const auto n = static_cast<Eigen::Index>(rows->size());
    game.quadratic_q.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      Require(static_cast<Eigen::Index>((*rows)[i].size()) == n, kv, "quadratic.q",
              "must be a square matrix (rows separated by ';')");
      for (Eigen::Index j = 0; j < n; ++j) game.quadratic_q(i, j) = (*rows)[i][j];
    }
    game.quadratic_b = Eigen::VectorXd::Zero(n);
    if (const auto b = kv.FindBlocks("quadratic.b")) {
      Require(b->size() == 1 && static_cast<Eigen::Index>(b->front().size()) == n, kv,
              "quadratic.b", "must have one entry per row of quadratic.q");
      for (Eigen::Index i = 0; i < n; ++i) game.quadratic_b[i] = b->front()[i];
    }
    game.box_lo = kv.GetDouble("quadratic.lo", game.box_lo);
    game.box_hi = kv.GetDouble("quadratic.hi", game.box_hi);
    Require(game.box_lo <= game.box_hi, kv, "quadratic.lo", "exceeds quadratic.hi");
  } else {
    Fail(ErrorCode::kConfig, kv.source() + ": game: unknown builtin '" + game.name +
                                 "' (expected rps, network-mp, adversarial, quadratic)");
  }
  return game;
}

}  // namespace

ExperimentConfig ParseExperimentConfig(const KeyValueConfig& kv) {
  ExperimentConfig cfg;
  cfg.game = ParseGame(kv);

  cfg.regularizers.clear();
  for (const std::string& name : Split(kv.GetString("regularizer", "entropy"), ';')) {
    try {
      cfg.regularizers.push_back(ParseRegularizerKind(name));
    } catch (const Error& e) {
      Fail(ErrorCode::kConfig, kv.source() + ": regularizer: " + e.what());
    }
  }

  cfg.epsilon = kv.GetDouble("epsilon", cfg.epsilon);
  Require(cfg.epsilon > 0.0, kv, "epsilon", "must be positive");
  cfg.dynamics.kind = ParseNamed(kv, "dynamics", "md",
                                 [](const std::string& s) { return ParseDynamicsKind(s); });
  cfg.dynamics.gamma = kv.GetDouble("gamma", 1.0);
  Require(cfg.dynamics.gamma > 0.0, kv, "gamma", "must be positive");
  cfg.dynamics.r = kv.GetDouble("r", 0.0);
  if (cfg.dynamics.is_actor_critic()) Require(cfg.dynamics.r > 0.0, kv, "r", "must be positive");

  cfg.z0 = kv.FindBlocks("z0");
  cfg.x0 = kv.FindBlocks("x0");
  Require(!cfg.x0 || cfg.dynamics.is_actor_critic(), kv, "x0",
          "only used by actor-critic dynamics");

  cfg.integrator.dt = kv.GetDouble("dt", cfg.integrator.dt);
  cfg.integrator.t_end = kv.GetDouble("t_end", cfg.integrator.t_end);
  const std::int64_t every = kv.GetInt("sample_every", cfg.integrator.sample_every);
  Require(every >= 1 && every <= 1'000'000'000, kv, "sample_every", "must be >= 1");
  cfg.integrator.sample_every = static_cast<int>(every);
  Require(cfg.integrator.dt > 0.0, kv, "dt", "must be positive");
  Require(cfg.integrator.t_end > 0.0, kv, "t_end", "must be positive");
  Require(cfg.integrator.dt <= cfg.integrator.t_end, kv, "dt", "must not exceed t_end");

  cfg.bound.kind = ParseNamed(kv, "bound", "none",
                              [](const std::string& s) { return ParseBoundKind(s); });
  if (cfg.bound.kind != BoundKind::kNone) {
    const BoundKind expected = cfg.dynamics.kind == DynamicsKind::kMirrorDescent ? BoundKind::kMd
                               : cfg.dynamics.kind == DynamicsKind::kActorCritic
                                   ? BoundKind::kAc
                                   : BoundKind::kDmd;
    Require(cfg.bound.kind == expected, kv, "bound", "does not match the dynamics");
    const std::string default_metric =
        cfg.bound.kind == BoundKind::kAc ? "potential_gap" : "bregman";
    cfg.bound.metric = ParseNamed(kv, "bound.metric", default_metric,
                                  [](const std::string& s) { return ParseBoundMetric(s); });
    cfg.bound.eta = kv.FindDouble("bound.eta");
    cfg.bound.mu = kv.FindDouble("bound.mu");
    cfg.bound.rho = kv.GetDouble("bound.rho", cfg.bound.rho);
    Require(cfg.bound.rho > 0.0, kv, "bound.rho", "must be positive");
    cfg.bound.mode = ParseNamed(kv, "bound.mode", "all_t",
                                [](const std::string& s) { return ParseValidity(s); });
    cfg.bound.t_min = kv.FindDouble("bound.t_min");
    Require(!cfg.bound.t_min || cfg.bound.mode == Validity::kAsymptotic, kv, "bound.t_min",
            "only meaningful with bound.mode = asymptotic");
    cfg.bound.slack = kv.GetDouble("bound.slack", cfg.bound.slack);
    Require(cfg.bound.slack >= 0.0, kv, "bound.slack", "must be nonnegative");
    if (cfg.bound.kind == BoundKind::kDmd) {
      Require(cfg.bound.mu.has_value(), kv, "bound.mu", "required by the dmd bound");
      Require(!cfg.bound.eta, kv, "bound.eta", "not used by the dmd bound (pass mu = -eta)");
    } else {
      Require(cfg.bound.eta.has_value(), kv, "bound.eta", "required by this bound");
      Require(*cfg.bound.eta >= 0.0, kv, "bound.eta", "must be nonnegative");
      Require(!cfg.bound.mu, kv, "bound.mu", "only used by the dmd bound");
    }
  }

  cfg.output = kv.GetString("output", cfg.output);
  const std::int64_t seed = kv.GetInt("seed", 0);
  Require(seed >= 0, kv, "seed", "must be nonnegative");
  cfg.seed = static_cast<std::uint64_t>(seed);
  cfg.samples = kv.GetInt("samples", cfg.samples);
  Require(cfg.samples >= 1, kv, "samples", "must be >= 1");

  kv.RejectUnused();
  return cfg;
}

ExperimentConfig LoadExperimentConfig(const std::string& path) {
  return ParseExperimentConfig(KeyValueConfig::Load(path));
}

}  // namespace dualdyn::cli
