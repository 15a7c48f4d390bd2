#include "dualdyn/games.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "dualdyn/error.h"

namespace dualdyn {

namespace {

std::vector<Eigen::Index> DomainSizes(const std::vector<Domain>& domains) {
  std::vector<Eigen::Index> sizes;
  sizes.reserve(domains.size());
  for (const auto& d : domains) sizes.push_back(d.dim());
  return sizes;
}

double Logistic(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

// log(1 + exp(t)) without overflow.
double Softplus(double t) {
  return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t)));
}

Eigen::MatrixXd FiniteDifferenceJacobian(const Game& game, const Eigen::VectorXd& x,
                                         double step) {
  const Eigen::Index n = x.size();
  Eigen::MatrixXd jac(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::VectorXd plus = x;
    Eigen::VectorXd minus = x;
    plus[j] += step;
    minus[j] -= step;
    jac.col(j) = (game.PseudoGradient(plus) - game.PseudoGradient(minus)) / (2.0 * step);
  }
  return jac;
}

double SpectralNorm(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

}  // namespace

StrategyProfile::StrategyProfile(Eigen::VectorXd values, BlockPartition partition)
    : values_(std::move(values)), partition_(std::move(partition)) {
  if (values_.size() != partition_.total()) {
    Fail(ErrorCode::kInvalidInput, "strategy profile length does not match its partition");
  }
}

bool StrategyProfile::IsFeasible(const std::vector<Domain>& domains, double tol) const {
  if (domains.size() != partition_.num_blocks()) return false;
  for (std::size_t p = 0; p < domains.size(); ++p) {
    if (!domains[p].Contains(block(p), tol)) return false;
  }
  return true;
}

Game::Game(std::string name, std::vector<Domain> domains, PseudoGradientFn pseudo_gradient,
           std::optional<PotentialFn> potential, std::optional<double> lipschitz_hint)
    : name_(std::move(name)),
      domains_(std::move(domains)),
      partition_(DomainSizes(domains_)),
      pseudo_gradient_(std::move(pseudo_gradient)),
      potential_(std::move(potential)),
      lipschitz_hint_(lipschitz_hint) {
  if (!pseudo_gradient_) Fail(ErrorCode::kInvalidGame, "game needs a pseudo-gradient");
  if (lipschitz_hint_ && !(*lipschitz_hint_ > 0.0)) {
    Fail(ErrorCode::kInvalidGame, "Lipschitz hint must be positive");
  }
}

Eigen::VectorXd Game::PseudoGradient(const Eigen::VectorXd& x) const {
  if (x.size() != dim()) {
    std::ostringstream msg;
    msg << name_ << ": profile has length " << x.size() << ", expected " << dim();
    Fail(ErrorCode::kInvalidInput, msg.str());
  }
  Eigen::VectorXd u = pseudo_gradient_(x);
  if (u.size() != dim()) {
    Fail(ErrorCode::kInvalidGame, name_ + ": pseudo-gradient has the wrong length");
  }
  return u;
}

double Game::Potential(const Eigen::VectorXd& x) const {
  if (!potential_) Fail(ErrorCode::kInvalidGame, name_ + " has no potential");
  if (x.size() != dim()) Fail(ErrorCode::kInvalidInput, "profile has the wrong length");
  return (*potential_)(x);
}

Eigen::VectorXd Game::Project(const Eigen::VectorXd& x) const {
  if (x.size() != dim()) Fail(ErrorCode::kInvalidInput, "profile has the wrong length");
  Eigen::VectorXd out(dim());
  for (std::size_t p = 0; p < domains_.size(); ++p) {
    partition_.block(out, p) = domains_[p].Project(partition_.block(x, p));
  }
  return out;
}

Eigen::VectorXd Game::Center() const {
  Eigen::VectorXd out(dim());
  for (std::size_t p = 0; p < domains_.size(); ++p) {
    partition_.block(out, p) = domains_[p].Center();
  }
  return out;
}

Eigen::VectorXd Game::SampleInterior(std::mt19937_64& rng) const {
  Eigen::VectorXd out(dim());
  for (std::size_t p = 0; p < domains_.size(); ++p) {
    partition_.block(out, p) = domains_[p].SampleInterior(rng);
  }
  return out;
}

StrategyProfile Game::Profile(Eigen::VectorXd x) const {
  return StrategyProfile(std::move(x), partition_);
}

Eigen::Matrix3d RpsPayoffMatrix(double w, double l) {
  Eigen::Matrix3d a;
  a << 0.0, -l, w,
       w, 0.0, -l,
       -l, w, 0.0;
  return a;
}

Game BuildRps(double w, double l, RpsPayoffOrder order) {
  if (!(w > 0.0) || !(l > 0.0)) {
    Fail(ErrorCode::kInvalidParameter, "RPS win and loss values must be positive");
  }
  const Eigen::MatrixXd a = RpsPayoffMatrix(w, l);
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(6, 6);
  if (order == RpsPayoffOrder::kCrossPlay) {
    phi.block(0, 3, 3, 3) = a;
    phi.block(3, 0, 3, 3) = a;
  } else {
    phi.block(0, 0, 3, 3) = a;
    phi.block(3, 3, 3, 3) = a;
  }
  std::ostringstream name;
  name << "rps(w=" << w << ",l=" << l << ")";
  Game game(name.str(), {Domain::Simplex(3), Domain::Simplex(3)},
            [phi](const Eigen::VectorXd& x) -> Eigen::VectorXd { return phi * x; },
            std::nullopt, SpectralNorm(phi));
  game.set_linear_operator(phi);
  game.set_known_equilibrium(Eigen::VectorXd::Constant(6, 1.0 / 3.0));
  return game;
}

Game BuildNetworkZeroSum(const EdgeMatrices& edges) {
  if (edges.empty()) Fail(ErrorCode::kInvalidGame, "network game needs at least one edge");
  int num_players = 0;
  for (const auto& [pq, m] : edges) {
    if (pq.first < 0 || pq.second < 0) Fail(ErrorCode::kInvalidGame, "negative player index");
    num_players = std::max({num_players, pq.first + 1, pq.second + 1});
  }
  std::vector<Eigen::Index> dims(num_players, 0);
  auto record_dim = [&dims](int p, Eigen::Index n) {
    if (n < 1) Fail(ErrorCode::kInvalidGame, "empty edge matrix");
    if (dims[p] != 0 && dims[p] != n) {
      Fail(ErrorCode::kInvalidGame,
           "inconsistent strategy dimension for player " + std::to_string(p));
    }
    dims[p] = n;
  };
  for (const auto& [pq, m] : edges) {
    record_dim(pq.first, m.rows());
    record_dim(pq.second, m.cols());
    const auto reverse = edges.find({pq.second, pq.first});
    if (reverse == edges.end()) {
      Fail(ErrorCode::kInvalidGame, "edge (" + std::to_string(pq.first) + "," +
                                        std::to_string(pq.second) + ") has no reverse block");
    }
    const Eigen::MatrixXd& back = reverse->second;
    if (back.rows() != m.cols() || back.cols() != m.rows() ||
        (back + m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + m.cwiseAbs().maxCoeff())) {
      Fail(ErrorCode::kInvalidGame, "edge (" + std::to_string(pq.second) + "," +
                                        std::to_string(pq.first) +
                                        ") is not the negative transpose of its reverse");
    }
  }
  std::vector<Domain> domains;
  for (int p = 0; p < num_players; ++p) {
    if (dims[p] == 0) {
      Fail(ErrorCode::kInvalidGame, "player " + std::to_string(p) + " has no edges");
    }
    domains.push_back(Domain::Simplex(dims[p]));
  }
  const BlockPartition part(dims);
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(part.total(), part.total());
  for (const auto& [pq, m] : edges) {
    phi.block(part.offset(pq.first), part.offset(pq.second), m.rows(), m.cols()) = m;
  }
  if ((phi + phi.transpose()).cwiseAbs().maxCoeff() != 0.0) {
    Fail(ErrorCode::kInvalidGame, "assembled operator is not skew-symmetric");
  }
  const double lipschitz = SpectralNorm(phi);
  Game game("network-zero-sum(" + std::to_string(num_players) + " players)",
            std::move(domains),
            [phi](const Eigen::VectorXd& x) -> Eigen::VectorXd { return phi * x; },
            std::nullopt, lipschitz > 0.0 ? std::optional<double>(lipschitz) : std::nullopt);
  game.set_linear_operator(phi);
  return game;
}

Eigen::Matrix2d MatchingPennies(double k) {
  Eigen::Matrix2d m;
  m << k, -k,
       -k, k;
  return m;
}

EdgeMatrices ThreePlayerMatchingPenniesEdges() {
  EdgeMatrices edges;
  const auto add = [&edges](int p, int q, const Eigen::MatrixXd& m) {
    edges[{p, q}] = m;
    edges[{q, p}] = -m.transpose();
  };
  add(0, 1, MatchingPennies(1.0));
  add(0, 2, MatchingPennies(2.0));
  add(1, 2, MatchingPennies(3.0));
  return edges;
}

Game BuildThreePlayerMatchingPennies() {
  Game game = BuildNetworkZeroSum(ThreePlayerMatchingPenniesEdges());
  game.set_known_equilibrium(Eigen::VectorXd::Constant(6, 0.5));
  return game;
}

Dataset LoadDataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kInvalidInput, "cannot open dataset '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) Fail(ErrorCode::kInvalidInput, "dataset is empty");
  line.erase(std::remove_if(line.begin(), line.end(), ::isspace), line.end());
  if (line != "a,b") Fail(ErrorCode::kInvalidInput, "dataset header must be 'a,b'");
  Dataset data;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    std::string a_str;
    std::string b_str;
    if (!std::getline(fields, a_str, ',') || !std::getline(fields, b_str)) {
      Fail(ErrorCode::kInvalidInput, "malformed dataset row " + std::to_string(row));
    }
    try {
      std::size_t used = 0;
      const double a = std::stod(a_str, &used);
      const double b = std::stod(b_str);
      if (b != 1.0 && b != -1.0) {
        Fail(ErrorCode::kInvalidInput,
             "dataset row " + std::to_string(row) + ": label must be -1 or +1");
      }
      data.push_back({a, static_cast<int>(b)});
    } catch (const std::logic_error&) {
      Fail(ErrorCode::kInvalidInput, "non-numeric dataset row " + std::to_string(row));
    }
  }
  return data;
}

Game BuildAdversarialAttack(const Dataset& data, LogisticWeights weights, double r_reg,
                            double iota_lo, double iota_hi) {
  if (data.empty()) Fail(ErrorCode::kInvalidInput, "adversarial dataset is empty");
  for (const auto& point : data) {
    if (point.b != 1 && point.b != -1) {
      Fail(ErrorCode::kInvalidInput, "dataset labels must be -1 or +1");
    }
    if (!std::isfinite(point.a)) Fail(ErrorCode::kInvalidInput, "non-finite dataset entry");
  }
  if (!(r_reg > 0.0)) Fail(ErrorCode::kInvalidParameter, "r_reg must be positive");
  const auto n = static_cast<Eigen::Index>(data.size());
  Eigen::VectorXd a(n);
  Eigen::VectorXd target(n);  // flipped labels
  for (Eigen::Index i = 0; i < n; ++i) {
    a[i] = data[i].a;
    target[i] = -static_cast<double>(data[i].b);
  }
  const double w0 = weights.w0;
  const double w1 = weights.w1;
  auto pseudo_gradient = [a, target, w0, w1, r_reg, n](const Eigen::VectorXd& x) {
    const double iota = x[0];
    const auto p = x.tail(n);
    Eigen::VectorXd u(n + 1);
    double u1 = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double margin = -target[i] * (w0 + w1 * (a[i] + iota));
      u1 += p[i] * target[i] * w1 * Logistic(margin);
      u[1 + i] = Softplus(margin) - r_reg * (p[i] - 1.0 / static_cast<double>(n));
    }
    u[0] = u1;
    return u;
  };
  const double lipschitz =
      r_reg + 0.25 * w1 * w1 + std::abs(w1) * std::sqrt(static_cast<double>(n));
  return Game("adversarial-attack(N=" + std::to_string(n) + ")",
              {Domain::Interval(iota_lo, iota_hi), Domain::Simplex(n)}, pseudo_gradient,
              std::nullopt, lipschitz);
}

double AdversarialGridEta(const Dataset& data, LogisticWeights weights, double r_reg,
                          int grid_points, double iota_lo, double iota_hi) {
  if (data.empty()) Fail(ErrorCode::kInvalidInput, "adversarial dataset is empty");
  if (grid_points < 2) Fail(ErrorCode::kInvalidParameter, "grid needs at least 2 points");
  double eta = r_reg;
  for (int k = 0; k < grid_points; ++k) {
    const double iota = iota_lo + (iota_hi - iota_lo) * k / (grid_points - 1.0);
    for (const auto& point : data) {
      const double target = -static_cast<double>(point.b);
      const double s = Logistic(-target * (weights.w0 + weights.w1 * (point.a + iota)));
      eta = std::min(eta, std::pow(target * weights.w1, 2) * s * (1.0 - s));
    }
  }
  return eta;
}

Game BuildQuadraticPotential(const Eigen::MatrixXd& q, const Eigen::VectorXd& b,
                             std::vector<Domain> domains) {
  if (q.rows() != q.cols() || q.rows() != b.size()) {
    Fail(ErrorCode::kInvalidInput, "Q must be square and match b");
  }
  const double scale = std::max(1.0, q.cwiseAbs().maxCoeff());
  if ((q - q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    Fail(ErrorCode::kInvalidParameter, "Q must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q);
  const double lambda_min = eig.eigenvalues().minCoeff();
  const double lambda_max = eig.eigenvalues().maxCoeff();
  if (!(lambda_min > 0.0)) Fail(ErrorCode::kInvalidParameter, "Q must be positive definite");
  Eigen::Index total = 0;
  for (const auto& d : domains) total += d.dim();
  if (total != q.rows()) Fail(ErrorCode::kInvalidInput, "domains do not match the size of Q");

  Game game(
      "quadratic-potential", std::move(domains),
      [q, b](const Eigen::VectorXd& x) -> Eigen::VectorXd { return -q * x + b; },
      PotentialFn([q, b](const Eigen::VectorXd& x) { return -0.5 * x.dot(q * x) + b.dot(x); }),
      lambda_max);
  const Eigen::VectorXd maximizer = q.ldlt().solve(b);
  if (game.Profile(maximizer).IsFeasible(game.domains())) {
    game.set_known_equilibrium(maximizer);
  }
  return game;
}

MonotonicityReport EstimateMonotonicity(const Game& game, const std::vector<Regularizer>& h,
                                        std::int64_t n_pairs, std::uint64_t seed) {
  if (n_pairs < 1) Fail(ErrorCode::kInvalidParameter, "n_pairs must be >= 1");
  if (h.size() != game.num_players()) {
    Fail(ErrorCode::kInvalidInput, "one reference regularizer per player is required");
  }
  for (std::size_t p = 0; p < h.size(); ++p) {
    if (!(h[p].domain() == game.domains()[p])) {
      Fail(ErrorCode::kDomainError,
           "reference regularizer domain differs from player " + std::to_string(p));
    }
  }
  std::mt19937_64 rng(seed);
  double sup_r = -std::numeric_limits<double>::infinity();
  double inf_r = std::numeric_limits<double>::infinity();
  double sup_rh = -std::numeric_limits<double>::infinity();
  std::int64_t used = 0;
  for (std::int64_t k = 0; k < n_pairs; ++k) {
    const Eigen::VectorXd x = game.SampleInterior(rng);
    const Eigen::VectorXd y = game.SampleInterior(rng);
    const Eigen::VectorXd dx = x - y;
    const double dx_sq = dx.squaredNorm();
    if (!(dx_sq > 0.0)) continue;
    const Eigen::VectorXd du = game.PseudoGradient(x) - game.PseudoGradient(y);
    double num = du.dot(dx);
    // Inner products at rounding level are zero (skew operators).
    if (std::abs(num) <= 1e-12 * du.norm() * std::sqrt(dx_sq)) num = 0.0;
    const double sym_bregman = Bregman(h, x, y) + Bregman(h, y, x);
    if (!(sym_bregman > 0.0)) continue;
    const double r = num / dx_sq;
    const double rh = num / sym_bregman;
    sup_r = std::max(sup_r, r);
    inf_r = std::min(inf_r, r);
    sup_rh = std::max(sup_rh, rh);
    ++used;
  }
  if (used == 0) Fail(ErrorCode::kDomainError, "could not sample distinct interior pairs");
  MonotonicityReport report;
  report.samples_used = used;
  report.sup_ratio = sup_r;
  report.inf_ratio = inf_r;
  report.sup_relative_ratio = sup_rh;
  report.eta_est = sup_r < 0.0 ? -sup_r : 0.0;
  report.mu_est = std::max(sup_r, 0.0);
  report.relative_eta_est = sup_rh < 0.0 ? -sup_rh : 0.0;
  report.relative_mu_est = std::max(sup_rh, 0.0);
  return report;
}

bool CheckPotential(const Game& game, int n_points, double fd_step, double tol,
                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (int k = 0; k < n_points; ++k) {
    const Eigen::MatrixXd jac = FiniteDifferenceJacobian(game, game.SampleInterior(rng), fd_step);
    const double scale = std::max(1.0, jac.cwiseAbs().maxCoeff());
    if ((jac - jac.transpose()).cwiseAbs().maxCoeff() > tol * scale) return false;
  }
  return true;
}

double PotentialGradientMismatch(const Game& game, int n_points, double fd_step,
                                 std::uint64_t seed) {
  if (!game.has_potential()) Fail(ErrorCode::kInvalidGame, game.name() + " has no potential");
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int k = 0; k < n_points; ++k) {
    const Eigen::VectorXd x = game.SampleInterior(rng);
    Eigen::VectorXd grad(x.size());
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      Eigen::VectorXd plus = x;
      Eigen::VectorXd minus = x;
      plus[j] += fd_step;
      minus[j] -= fd_step;
      grad[j] = (game.Potential(plus) - game.Potential(minus)) / (2.0 * fd_step);
    }
    const Eigen::VectorXd u = game.PseudoGradient(x);
    worst = std::max(worst, (grad - u).cwiseAbs().maxCoeff() /
                                std::max(1.0, u.cwiseAbs().maxCoeff()));
  }
  return worst;
}

Game PerturbGame(const Game& game, const MirrorSpec& spec) {
  if (spec.blocks().size() != game.num_players()) {
    Fail(ErrorCode::kInvalidInput, "mirror spec and game have different player counts");
  }
  for (std::size_t p = 0; p < game.num_players(); ++p) {
    if (!(spec.block(p).domain() == game.domains()[p])) {
      Fail(ErrorCode::kDomainError, "mirror spec domain differs from player " + std::to_string(p));
    }
  }
  const BlockPartition part = game.partition();
  const double eps = spec.epsilon();
  auto u = [game, spec, part, eps](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    Eigen::VectorXd out = game.PseudoGradient(x);
    for (std::size_t p = 0; p < part.num_blocks(); ++p) {
      part.block(out, p) -= eps * spec.block(p).Gradient(part.block(x, p));
    }
    return out;
  };
  std::optional<PotentialFn> potential;
  if (game.has_potential()) {
    potential = [game, spec, part, eps](const Eigen::VectorXd& x) {
      double value = game.Potential(x);
      for (std::size_t p = 0; p < part.num_blocks(); ++p) {
        value -= eps * spec.block(p).Value(part.block(x, p));
      }
      return value;
    };
  }
  std::optional<double> lipschitz;
  bool euclidean = true;
  for (const auto& reg : spec.blocks()) euclidean &= reg.kind() == RegularizerKind::kEuclidean;
  if (euclidean && game.lipschitz_hint()) lipschitz = *game.lipschitz_hint() + eps;
  return Game("perturbed(" + game.name() + ")", game.domains(), u, potential, lipschitz);
}

std::vector<Regularizer> UniformRegularizers(const Game& game, RegularizerKind kind) {
  std::vector<Regularizer> regs;
  for (const auto& d : game.domains()) regs.emplace_back(kind, d);
  return regs;
}

}  // namespace dualdyn
