#ifndef DUALDYN_GAMES_H_
#define DUALDYN_GAMES_H_

// N-player concave games described by their pseudo-gradient
// U(x) = (grad_{x^p} u^p(x))_p, builders for the case-study games, and
// sampling-based monotonicity diagnostics.

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dualdyn/geometry.h"

namespace dualdyn {

// A stacked profile x = (x^p)_p with every block in its player's domain.
class StrategyProfile {
 public:
  StrategyProfile(Eigen::VectorXd values, BlockPartition partition);

  const Eigen::VectorXd& values() const { return values_; }
  const BlockPartition& partition() const { return partition_; }
  Eigen::VectorXd block(std::size_t p) const { return partition_.block(values_, p); }

  // Checks each block against its domain (sums to 1 or within the box, up to
  // tol).
  bool IsFeasible(const std::vector<Domain>& domains, double tol = 1e-12) const;

 private:
  Eigen::VectorXd values_;
  BlockPartition partition_;
};

using PseudoGradientFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using PotentialFn = std::function<double(const Eigen::VectorXd&)>;

class Game {
 public:
  Game(std::string name, std::vector<Domain> domains, PseudoGradientFn pseudo_gradient,
       std::optional<PotentialFn> potential = std::nullopt,
       std::optional<double> lipschitz_hint = std::nullopt);

  const std::string& name() const { return name_; }
  const BlockPartition& partition() const { return partition_; }
  const std::vector<Domain>& domains() const { return domains_; }
  std::size_t num_players() const { return domains_.size(); }
  Eigen::Index dim() const { return partition_.total(); }

  Eigen::VectorXd PseudoGradient(const Eigen::VectorXd& x) const;

  bool has_potential() const { return potential_.has_value(); }
  double Potential(const Eigen::VectorXd& x) const;

  std::optional<double> lipschitz_hint() const { return lipschitz_hint_; }

  // Builders that know their equilibrium in closed form register it here.
  const std::optional<Eigen::VectorXd>& known_equilibrium() const {
    return known_equilibrium_;
  }
  void set_known_equilibrium(Eigen::VectorXd x) { known_equilibrium_ = std::move(x); }

  // Set when U(x) = Phi x for a fixed matrix.
  const std::optional<Eigen::MatrixXd>& linear_operator() const { return linear_operator_; }
  void set_linear_operator(Eigen::MatrixXd phi) { linear_operator_ = std::move(phi); }

  // Euclidean projection onto Omega = prod_p Omega^p.
  Eigen::VectorXd Project(const Eigen::VectorXd& x) const;
  Eigen::VectorXd Center() const;
  Eigen::VectorXd SampleInterior(std::mt19937_64& rng) const;
  StrategyProfile Profile(Eigen::VectorXd x) const;

 private:
  std::string name_;
  std::vector<Domain> domains_;
  BlockPartition partition_;
  PseudoGradientFn pseudo_gradient_;
  std::optional<PotentialFn> potential_;
  std::optional<double> lipschitz_hint_;
  std::optional<Eigen::VectorXd> known_equilibrium_;
  std::optional<Eigen::MatrixXd> linear_operator_;
};

// --- Rock-paper-scissors ---------------------------------------------------

// kCrossPlay: U = [0 A; B' 0] x with B = A', i.e. (A x^2, A x^1).
// kOwnStrategy: U = (A x^1, A x^2).
enum class RpsPayoffOrder { kCrossPlay, kOwnStrategy };

// A = [0 -l w; w 0 -l; -l w 0].
Eigen::Matrix3d RpsPayoffMatrix(double w, double l);
Game BuildRps(double w, double l, RpsPayoffOrder order = RpsPayoffOrder::kCrossPlay);

// --- Network zero-sum games ------------------------------------------------

// Block (p, q) of Phi, i.e. the contribution of x^q to U^p. Every stored block
// (p, q) must come with (q, p) = -(p, q)'.
using EdgeMatrices = std::map<std::pair<int, int>, Eigen::MatrixXd>;

Game BuildNetworkZeroSum(const EdgeMatrices& edges);

// Matching pennies with stake k: [k -k; -k k].
Eigen::Matrix2d MatchingPennies(double k);
// Three players, A^{12} = A(1), A^{13} = A(2), A^{23} = A(3).
EdgeMatrices ThreePlayerMatchingPenniesEdges();
Game BuildThreePlayerMatchingPennies();

// --- Adversarial attack on a dataset ---------------------------------------

struct LabeledPoint {
  double a;
  int b;  // -1 or +1
};
using Dataset = std::vector<LabeledPoint>;

// Reads a CSV with header "a,b".
Dataset LoadDataset(const std::string& path);

struct LogisticWeights {
  double w0;
  double w1;
};

// Player 1 picks a perturbation iota in [lo, hi]; player 2 mixes the
// per-sample logistic losses against flipped targets, regularized by
// (r/2) |p - 1/N|^2.
Game BuildAdversarialAttack(const Dataset& data, LogisticWeights weights, double r_reg,
                            double iota_lo = -1.0, double iota_hi = 1.0);

// Strong-monotonicity modulus by grid search over iota: the smallest per-sample
// curvature (b w1)^2 phi (1 - phi), capped at r_reg.
double AdversarialGridEta(const Dataset& data, LogisticWeights weights, double r_reg,
                          int grid_points = 20001, double iota_lo = -1.0,
                          double iota_hi = 1.0);

// --- Quadratic potential games ---------------------------------------------

// P(x) = -x'Qx/2 + b'x, U = -Qx + b. Q must be symmetric positive definite.
Game BuildQuadraticPotential(const Eigen::MatrixXd& q, const Eigen::VectorXd& b,
                             std::vector<Domain> domains);

// --- Diagnostics -----------------------------------------------------------

struct MonotonicityReport {
  double eta_est = 0.0;
  double mu_est = 0.0;
  double relative_eta_est = 0.0;
  double relative_mu_est = 0.0;
  std::int64_t samples_used = 0;
  // Raw sample suprema of the two ratios.
  double sup_ratio = 0.0;
  double sup_relative_ratio = 0.0;
  double inf_ratio = 0.0;
};

// Samples interior pairs and bounds
//   r2 = (U(x) - U(x'))'(x - x') / |x - x'|^2
//   rh = (U(x) - U(x'))'(x - x') / (D_h(x, x') + D_h(x', x))
// from the sample suprema. The first k pairs depend only on the seed, so a
// larger n_pairs extends the same sample.
MonotonicityReport EstimateMonotonicity(const Game& game, const std::vector<Regularizer>& h,
                                        std::int64_t n_pairs, std::uint64_t seed);

// True iff the central-difference Jacobian of U is symmetric within tol
// (relative to its largest entry) at every sampled point.
bool CheckPotential(const Game& game, int n_points, double fd_step = 1e-6,
                    double tol = 1e-6, std::uint64_t seed = 0);

// Worst relative mismatch between central differences of P and U over
// n_points interior samples.
double PotentialGradientMismatch(const Game& game, int n_points, double fd_step = 1e-6,
                                 std::uint64_t seed = 0);

// U - eps grad theta, the pseudo-gradient of the game whose payoffs are
// penalized by eps theta^p. The potential, if any, becomes P - eps sum theta^p.
Game PerturbGame(const Game& game, const MirrorSpec& spec);

// The same kind of regularizer for every player of the game.
std::vector<Regularizer> UniformRegularizers(const Game& game, RegularizerKind kind);

}  // namespace dualdyn

#endif  // DUALDYN_GAMES_H_
