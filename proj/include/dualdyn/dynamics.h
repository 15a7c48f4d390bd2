#ifndef DUALDYN_DYNAMICS_H_
#define DUALDYN_DYNAMICS_H_

// Continuous-time dual-space learning dynamics and a fixed-step RK4
// integrator.
//
//   MD   z' = gamma U(x),           x = C(z)
//   DMD  z' = gamma (-z + U(x)),    x = C(z)
//   AC   z' = gamma U(x),           x' = r (C(z) - x)
//
// For MD and DMD the state is z in R^n; for AC it is (z, x) in R^{2n}.

#include <Eigen/Dense>

#include <optional>
#include <string_view>
#include <vector>

#include "dualdyn/games.h"
#include "dualdyn/geometry.h"

namespace dualdyn {

enum class DynamicsKind { kMirrorDescent, kDiscountedMirrorDescent, kActorCritic };

std::string_view DynamicsKindName(DynamicsKind kind);  // "md", "dmd", "ac"
DynamicsKind ParseDynamicsKind(std::string_view name);

struct DynamicsSpec {
  DynamicsKind kind = DynamicsKind::kMirrorDescent;
  double gamma = 1.0;
  double r = 0.0;  // actor-critic primal filter rate

  static DynamicsSpec MirrorDescent(double gamma) {
    return {DynamicsKind::kMirrorDescent, gamma, 0.0};
  }
  static DynamicsSpec DiscountedMirrorDescent(double gamma) {
    return {DynamicsKind::kDiscountedMirrorDescent, gamma, 0.0};
  }
  static DynamicsSpec ActorCritic(double gamma, double r) {
    return {DynamicsKind::kActorCritic, gamma, r};
  }

  void Validate() const;
  bool is_actor_critic() const { return kind == DynamicsKind::kActorCritic; }
};

struct IntegratorConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  int sample_every = 1;

  void Validate() const;
};

// Runs are aborted once |z|_inf exceeds this.
inline constexpr double kDivergenceThreshold = 1e12;

struct Trajectory {
  DynamicsKind kind = DynamicsKind::kMirrorDescent;
  BlockPartition partition;
  std::vector<double> times;
  std::vector<Eigen::VectorXd> z_samples;
  // Strategies in play: C(z) for MD/DMD, the primal state for AC.
  std::vector<Eigen::VectorXd> x_samples;
  // C(z) at each sample. Identical to x_samples except for AC.
  std::vector<Eigen::VectorXd> mapped_samples;

  std::size_t size() const { return times.size(); }
  StrategyProfile profile(std::size_t k) const {
    return StrategyProfile(x_samples[k], partition);
  }
};

Eigen::VectorXd VectorField(const DynamicsSpec& dynamics, const Game& game,
                            const MirrorSpec& mirror, const Eigen::VectorXd& state);

// Classical RK4 with fixed step dt; samples at t = 0, every sample_every steps
// and at t_end. x0 (AC only) defaults to C(z0).
Trajectory Integrate(const DynamicsSpec& dynamics, const Game& game, const MirrorSpec& mirror,
                     const Eigen::VectorXd& z0, const IntegratorConfig& config,
                     const std::optional<Eigen::VectorXd>& x0 = std::nullopt);

// |x(t_K) - x(t_{K-1})|_inf / (t_K - t_{K-1}) over the last two samples.
double FinalPrimalSpeed(const Trajectory& trajectory);

}  // namespace dualdyn

#endif  // DUALDYN_DYNAMICS_H_
