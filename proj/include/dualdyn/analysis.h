#ifndef DUALDYN_ANALYSIS_H_
#define DUALDYN_ANALYSIS_H_

// Equilibrium solvers, the dual Lyapunov function, exponential rate bounds for
// MD / DMD / AC and verification of sampled trajectories against them.

#include <Eigen/Dense>

#include <optional>
#include <string_view>
#include <vector>

#include "dualdyn/dynamics.h"
#include "dualdyn/games.h"
#include "dualdyn/geometry.h"

namespace dualdyn {

// Nash equilibrium via the variational characterization
// (x - x*)'U(x*) <= 0 for all x. Builders with a closed-form equilibrium return
// it directly; otherwise an extragradient iteration runs until the projected
// residual |x - Proj(x + sigma U(x))|_2 <= tol, with sigma = 1/L from the
// Lipschitz hint or found by halving from 1.
StrategyProfile SolveNe(const Game& game, double tol = 1e-10, int max_iter = 200000);

// Damped fixed point x <- (1 - a) x + a C(U(x)) until |x - C(U(x))|_inf <= tol.
StrategyProfile SolvePerturbedNe(const Game& game, const MirrorSpec& mirror,
                                 double tol = 1e-12, int max_iter = 100000,
                                 double damping = 0.5,
                                 const std::optional<Eigen::VectorXd>& initial = std::nullopt);

// V(z) = gamma^{-1} sum_p D_{psi^*}(z^p, z_target^p).
double LyapunovMd(const MirrorSpec& mirror, double gamma, const Eigen::VectorXd& z,
                  const Eigen::VectorXd& z_target);

enum class BoundMetric { kBregmanToTarget, kEuclidSqToTarget, kPotentialGap };
enum class Validity { kAllT, kAsymptotic };

std::string_view BoundMetricName(BoundMetric metric);  // bregman, euclid_sq, potential_gap
BoundMetric ParseBoundMetric(std::string_view name);
std::string_view ValidityName(Validity validity);  // all_t, asymptotic
Validity ParseValidity(std::string_view name);

// metric(t) <= constant * exp(-exponent * t).
struct RateBound {
  double exponent = 0.0;
  double constant = 0.0;
  BoundMetric metric = BoundMetric::kBregmanToTarget;
  StrategyProfile target;
  Validity validity = Validity::kAllT;

  double Evaluate(double t) const;
};

struct RateBoundPair {
  RateBound bregman;
  RateBound euclid_sq;
};

struct ActorCriticBounds {
  RateBound potential_gap;
  RateBound bregman;
  RateBound euclid_sq;
};

// D_h(x*, x) <= e^{-gamma eta t / eps} D0 and |x* - x|^2 <= 2 D0 / rho times
// the same factor. eta = 0 gives the non-decaying envelope of null-monotone
// games.
RateBoundPair MdRateBound(double gamma, double eta, double epsilon, double d0, double rho,
                          const StrategyProfile& target, Validity validity = Validity::kAllT);

// Exponent gamma (eps - mu) / eps; mu may be negative (-eta for strongly
// monotone games). Requires eps > mu.
RateBoundPair DmdRateBound(double gamma, double mu, double epsilon, double d0, double rho,
                           const StrategyProfile& target, Validity validity = Validity::kAllT);

// Requires eps > eta gamma / r. With C = gap0 + r eps D0 / gamma:
// gap <= C e^{-beta t}, D_h(x, x*) <= C/eta e^{-beta t},
// |x - x*|^2 <= 2C/(rho eta) e^{-beta t}, beta = gamma eta / eps.
ActorCriticBounds AcRateBound(double gamma, double eta, double epsilon, double r, double gap0,
                              double d0, double rho, const StrategyProfile& target,
                              Validity validity = Validity::kAllT);

struct BoundViolation {
  double t;
  double measured;
  double bound;
};

struct BoundReport {
  std::size_t checked_times = 0;
  std::vector<BoundViolation> violations;
  double max_ratio = 0.0;
  Validity mode = Validity::kAllT;
  double t_min = 0.0;

  bool pass() const { return violations.empty(); }
};

// Metric series along a trajectory. The Bregman metric is D_h(target, x(t)) for
// MD/DMD and D_h(x(t), target) for AC.
std::vector<double> MeasureMetric(const Trajectory& trajectory, BoundMetric metric,
                                  const StrategyProfile& target, const Game& game,
                                  const std::vector<Regularizer>& h);

// Checks metric <= bound * (1 + slack) at every sample (asymptotic mode skips
// t < t_min; the default t_min is the first time the metric drops below its
// initial value).
BoundReport VerifyBound(const Trajectory& trajectory, const RateBound& bound, const Game& game,
                        const std::vector<Regularizer>& h, double slack = 1e-6,
                        std::optional<double> t_min = std::nullopt);

enum class RelativeKind { kStrong, kHypo };

// eta / ell for strong monotonicity w.r.t. an ell-smooth h; mu / rho for
// hypo-monotonicity w.r.t. a rho-strongly convex h.
double ConvertRelative(double constant, RelativeKind kind, double modulus);

// Least-squares decay exponent of log(values) over the final half of the
// resolved window (samples down to 1e-24 of the peak value).
double FitDecayExponent(const std::vector<double>& times, const std::vector<double>& values);

}  // namespace dualdyn

#endif  // DUALDYN_ANALYSIS_H_
