#include "dualdyn/analysis.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "dualdyn/error.h"

namespace dualdyn {

namespace {

double ProjectedResidual(const Game& game, const Eigen::VectorXd& x, double sigma) {
  return (x - game.Project(x + sigma * game.PseudoGradient(x))).norm();
}

void RequirePositive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    Fail(ErrorCode::kInvalidParameter, std::string(name) + " must be positive");
  }
}

void RequireNonNegative(double value, const char* name) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    Fail(ErrorCode::kInvalidParameter, std::string(name) + " must be nonnegative");
  }
}

RateBound MakeBound(double exponent, double constant, BoundMetric metric,
                    const StrategyProfile& target, Validity validity) {
  return RateBound{exponent, constant, metric, target, validity};
}

}  // namespace

StrategyProfile SolveNe(const Game& game, double tol, int max_iter) {
  if (game.known_equilibrium()) return game.Profile(*game.known_equilibrium());
  RequirePositive(tol, "tol");
  if (max_iter < 1) Fail(ErrorCode::kInvalidParameter, "max_iter must be >= 1");

  const bool line_search = !game.lipschitz_hint() || !(*game.lipschitz_hint() > 0.0);
  double sigma = line_search ? 1.0 : 1.0 / *game.lipschitz_hint();
  Eigen::VectorXd x = game.Center();
  double residual = ProjectedResidual(game, x, sigma);

  // Extragradient: y = P(x + s U(x)), x+ = P(x + s U(y)).
  for (int iter = 0; iter < max_iter; ++iter) {
    if (residual <= tol) return game.Profile(x);
    const Eigen::VectorXd u = game.PseudoGradient(x);
    Eigen::VectorXd y = game.Project(x + sigma * u);
    Eigen::VectorXd uy = game.PseudoGradient(y);
    while (sigma * (uy - u).norm() > 0.9 * (y - x).norm()) {
      sigma *= 0.5;
      if (sigma < 1e-16) Fail(ErrorCode::kSolverFailure, "extragradient step size underflow");
      y = game.Project(x + sigma * u);
      uy = game.PseudoGradient(y);
    }
    x = game.Project(x + sigma * uy);
    residual = ProjectedResidual(game, x, sigma);
  }
  if (residual <= tol) return game.Profile(x);
  std::ostringstream msg;
  msg << "extragradient did not converge on " << game.name() << " after " << max_iter
      << " iterations (residual " << residual << ", tol " << tol << ")";
  Fail(ErrorCode::kSolverFailure, msg.str());
}

StrategyProfile SolvePerturbedNe(const Game& game, const MirrorSpec& mirror, double tol,
                                 int max_iter, double damping,
                                 const std::optional<Eigen::VectorXd>& initial) {
  if (!(game.partition() == mirror.partition())) {
    Fail(ErrorCode::kInvalidInput, "mirror spec partition does not match the game");
  }
  RequirePositive(tol, "tol");
  if (max_iter < 1) Fail(ErrorCode::kInvalidParameter, "max_iter must be >= 1");
  if (!(damping > 0.0 && damping <= 1.0)) {
    Fail(ErrorCode::kInvalidParameter, "damping must lie in (0, 1]");
  }

  Eigen::VectorXd x = initial ? *initial : MirrorMap(mirror, Eigen::VectorXd::Zero(game.dim()));
  if (x.size() != game.dim()) Fail(ErrorCode::kInvalidInput, "initial point has the wrong length");

  auto fixed_point_gap = [&](const Eigen::VectorXd& v, Eigen::VectorXd* image) {
    *image = MirrorMap(mirror, game.PseudoGradient(v));
    return (v - *image).cwiseAbs().maxCoeff();
  };

  Eigen::VectorXd image;
  double gap = fixed_point_gap(x, &image);
  for (int iter = 0; iter < max_iter && gap > tol; ++iter) {
    x = (1.0 - damping) * x + damping * image;
    gap = fixed_point_gap(x, &image);
  }
  if (!(gap <= tol)) {
    std::ostringstream msg;
    msg << "perturbed equilibrium iteration did not converge on " << game.name() << " (gap "
        << gap << " after " << max_iter << " iterations, damping " << damping << ", eps "
        << mirror.epsilon() << "); try a smaller damping or a larger epsilon";
    Fail(ErrorCode::kSolverFailure, msg.str());
  }
  return game.Profile(x);
}

double LyapunovMd(const MirrorSpec& mirror, double gamma, const Eigen::VectorXd& z,
                  const Eigen::VectorXd& z_target) {
  RequirePositive(gamma, "gamma");
  return DualBregman(mirror, z, z_target) / gamma;
}

std::string_view BoundMetricName(BoundMetric metric) {
  switch (metric) {
    case BoundMetric::kBregmanToTarget:
      return "bregman";
    case BoundMetric::kEuclidSqToTarget:
      return "euclid_sq";
    case BoundMetric::kPotentialGap:
      return "potential_gap";
  }
  return "bregman";
}

BoundMetric ParseBoundMetric(std::string_view name) {
  if (name == "bregman") return BoundMetric::kBregmanToTarget;
  if (name == "euclid_sq") return BoundMetric::kEuclidSqToTarget;
  if (name == "potential_gap") return BoundMetric::kPotentialGap;
  Fail(ErrorCode::kInvalidParameter, "unknown bound metric '" + std::string(name) + "'");
}

std::string_view ValidityName(Validity validity) {
  return validity == Validity::kAllT ? "all_t" : "asymptotic";
}

Validity ParseValidity(std::string_view name) {
  if (name == "all_t") return Validity::kAllT;
  if (name == "asymptotic") return Validity::kAsymptotic;
  Fail(ErrorCode::kInvalidParameter,
       "unknown validity mode '" + std::string(name) + "' (expected all_t or asymptotic)");
}

double RateBound::Evaluate(double t) const {
  if (t == 0.0) return constant;
  return constant * std::exp(-exponent * t);
}

RateBoundPair MdRateBound(double gamma, double eta, double epsilon, double d0, double rho,
                          const StrategyProfile& target, Validity validity) {
  RequirePositive(gamma, "gamma");
  RequireNonNegative(eta, "eta");
  RequirePositive(epsilon, "epsilon");
  RequireNonNegative(d0, "D0");
  RequirePositive(rho, "rho");
  const double beta = gamma * eta / epsilon;
  return {MakeBound(beta, d0, BoundMetric::kBregmanToTarget, target, validity),
          MakeBound(beta, 2.0 * d0 / rho, BoundMetric::kEuclidSqToTarget, target, validity)};
}

RateBoundPair DmdRateBound(double gamma, double mu, double epsilon, double d0, double rho,
                           const StrategyProfile& target, Validity validity) {
  RequirePositive(gamma, "gamma");
  RequirePositive(epsilon, "epsilon");
  RequireNonNegative(d0, "D0");
  RequirePositive(rho, "rho");
  if (!std::isfinite(mu)) Fail(ErrorCode::kInvalidParameter, "mu must be finite");
  if (!(epsilon > mu)) {
    std::ostringstream msg;
    msg << "discounted mirror descent needs epsilon > mu (epsilon = " << epsilon
        << ", mu = " << mu << ")";
    Fail(ErrorCode::kPrecondition, msg.str());
  }
  const double beta = gamma * (epsilon - mu) / epsilon;
  return {MakeBound(beta, d0, BoundMetric::kBregmanToTarget, target, validity),
          MakeBound(beta, 2.0 * d0 / rho, BoundMetric::kEuclidSqToTarget, target, validity)};
}

ActorCriticBounds AcRateBound(double gamma, double eta, double epsilon, double r, double gap0,
                              double d0, double rho, const StrategyProfile& target,
                              Validity validity) {
  RequirePositive(gamma, "gamma");
  RequirePositive(eta, "eta");
  RequirePositive(epsilon, "epsilon");
  RequirePositive(r, "r");
  RequireNonNegative(gap0, "potential gap");
  RequireNonNegative(d0, "D0");
  RequirePositive(rho, "rho");
  if (!(epsilon > eta * gamma / r)) {
    std::ostringstream msg;
    msg << "actor-critic needs epsilon > eta gamma / r (" << epsilon
        << " <= " << eta * gamma / r << ")";
    Fail(ErrorCode::kPrecondition, msg.str());
  }
  const double beta = gamma * eta / epsilon;
  const double c0 = gap0 + r * epsilon * d0 / gamma;
  return {MakeBound(beta, c0, BoundMetric::kPotentialGap, target, validity),
          MakeBound(beta, c0 / eta, BoundMetric::kBregmanToTarget, target, validity),
          MakeBound(beta, 2.0 * c0 / (rho * eta), BoundMetric::kEuclidSqToTarget, target,
                    validity)};
}

std::vector<double> MeasureMetric(const Trajectory& trajectory, BoundMetric metric,
                                  const StrategyProfile& target, const Game& game,
                                  const std::vector<Regularizer>& h) {
  if (!(target.partition() == trajectory.partition)) {
    Fail(ErrorCode::kInvalidInput, "bound target does not match the trajectory partition");
  }
  if (metric == BoundMetric::kPotentialGap && !game.has_potential()) {
    Fail(ErrorCode::kInvalidInput, "potential_gap metric requested for a game without potential");
  }
  const Eigen::VectorXd& xt = target.values();
  const double p_target = metric == BoundMetric::kPotentialGap ? game.Potential(xt) : 0.0;
  std::vector<double> values;
  values.reserve(trajectory.size());
  for (const Eigen::VectorXd& x : trajectory.x_samples) {
    switch (metric) {
      case BoundMetric::kBregmanToTarget:
        values.push_back(trajectory.kind == DynamicsKind::kActorCritic ? Bregman(h, x, xt)
                                                                       : Bregman(h, xt, x));
        break;
      case BoundMetric::kEuclidSqToTarget:
        values.push_back((xt - x).squaredNorm());
        break;
      case BoundMetric::kPotentialGap:
        values.push_back(p_target - game.Potential(x));
        break;
    }
  }
  return values;
}

BoundReport VerifyBound(const Trajectory& trajectory, const RateBound& bound, const Game& game,
                        const std::vector<Regularizer>& h, double slack,
                        std::optional<double> t_min) {
  RequireNonNegative(slack, "slack");
  if (trajectory.size() == 0) Fail(ErrorCode::kInvalidInput, "empty trajectory");
  const std::vector<double> measured = MeasureMetric(trajectory, bound.metric, bound.target,
                                                     game, h);
  BoundReport report;
  report.mode = bound.validity;

  std::size_t first = 0;
  if (bound.validity == Validity::kAsymptotic) {
    if (t_min) {
      report.t_min = *t_min;
      while (first < trajectory.size() && trajectory.times[first] < *t_min) ++first;
    } else {
      first = trajectory.size() - 1;
      for (std::size_t k = 1; k < trajectory.size(); ++k) {
        if (measured[k] < measured[0]) {
          first = k;
          break;
        }
      }
      report.t_min = trajectory.times[first];
    }
  }

  for (std::size_t k = first; k < trajectory.size(); ++k) {
    const double t = trajectory.times[k];
    const double b = bound.Evaluate(t);
    ++report.checked_times;
    if (b > 0.0) {
      report.max_ratio = std::max(report.max_ratio, measured[k] / b);
    } else if (measured[k] > 0.0) {
      report.max_ratio = std::numeric_limits<double>::infinity();
    }
    if (!(measured[k] <= b * (1.0 + slack))) report.violations.push_back({t, measured[k], b});
  }
  return report;
}

double ConvertRelative(double constant, RelativeKind kind, double modulus) {
  if (!(modulus > 0.0) || !std::isfinite(modulus)) {
    Fail(ErrorCode::kInvalidParameter,
         kind == RelativeKind::kStrong ? "smoothness constant must be positive"
                                       : "strong convexity modulus must be positive");
  }
  RequireNonNegative(constant, "monotonicity constant");
  return constant / modulus;
}

double FitDecayExponent(const std::vector<double>& times, const std::vector<double>& values) {
  if (times.size() != values.size()) {
    Fail(ErrorCode::kInvalidInput, "times and values differ in length");
  }
  if (times.size() < 2) Fail(ErrorCode::kInvalidInput, "need at least two samples to fit");
  const double peak = *std::max_element(values.begin(), values.end());
  if (!(peak > 0.0)) Fail(ErrorCode::kInvalidInput, "metric series is identically zero");
  const double floor = 1e-24 * peak;

  std::size_t resolved = 0;
  while (resolved < values.size() && values[resolved] > floor) ++resolved;
  if (resolved < 2) Fail(ErrorCode::kInvalidInput, "fewer than two resolved samples");

  const double t_mid = 0.5 * (times.front() + times[resolved - 1]);
  double n = 0.0, st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  for (std::size_t k = 0; k < resolved; ++k) {
    if (times[k] < t_mid) continue;
    const double y = std::log(values[k]);
    n += 1.0;
    st += times[k];
    sy += y;
    stt += times[k] * times[k];
    sty += times[k] * y;
  }
  const double denom = n * stt - st * st;
  if (n < 2.0 || !(denom > 0.0)) Fail(ErrorCode::kInvalidInput, "degenerate fit window");
  return -(n * sty - st * sy) / denom;
}

}  // namespace dualdyn
