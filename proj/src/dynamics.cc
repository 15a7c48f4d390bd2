#include "dualdyn/dynamics.h"

#include <cmath>
#include <sstream>
#include <string>

#include "dualdyn/error.h"

namespace dualdyn {

namespace {

void RequireFiniteState(const Eigen::VectorXd& v, const char* what) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      std::ostringstream msg;
      msg << what << " is non-finite at index " << i;
      Fail(ErrorCode::kInvalidInput, msg.str());
    }
  }
}

void RequireCompatible(const Game& game, const MirrorSpec& mirror) {
  if (!(game.partition() == mirror.partition())) {
    Fail(ErrorCode::kInvalidInput, "mirror spec partition does not match the game");
  }
  for (std::size_t p = 0; p < game.num_players(); ++p) {
    if (!(mirror.block(p).domain() == game.domains()[p])) {
      Fail(ErrorCode::kDomainError,
           "mirror map domain differs from the domain of player " + std::to_string(p));
    }
  }
}

}  // namespace

std::string_view DynamicsKindName(DynamicsKind kind) {
  switch (kind) {
    case DynamicsKind::kMirrorDescent:
      return "md";
    case DynamicsKind::kDiscountedMirrorDescent:
      return "dmd";
    case DynamicsKind::kActorCritic:
      return "ac";
  }
  return "md";
}

DynamicsKind ParseDynamicsKind(std::string_view name) {
  if (name == "md") return DynamicsKind::kMirrorDescent;
  if (name == "dmd") return DynamicsKind::kDiscountedMirrorDescent;
  if (name == "ac") return DynamicsKind::kActorCritic;
  Fail(ErrorCode::kInvalidParameter,
       "unknown dynamics '" + std::string(name) + "' (expected md, dmd or ac)");
}

void DynamicsSpec::Validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    Fail(ErrorCode::kInvalidParameter, "gamma must be positive");
  }
  if (kind == DynamicsKind::kActorCritic && (!(r > 0.0) || !std::isfinite(r))) {
    Fail(ErrorCode::kInvalidParameter, "actor-critic needs r > 0");
  }
}

void IntegratorConfig::Validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) Fail(ErrorCode::kInvalidParameter, "dt must be positive");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) {
    Fail(ErrorCode::kInvalidParameter, "t_end must be positive");
  }
  if (dt > t_end) Fail(ErrorCode::kInvalidParameter, "dt must not exceed t_end");
  if (sample_every < 1) Fail(ErrorCode::kInvalidParameter, "sample_every must be >= 1");
}

Eigen::VectorXd VectorField(const DynamicsSpec& dynamics, const Game& game,
                            const MirrorSpec& mirror, const Eigen::VectorXd& state) {
  const Eigen::Index n = game.dim();
  const Eigen::Index expected = dynamics.is_actor_critic() ? 2 * n : n;
  if (state.size() != expected) {
    std::ostringstream msg;
    msg << "state has length " << state.size() << ", expected " << expected;
    Fail(ErrorCode::kInvalidInput, msg.str());
  }
  RequireFiniteState(state, "state");
  const Eigen::VectorXd z = state.head(n);
  const Eigen::VectorXd mapped = MirrorMap(mirror, z);
  Eigen::VectorXd deriv(expected);
  switch (dynamics.kind) {
    case DynamicsKind::kMirrorDescent:
      deriv = dynamics.gamma * game.PseudoGradient(mapped);
      break;
    case DynamicsKind::kDiscountedMirrorDescent:
      deriv = dynamics.gamma * (game.PseudoGradient(mapped) - z);
      break;
    case DynamicsKind::kActorCritic: {
      const Eigen::VectorXd x = state.tail(n);
      deriv.head(n) = dynamics.gamma * game.PseudoGradient(x);
      deriv.tail(n) = dynamics.r * (mapped - x);
      break;
    }
  }
  RequireFiniteState(deriv, "vector field");
  return deriv;
}

Trajectory Integrate(const DynamicsSpec& dynamics, const Game& game, const MirrorSpec& mirror,
                     const Eigen::VectorXd& z0, const IntegratorConfig& config,
                     const std::optional<Eigen::VectorXd>& x0) {
  dynamics.Validate();
  config.Validate();
  RequireCompatible(game, mirror);
  const Eigen::Index n = game.dim();
  if (z0.size() != n) Fail(ErrorCode::kInvalidInput, "z0 has the wrong length");
  RequireFiniteState(z0, "z0");

  Eigen::VectorXd state;
  if (dynamics.is_actor_critic()) {
    state.resize(2 * n);
    state.head(n) = z0;
    if (x0) {
      if (x0->size() != n || !game.Profile(*x0).IsFeasible(game.domains(), 1e-9)) {
        Fail(ErrorCode::kInvalidInput, "x0 must be a feasible profile");
      }
      state.tail(n) = *x0;
    } else {
      state.tail(n) = MirrorMap(mirror, z0);
    }
  } else {
    if (x0) Fail(ErrorCode::kInvalidInput, "x0 is only used by actor-critic dynamics");
    state = z0;
  }

  Trajectory traj;
  traj.kind = dynamics.kind;
  traj.partition = game.partition();
  auto record = [&](double t) {
    const Eigen::VectorXd z = state.head(n);
    Eigen::VectorXd mapped = MirrorMap(mirror, z);
    traj.times.push_back(t);
    traj.z_samples.push_back(z);
    traj.x_samples.push_back(dynamics.is_actor_critic() ? Eigen::VectorXd(state.tail(n))
                                                        : mapped);
    traj.mapped_samples.push_back(std::move(mapped));
  };

  auto field = [&](const Eigen::VectorXd& s) { return VectorField(dynamics, game, mirror, s); };

  const auto num_steps = static_cast<long long>(std::ceil(config.t_end / config.dt - 1e-9));
  record(0.0);
  double t = 0.0;
  for (long long step = 1; step <= num_steps; ++step) {
    const double t_next =
        step == num_steps ? config.t_end : static_cast<double>(step) * config.dt;
    const double h = t_next - t;
    const Eigen::VectorXd k1 = field(state);
    const Eigen::VectorXd k2 = field(state + 0.5 * h * k1);
    const Eigen::VectorXd k3 = field(state + 0.5 * h * k2);
    const Eigen::VectorXd k4 = field(state + h * k3);
    state += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t = t_next;

    RequireFiniteState(state, "integrated state");
    const double z_norm = state.head(n).cwiseAbs().maxCoeff();
    if (!(z_norm <= kDivergenceThreshold)) {
      std::ostringstream msg;
      msg << "|z|_inf = " << z_norm << " exceeded " << kDivergenceThreshold << " at t = " << t
          << " (" << DynamicsKindName(dynamics.kind) << " on " << game.name() << ")";
      Fail(ErrorCode::kDivergence, msg.str());
    }
    if (step % config.sample_every == 0 || step == num_steps) record(t);
  }
  return traj;
}

double FinalPrimalSpeed(const Trajectory& trajectory) {
  const std::size_t k = trajectory.size();
  if (k < 2) Fail(ErrorCode::kInvalidInput, "need at least two samples");
  const double dt = trajectory.times[k - 1] - trajectory.times[k - 2];
  return (trajectory.x_samples[k - 1] - trajectory.x_samples[k - 2]).cwiseAbs().maxCoeff() / dt;
}

}  // namespace dualdyn
