#include "dualdyn/analysis.h"

#include <gtest/gtest.h>

#include <cmath>

#include "dualdyn/error.h"

namespace dualdyn {
namespace {

Eigen::VectorXd Vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::kConfig;
}

StrategyProfile Uniform(const Game& game) { return game.Profile(game.Center()); }

Game QuadraticOnBox(const Eigen::MatrixXd& q, const Eigen::VectorXd& b) {
  std::vector<Domain> domains;
  for (Eigen::Index i = 0; i < b.size(); ++i) domains.push_back(Domain::Interval(-1, 1));
  return BuildQuadraticPotential(q, b, domains);
}

TEST(SolveNeTest, AnalyticEquilibria) {
  EXPECT_TRUE(SolveNe(BuildThreePlayerMatchingPennies())
                  .values()
                  .isApprox(Eigen::VectorXd::Constant(6, 0.5), 1e-15));
  for (double l : {2.0, 5.0}) {
    EXPECT_TRUE(SolveNe(BuildRps(1, l)).values().isApprox(Eigen::VectorXd::Constant(6, 1.0 / 3),
                                                          1e-15));
  }
}

TEST(SolveNeTest, InteriorMaximizerOfQuadratic) {
  const Eigen::VectorXd b = Vec({0.3, -0.6});
  const StrategyProfile x = SolveNe(QuadraticOnBox(Eigen::MatrixXd::Identity(2, 2), b), 1e-12);
  EXPECT_LE((x.values() - b).norm(), 1e-11);
}

TEST(SolveNeTest, BoundaryMaximizerOfQuadratic) {
  const StrategyProfile x =
      SolveNe(QuadraticOnBox(Eigen::MatrixXd::Identity(2, 2), Vec({2.0, -0.5})), 1e-12);
  EXPECT_LE((x.values() - Vec({1.0, -0.5})).norm(), 1e-11);
}

TEST(SolveNeTest, AdversarialGameSatisfiesTheVariationalInequality) {
  const Dataset data = {{-1.5, -1}, {0.3, 1}, {2.2, 1}, {-0.4, -1}};
  const Game game = BuildAdversarialAttack(data, {0.8484, 0.8947}, 10.0);
  const StrategyProfile x = SolveNe(game, 1e-11);
  const Eigen::VectorXd& v = x.values();
  EXPECT_LE((v - game.Project(v + 0.1 * game.PseudoGradient(v))).norm(), 1e-10);
  EXPECT_TRUE(x.IsFeasible(game.domains()));
}

TEST(SolveNeTest, NonConvergenceIsASolverFailure) {
  const Dataset data = {{-1.5, -1}, {0.3, 1}, {2.2, 1}, {-0.4, -1}};
  const Game game = BuildAdversarialAttack(data, {0.8484, 0.8947}, 10.0);
  EXPECT_EQ(CodeOf([&] { SolveNe(game, 1e-14, 3); }), ErrorCode::kSolverFailure);
}

TEST(SolvePerturbedNeTest, UniformFixedPoints) {
  const Game rps = BuildRps(1, 5);
  for (double eps : {2.1, 3.0, 10.0}) {
    const MirrorSpec mirror(UniformRegularizers(rps, RegularizerKind::kEntropy), eps);
    const StrategyProfile x = SolvePerturbedNe(rps, mirror);
    EXPECT_LE((x.values() - Eigen::VectorXd::Constant(6, 1.0 / 3)).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LE((x.values() - MirrorMap(mirror, rps.PseudoGradient(x.values()))).cwiseAbs().maxCoeff(),
              1e-12);
  }
  const Game mp = BuildThreePlayerMatchingPennies();
  const MirrorSpec mirror(UniformRegularizers(mp, RegularizerKind::kEntropy), 1.0);
  const StrategyProfile x = SolvePerturbedNe(mp, mirror, 1e-12, 100000, 0.1, Vec({0.9, 0.1, 0.2,
                                                                                  0.8, 0.5, 0.5}));
  EXPECT_LE((x.values() - Eigen::VectorXd::Constant(6, 0.5)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(SolvePerturbedNeTest, ParameterAndConvergenceErrors) {
  const Game rps = BuildRps(1, 5);
  const MirrorSpec mirror(UniformRegularizers(rps, RegularizerKind::kEntropy), 2.1);
  EXPECT_EQ(CodeOf([&] { SolvePerturbedNe(rps, mirror, 1e-12, 100, 0.0); }),
            ErrorCode::kInvalidParameter);
  EXPECT_EQ(CodeOf([&] { SolvePerturbedNe(rps, mirror, 1e-12, 100, 1.5); }),
            ErrorCode::kInvalidParameter);
  // Undamped iteration of a hypo-monotone game with small eps from off-center.
  const MirrorSpec cold(UniformRegularizers(rps, RegularizerKind::kEntropy), 0.5);
  try {
    SolvePerturbedNe(rps, cold, 1e-12, 200, 1.0, Vec({0.5, 0.3, 0.2, 0.2, 0.3, 0.5}));
    FAIL() << "expected a solver failure";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSolverFailure);
    EXPECT_NE(std::string(e.what()).find("damping"), std::string::npos);
  }
}

TEST(NamesTest, RoundTrip) {
  for (BoundMetric m :
       {BoundMetric::kBregmanToTarget, BoundMetric::kEuclidSqToTarget, BoundMetric::kPotentialGap}) {
    EXPECT_EQ(ParseBoundMetric(BoundMetricName(m)), m);
  }
  EXPECT_EQ(BoundMetricName(BoundMetric::kEuclidSqToTarget), "euclid_sq");
  EXPECT_EQ(ParseValidity("asymptotic"), Validity::kAsymptotic);
  EXPECT_EQ(ValidityName(Validity::kAllT), "all_t");
  EXPECT_THROW(ParseValidity("always"), Error);
  EXPECT_THROW(ParseBoundMetric("kl"), Error);
}

TEST(MdRateBoundTest, ValuesAtZeroAndScalarMultiplier) {
  const Game game = BuildRps(1, 5);
  const RateBoundPair pair = MdRateBound(1.0, 0.5, 1.0, 0.3, 2.0, Uniform(game));
  EXPECT_EQ(pair.bregman.Evaluate(0.0), 0.3);
  EXPECT_EQ(pair.euclid_sq.Evaluate(0.0), 2 * 0.3 / 2.0);

  const RateBoundPair small = MdRateBound(1.0, 0.0037, 0.1, 1.0, 1.0, Uniform(game));
  EXPECT_NEAR(small.bregman.exponent, 0.037, 1e-15);
  EXPECT_NEAR(small.bregman.Evaluate(100.0), std::exp(-3.7), 1e-15);
  EXPECT_NEAR(small.bregman.Evaluate(100.0), 0.02472, 1e-5);
}

TEST(MdRateBoundTest, NullMonotoneEnvelopeIsConstant) {
  const Game game = BuildRps(1, 5);
  const RateBoundPair pair = MdRateBound(1.0, 0.0, 1.0, 0.4, 1.0, Uniform(game));
  EXPECT_EQ(pair.bregman.exponent, 0.0);
  EXPECT_EQ(pair.bregman.Evaluate(1e6), 0.4);
  EXPECT_EQ(CodeOf([&] { MdRateBound(1.0, -0.1, 1.0, 0.4, 1.0, Uniform(game)); }),
            ErrorCode::kInvalidParameter);
}

TEST(DmdRateBoundTest, Exponents) {
  const Game game = BuildRps(1, 5);
  EXPECT_DOUBLE_EQ(DmdRateBound(1.0, 0.0, 1.0, 1.0, 1.0, Uniform(game)).bregman.exponent, 1.0);
  EXPECT_NEAR(DmdRateBound(1.0, 2.0, 2.1, 1.0, 1.0, Uniform(game)).bregman.exponent, 0.047619,
              1e-6);
  const double eta = 0.0037, eps = 0.1;
  const double dmd = DmdRateBound(1.0, -eta, eps, 1.0, 1.0, Uniform(game)).bregman.exponent;
  EXPECT_GT(dmd, 1.0);
  EXPECT_GT(dmd, MdRateBound(1.0, eta, eps, 1.0, 1.0, Uniform(game)).bregman.exponent);
}

TEST(DmdRateBoundTest, EpsilonNotAboveMuIsAPreconditionError) {
  const Game game = BuildRps(1, 5);
  EXPECT_EQ(CodeOf([&] { DmdRateBound(1.0, 2.0, 2.0, 1.0, 1.0, Uniform(game)); }),
            ErrorCode::kPrecondition);
  EXPECT_EQ(CodeOf([&] { DmdRateBound(1.0, 2.0, 1.5, 1.0, 1.0, Uniform(game)); }),
            ErrorCode::kPrecondition);
}

TEST(AcRateBoundTest, ConstantsAndPrecondition) {
  const Game game = QuadraticOnBox(Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2));
  const StrategyProfile target = game.Profile(Eigen::VectorXd::Zero(2));
  const ActorCriticBounds b = AcRateBound(1.0, 1.0, 0.1, 20.0, 0.3, 0.05, 1.0, target);
  EXPECT_DOUBLE_EQ(b.potential_gap.Evaluate(0.0), 0.3 + 20.0 * 0.1 * 0.05);
  EXPECT_DOUBLE_EQ(b.potential_gap.exponent, 10.0);
  EXPECT_DOUBLE_EQ(b.bregman.Evaluate(0.0), 0.4);
  EXPECT_DOUBLE_EQ(b.euclid_sq.Evaluate(0.0), 0.8);
  EXPECT_EQ(CodeOf([&] { AcRateBound(1.0, 1.0, 0.05, 20.0, 0.3, 0.05, 1.0, target); }),
            ErrorCode::kPrecondition);
}

TEST(VerifyBoundTest, DmdRpsSoftmaxDominatedAtAllTimes) {
  const Game game = BuildRps(1, 5);
  const MirrorSpec mirror(UniformRegularizers(game, RegularizerKind::kEntropy), 2.1);
  const Eigen::VectorXd z0 = Vec({1, 2, 3, 1, 2, 3});
  const Trajectory traj =
      Integrate(DynamicsSpec::DiscountedMirrorDescent(1.0), game, mirror, z0, {0.01, 100.0, 10});
  const StrategyProfile xbar = SolvePerturbedNe(game, mirror);
  const double d0 = Bregman(mirror.blocks(), xbar.values(), traj.x_samples.front());
  const RateBoundPair bounds = DmdRateBound(1.0, 2.0, 2.1, d0, 1.0, xbar);
  const BoundReport report = VerifyBound(traj, bounds.bregman, game, mirror.blocks());
  EXPECT_TRUE(report.pass());
  EXPECT_EQ(report.checked_times, traj.size());
  EXPECT_EQ(report.mode, Validity::kAllT);
  EXPECT_LE(report.max_ratio, 1.0 + 1e-6);
}

TEST(VerifyBoundTest, NullMonotoneMdKeepsItsDistance) {
  const Game game = BuildThreePlayerMatchingPennies();
  const MirrorSpec mirror(UniformRegularizers(game, RegularizerKind::kEntropy), 1.0);
  const Trajectory traj = Integrate(DynamicsSpec::MirrorDescent(1.0), game, mirror,
                                    Vec({1, 2, 1, 2, 1, 2}), {0.001, 10.0, 100});
  const StrategyProfile target = SolveNe(game);
  const double d0 = Bregman(mirror.blocks(), target.values(), traj.x_samples.front());
  const RateBoundPair bounds = MdRateBound(1.0, 0.0, 1.0, d0, 1.0, target);
  EXPECT_TRUE(VerifyBound(traj, bounds.bregman, game, mirror.blocks()).pass());
}

TEST(VerifyBoundTest, ReportsViolationsAndAsymptoticWindow) {
  const Game game = BuildRps(1, 5);
  const MirrorSpec mirror(UniformRegularizers(game, RegularizerKind::kEntropy), 2.1);
  const Trajectory traj = Integrate(DynamicsSpec::DiscountedMirrorDescent(1.0), game, mirror,
                                    Vec({1, 2, 3, 1, 2, 3}), {0.01, 20.0, 10});
  const StrategyProfile xbar = SolvePerturbedNe(game, mirror);
  // A bound decaying far too fast is violated after t = 0.
  RateBound fast{5.0, Bregman(mirror.blocks(), xbar.values(), traj.x_samples.front()),
                 BoundMetric::kBregmanToTarget, xbar, Validity::kAllT};
  const BoundReport all_t = VerifyBound(traj, fast, game, mirror.blocks());
  EXPECT_FALSE(all_t.pass());
  EXPECT_GT(all_t.max_ratio, 1.0);
  EXPECT_GT(all_t.violations.front().t, 0.0);

  fast.validity = Validity::kAsymptotic;
  const BoundReport late = VerifyBound(traj, fast, game, mirror.blocks(), 1e-6, 15.0);
  EXPECT_EQ(late.t_min, 15.0);
  EXPECT_EQ(late.checked_times, 51u);
  const BoundReport auto_window = VerifyBound(traj, fast, game, mirror.blocks());
  EXPECT_GT(auto_window.t_min, 0.0);
  EXPECT_LT(auto_window.checked_times, traj.size());
}

TEST(MeasureMetricTest, ActorCriticUsesReversedBregman) {
  const Game game = BuildRps(1, 5);
  const MirrorSpec mirror(UniformRegularizers(game, RegularizerKind::kEntropy), 1.0);
  const Eigen::VectorXd z0 = Vec({1, 2, 3, 3, 1, 2});
  const StrategyProfile target(Vec({0.2, 0.3, 0.5, 0.3, 0.3, 0.4}), game.partition());
  const Trajectory ac =
      Integrate(DynamicsSpec::ActorCritic(1.0, 2.0), game, mirror, z0, {0.1, 0.2, 1});
  const auto values =
      MeasureMetric(ac, BoundMetric::kBregmanToTarget, target, game, mirror.blocks());
  EXPECT_DOUBLE_EQ(values[0], Bregman(mirror.blocks(), ac.x_samples[0], target.values()));
  EXPECT_THROW(MeasureMetric(ac, BoundMetric::kPotentialGap, target, game, mirror.blocks()),
               Error);
}

TEST(ConvertRelativeTest, Examples) {
  EXPECT_DOUBLE_EQ(ConvertRelative(2.0, RelativeKind::kStrong, 4.0), 0.5);
  EXPECT_DOUBLE_EQ(ConvertRelative(2.0, RelativeKind::kHypo, 1.0), 2.0);
  EXPECT_DOUBLE_EQ(ConvertRelative(0.37, RelativeKind::kStrong, 1.0), 0.37);
  EXPECT_EQ(CodeOf([] { ConvertRelative(1.0, RelativeKind::kStrong, 0.0); }),
            ErrorCode::kInvalidParameter);
  EXPECT_EQ(CodeOf([] { ConvertRelative(1.0, RelativeKind::kHypo, -1.0); }),
            ErrorCode::kInvalidParameter);
}

TEST(FitDecayExponentTest, RecoversExponent) {
  std::vector<double> t, v;
  for (int k = 0; k <= 100; ++k) {
    t.push_back(0.1 * k);
    v.push_back(3.0 * std::exp(-0.7 * t.back()));
  }
  EXPECT_NEAR(FitDecayExponent(t, v), 0.7, 1e-12);
}

TEST(FitDecayExponentTest, IgnoresUnresolvedTail) {
  std::vector<double> t, v;
  for (int k = 0; k <= 100; ++k) {
    t.push_back(k);
    v.push_back(k < 60 ? std::exp(-1.0 * k) : 0.0);
  }
  EXPECT_NEAR(FitDecayExponent(t, v), 1.0, 1e-12);
  EXPECT_THROW(FitDecayExponent({0.0, 1.0}, {0.0, 0.0}), Error);
  EXPECT_THROW(FitDecayExponent({0.0}, {1.0}), Error);
}

}  // namespace
}  // namespace dualdyn
