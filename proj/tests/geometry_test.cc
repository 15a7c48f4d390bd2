#include "dualdyn/geometry.h"

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "dualdyn/error.h"
#include "oracles.h"

namespace dualdyn {
namespace {

Eigen::VectorXd Vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

Eigen::VectorXd RandomVector(std::mt19937_64& rng, Eigen::Index n, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
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

TEST(BlockPartitionTest, OffsetsAndBlocks) {
  BlockPartition partition({2, 3, 1});
  EXPECT_EQ(partition.total(), 6);
  EXPECT_EQ(partition.offset(1), 2);
  EXPECT_EQ(partition.offset(2), 5);
  Eigen::VectorXd v = Vec({0, 1, 2, 3, 4, 5});
  EXPECT_EQ(partition.block(v, 1), Vec({2, 3, 4}));
  EXPECT_THROW(BlockPartition(std::vector<Eigen::Index>{}), Error);
  EXPECT_THROW(BlockPartition({2, 0}), Error);
}

TEST(ProjectSimplexTest, SymmetricInput) {
  EXPECT_TRUE(ProjectSimplex(Vec({5, 5})).isApprox(Vec({0.5, 0.5})));
}

TEST(ProjectSimplexTest, FeasibleInputIsFixed) {
  EXPECT_TRUE(ProjectSimplex(Vec({0.2, 0.3, 0.5})).isApprox(Vec({0.2, 0.3, 0.5}), 1e-15));
}

TEST(ProjectSimplexTest, CornerAgainstGridAndKkt) {
  const Eigen::VectorXd v = Vec({1, 2});
  const Eigen::VectorXd grid = testing::BruteForceSimplexProjection(v, 1e-4);
  const Eigen::VectorXd y = ProjectSimplex(v);
  EXPECT_LE((y - grid).cwiseAbs().maxCoeff(), 1e-4);
  EXPECT_TRUE(testing::SatisfiesSimplexKkt(v, y, 1e-12));
  EXPECT_EQ(y, Vec({0, 1}));
}

TEST(ProjectSimplexTest, RandomInputsMatchGrid) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::Index n = trial % 2 == 0 ? 2 : 3;
    const Eigen::VectorXd v = RandomVector(rng, n, 1.0);
    const Eigen::VectorXd y = ProjectSimplex(v);
    const Eigen::VectorXd grid = testing::BruteForceSimplexProjection(v, 1e-3);
    EXPECT_LE((y - grid).cwiseAbs().maxCoeff(), 2e-3) << v.transpose();
    EXPECT_TRUE(testing::SatisfiesSimplexKkt(v, y, 1e-12));
  }
}

TEST(ProjectSimplexTest, NonFiniteInputIsRejected) {
  EXPECT_EQ(CodeOf([] { ProjectSimplex(Vec({1, NAN})); }), ErrorCode::kInvalidInput);
  EXPECT_EQ(CodeOf([] { ProjectSimplex(Vec({INFINITY, 0})); }), ErrorCode::kInvalidInput);
}

TEST(ProjectBoxTest, Clamps) {
  const Eigen::VectorXd lo = Vec({-1}), hi = Vec({1});
  EXPECT_EQ(ProjectBox(Vec({3}), lo, hi)[0], 1.0);
  EXPECT_EQ(ProjectBox(Vec({-0.5}), lo, hi)[0], -0.5);
  EXPECT_EQ(ProjectBox(Vec({-7}), lo, hi)[0], -1.0);
}

TEST(ProjectBoxTest, InvertedBoundsAreAnInvalidDomain) {
  EXPECT_EQ(CodeOf([] { ProjectBox(Vec({0, 0}), Vec({0, 1}), Vec({1, 0})); }),
            ErrorCode::kInvalidDomain);
  EXPECT_EQ(CodeOf([] { Domain::Interval(1.0, -1.0); }), ErrorCode::kInvalidDomain);
}

TEST(DomainTest, InteriorSamplesAreStrictlyInside) {
  std::mt19937_64 rng(3);
  const Domain simplex = Domain::Simplex(4);
  const Domain box = Domain::Box(Vec({-1, 0}), Vec({1, 2}));
  for (int k = 0; k < 200; ++k) {
    const Eigen::VectorXd x = simplex.SampleInterior(rng);
    EXPECT_GT(x.minCoeff(), 0.0);
    EXPECT_NEAR(x.sum(), 1.0, 1e-12);
    const Eigen::VectorXd y = box.SampleInterior(rng);
    EXPECT_TRUE(box.Contains(y));
    EXPECT_GT(y[0], -1.0 + 5e-7);
    EXPECT_LT(y[1], 2.0 - 5e-7);
  }
}

TEST(RegularizerTest, KindNames) {
  EXPECT_EQ(RegularizerKindName(RegularizerKind::kEntropy), "entropy");
  EXPECT_EQ(ParseRegularizerKind("euclidean"), RegularizerKind::kEuclidean);
  EXPECT_THROW(ParseRegularizerKind("Entropy"), Error);
  EXPECT_THROW(Regularizer(RegularizerKind::kEntropy, Domain::Interval(0, 1)), Error);
}

TEST(MirrorMapTest, EntropyEqualLogits) {
  const auto reg = Regularizer::Entropy(2);
  EXPECT_TRUE(MirrorMap(reg, 1.0, Vec({0, 0})).isApprox(Vec({0.5, 0.5})));
}

TEST(MirrorMapTest, EntropyMatchesExtendedPrecisionSoftmax) {
  const auto reg = Regularizer::Entropy(3);
  const auto expected = testing::SoftmaxExtended({1.0L, 2.0L, 3.0L});
  const Eigen::VectorXd x = MirrorMap(reg, 1.0, Vec({1, 2, 3}));
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(x[i], static_cast<double>(expected[i]), 1e-9);
  EXPECT_NEAR(x[0], 0.09003, 1e-5);
  EXPECT_NEAR(x[1], 0.24473, 1e-5);
  EXPECT_NEAR(x[2], 0.66524, 1e-5);
}

TEST(MirrorMapTest, EuclideanIsScaledProjection) {
  const auto reg = Regularizer::Euclidean(Domain::Simplex(2));
  EXPECT_EQ(MirrorMap(reg, 0.5, Vec({0.5, 1.0})), ProjectSimplex(Vec({1, 2})));
  EXPECT_EQ(MirrorMap(reg, 0.5, Vec({0.5, 1.0})), Vec({0, 1}));
}

TEST(MirrorMapTest, LargeLogitsDoNotOverflow) {
  const auto reg = Regularizer::Entropy(3);
  const Eigen::VectorXd x = MirrorMap(reg, 1e-3, Vec({1000, 1001, 999}));
  EXPECT_TRUE(x.allFinite());
  EXPECT_NEAR(x.sum(), 1.0, 1e-15);
}

TEST(MirrorMapTest, ScaleLawIsExact) {
  std::mt19937_64 rng(5);
  const std::vector<Regularizer> regs = {Regularizer::Entropy(4),
                                         Regularizer::Euclidean(Domain::Simplex(4)),
                                         Regularizer::Euclidean(Domain::Box(
                                             Vec({-1, -1, 0, 0}), Vec({1, 1, 2, 1})))};
  for (const auto& reg : regs) {
    for (double eps : {0.1, 0.37, 2.1, 7.0}) {
      for (int k = 0; k < 50; ++k) {
        const Eigen::VectorXd z = RandomVector(rng, 4, 2.0);
        EXPECT_EQ(MirrorMap(reg, eps, z), MirrorMap(reg, 1.0, z / eps));
      }
    }
  }
}

TEST(MirrorMapTest, SimplexShiftInvariance) {
  std::mt19937_64 rng(6);
  for (const auto& reg : {Regularizer::Entropy(3), Regularizer::Euclidean(Domain::Simplex(3))}) {
    for (int k = 0; k < 50; ++k) {
      const Eigen::VectorXd z = RandomVector(rng, 3, 1.0);
      const Eigen::VectorXd shifted = (z.array() + 3.25).matrix();
      EXPECT_TRUE(MirrorMap(reg, 0.7, z).isApprox(MirrorMap(reg, 0.7, shifted), 1e-12));
    }
  }
}

TEST(BregmanTest, ClosedForms) {
  const auto entropy3 = Regularizer::Entropy(3);
  const Eigen::VectorXd third = Eigen::VectorXd::Constant(3, 1.0 / 3.0);
  EXPECT_NEAR(Bregman(entropy3, third, third), 0.0, 1e-16);
  const auto euclid = Regularizer::Euclidean(Domain::Simplex(2));
  EXPECT_DOUBLE_EQ(Bregman(euclid, Vec({1, 0}), Vec({0, 1})), 1.0);
  const auto entropy2 = Regularizer::Entropy(2);
  const auto expected = testing::KlExtended({0.5L, 0.5L}, {1.0L / 3.0L, 2.0L / 3.0L});
  EXPECT_NEAR(Bregman(entropy2, Vec({0.5, 0.5}), Vec({1.0 / 3.0, 2.0 / 3.0})),
              static_cast<double>(expected), 1e-15);
  EXPECT_NEAR(static_cast<double>(expected), 0.5 * std::log(9.0 / 8.0), 1e-15);
  EXPECT_NEAR(0.5 * std::log(9.0 / 8.0), 0.058891, 1e-6);
}

TEST(BregmanTest, ZeroCoordinatesInFirstArgument) {
  const auto reg = Regularizer::Entropy(3);
  EXPECT_NEAR(Bregman(reg, Vec({1, 0, 0}), Vec({0.5, 0.25, 0.25})), std::log(2.0), 1e-15);
}

TEST(BregmanTest, BoundarySecondArgumentIsADomainError) {
  const auto reg = Regularizer::Entropy(2);
  EXPECT_EQ(CodeOf([&] { Bregman(reg, Vec({0.5, 0.5}), Vec({1, 0})); }), ErrorCode::kDomainError);
  EXPECT_EQ(CodeOf([&] { Bregman(reg, Vec({0.5, 0.5}), Vec({1, 1e-301})); }),
            ErrorCode::kDomainError);
}

TEST(BregmanTest, SymmetrizedIdentity) {
  std::mt19937_64 rng(7);
  const Domain simplex = Domain::Simplex(5);
  for (const auto& reg : {Regularizer::Entropy(5), Regularizer::Euclidean(simplex)}) {
    for (int k = 0; k < 500; ++k) {
      const Eigen::VectorXd x = simplex.SampleInterior(rng);
      const Eigen::VectorXd y = simplex.SampleInterior(rng);
      const double lhs = Bregman(reg, x, y) + Bregman(reg, y, x);
      const double rhs = (x - y).dot(reg.Gradient(x) - reg.Gradient(y));
      EXPECT_NEAR(lhs, rhs, 1e-10);
    }
  }
}

TEST(ConjugateTest, ClosedForms) {
  const auto big_box = Regularizer::Euclidean(
      Domain::Box(Eigen::VectorXd::Constant(3, -100), Eigen::VectorXd::Constant(3, 100)));
  const Eigen::VectorXd z = Vec({0.3, -1.2, 2.0});
  EXPECT_NEAR(ConjugateValue(big_box, 0.5, z), z.squaredNorm() / (2 * 0.5), 1e-14);
  EXPECT_NEAR(ConjugateValue(Regularizer::Entropy(2), 1.0, Vec({0, 0})), std::log(2.0), 1e-15);
}

TEST(ConjugateTest, ShiftAddsConstantOnSimplex) {
  std::mt19937_64 rng(8);
  for (const auto& reg : {Regularizer::Entropy(3), Regularizer::Euclidean(Domain::Simplex(3))}) {
    for (int k = 0; k < 50; ++k) {
      const Eigen::VectorXd z = RandomVector(rng, 3, 1.0);
      const double c = 0.75;
      EXPECT_NEAR(ConjugateValue(reg, 0.4, (z.array() + c).matrix()) - ConjugateValue(reg, 0.4, z),
                  c, 1e-12);
    }
  }
}

TEST(DualBregmanTest, Examples) {
  const auto entropy = Regularizer::Entropy(3);
  const Eigen::VectorXd z = Vec({1, 2, 3});
  EXPECT_EQ(DualBregman(entropy, 1.0, z, z), 0.0);
  // eps * KL(C(z_ref) || C(z)) with C(z_ref) uniform.
  const auto soft = testing::SoftmaxExtended({1.0L, 2.0L, 3.0L});
  const long double third = 1.0L / 3.0L;
  const auto kl = testing::KlExtended({third, third, third}, soft);
  EXPECT_NEAR(DualBregman(entropy, 1.0, z, Eigen::VectorXd::Zero(3)), static_cast<double>(kl),
              1e-10);

  const auto box = Regularizer::Euclidean(
      Domain::Box(Eigen::VectorXd::Constant(3, -10), Eigen::VectorXd::Constant(3, 10)));
  const Eigen::VectorXd a = Vec({0.1, 0.2, -0.3}), b = Vec({-0.4, 0.0, 0.25});
  EXPECT_NEAR(DualBregman(box, 0.5, a, b), (a - b).squaredNorm() / (2 * 0.5), 1e-14);
}

TEST(StackedTest, BlocksAreIndependent) {
  MirrorSpec spec({Regularizer::Entropy(2), Regularizer::Euclidean(Domain::Interval(-1, 1))},
                  0.5);
  EXPECT_EQ(spec.partition().total(), 3);
  EXPECT_FALSE(spec.all_steep());
  const Eigen::VectorXd x = MirrorMap(spec, Vec({0, 0, 3}));
  EXPECT_TRUE(x.isApprox(Vec({0.5, 0.5, 1.0})));
  EXPECT_THROW(MirrorSpec({Regularizer::Entropy(2)}, 0.0), Error);
  EXPECT_THROW(MirrorMap(spec, Vec({0, 0})), Error);
}

TEST(MirrorPreimageTest, MapsBack) {
  MirrorSpec spec({Regularizer::Entropy(3), Regularizer::Entropy(2)}, 1.7);
  const Eigen::VectorXd x = Vec({0.2, 0.3, 0.5, 0.6, 0.4});
  EXPECT_TRUE(MirrorMap(spec, MirrorPreimage(spec, x)).isApprox(x, 1e-14));
}

// Properties over random pairs for each regularizer.

struct PropertyCase {
  const char* name;
  Regularizer reg;
  double eps;
};

std::vector<PropertyCase> PropertyCases() {
  return {{"entropy", Regularizer::Entropy(4), 0.3},
          {"euclidean_simplex", Regularizer::Euclidean(Domain::Simplex(4)), 0.8},
          {"euclidean_box",
           Regularizer::Euclidean(Domain::Box(Vec({-1, -1, -2, 0}), Vec({1, 2, 2, 1}))), 1.5}};
}

TEST(MirrorMapPropertyTest, LipschitzInDualNorm) {
  std::mt19937_64 rng(21);
  for (const auto& c : PropertyCases()) {
    for (int k = 0; k < 1000; ++k) {
      const Eigen::VectorXd z = RandomVector(rng, 4, 2.0);
      const Eigen::VectorXd w = RandomVector(rng, 4, 2.0);
      const double lhs = (MirrorMap(c.reg, c.eps, z) - MirrorMap(c.reg, c.eps, w)).norm();
      EXPECT_LE(lhs, (z - w).norm() / (c.eps * c.reg.rho()) * (1 + 1e-9)) << c.name;
    }
  }
}

TEST(MirrorMapPropertyTest, ConjugateGradientIsTheMirrorMap) {
  std::mt19937_64 rng(22);
  const double h = 1e-5;
  for (const auto& c : PropertyCases()) {
    for (int k = 0; k < 100; ++k) {
      const Eigen::VectorXd z = RandomVector(rng, 4, 0.4);
      const Eigen::VectorXd x = MirrorMap(c.reg, c.eps, z);
      for (Eigen::Index i = 0; i < 4; ++i) {
        const Eigen::VectorXd e = Eigen::VectorXd::Unit(4, i) * h;
        const double fd =
            (ConjugateValue(c.reg, c.eps, z + e) - ConjugateValue(c.reg, c.eps, z - e)) / (2 * h);
        EXPECT_NEAR(fd, x[i], 1e-4) << c.name;
      }
    }
  }
}

TEST(MirrorMapPropertyTest, DualBregmanEqualsSwappedPrimalBregman) {
  std::mt19937_64 rng(23);
  for (const auto& c : PropertyCases()) {
    for (int k = 0; k < 1000; ++k) {
      const Eigen::VectorXd z = RandomVector(rng, 4, 1.0);
      const Eigen::VectorXd w = RandomVector(rng, 4, 1.0);
      const Eigen::VectorXd x = MirrorMap(c.reg, c.eps, z);
      const Eigen::VectorXd xr = MirrorMap(c.reg, c.eps, w);
      const double dual = DualBregman(c.reg, c.eps, z, w);
      if (c.reg.steep()) {
        const double primal = c.eps * Bregman(c.reg, xr, x);
        EXPECT_LE(std::abs(dual - primal), 1e-9 * (1 + std::abs(primal))) << c.name;
      } else {
        // Non-steep: the identity needs z in the range of grad psi, i.e. z = eps x.
        const double primal = c.eps * Bregman(c.reg, xr, x);
        const double dual_on_range = DualBregman(c.reg, c.eps, c.eps * x, w);
        EXPECT_LE(std::abs(dual_on_range - primal), 1e-9 * (1 + std::abs(primal))) << c.name;
        EXPECT_GE(dual, 0.0);
      }
    }
  }
}

}  // namespace
}  // namespace dualdyn
