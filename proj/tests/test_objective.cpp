#include "camnet/objective.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace camnet;
namespace ct = camnet::testing;

TEST(Quality, ScpIsIndicator) {
  const auto q = QualityFunction::scp();
  EXPECT_EQ(q.t(0), 0.0);
  EXPECT_EQ(q.t(1), 1.0);
  EXPECT_EQ(q.t(7), 1.0);
}

TEST(Quality, RedundancyIsPrefixSum) {
  const auto q = QualityFunction::redundancy({0.5, 0.3, 0.2});
  EXPECT_DOUBLE_EQ(q.t(1), 0.5);
  EXPECT_DOUBLE_EQ(q.t(2), 0.8);
  EXPECT_DOUBLE_EQ(q.t(3), 1.0);
  EXPECT_DOUBLE_EQ(q.t(9), 1.0);
  EXPECT_DOUBLE_EQ(q.increment(1), 0.3);
  EXPECT_DOUBLE_EQ(q.increment(3), 0.0);
}

TEST(Quality, ThresholdClips) {
  const auto q = QualityFunction::threshold_count(3);
  for (std::uint32_t c = 0; c < 10; ++c) EXPECT_EQ(q.t(c), std::min<double>(c, 3));
  EXPECT_THROW(QualityFunction::threshold_count(0), InvalidArgument);
}

TEST(Quality, RejectsIncreasingIncrements) {
  EXPECT_THROW(QualityFunction::redundancy({0.2, 0.8}), InvalidArgument);
  EXPECT_THROW(QualityFunction::redundancy({-0.1}), InvalidArgument);
  EXPECT_THROW(QualityFunction::custom_table({0.0, 1.0, 3.0}), InvalidArgument);
  EXPECT_THROW(QualityFunction::custom_table({1.0, 2.0}), InvalidArgument);
  EXPECT_NO_THROW(QualityFunction::custom_table({0.0, 2.0, 3.0, 3.5}));
}

TEST(Weights, ValidationAndSampling) {
  EXPECT_THROW(QualityWeights({0.3, 0.7}), InvalidArgument);
  EXPECT_THROW(QualityWeights({0.6, 0.3}), InvalidArgument);
  EXPECT_NO_THROW(QualityWeights({0.6, 0.4}));
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto w = sample_quality_weights(seed, 5);
    ASSERT_EQ(w.values().size(), 5u);
    EXPECT_TRUE(std::is_sorted(w.values().rbegin(), w.values().rend()));
    double sum = 0;
    for (const double x : w.values()) sum += x;
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
  EXPECT_EQ(sample_quality_weights(9, 4).values(), sample_quality_weights(9, 4).values());
}

TEST(Objective, MatchesDefinition) {
  std::mt19937_64 gen(1);
  const auto m = ct::random_matrix(300, 12, 0.25, gen);
  const auto pts = ct::random_weighted_points(300, gen);
  for (int kind = 0; kind < 3; ++kind) {
    const auto q = ct::random_quality(kind, gen);
    const std::vector<int> subset = {1, 4, 5, 9};
    EXPECT_NEAR(G_eval(m, pts, subset, q), ct::oracle_G(m, pts, subset, q), 1e-9);
    const std::vector<int> plus = {1, 4, 5, 9, 2};
    EXPECT_NEAR(marginal_gain(m, pts, subset, 2, q), ct::oracle_G(m, pts, plus, q) - ct::oracle_G(m, pts, subset, q),
                1e-9);
  }
  EXPECT_EQ(G_eval(m, pts, {}, QualityFunction::scp()), 0.0);
}

TEST(Objective, MonotoneSubmodularOnRandomInstances) {
  std::mt19937_64 gen(2);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t m = 10;
    const auto mat = ct::random_matrix(80, m, 0.3, gen);
    const auto pts = ct::random_weighted_points(80, gen);
    const auto q = ct::random_quality(trial, gen);
    // A subset of B, v outside B.
    std::vector<int> ids(m);
    std::iota(ids.begin(), ids.end(), 0);
    std::shuffle(ids.begin(), ids.end(), gen);
    const std::vector<int> B(ids.begin(), ids.begin() + 5);
    const std::vector<int> A(B.begin(), B.begin() + 2);
    const int v = ids[7];
    const double ga = marginal_gain(mat, pts, A, v, q);
    const double gb = marginal_gain(mat, pts, B, v, q);
    EXPECT_GE(ga + 1e-12, gb);
    EXPECT_GE(gb, -1e-12);
  }
}

TEST(Objective, SubsetValidation) {
  VisibilityMatrix m(5, 3);
  const auto pts = ct::unit_points(5);
  const auto q = QualityFunction::scp();
  EXPECT_THROW(G_eval(m, pts, std::vector<int>{0, 0}, q), InvalidArgument);
  EXPECT_THROW(G_eval(m, pts, std::vector<int>{3}, q), InvalidArgument);
  EXPECT_THROW(marginal_gain(m, pts, std::vector<int>{1}, 1, q), InvalidArgument);
  EXPECT_THROW(G_eval(m, ct::unit_points(4), std::vector<int>{}, q), InvalidArgument);
}

TEST(Regularizer, ProximityPenaltyExample) {
  // Two cameras 1 m apart with a 2 m minimum separation: r = 1, G - 1.
  VisibilityMatrix m(4, 2);
  m.set(0, 0, true);
  m.set(1, 1, true);
  const auto pts = ct::unit_points(4);
  const CandidateSet cands =
      explicit_candidates({Pose(Vec3(0, 0, 0), Quat::Identity()), Pose(Vec3(1, 0, 0), Quat::Identity())}, CameraSpec{});
  const auto reg = Regularizer::proximity(1.0, 2.0);
  const std::vector<int> both = {0, 1};
  const double g = G_eval(m, pts, both, QualityFunction::scp());
  EXPECT_DOUBLE_EQ(regularized_objective(m, pts, both, QualityFunction::scp(), reg, cands), g - 1.0);
  EXPECT_DOUBLE_EQ(regularized_objective(m, pts, both, QualityFunction::scp(), Regularizer::proximity(1.0, 0.5), cands), g);
}

TEST(Regularizer, CustomMatrixValidation) {
  Eigen::MatrixXd r(2, 2);
  r << 0, 1, 2, 0;
  EXPECT_THROW(Regularizer::custom(1.0, r), InvalidArgument);
  r << 0, 1, 1, 0;
  EXPECT_NO_THROW(Regularizer::custom(1.0, r));
  r << 0, -1, -1, 0;
  EXPECT_THROW(Regularizer::custom(1.0, r), InvalidArgument);
  EXPECT_THROW(Regularizer::proximity(-1.0, 1.0), InvalidArgument);
}

TEST(Coverage, WeightedFraction) {
  VisibilityMatrix m(4, 2);
  m.set(0, 0, true);
  m.set(3, 1, true);
  Eigen::VectorXd w(4);
  w << 1, 1, 1, 5;
  const EnvironmentPoints pts(Eigen::Matrix3Xd::Zero(3, 4), w);
  EXPECT_DOUBLE_EQ(coverage(m, pts, std::vector<int>{0}), 1.0 / 8.0);
  EXPECT_DOUBLE_EQ(coverage(m, pts, std::vector<int>{0, 1}), 6.0 / 8.0);
  EXPECT_DOUBLE_EQ(coverage(m, pts, std::vector<int>{}), 0.0);
}

TEST(Incremental, TracksCountsAndGains) {
  std::mt19937_64 gen(4);
  const auto m = ct::random_matrix(200, 8, 0.4, gen);
  const auto pts = ct::random_weighted_points(200, gen);
  const auto q = QualityFunction::redundancy({0.5, 0.3, 0.2});
  const auto cands = ct::dummy_candidates(8);
  IncrementalObjective inc(m, pts, q, {}, cands);
  std::vector<int> chosen;
  for (const int v : {3, 0, 6}) {
    EXPECT_NEAR(inc.gain(v), marginal_gain(m, pts, chosen, v, q), 1e-12);
    inc.add(v);
    chosen.push_back(v);
  }
  EXPECT_EQ(inc.selected(), chosen);
  EXPECT_EQ(inc.counts(), f_counts(m, chosen));
  EXPECT_THROW(inc.add(3), InvalidArgument);
}
