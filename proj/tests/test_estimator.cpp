#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "satphase/estimator.hpp"

using namespace satphase;

namespace {

PhaseSequence small_sequence(std::uint64_t seed, std::size_t n) {
    FixedChannel ch(ChannelRealization{0.683, 0.002, {}});
    return generate_dataset(seed, "est", n, NoiseParams{}, ch, 1e6, PhaseCase::gaussian_noise);
}

}  // namespace

TEST(Scale, TableEntries) {
    EXPECT_EQ(scale(20, 4), 2020u);
    EXPECT_EQ(scale(20, 32), 87700u);
    EXPECT_EQ(scale(40, 4), 4040u);
    EXPECT_EQ(scale(60, 4), 6060u);
    EXPECT_EQ(scale(80, 4), 8080u);
    EXPECT_EQ(scale(100, 4), 10100u);
    EXPECT_EQ(scale(100, 32), 438500u);
    static_assert(scale(40, 4) == 4040);
}

TEST(Scale, LinearInWindowLength) {
    for (std::uint64_t z = 1; z < 40; ++z) EXPECT_EQ(scale(7, z), 7 * scale(1, z));
}

TEST(Baselines, ExpectationIsWindowMean) {
    const std::vector<double> w = {0.1, 0.2, 0.3, 0.6};
    EXPECT_NEAR(expectation_estimator(w), 0.3, 1e-15);
    EXPECT_THROW(expectation_estimator(std::span<const double>{}), ShapeError);
    EXPECT_THROW(expectation_estimator(w, 3), ShapeError);
    EXPECT_EQ(identity_estimator(0.42), 0.42);
}

TEST(ErrorVariance, MatchesTwoPassOracle) {
    const std::vector<double> est = {0.1, 0.5, -0.2, 0.3, 0.05};
    const std::vector<double> tru = {0.0, 0.4, 0.1, 0.2, 0.0};
    std::vector<double> d(est.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = est[i] - tru[i];
    const double m = std::accumulate(d.begin(), d.end(), 0.0) / d.size();
    double v = 0.0;
    for (double x : d) v += (x - m) * (x - m);
    v /= d.size();
    EXPECT_NEAR(estimation_error_variance(est, tru), v, 1e-15);
    EXPECT_NEAR(mean_bias(est, tru), m, 1e-15);
}

TEST(ErrorVariance, WrapsDifferences) {
    const std::vector<double> est = {3.1, -3.1};
    const std::vector<double> tru = {-3.1, 3.1};
    EXPECT_LT(estimation_error_variance(est, tru), 0.02);
}

TEST(ErrorVariance, ShapeErrors) {
    const std::vector<double> a = {1.0, 2.0};
    const std::vector<double> b = {1.0};
    EXPECT_THROW(estimation_error_variance(a, b), ShapeError);
    EXPECT_THROW(estimation_error_variance(b, b), ShapeError);
}

TEST(Estimate, EvaluationPlanAndCausality) {
    const auto seq = small_sequence(1, 1000);
    const EvalPlan plan{9, 1};
    const auto est = estimate(ExpectationEstimator{10}, seq, plan);
    ASSERT_EQ(est.size(), 991u);
    const double manual =
        std::accumulate(seq.ref_errors.begin() + 90, seq.ref_errors.begin() + 100, 0.0) / 10.0;
    EXPECT_NEAR(est[90], manual, 1e-15);
    const auto id = estimate(IdentityEstimator{}, seq, plan);
    EXPECT_EQ(id[0], seq.ref_errors[9]);
    EXPECT_THROW(estimate(ExpectationEstimator{20}, seq, plan), ConfigError);
    EXPECT_EQ(truths(seq, EvalPlan{0, 250}).size(), 4u);
}

TEST(Training, DeterministicForSeed) {
    const auto seq = small_sequence(2, 4000);
    TrainConfig cfg;
    cfg.window_len = 6;
    cfg.z_dim = 3;
    cfg.epochs = 2;
    cfg.stride = 3;
    const auto a = train(seq, cfg);
    const auto b = train(seq, cfg);
    EXPECT_EQ(a.params, b.params);
    EXPECT_EQ(a.history, b.history);
    cfg.seed = 2;
    EXPECT_NE(train(seq, cfg).params, a.params);
}

TEST(Training, ConfigValidation) {
    const auto seq = small_sequence(2, 100);
    TrainConfig cfg;
    cfg.window_len = 200;
    EXPECT_THROW(train(seq, cfg), ConfigError);
    cfg.window_len = 10;
    cfg.learning_rate = 0.0;
    EXPECT_THROW(train(seq, cfg), ConfigError);
}

TEST(Training, NonFiniteInputReportsDivergence) {
    auto seq = small_sequence(3, 2000);
    seq.ref_errors[500] = std::numeric_limits<double>::quiet_NaN();
    TrainConfig cfg;
    cfg.window_len = 5;
    cfg.z_dim = 2;
    cfg.epochs = 2;
    try {
        train(seq, cfg);
        FAIL() << "expected TrainingDivergence";
    } catch (const TrainingDivergence& e) {
        EXPECT_TRUE(e.history().empty());
    }
}

TEST(Training, LstmApproachesWindowMeanOnCaseOne) {
    const auto train_set = small_sequence(4, 60000);
    const auto test_set = small_sequence(5, 30000);
    TrainConfig cfg;
    cfg.window_len = 10;
    cfg.z_dim = 4;
    cfg.epochs = 4;
    const auto result = train(train_set, cfg);
    const EvalPlan plan{9, 1};
    const auto tru = truths(test_set, plan);
    const double v_lstm =
        estimation_error_variance(estimate(LstmEstimator{result.params, 10}, test_set, plan), tru);
    const double v_mean = estimation_error_variance(estimate(ExpectationEstimator{10}, test_set, plan), tru);
    const double v_id = estimation_error_variance(estimate(IdentityEstimator{}, test_set, plan), tru);
    EXPECT_LT(v_lstm, 0.25 * v_id);
    EXPECT_LT(std::abs(v_lstm - v_mean), 0.3 * v_mean);
}
