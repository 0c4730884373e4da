#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "satphase/estimator.hpp"
#include "satphase/lstm.hpp"
#include "satphase/optimizer.hpp"

using namespace satphase;

namespace {

double batch_loss(const LstmParams& p, std::span<const Example> batch) {
    double s = 0.0;
    for (const auto& ex : batch) {
        const double e = predict(p, ex.window) - ex.target;
        s += e * e;
    }
    return s / static_cast<double>(batch.size());
}

}  // namespace

TEST(LstmParams, LayoutAndCount) {
    EXPECT_EQ(LstmParams::count(4), 4u * (8 + 16) + 5);
    LstmParams p(3);
    EXPECT_EQ(p.size(), LstmParams::count(3));
    std::size_t total = 0;
    for (auto name : LstmParams::names) total += p.named(name).size();
    EXPECT_EQ(total, p.size());
    p.named("b_y")[0] = 2.5;
    EXPECT_EQ(p.b_y(), 2.5);
    p.named("w_ho")[4] = 1.0;
    EXPECT_EQ(p.w_h(output)[4], 1.0);
    EXPECT_THROW(p.named("w_zz"), ConfigError);
    EXPECT_THROW(LstmParams(0), ConfigError);
}

TEST(LstmParams, InitialisationRules) {
    Rng rng(3);
    const auto p = init_params(16, rng);
    for (double v : p.b(forget)) EXPECT_EQ(v, 1.0);
    EXPECT_EQ(p.b_y(), 0.0);
    for (double v : p.w_x(cell)) EXPECT_LE(std::abs(v), 0.25);
}

TEST(LstmStep, HandComputedSingleUnit) {
    LstmParams p(1);
    for (std::size_t g = 0; g < 4; ++g) {
        p.w_x(g)[0] = 0.5;
        p.w_h(g)[0] = -0.25;
        p.b(g)[0] = 0.1;
    }
    const LstmState s0{{0.2}, {0.3}};
    const double a = 0.5 * 0.7 - 0.25 * 0.3 + 0.1;
    const double sg = 1.0 / (1.0 + std::exp(-a));
    const double c = sg * 0.2 + sg * std::tanh(a);
    const double h = sg * std::tanh(c);
    const auto s1 = lstm_step(p, s0, 0.7);
    EXPECT_NEAR(s1.c[0], c, 1e-15);
    EXPECT_NEAR(s1.h[0], h, 1e-15);
    EXPECT_THROW(lstm_step(p, LstmState::zeros(2), 0.0), ShapeError);
}

TEST(LstmPredict, WindowLengthChecked) {
    const LstmParams p(2);
    const std::vector<double> w(5, 0.1);
    EXPECT_THROW(predict(p, w, 4), ShapeError);
    EXPECT_NO_THROW(predict(p, w, 5));
}

TEST(Gradients, MatchCentralDifferences) {
    const std::size_t z = 3;
    const std::size_t n = 5;
    const double step = 1e-5;
    for (std::uint64_t inst = 0; inst < 10; ++inst) {
        Rng rng = make_stream(77, "gradcheck", inst);
        auto p = init_params(z, rng);
        std::normal_distribution<double> nd(0.0, 0.5);
        for (double& v : p.flat()) v += nd(rng) * 0.3;
        std::vector<std::vector<double>> windows(3, std::vector<double>(n));
        std::vector<Example> batch;
        for (auto& w : windows) {
            for (double& v : w) v = nd(rng);
            batch.push_back({w, nd(rng)});
        }
        const auto lg = loss_and_gradients(p, batch);
        EXPECT_NEAR(lg.loss, batch_loss(p, batch), 1e-13);
        for (std::size_t k = 0; k < p.size(); ++k) {
            const double keep = p.flat()[k];
            p.flat()[k] = keep + step;
            const double up = batch_loss(p, batch);
            p.flat()[k] = keep - step;
            const double down = batch_loss(p, batch);
            p.flat()[k] = keep;
            const double fd = (up - down) / (2.0 * step);
            const double an = lg.gradients.flat()[k];
            const double scale = std::max(std::abs(fd), std::abs(an));
            if (scale < 1e-9) continue;
            EXPECT_LT(std::abs(fd - an) / scale, 1e-4) << "param " << k << " instance " << inst;
        }
    }
}

TEST(Gradients, MixedWindowLengthsRejected) {
    const LstmParams p(2);
    const std::vector<double> a(3, 0.0);
    const std::vector<double> b(4, 0.0);
    const Example batch[] = {{a, 0.0}, {b, 0.0}};
    EXPECT_THROW(loss_and_gradients(p, batch), ShapeError);
    EXPECT_THROW(loss_and_gradients(p, std::span<const Example>{}), ShapeError);
}

TEST(Optimizer, ClipGradientNorm) {
    std::vector<double> g = {3.0, 4.0};
    EXPECT_DOUBLE_EQ(clip_gradient_norm(g, 1.0), 5.0);
    EXPECT_NEAR(std::hypot(g[0], g[1]), 1.0, 1e-15);
    std::vector<double> small = {0.3, 0.4};
    clip_gradient_norm(small, 1.0);
    EXPECT_DOUBLE_EQ(small[0], 0.3);
}

TEST(Optimizer, AdaptiveMomentMinimisesQuadratic) {
    std::vector<double> x = {3.0, -2.0};
    Optimizer opt(OptimizerKind::adaptive_moment, 2, 0.05);
    for (int i = 0; i < 2000; ++i) {
        std::vector<double> g = {2.0 * (x[0] - 1.0), 2.0 * (x[1] + 0.5)};
        opt.step(x, g);
    }
    EXPECT_NEAR(x[0], 1.0, 1e-3);
    EXPECT_NEAR(x[1], -0.5, 1e-3);
}

TEST(Optimizer, FirstAdaptiveStepHasLearningRateSize) {
    std::vector<double> x = {0.0};
    Optimizer opt(OptimizerKind::adaptive_moment, 1, 1e-3);
    std::vector<double> g = {123.0};
    opt.step(x, g);
    EXPECT_NEAR(x[0], -1e-3, 1e-9);
    EXPECT_EQ(optimizer_from_string("plain-sgd"), OptimizerKind::plain_sgd);
    EXPECT_THROW(optimizer_from_string("rmsprop"), ConfigError);
}

// With no detector or drift noise, dphi_R equals dphi_S and the last input
// of each window is the target.
TEST(Training, NoiselessDataIsLearned) {
    FixedChannel ch(ChannelRealization{0.9, 0.002, {}});
    NoiseParams noise;
    noise.channel_noise = 0.0;
    noise.drift_variance = 0.0;
    noise.electronic_noise = 0.0;
    noise.gamma = {1.0, 0.0};
    noise.ref_intensity = 1e300;
    const auto seq = generate_dataset(12, "clean", 20000, noise, ch, 1e6, PhaseCase::gaussian_noise);
    TrainConfig cfg;
    cfg.window_len = 5;
    cfg.z_dim = 4;
    cfg.epochs = 5;
    cfg.learning_rate = 1e-2;
    cfg.seed = 3;
    const auto result = train(seq, cfg);
    ASSERT_EQ(result.history.size(), 5u);
    for (std::size_t e = 1; e < result.history.size(); ++e) EXPECT_LE(result.history[e], result.history[e - 1]);
    EXPECT_LT(result.history.back(), 1e-4);
}
