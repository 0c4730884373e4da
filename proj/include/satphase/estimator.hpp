#pragma once

// Signal-phase estimators (LSTM, windowed mean, identity), the LSTM trainer,
// the architecture scale metric and estimation-error statistics.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "satphase/error.hpp"
#include "satphase/lstm.hpp"
#include "satphase/optimizer.hpp"
#include "satphase/phasesim.hpp"
#include "satphase/random.hpp"

namespace satphase {

struct TrainConfig {
    std::size_t window_len = 40;  // N
    std::size_t z_dim = 4;
    double learning_rate = 1e-3;
    std::size_t batch_size = 64;
    std::size_t epochs = 10;
    std::uint64_t seed = 1;
    double gradient_clip = 5.0;
    OptimizerKind optimizer = OptimizerKind::adaptive_moment;
    /// Spacing between consecutive training windows (1 = every pulse).
    std::size_t stride = 1;
    /// Learning rate is multiplied by this after every epoch.
    double lr_decay = 1.0;

    void validate() const {
        if (window_len < 1) throw ConfigError("TrainConfig: window_len must be >= 1");
        if (z_dim < 1) throw ConfigError("TrainConfig: z_dim must be >= 1");
        if (!(learning_rate > 0.0)) throw ConfigError("TrainConfig: learning_rate must be > 0");
        if (batch_size < 1 || stride < 1) throw ConfigError("TrainConfig: batch_size and stride must be >= 1");
        if (!(lr_decay > 0.0)) throw ConfigError("TrainConfig: lr_decay must be > 0");
    }
};

struct TrainResult {
    LstmParams params;
    std::vector<double> history;  // mean training loss per epoch
};

/// Sliding windows over dphi_R ending at each pulse t >= first, targets dphi_S[t].
inline std::vector<Example> make_examples(const PhaseSequence& seq, std::size_t window_len, std::size_t stride = 1,
                                          std::size_t first = 0) {
    seq.validate();
    std::vector<Example> out;
    const std::size_t start = std::max(first, window_len - 1);
    for (std::size_t t = start; t < seq.size(); t += stride) {
        out.push_back({std::span<const double>(seq.ref_errors).subspan(t + 1 - window_len, window_len),
                       seq.sig_errors[t]});
    }
    return out;
}

/// Mini-batch training on MSE. Deterministic for a fixed cfg.seed.
inline TrainResult train(const PhaseSequence& dataset, const TrainConfig& cfg) {
    cfg.validate();
    if (dataset.size() <= cfg.window_len) {
        throw ConfigError("train: dataset (" + std::to_string(dataset.size()) + " pulses) must be longer than N=" +
                          std::to_string(cfg.window_len));
    }
    auto examples = make_examples(dataset, cfg.window_len, cfg.stride);
    Rng init_rng = make_stream(cfg.seed, "init");
    Rng shuffle_rng = make_stream(cfg.seed, "shuffle");

    TrainResult result{init_params(cfg.z_dim, init_rng), {}};
    Optimizer opt(cfg.optimizer, result.params.size(), cfg.learning_rate);
    std::vector<std::size_t> order(examples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<Example> batch;
    batch.reserve(cfg.batch_size);

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        double epoch_loss = 0.0;
        std::size_t seen = 0;
        for (std::size_t startb = 0; startb < order.size(); startb += cfg.batch_size) {
            batch.clear();
            const std::size_t end = std::min(order.size(), startb + cfg.batch_size);
            for (std::size_t k = startb; k < end; ++k) batch.push_back(examples[order[k]]);
            LossAndGradients lg;
            try {
                lg = loss_and_gradients(result.params, batch);
            } catch (const NumericalError& e) {
                throw TrainingDivergence(std::string("train: diverged in epoch ") + std::to_string(epoch) + ": " +
                                             e.what(),
                                         result.history);
            }
            clip_gradient_norm(lg.gradients.flat(), cfg.gradient_clip);
            opt.step(result.params.flat(), lg.gradients.flat());
            epoch_loss += lg.loss * static_cast<double>(batch.size());
            seen += batch.size();
        }
        epoch_loss /= static_cast<double>(seen);
        if (!std::isfinite(epoch_loss)) {
            throw TrainingDivergence("train: non-finite loss in epoch " + std::to_string(epoch), result.history);
        }
        result.history.push_back(epoch_loss);
        opt.set_learning_rate(opt.learning_rate() * cfg.lr_decay);
    }
    return result;
}

/// Mean of the last N reference phase errors.
inline double expectation_estimator(std::span<const double> window) {
    if (window.empty()) throw ShapeError("expectation_estimator: empty window");
    return std::accumulate(window.begin(), window.end(), 0.0) / static_cast<double>(window.size());
}

inline double expectation_estimator(std::span<const double> window, std::size_t expected_len) {
    if (window.size() != expected_len) throw ShapeError("expectation_estimator: window length != N");
    return expectation_estimator(window);
}

inline constexpr double identity_estimator(double x) noexcept { return x; }

/// Free-parameter count of an unrolled (N, z) network: N copies of the four
/// gates (input weights, recurrent weights, biases) plus the head.
inline constexpr std::uint64_t scale(std::uint64_t n, std::uint64_t z_dim) noexcept {
    return n * (4 * ((z_dim + 1) * z_dim + z_dim) + (z_dim + 1));
}

/// Population variance of the wrapped difference estimates - truths.
inline double estimation_error_variance(std::span<const double> estimates, std::span<const double> truths) {
    if (estimates.size() != truths.size()) throw ShapeError("estimation_error_variance: length mismatch");
    if (estimates.size() < 2) throw ShapeError("estimation_error_variance: need at least two samples");
    double mean = 0.0;
    double m2 = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        const double d = wrap_phase(estimates[i] - truths[i]);
        ++n;
        const double delta = d - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (d - mean);
    }
    return m2 / static_cast<double>(n);
}

inline double mean_bias(std::span<const double> estimates, std::span<const double> truths) {
    if (estimates.size() != truths.size() || estimates.empty()) throw ShapeError("mean_bias: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < estimates.size(); ++i) s += wrap_phase(estimates[i] - truths[i]);
    return s / static_cast<double>(estimates.size());
}

struct LstmEstimator {
    LstmParams params;
    std::size_t window_len = 1;
};
struct ExpectationEstimator {
    std::size_t window_len = 1;
};
struct IdentityEstimator {};

using EstimatorKind = std::variant<LstmEstimator, ExpectationEstimator, IdentityEstimator>;

inline std::size_t window_length(const EstimatorKind& kind) {
    return std::visit(
        [](const auto& k) -> std::size_t {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, IdentityEstimator>) {
                return 1;
            } else {
                return k.window_len;
            }
        },
        kind);
}

/// Indices evaluated on a test sequence: every `stride`-th pulse from `first`.
struct EvalPlan {
    std::size_t first = 0;
    std::size_t stride = 1;

    std::vector<std::size_t> indices(std::size_t n_pulses) const {
        std::vector<std::size_t> idx;
        for (std::size_t t = first; t < n_pulses; t += stride) idx.push_back(t);
        return idx;
    }
};

/// Estimates dphi_S at each planned pulse using only dphi_R up to that pulse.
inline std::vector<double> estimate(const EstimatorKind& kind, const PhaseSequence& seq, const EvalPlan& plan) {
    const std::size_t n = window_length(kind);
    if (n < 1) throw ConfigError("estimate: window length must be >= 1");
    if (plan.first + 1 < n) throw ConfigError("estimate: first evaluated pulse precedes a full window");
    const std::span<const double> ref(seq.ref_errors);
    std::vector<double> out;
    for (std::size_t t : plan.indices(seq.size())) {
        const auto window = ref.subspan(t + 1 - n, n);
        out.push_back(std::visit(
            [&](const auto& k) -> double {
                using T = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<T, LstmEstimator>) {
                    return predict(k.params, window, k.window_len);
                } else if constexpr (std::is_same_v<T, ExpectationEstimator>) {
                    return expectation_estimator(window);
                } else {
                    return identity_estimator(window.back());
                }
            },
            kind));
    }
    return out;
}

inline std::vector<double> truths(const PhaseSequence& seq, const EvalPlan& plan) {
    std::vector<double> out;
    for (std::size_t t : plan.indices(seq.size())) out.push_back(seq.sig_errors[t]);
    return out;
}

}  // namespace satphase
