#pragma once

// Single-layer LSTM with a scalar input and a fully-connected scalar head.
// Forward pass, final-state prediction and backpropagation through time.

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "satphase/error.hpp"
#include "satphase/random.hpp"

namespace satphase {

enum Gate : std::size_t { forget = 0, input = 1, cell = 2, output = 3 };

/// All trainable weights in one contiguous buffer:
///   w_x[gate]  (z)      input weights
///   w_h[gate]  (z x z)  recurrent weights, row-major, row = destination unit
///   b[gate]    (z)      gate biases
///   w_y        (z)      head weights
///   b_y        (1)      head bias
/// Gates are ordered forget, input, cell candidate, output.
class LstmParams {
public:
    LstmParams() = default;
    explicit LstmParams(std::size_t z_dim) : z_(z_dim), data_(count(z_dim), 0.0) {
        if (z_dim < 1) throw ConfigError("LstmParams: z_dim must be >= 1");
    }

    /// Parameter count for hidden width z.
    static constexpr std::size_t count(std::size_t z) noexcept { return 4 * (2 * z + z * z) + z + 1; }

    std::size_t z_dim() const noexcept { return z_; }
    std::size_t size() const noexcept { return data_.size(); }

    std::span<double> flat() noexcept { return data_; }
    std::span<const double> flat() const noexcept { return data_; }

    std::span<double> w_x(std::size_t g) noexcept { return {data_.data() + g * z_, z_}; }
    std::span<const double> w_x(std::size_t g) const noexcept { return {data_.data() + g * z_, z_}; }
    std::span<double> w_h(std::size_t g) noexcept { return {data_.data() + 4 * z_ + g * z_ * z_, z_ * z_}; }
    std::span<const double> w_h(std::size_t g) const noexcept {
        return {data_.data() + 4 * z_ + g * z_ * z_, z_ * z_};
    }
    std::span<double> b(std::size_t g) noexcept { return {data_.data() + bias_offset() + g * z_, z_}; }
    std::span<const double> b(std::size_t g) const noexcept { return {data_.data() + bias_offset() + g * z_, z_}; }
    std::span<double> w_y() noexcept { return {data_.data() + bias_offset() + 4 * z_, z_}; }
    std::span<const double> w_y() const noexcept { return {data_.data() + bias_offset() + 4 * z_, z_}; }
    double& b_y() noexcept { return data_.back(); }
    double b_y() const noexcept { return data_.back(); }

    /// Checkpoint names, in buffer order.
    static constexpr std::array<std::string_view, 14> names = {
        "w_xf", "w_xi", "w_xc", "w_xo", "w_hf", "w_hi", "w_hc", "w_ho",
        "b_f",  "b_i",  "b_c",  "b_o",  "w_y",  "b_y"};

    std::span<double> named(std::string_view name) {
        for (std::size_t k = 0; k < names.size(); ++k) {
            if (names[k] != name) continue;
            if (k < 4) return w_x(k);
            if (k < 8) return w_h(k - 4);
            if (k < 12) return b(k - 8);
            if (k == 12) return w_y();
            return {&data_.back(), 1};
        }
        throw ConfigError("LstmParams: unknown weight '" + std::string(name) + "'");
    }
    std::span<const double> named(std::string_view name) const {
        return const_cast<LstmParams*>(this)->named(name);
    }

    bool operator==(const LstmParams&) const = default;

private:
    std::size_t bias_offset() const noexcept { return 4 * z_ + 4 * z_ * z_; }

    std::size_t z_ = 0;
    std::vector<double> data_;
};

struct LstmState {
    std::vector<double> c;  // long-term memory
    std::vector<double> h;  // short-term memory

    static LstmState zeros(std::size_t z) { return {std::vector<double>(z, 0.0), std::vector<double>(z, 0.0)}; }
};

inline double sigmoid(double a) noexcept { return 1.0 / (1.0 + std::exp(-a)); }

/// Uniform(-1/sqrt(z), 1/sqrt(z)) weights, forget-gate bias 1, head bias 0.
inline LstmParams init_params(std::size_t z_dim, Rng& rng) {
    LstmParams p(z_dim);
    const double a = 1.0 / std::sqrt(static_cast<double>(z_dim));
    std::uniform_real_distribution<double> u(-a, a);
    for (double& v : p.flat()) v = u(rng);
    for (double& v : p.b(forget)) v = 1.0;
    p.b_y() = 0.0;
    return p;
}

namespace detail {

/// Gate activations of one step, all length z.
struct StepCache {
    std::vector<double> f, i, g, o, c, h;
};

inline void step_into(const LstmParams& p, std::span<const double> c_prev, std::span<const double> h_prev,
                      double x, StepCache& out) {
    const std::size_t z = p.z_dim();
    std::vector<double>* acts[4] = {&out.f, &out.i, &out.g, &out.o};
    for (std::size_t gate = 0; gate < 4; ++gate) {
        auto& a = *acts[gate];
        a.resize(z);
        const auto wx = p.w_x(gate);
        const auto wh = p.w_h(gate);
        const auto bias = p.b(gate);
        for (std::size_t j = 0; j < z; ++j) {
            double s = wx[j] * x + bias[j];
            const double* row = wh.data() + j * z;
            for (std::size_t k = 0; k < z; ++k) s += row[k] * h_prev[k];
            a[j] = gate == cell ? std::tanh(s) : sigmoid(s);
        }
    }
    out.c.resize(z);
    out.h.resize(z);
    for (std::size_t j = 0; j < z; ++j) {
        out.c[j] = out.f[j] * c_prev[j] + out.i[j] * out.g[j];
        out.h[j] = out.o[j] * std::tanh(out.c[j]);
    }
}

}  // namespace detail

/// f = s(w_xf x + W_hf h + b_f), i = s(...), g = tanh(...), o = s(...),
/// c' = f*c + i*g, h' = o*tanh(c').
inline LstmState lstm_step(const LstmParams& params, const LstmState& state, double x) {
    if (state.c.size() != params.z_dim() || state.h.size() != params.z_dim()) {
        throw ShapeError("lstm_step: state width does not match z_dim");
    }
    detail::StepCache cache;
    detail::step_into(params, state.c, state.h, x, cache);
    return {std::move(cache.c), std::move(cache.h)};
}

/// Runs the window from a zero state and applies the head to the final h.
inline double predict(const LstmParams& params, std::span<const double> window, std::size_t expected_len) {
    if (window.size() != expected_len || expected_len == 0) {
        throw ShapeError("predict: window length " + std::to_string(window.size()) + " != N=" +
                         std::to_string(expected_len));
    }
    const std::size_t z = params.z_dim();
    std::vector<double> c(z, 0.0);
    std::vector<double> h(z, 0.0);
    detail::StepCache cache;
    for (double x : window) {
        detail::step_into(params, c, h, x, cache);
        c.swap(cache.c);
        h.swap(cache.h);
    }
    double y = params.b_y();
    const auto wy = params.w_y();
    for (std::size_t j = 0; j < z; ++j) y += wy[j] * h[j];
    return y;
}

inline double predict(const LstmParams& params, std::span<const double> window) {
    return predict(params, window, window.size());
}

struct LossAndGradients {
    double loss = 0.0;
    LstmParams gradients;
};

/// One (window, target) training pair. The window is a view into the
/// caller's sequence.
struct Example {
    std::span<const double> window;
    double target = 0.0;
};

/// Mean squared error over the batch and its exact gradient by BPTT over
/// every step of every window.
inline LossAndGradients loss_and_gradients(const LstmParams& params, std::span<const Example> batch) {
    if (batch.empty()) throw ShapeError("loss_and_gradients: empty batch");
    const std::size_t z = params.z_dim();
    const std::size_t n_steps = batch.front().window.size();
    const double inv_b = 1.0 / static_cast<double>(batch.size());

    LossAndGradients out{0.0, LstmParams(z)};
    LstmParams& grad = out.gradients;

    std::vector<detail::StepCache> steps(n_steps);
    const std::vector<double> zeros(z, 0.0);
    std::vector<double> dh(z), dc(z), dh_prev(z), dc_prev(z);
    std::array<std::vector<double>, 4> da;
    for (auto& v : da) v.resize(z);

    for (const Example& ex : batch) {
        if (ex.window.size() != n_steps || n_steps == 0) {
            throw ShapeError("loss_and_gradients: windows in a batch must share length N >= 1");
        }
        for (std::size_t t = 0; t < n_steps; ++t) {
            const std::span<const double> c_prev = t ? std::span<const double>(steps[t - 1].c) : zeros;
            const std::span<const double> h_prev = t ? std::span<const double>(steps[t - 1].h) : zeros;
            detail::step_into(params, c_prev, h_prev, ex.window[t], steps[t]);
        }
        const auto& h_last = steps.back().h;
        double y = params.b_y();
        for (std::size_t j = 0; j < z; ++j) y += params.w_y()[j] * h_last[j];
        if (!std::isfinite(y)) throw NumericalError("loss_and_gradients: non-finite forward value");
        const double err = y - ex.target;
        out.loss += err * err * inv_b;
        const double dy = 2.0 * err * inv_b;

        grad.b_y() += dy;
        for (std::size_t j = 0; j < z; ++j) {
            grad.w_y()[j] += dy * h_last[j];
            dh[j] = dy * params.w_y()[j];
            dc[j] = 0.0;
        }

        for (std::size_t t = n_steps; t-- > 0;) {
            const auto& s = steps[t];
            const std::span<const double> c_prev = t ? std::span<const double>(steps[t - 1].c) : zeros;
            const std::span<const double> h_prev = t ? std::span<const double>(steps[t - 1].h) : zeros;
            for (std::size_t j = 0; j < z; ++j) {
                const double tc = std::tanh(s.c[j]);
                const double d_o = dh[j] * tc;
                dc[j] += dh[j] * s.o[j] * (1.0 - tc * tc);
                da[forget][j] = dc[j] * c_prev[j] * s.f[j] * (1.0 - s.f[j]);
                da[input][j] = dc[j] * s.g[j] * s.i[j] * (1.0 - s.i[j]);
                da[cell][j] = dc[j] * s.i[j] * (1.0 - s.g[j] * s.g[j]);
                da[output][j] = d_o * s.o[j] * (1.0 - s.o[j]);
                dc_prev[j] = dc[j] * s.f[j];
            }
            std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
            const double x = ex.window[t];
            for (std::size_t gate = 0; gate < 4; ++gate) {
                auto gwx = grad.w_x(gate);
                auto gwh = grad.w_h(gate);
                auto gb = grad.b(gate);
                const auto wh = params.w_h(gate);
                const auto& d = da[gate];
                for (std::size_t j = 0; j < z; ++j) {
                    gwx[j] += d[j] * x;
                    gb[j] += d[j];
                    double* grow = gwh.data() + j * z;
                    const double* wrow = wh.data() + j * z;
                    for (std::size_t k = 0; k < z; ++k) {
                        grow[k] += d[j] * h_prev[k];
                        dh_prev[k] += wrow[k] * d[j];
                    }
                }
            }
            dh.swap(dh_prev);
            dc.swap(dc_prev);
        }
    }
    if (!std::isfinite(out.loss)) throw NumericalError("loss_and_gradients: non-finite loss");
    return out;
}

}  // namespace satphase
