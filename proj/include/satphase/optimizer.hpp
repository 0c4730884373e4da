#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "satphase/error.hpp"

namespace satphase {

enum class OptimizerKind { plain_sgd, adaptive_moment };

inline std::string to_string(OptimizerKind k) { return k == OptimizerKind::plain_sgd ? "plain-sgd" : "adaptive-moment"; }

inline OptimizerKind optimizer_from_string(const std::string& s) {
    if (s == "plain-sgd") return OptimizerKind::plain_sgd;
    if (s == "adaptive-moment") return OptimizerKind::adaptive_moment;
    throw ConfigError("unknown optimizer '" + s + "' (expected plain-sgd or adaptive-moment)");
}

/// Rescales `grad` in place so its L2 norm does not exceed max_norm (<= 0 disables).
/// Returns the norm before clipping.
inline double clip_gradient_norm(std::span<double> grad, double max_norm) {
    double sq = 0.0;
    for (double g : grad) sq += g * g;
    const double norm = std::sqrt(sq);
    if (max_norm > 0.0 && norm > max_norm) {
        const double s = max_norm / norm;
        for (double& g : grad) g *= s;
    }
    return norm;
}

/// First-order optimiser over a flat parameter buffer.
class Optimizer {
public:
    Optimizer(OptimizerKind kind, std::size_t n, double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
              double epsilon = 1e-8)
        : kind_(kind), lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon) {
        if (!(learning_rate > 0.0)) throw ConfigError("Optimizer: learning rate must be > 0");
        if (kind_ == OptimizerKind::adaptive_moment) {
            m_.assign(n, 0.0);
            v_.assign(n, 0.0);
        }
    }

    void set_learning_rate(double lr) noexcept { lr_ = lr; }
    double learning_rate() const noexcept { return lr_; }

    void step(std::span<double> params, std::span<const double> grad) {
        if (kind_ == OptimizerKind::plain_sgd) {
            for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr_ * grad[i];
            return;
        }
        if (params.size() != m_.size() || grad.size() != m_.size()) throw ShapeError("Optimizer: size mismatch");
        ++t_;
        const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
        const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
        for (std::size_t i = 0; i < params.size(); ++i) {
            m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
            v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
            params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
        }
    }

private:
    OptimizerKind kind_;
    double lr_;
    double beta1_, beta2_, eps_;
    long long t_ = 0;
    std::vector<double> m_, v_;
};

}  // namespace satphase
