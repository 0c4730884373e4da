#pragma once

// Quantum Fisher information and quantum Cramer-Rao bound for phase
// estimation with a single-mode coherent state.

#include <Eigen/Dense>

#include <cmath>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "satphase/error.hpp"

namespace satphase {

/// Gaussian state of one mode in quadrature space [X_S, P_S] (SNU).
struct GaussianState {
    Eigen::Vector2d displacement = Eigen::Vector2d::Zero();
    Eigen::Matrix2d covariance = 0.5 * Eigen::Matrix2d::Identity();

    static GaussianState coherent(double amplitude_sq, double phase) {
        GaussianState s;
        const double a = std::sqrt(amplitude_sq);
        s.displacement << a * std::cos(phase), a * std::sin(phase);
        return s;
    }
};

struct PhaseEstimationSetting {
    double signal_amplitude_sq = 10.0;  // |alpha_S|^2
    std::size_t n_measurements = 1;     // N
    double phase_offset = 0.0;          // dphi' = dphi_R - dphi_S

    void validate() const {
        if (!(signal_amplitude_sq >= 0.0)) throw DomainError("PhaseEstimationSetting: |alpha_S|^2 must be >= 0");
        if (n_measurements < 1) throw DomainError("PhaseEstimationSetting: N must be >= 1");
    }
};

/// I_Q = (dd/dphi)^T Sigma^-1 (dd/dphi) + Tr[((dSigma/dphi) Sigma^-1)^2] with
/// d = |alpha_S| (cos phi, sin phi). The covariance does not depend on the
/// phase, so the trace term vanishes.
inline double quantum_fisher_info(const PhaseEstimationSetting& setting, const GaussianState& state) {
    setting.validate();
    const Eigen::Matrix2d& sigma = state.covariance;
    if (!sigma.isApprox(sigma.transpose())) throw DomainError("quantum_fisher_info: covariance not symmetric");
    Eigen::LLT<Eigen::Matrix2d> llt(sigma);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("quantum_fisher_info: covariance is singular or not positive-definite");
    }
    const double a = std::sqrt(setting.signal_amplitude_sq);
    const double phi = setting.phase_offset;
    const Eigen::Vector2d dd(-a * std::sin(phi), a * std::cos(phi));
    const Eigen::Matrix2d dsigma = Eigen::Matrix2d::Zero();
    const Eigen::Matrix2d inv = llt.solve(Eigen::Matrix2d::Identity());
    const Eigen::Matrix2d m = dsigma * inv;
    return dd.dot(inv * dd) + (m * m).trace();
}

/// Bound from the Fisher information: 1 / (N I_Q).
inline double qcrb_from_fisher(const PhaseEstimationSetting& setting, const GaussianState& state) {
    const double iq = quantum_fisher_info(setting, state);
    if (!(iq > 0.0)) throw DomainError("qcrb_from_fisher: zero Fisher information");
    return 1.0 / (static_cast<double>(setting.n_measurements) * iq);
}

/// Closed form 1 / (2 N |alpha_S|^2).
inline double qcrb(std::size_t n_measurements, double signal_amplitude_sq) {
    if (n_measurements < 1 || !(signal_amplitude_sq > 0.0)) throw DomainError("qcrb: N and |alpha_S|^2 must be > 0");
    return 1.0 / (2.0 * static_cast<double>(n_measurements) * signal_amplitude_sq);
}

inline std::vector<std::pair<std::size_t, double>> qcrb_curve(std::span<const std::size_t> n_values,
                                                              double signal_amplitude_sq) {
    if (n_values.empty()) throw ConfigError("qcrb_curve: no N values");
    std::vector<std::pair<std::size_t, double>> out;
    out.reserve(n_values.size());
    for (std::size_t n : n_values) out.emplace_back(n, qcrb(n, signal_amplitude_sq));
    return out;
}

inline void write_qcrb_csv(std::ostream& os, std::span<const std::pair<std::size_t, double>> curve) {
    os << "n_measurements,qcrb\n";
    os.precision(17);
    for (const auto& [n, v] : curve) os << n << ',' << v << '\n';
}

}  // namespace satphase
