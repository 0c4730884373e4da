#pragma once

// Quadrature-level phase extraction, the detector/drift noise model, and
// generation of paired reference/signal phase-error sequences.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "satphase/error.hpp"
#include "satphase/propagation.hpp"
#include "satphase/random.hpp"

namespace satphase {

struct Quadratures {
    double x = 0.0;  // SNU
    double p = 0.0;  // SNU

    double norm() const noexcept { return std::hypot(x, p); }
};

/// Wraps an angle into (-pi, pi].
inline double wrap_phase(double phi) noexcept {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double w = std::remainder(phi, two_pi);  // [-pi, pi]
    if (w <= -std::numbers::pi) w += two_pi;
    return w;
}

inline Quadratures rotate(Quadratures q, double phi) noexcept {
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    return {q.x * c - q.p * s, q.x * s + q.p * c};
}

/// Phase of Bob's quadratures relative to Alice's, in (-pi, pi].
inline double phase_error(Quadratures alice, Quadratures bob) {
    const double num = bob.p * alice.x - bob.x * alice.p;
    const double den = bob.x * alice.x + bob.p * alice.p;
    if (num == 0.0 && den == 0.0) throw DomainError("phase_error: phase undefined for zero quadratures");
    return wrap_phase(std::atan2(num, den));
}

/// Gaussian-modulated coherent state: x, p ~ N(0, v_mod) independently.
inline Quadratures encode_coherent_state(double v_mod, Rng& rng) {
    if (!(v_mod > 0.0)) throw DomainError("encode_coherent_state: v_mod must be > 0");
    const double x = normal_variance(rng, 0.0, v_mod);
    const double p = normal_variance(rng, 0.0, v_mod);
    return {x, p};
}

/// Normal distribution given as (mean, variance).
struct NormalSpec {
    double mean = 0.0;
    double variance = 0.0;
};

struct NoiseParams {
    double mod_variance = 10.0;         // V_mod [SNU]
    double ref_intensity = 200.0;       // |alpha_R|^2 = 20 V_mod [SNU]
    double det_efficiency = 0.95;       // eta_det
    double electronic_noise = 0.0100;   // xi_el [SNU]
    double channel_noise = 0.0172;      // xi_ch [SNU]
    double drift_variance = 0.1012;     // sigma^2_drift
    NormalSpec gamma{0.8430, 0.0025};   // coherent efficiency
    NormalSpec signal_phase{0.2618, 0.0524};
    double case2_offset_variance = 0.0524;

    void validate() const {
        if (!(mod_variance > 0.0 && ref_intensity > 0.0 && electronic_noise >= 0.0 && channel_noise >= 0.0 &&
              drift_variance >= 0.0 && gamma.variance >= 0.0 && signal_phase.variance >= 0.0 &&
              case2_offset_variance >= 0.0)) {
            throw ConfigError("NoiseParams: parameters must be non-negative (intensities positive)");
        }
        if (!(det_efficiency > 0.0 && det_efficiency <= 1.0)) {
            throw ConfigError("NoiseParams: det_efficiency must lie in (0, 1]");
        }
    }
};

/// xi_det = ((1 - gamma) + xi_el) eta / gamma.
inline double detector_excess_noise(double gamma, double xi_el, double eta_det) {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw DomainError("detector_excess_noise: gamma must lie in (0, 1]");
    if (!(eta_det > 0.0 && eta_det <= 1.0)) throw DomainError("detector_excess_noise: eta_det must lie in (0, 1]");
    return ((1.0 - gamma) + xi_el) * eta_det / gamma;
}

/// Heterodyne phase-error variance of the reference pulse.
inline double detector_phase_variance(const NoiseParams& params, double transmissivity, double xi_det) {
    if (!(transmissivity > 0.0 && transmissivity <= 1.0)) {
        throw DomainError("detector_phase_variance: T must lie in (0, 1]");
    }
    return (params.channel_noise + 2.0 * (1.0 + xi_det) / (params.det_efficiency * transmissivity)) /
           params.ref_intensity;
}

inline double total_phase_variance(double sigma2_det, double sigma2_drift) noexcept {
    return sigma2_det + sigma2_drift;
}

enum class PhaseCase : int { gaussian_noise = 1, window_offset = 2 };

struct CoherenceWindow {
    std::uint64_t window_id = 0;
    std::size_t n_pulses = 1;
    double signal_phase = 0.0;   // constant within the window
    double case2_offset = 0.0;   // 0 for case 1
    double gamma = 1.0;
    double transmissivity = 1.0;
    double sigma2_error = 0.0;
};

/// Draws the per-window quantities. `gamma` is clamped into (0, 1].
inline CoherenceWindow sample_window(Rng& rng, const NoiseParams& params, const ChannelRealization& channel,
                                     double pulse_rate, PhaseCase phase_case) {
    params.validate();
    CoherenceWindow w;
    const double pulses = std::round(channel.coherence_time * pulse_rate);
    w.n_pulses = pulses < 1.0 ? 1 : static_cast<std::size_t>(pulses);
    w.signal_phase = normal_variance(rng, params.signal_phase.mean, params.signal_phase.variance);
    w.gamma = std::clamp(normal_variance(rng, params.gamma.mean, params.gamma.variance), 1e-6, 1.0);
    w.case2_offset =
        phase_case == PhaseCase::window_offset ? normal_variance(rng, 0.0, params.case2_offset_variance) : 0.0;
    w.transmissivity = channel.transmissivity;
    const double xi_det = detector_excess_noise(w.gamma, params.electronic_noise, params.det_efficiency);
    w.sigma2_error =
        total_phase_variance(detector_phase_variance(params, w.transmissivity, xi_det), params.drift_variance);
    return w;
}

struct PhaseSequence {
    std::vector<double> ref_errors;           // delta phi_R per pulse
    std::vector<double> sig_errors;           // delta phi_S per pulse
    std::vector<std::uint64_t> window_index;  // window id per pulse
    PhaseCase phase_case = PhaseCase::gaussian_noise;
    /// Per-window metadata, ordered as the pulses.
    std::vector<CoherenceWindow> windows;

    std::size_t size() const noexcept { return ref_errors.size(); }

    void validate() const {
        if (sig_errors.size() != ref_errors.size() || window_index.size() != ref_errors.size()) {
            throw ShapeError("PhaseSequence: series lengths differ");
        }
        for (std::size_t i = 1; i < window_index.size(); ++i) {
            if (window_index[i] < window_index[i - 1]) throw ConfigError("PhaseSequence: window_index decreases");
        }
    }
};

/// Expands windows into per-pulse phase errors:
///   dphi_S[t] = signal_phase,  dphi_R[t] = signal_phase + case2_offset + eps_t,
/// eps_t ~ N(0, sigma2_error) i.i.d.; both wrapped to (-pi, pi].
inline PhaseSequence gen_sequence(Rng& rng, std::span<const CoherenceWindow> windows,
                                  PhaseCase phase_case = PhaseCase::gaussian_noise) {
    if (windows.empty()) throw ConfigError("gen_sequence: no windows");
    PhaseSequence seq;
    seq.phase_case = phase_case;
    std::size_t total = 0;
    for (const auto& w : windows) total += w.n_pulses;
    seq.ref_errors.reserve(total);
    seq.sig_errors.reserve(total);
    seq.window_index.reserve(total);
    std::normal_distribution<double> unit(0.0, 1.0);
    for (const auto& w : windows) {
        const double sd = std::sqrt(w.sigma2_error);
        const double s = wrap_phase(w.signal_phase);
        for (std::size_t t = 0; t < w.n_pulses; ++t) {
            seq.sig_errors.push_back(s);
            seq.ref_errors.push_back(wrap_phase(w.signal_phase + w.case2_offset + sd * unit(rng)));
            seq.window_index.push_back(w.window_id);
        }
        seq.windows.push_back(w);
    }
    return seq;
}

/// Where a window's transmissivity and coherence time come from.
class ChannelSource {
public:
    virtual ~ChannelSource() = default;
    virtual ChannelRealization draw(Rng& rng) = 0;
};

/// Fresh profile per window, T resampled from a cache of full-propagation runs.
class SurrogateChannel final : public ChannelSource {
public:
    SurrogateChannel(TransmissivityCache cache, AtmosphereProfile fixed, SamplingRanges ranges)
        : cache_(std::move(cache)), fixed_(fixed), ranges_(ranges) {
        cache_.validate();
    }

    ChannelRealization draw(Rng& rng) override {
        ChannelRealization c;
        c.profile = sample_atmosphere(rng, ranges_, fixed_);
        c.transmissivity = surrogate_transmissivity(rng, cache_);
        c.coherence_time = coherence_time(c.profile);
        return c;
    }

private:
    TransmissivityCache cache_;
    AtmosphereProfile fixed_;
    SamplingRanges ranges_;
};

/// Full split-step propagation per window.
class PropagatedChannel final : public ChannelSource {
public:
    PropagatedChannel(AtmosphereProfile fixed, SamplingRanges ranges, GridConfig grid)
        : fixed_(fixed), ranges_(ranges), grid_(grid) {}

    ChannelRealization draw(Rng& rng) override {
        const auto profile = sample_atmosphere(rng, ranges_, fixed_);
        return simulate_channel(profile, grid_, rng);
    }

private:
    AtmosphereProfile fixed_;
    SamplingRanges ranges_;
    GridConfig grid_;
};

/// Fixed T and tau; used for controlled experiments and tests.
class FixedChannel final : public ChannelSource {
public:
    explicit FixedChannel(ChannelRealization c) : c_(c) {}
    ChannelRealization draw(Rng&) override { return c_; }

private:
    ChannelRealization c_;
};

/// Draws windows until at least `min_pulses` pulses are covered. Window k
/// uses its own stream derived from (seed, stream_name, k).
inline std::vector<CoherenceWindow> sample_windows(std::uint64_t seed, std::string_view stream_name,
                                                   std::size_t min_pulses, const NoiseParams& params,
                                                   ChannelSource& channels, double pulse_rate,
                                                   PhaseCase phase_case) {
    std::vector<CoherenceWindow> out;
    std::size_t covered = 0;
    for (std::uint64_t k = 0; covered < min_pulses; ++k) {
        Rng rng = make_stream(seed, stream_name, k);
        const auto channel = channels.draw(rng);
        auto w = sample_window(rng, params, channel, pulse_rate, phase_case);
        w.window_id = k;
        covered += w.n_pulses;
        out.push_back(w);
    }
    return out;
}

/// Convenience: windows plus pulses, truncated to exactly `n_pulses`.
inline PhaseSequence generate_dataset(std::uint64_t seed, std::string_view stream_name, std::size_t n_pulses,
                                      const NoiseParams& params, ChannelSource& channels, double pulse_rate,
                                      PhaseCase phase_case) {
    const auto windows = sample_windows(seed, stream_name, n_pulses, params, channels, pulse_rate, phase_case);
    std::string noise_name(stream_name);
    noise_name += "/pulses";
    Rng rng = make_stream(seed, noise_name);
    auto seq = gen_sequence(rng, windows, phase_case);
    seq.ref_errors.resize(n_pulses);
    seq.sig_errors.resize(n_pulses);
    seq.window_index.resize(n_pulses);
    return seq;
}

/// Quadrature-level consistency mode: encode a coherent state, rotate it by
/// the pulse's reference phase error, add Gaussian quadrature noise of
/// variance `quadrature_noise`, and recover the phase via phase_error.
inline std::vector<double> recover_via_quadratures(Rng& rng, std::span<const double> phases, double v_mod,
                                                   double quadrature_noise) {
    std::vector<double> out;
    out.reserve(phases.size());
    for (double phi : phases) {
        const auto alice = encode_coherent_state(v_mod, rng);
        auto bob = rotate(alice, phi);
        bob.x += normal_variance(rng, 0.0, quadrature_noise);
        bob.p += normal_variance(rng, 0.0, quadrature_noise);
        out.push_back(phase_error(alice, bob));
    }
    return out;
}

}  // namespace satphase
