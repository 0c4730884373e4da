#pragma once

// Altitude-dependent turbulence strength, wind profile and coherence time for
// a satellite-to-ground slant path.
//
// Convention: profile functions take the height above the receiver site.
// Path integrals run over that height from 0 to (satellite_altitude -
// receiver_altitude) and are stretched by sec(zenith_angle).

#include <cmath>
#include <numbers>
#include <vector>

#include "satphase/error.hpp"
#include "satphase/quadrature.hpp"
#include "satphase/random.hpp"

namespace satphase {

struct AtmosphereProfile {
    double cn2_ground = 5.85e-15;      // m^(-2/3)
    double v_ground = 3.65;            // m/s
    double receiver_altitude = 2.0e3;  // m
    double satellite_altitude = 5.0e5; // m
    double zenith_angle = 0.0;         // rad
    double wavelength = 1550e-9;       // m
    double outer_scale = 5.0;          // m
    double inner_scale = 0.025;        // m

    double path_height() const noexcept { return satellite_altitude - receiver_altitude; }
    double path_length() const noexcept { return path_height() / std::cos(zenith_angle); }

    void validate() const {
        if (!(cn2_ground > 0.0)) throw ConfigError("AtmosphereProfile: cn2_ground must be > 0");
        if (!(v_ground >= 0.0)) throw ConfigError("AtmosphereProfile: v_ground must be >= 0");
        if (!(zenith_angle >= 0.0 && zenith_angle < std::numbers::pi / 2)) {
            throw ConfigError("AtmosphereProfile: zenith_angle must lie in [0, pi/2)");
        }
        if (!(receiver_altitude < satellite_altitude)) {
            throw ConfigError("AtmosphereProfile: receiver must be below the satellite");
        }
        if (!(inner_scale < outer_scale) || !(inner_scale >= 0.0)) {
            throw ConfigError("AtmosphereProfile: need 0 <= inner_scale < outer_scale");
        }
        if (!(wavelength > 0.0)) throw ConfigError("AtmosphereProfile: wavelength must be > 0");
    }
};

struct Range {
    double low = 0.0;
    double high = 0.0;
};

struct SamplingRanges {
    Range v_ground{2.3, 5.0};
    Range cn2_ground{1.70e-15, 1.0e-14};

    void validate() const {
        for (const Range& r : {v_ground, cn2_ground}) {
            if (!(r.low > 0.0) || !(r.low <= r.high)) {
                throw ConfigError("SamplingRanges: need 0 < low <= high");
            }
        }
    }
};

/// Bufton wind profile [m/s] at height h [m] for ground wind v_g.
inline double bufton_wind(double h, double v_g) noexcept {
    const double u = (h - 9400.0) / 4800.0;
    return v_g + 30.0 * std::exp(-u * u);
}

/// RMS of the Bufton profile over 5-20 km.
inline double rms_wind(double v_g, quad::Options opt = {}) {
    const double pts[] = {5.0e3, 9.4e3, 2.0e4};
    const double mean_sq = quad::integrate(
                               [v_g](double h) {
                                   const double v = bufton_wind(h, v_g);
                                   return v * v;
                               },
                               std::span<const double>(pts), opt) /
                           15.0e3;
    return std::sqrt(mean_sq);
}

/// Hufnagel-Valley refractive-index structure parameter [m^(-2/3)].
inline double cn2(double h, double v_rms, double cn2_ground) noexcept {
    const double w = v_rms / 27.0;
    return 0.00594 * w * w * std::pow(h * 1e-5, 10) * std::exp(-h / 1000.0) +
           2.7e-16 * std::exp(-h / 1500.0) + cn2_ground * std::exp(-h / 100.0);
}

/// Breakpoints over [0, upper] used by every path integral.
inline std::vector<double> path_breakpoints(double upper) {
    return quad::geometric_breakpoints(upper, 25.0);
}

/// Integral of C_n^2 along the slant path between heights [lo, hi] above the
/// receiver [m^(1/3)], including the sec(zenith) stretch.
inline double turbulence_integral(const AtmosphereProfile& p, double lo, double hi,
                                  double v_rms, double cn2_multiplier = 1.0,
                                  quad::Options opt = {}) {
    if (!(hi > lo)) return 0.0;
    std::vector<double> pts{lo};
    for (double x : path_breakpoints(hi)) {
        if (x > lo && x < hi) pts.push_back(x);
    }
    pts.push_back(hi);
    const double c0 = p.cn2_ground;
    const double v = quad::integrate([&](double h) { return cn2(h, v_rms, c0); }, pts, opt);
    return cn2_multiplier * v / std::cos(p.zenith_angle);
}

inline double turbulence_integral(const AtmosphereProfile& p, double lo, double hi) {
    return turbulence_integral(p, lo, hi, rms_wind(p.v_ground));
}

/// Greenwood/Tokovinin-style coherence time [s]. `cn2_multiplier` scales
/// C_n^2(h) uniformly.
inline double coherence_time(const AtmosphereProfile& p, double cn2_multiplier = 1.0,
                             quad::Options opt = {}) {
    p.validate();
    const double v_rms = rms_wind(p.v_ground, opt);
    const double c0 = p.cn2_ground;
    const double vg = p.v_ground;
    const auto pts = path_breakpoints(p.path_height());
    const double integral =
        quad::integrate(
            [&](double h) { return cn2(h, v_rms, c0) * std::pow(bufton_wind(h, vg), 5.0 / 3.0); },
            pts, opt) *
        cn2_multiplier / std::cos(p.zenith_angle);
    const double inner = 118.0 / (p.wavelength * p.wavelength) * integral;
    if (!(inner > 0.0) || !std::isfinite(inner)) {
        throw NumericalError("coherence_time: non-positive turbulence integral");
    }
    return std::pow(inner, -3.0 / 5.0);
}

/// Draws v_ground and cn2_ground uniformly; other fields come from the template.
inline AtmosphereProfile sample_atmosphere(Rng& rng, const SamplingRanges& ranges,
                                           const AtmosphereProfile& fixed) {
    ranges.validate();
    auto draw = [&rng](Range r) {
        if (r.low == r.high) return r.low;
        return std::uniform_real_distribution<double>(r.low, r.high)(rng);
    };
    AtmosphereProfile out = fixed;
    out.v_ground = draw(ranges.v_ground);
    out.cn2_ground = draw(ranges.cn2_ground);
    out.validate();
    return out;
}

}  // namespace satphase
