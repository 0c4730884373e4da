#pragma once

// Split-step phase-screen propagation of a Gaussian beam from the satellite
// down to the receiver, and the per-window transmissivity it produces.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <istream>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "satphase/error.hpp"
#include "satphase/fft.hpp"
#include "satphase/random.hpp"
#include "satphase/turbulence.hpp"

namespace satphase {

/// Layered atmosphere. All altitudes are absolute [m], from the receiver up to
/// the satellite.
struct LayerStack {
    std::vector<double> boundaries;       // n_layers + 1, strictly increasing
    std::vector<double> screen_altitudes; // n_layers
    std::vector<double> r0_per_layer;     // Fried parameter of each layer [m]
    double zenith_angle = 0.0;

    std::size_t size() const noexcept { return screen_altitudes.size(); }

    /// Composite Fried parameter (sum of r0^(-5/3)).
    double composite_r0() const {
        double s = 0.0;
        for (double r : r0_per_layer) s += std::pow(r, -5.0 / 3.0);
        return std::pow(s, -3.0 / 5.0);
    }

    void validate() const {
        const std::size_t n = screen_altitudes.size();
        if (n == 0 || boundaries.size() != n + 1 || r0_per_layer.size() != n) {
            throw ShapeError("LayerStack: inconsistent layer counts");
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (!(boundaries[i + 1] > boundaries[i])) {
                throw ConfigError("LayerStack: boundaries must be strictly increasing");
            }
            if (!(screen_altitudes[i] > boundaries[i] && screen_altitudes[i] < boundaries[i + 1])) {
                throw ConfigError("LayerStack: screen " + std::to_string(i) + " outside its layer");
            }
            if (!(r0_per_layer[i] > 0.0)) throw ConfigError("LayerStack: r0 must be positive");
        }
    }
};

struct PhaseScreen {
    std::size_t size = 0;
    double pitch = 0.0;
    std::vector<double> grid;  // row-major, size*size, radians
    std::optional<std::string> warning;

    double at(std::size_t row, std::size_t col) const { return grid[row * size + col]; }
};

struct ComplexField {
    std::size_t size = 0;
    double pitch = 0.0;
    double wavelength = 0.0;
    std::vector<std::complex<double>> grid;  // row-major
    /// Power launched at the transmitter; carried through propagation so the
    /// receiver-side transmissivity can be formed.
    double launch_power = 0.0;

    double coordinate(std::size_t i) const noexcept {
        return (static_cast<double>(i) - static_cast<double>(size) / 2.0) * pitch;
    }

    double power() const noexcept {
        double s = 0.0;
        for (const auto& u : grid) s += std::norm(u);
        return s * pitch * pitch;
    }

    std::complex<double> at(std::size_t row, std::size_t col) const { return grid[row * size + col]; }
};

struct ChannelRealization {
    double transmissivity = 1.0;
    double coherence_time = 0.0;
    AtmosphereProfile profile;
};

/// Numerical grid and launch geometry for simulate_channel.
struct GridConfig {
    std::size_t size = 512;
    /// Grid pitch [m]; <= 0 selects the default (see default_pitch).
    double pitch = 0.0;
    std::size_t n_layers = 10;
    double beam_waist = 0.15;       // w0 at the satellite, collimated
    double aperture_radius = 1.25;  // R_r
    double window_fraction = 0.9;   // absorbing window radius / grid half-width
    int window_order = 8;           // super-Gaussian exponent is 2*order
    int subharmonic_levels = 3;
    /// Uniform multiplier on C_n^2; 0 gives pure vacuum propagation.
    double turbulence_scale = 1.0;
};

struct PropagationOptions {
    bool absorbing_window = true;
    double window_fraction = 0.9;
    int window_order = 8;
    /// Longest single angular-spectrum hop [m]; <= 0 means size*pitch^2/lambda.
    double max_step = 0.0;
};

inline bool is_power_of_two(std::size_t n) noexcept { return n >= 2 && (n & (n - 1)) == 0; }

/// Vacuum 1/e^2 intensity radius of a collimated Gaussian after distance z.
inline double gaussian_beam_radius(double w0, double wavelength, double z) noexcept {
    const double zr = std::numbers::pi * w0 * w0 / wavelength;
    return w0 * std::sqrt(1.0 + (z / zr) * (z / zr));
}

/// Pitch used when GridConfig::pitch is unset: the grid spans the larger of
/// four aperture radii and six vacuum beam radii at the receiver.
inline double default_pitch(const GridConfig& g, const AtmosphereProfile& p) {
    const double w_rx = gaussian_beam_radius(g.beam_waist, p.wavelength, p.path_length());
    const double extent = std::max(4.0 * g.aperture_radius, 6.0 * w_rx);
    return extent / static_cast<double>(g.size);
}

inline double grid_pitch(const GridConfig& g, const AtmosphereProfile& p) {
    return g.pitch > 0.0 ? g.pitch : default_pitch(g, p);
}

/// Startup sampling check. Throws ConfigError with a diagnostic when the grid
/// cannot represent the launch beam or the diffracted beam at the receiver.
inline void check_sampling(const GridConfig& g, const AtmosphereProfile& p) {
    if (!is_power_of_two(g.size)) throw ConfigError("grid size must be a power of two");
    const double pitch = grid_pitch(g, p);
    const double half = 0.5 * pitch * static_cast<double>(g.size);
    std::ostringstream msg;
    if (pitch > g.beam_waist / 4.0) {
        msg << "sampling: pitch " << pitch << " m under-resolves launch waist " << g.beam_waist
            << " m (need pitch <= w0/4)";
        throw ConfigError(msg.str());
    }
    const double fresnel = std::sqrt(p.wavelength * p.path_length());
    if (pitch > fresnel / 4.0) {
        msg << "sampling: pitch " << pitch << " m under-resolves Fresnel scale " << fresnel << " m";
        throw ConfigError(msg.str());
    }
    const double w_rx = gaussian_beam_radius(g.beam_waist, p.wavelength, p.path_length());
    const double window_r = g.window_fraction * half;
    if (2.0 * g.aperture_radius > half || 1.2 * w_rx > window_r) {
        msg << "sampling: grid half-width " << half << " m too small for aperture radius "
            << g.aperture_radius << " m / receiver beam radius " << w_rx << " m";
        throw ConfigError(msg.str());
    }
}

/// Partition [h0, H] into n layers carrying equal integrated C_n^2. Each
/// layer's screen sits at the turbulence-weighted centre of the layer.
inline LayerStack build_layers(const AtmosphereProfile& p, std::size_t n_layers,
                               double cn2_multiplier = 1.0) {
    p.validate();
    if (n_layers < 1) throw ConfigError("build_layers: n_layers must be >= 1");
    const double v_rms = rms_wind(p.v_ground);
    const double top = p.path_height();
    const quad::Options tight{1e-13, 1e-40, 60};
    auto segment = [&](double lo, double hi) {
        return turbulence_integral(p, lo, hi, v_rms, cn2_multiplier, tight);
    };
    const double total = segment(0.0, top);
    if (!(total > 0.0) || !std::isfinite(total)) {
        throw ConfigError("build_layers: profile has zero integrated turbulence");
    }

    // Cumulative table on the path breakpoints, then bisection inside the
    // bracketing segment.
    const auto nodes = path_breakpoints(top);
    std::vector<double> cumulative{0.0};
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        cumulative.push_back(cumulative.back() + segment(nodes[i - 1], nodes[i]));
    }
    std::vector<double> heights{0.0};
    for (std::size_t k = 1; k < n_layers; ++k) {
        const double target = total * static_cast<double>(k) / static_cast<double>(n_layers);
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
        const std::size_t j = static_cast<std::size_t>(std::distance(cumulative.begin(), it)) - 1;
        double lo = nodes[j];
        double hi = nodes[std::min(j + 1, nodes.size() - 1)];
        const double base = cumulative[j];
        for (int iter = 0; iter < 100 && hi - lo > 1e-9 * (1.0 + hi); ++iter) {
            const double mid = 0.5 * (lo + hi);
            (base + segment(nodes[j], mid) < target ? lo : hi) = mid;
        }
        heights.push_back(0.5 * (lo + hi));
    }
    heights.push_back(top);

    LayerStack stack;
    stack.zenith_angle = p.zenith_angle;
    const double k = 2.0 * std::numbers::pi / p.wavelength;
    const double c0 = p.cn2_ground;
    for (std::size_t i = 0; i < n_layers; ++i) {
        const double lo = heights[i];
        const double hi = heights[i + 1];
        const double weight = segment(lo, hi);
        std::vector<double> pts{lo};
        for (double x : path_breakpoints(hi)) {
            if (x > lo && x < hi) pts.push_back(x);
        }
        pts.push_back(hi);
        const double moment =
            quad::integrate([&](double h) { return h * cn2(h, v_rms, c0); }, pts, tight) *
            cn2_multiplier / std::cos(p.zenith_angle);
        const double centroid = std::clamp(moment / weight, lo + 1e-6 * (hi - lo), hi - 1e-6 * (hi - lo));
        stack.boundaries.push_back(p.receiver_altitude + lo);
        stack.screen_altitudes.push_back(p.receiver_altitude + centroid);
        stack.r0_per_layer.push_back(std::pow(0.423 * k * k * weight, -3.0 / 5.0));
    }
    stack.boundaries.push_back(p.receiver_altitude + top);
    stack.validate();
    return stack;
}

/// Fried parameter of the whole slant path.
inline double path_fried_parameter(const AtmosphereProfile& p, double cn2_multiplier = 1.0) {
    const double k = 2.0 * std::numbers::pi / p.wavelength;
    const quad::Options tight{1e-13, 1e-40, 60};
    const double j =
        turbulence_integral(p, 0.0, p.path_height(), rms_wind(p.v_ground), cn2_multiplier, tight);
    return std::pow(0.423 * k * k * j, -3.0 / 5.0);
}

namespace detail {

/// Modified von Karman phase PSD [rad^2 m^2] at spatial frequency f [cycles/m].
inline double von_karman_psd(double f, double r0, double outer_scale, double inner_scale) {
    const double f0 = std::isfinite(outer_scale) && outer_scale > 0.0 ? 1.0 / outer_scale : 0.0;
    const double fm = inner_scale > 0.0 ? 5.92 / (2.0 * std::numbers::pi * inner_scale)
                                        : std::numeric_limits<double>::infinity();
    const double cutoff = std::isfinite(fm) ? std::exp(-(f / fm) * (f / fm)) : 1.0;
    return 0.023 * std::pow(r0, -5.0 / 3.0) * cutoff * std::pow(f * f + f0 * f0, -11.0 / 6.0);
}

inline std::complex<double> complex_normal(Rng& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    const double re = n(rng);
    const double im = n(rng);
    return {re, im};
}

}  // namespace detail

/// Von Karman phase-screen synthesiser for a fixed grid and turbulence scales.
/// The square-root spectrum is tabulated once for r0 = 1 m; each draw
/// rescales it by r0^(-5/6). FFT filtering of complex white noise supplies
/// the bulk spectrum and `subharmonic_levels` levels of 3x3 subharmonics add
/// the low-frequency content the FFT grid cannot hold.
class ScreenGenerator {
public:
    ScreenGenerator(double outer_scale, double inner_scale, std::size_t size, double pitch,
                    int subharmonic_levels = 3)
        : outer_scale_(outer_scale), inner_scale_(inner_scale), size_(size), pitch_(pitch),
          levels_(subharmonic_levels) {
        if (!is_power_of_two(size)) throw ConfigError("generate_screen: size must be a power of two");
        if (!(pitch > 0.0)) throw ConfigError("generate_screen: pitch must be positive");
        const double df = 1.0 / (pitch * static_cast<double>(size));
        amplitude_.resize(size * size);
        for (std::size_t r = 0; r < size; ++r) {
            const double fy = fft_frequency(r, size, pitch);
            for (std::size_t c = 0; c < size; ++c) {
                const double fx = fft_frequency(c, size, pitch);
                amplitude_[r * size + c] =
                    (r == 0 && c == 0)
                        ? 0.0
                        : std::sqrt(detail::von_karman_psd(std::hypot(fx, fy), 1.0, outer_scale, inner_scale)) * df;
            }
        }
        fft_ = std::make_unique<Fft2>(size);
    }

    PhaseScreen operator()(double r0, Rng& rng) const {
        if (!(r0 > 0.0)) throw ConfigError("generate_screen: r0 must be positive");
        PhaseScreen screen;
        screen.size = size_;
        screen.pitch = pitch_;
        screen.grid.assign(size_ * size_, 0.0);
        if (inner_scale_ > 0.0 && pitch_ > inner_scale_) {
            screen.warning = "generate_screen: pitch " + std::to_string(pitch_) + " m exceeds inner scale " +
                             std::to_string(inner_scale_) + " m";
        }
        if (std::isinf(r0)) return screen;

        const double r0_factor = std::pow(r0, -5.0 / 6.0);
        std::vector<std::complex<double>> spectrum(size_ * size_);
        for (std::size_t i = 0; i < spectrum.size(); ++i) {
            spectrum[i] = detail::complex_normal(rng) * (amplitude_[i] * r0_factor);
        }
        fft_->backward(spectrum);
        for (std::size_t i = 0; i < spectrum.size(); ++i) screen.grid[i] = spectrum[i].real();
        if (levels_ > 0) add_subharmonics(screen, r0, rng);
        return screen;
    }

private:
    void add_subharmonics(PhaseScreen& screen, double r0, Rng& rng) const {
        const std::size_t n = size_;
        const double df = 1.0 / (pitch_ * static_cast<double>(n));
        std::vector<double> low(n * n, 0.0);
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = (static_cast<double>(i) - static_cast<double>(n) / 2.0) * pitch_;
        std::vector<std::complex<double>> ex(n);
        std::vector<std::complex<double>> column(n);
        for (int p = 1; p <= levels_; ++p) {
            const double dfp = df / std::pow(3.0, p);
            std::complex<double> cn[3][3];
            for (int my = -1; my <= 1; ++my) {
                for (int mx = -1; mx <= 1; ++mx) {
                    const double f = std::hypot(mx * dfp, my * dfp);
                    const double amp = (mx == 0 && my == 0)
                                           ? 0.0
                                           : std::sqrt(detail::von_karman_psd(f, r0, outer_scale_, inner_scale_)) * dfp;
                    cn[my + 1][mx + 1] = detail::complex_normal(rng) * amp;
                }
            }
            // Sum over y-frequencies first: the term is separable in x and y.
            for (int mx = -1; mx <= 1; ++mx) {
                for (std::size_t i = 0; i < n; ++i) {
                    std::complex<double> acc = 0.0;
                    for (int my = -1; my <= 1; ++my) {
                        acc += cn[my + 1][mx + 1] * std::polar(1.0, 2.0 * std::numbers::pi * my * dfp * x[i]);
                    }
                    column[i] = acc;
                    ex[i] = std::polar(1.0, 2.0 * std::numbers::pi * mx * dfp * x[i]);
                }
                for (std::size_t r = 0; r < n; ++r) {
                    const double cr = column[r].real();
                    const double ci = column[r].imag();
                    for (std::size_t c = 0; c < n; ++c) {
                        low[r * n + c] += cr * ex[c].real() - ci * ex[c].imag();
                    }
                }
            }
        }
        double mean = 0.0;
        for (double v : low) mean += v;
        mean /= static_cast<double>(low.size());
        for (std::size_t i = 0; i < low.size(); ++i) screen.grid[i] += low[i] - mean;
    }

    double outer_scale_;
    double inner_scale_;
    std::size_t size_;
    double pitch_;
    int levels_;
    std::vector<double> amplitude_;
    std::unique_ptr<Fft2> fft_;
};

/// One von Karman phase screen; see ScreenGenerator.
inline PhaseScreen generate_screen(double r0, double outer_scale, double inner_scale, std::size_t size,
                                   double pitch, Rng& rng, int subharmonic_levels = 3) {
    if (!(r0 > 0.0)) throw ConfigError("generate_screen: r0 must be positive");
    return ScreenGenerator(outer_scale, inner_scale, size, pitch, subharmonic_levels)(r0, rng);
}

/// Collimated Gaussian, amplitude exp(-r^2/w0^2), unit peak.
inline ComplexField gaussian_beam(std::size_t size, double pitch, double wavelength, double waist) {
    ComplexField field;
    field.size = size;
    field.pitch = pitch;
    field.wavelength = wavelength;
    field.grid.resize(size * size);
    for (std::size_t r = 0; r < size; ++r) {
        const double y = field.coordinate(r);
        for (std::size_t c = 0; c < size; ++c) {
            const double x = field.coordinate(c);
            field.grid[r * size + c] = std::exp(-(x * x + y * y) / (waist * waist));
        }
    }
    field.launch_power = field.power();
    return field;
}

namespace detail {

inline std::vector<double> absorbing_window(std::size_t size, double pitch, double fraction, int order) {
    std::vector<double> w(size * size);
    const double radius = fraction * 0.5 * static_cast<double>(size) * pitch;
    const auto c0 = static_cast<double>(size) / 2.0;
    for (std::size_t r = 0; r < size; ++r) {
        const double y = (static_cast<double>(r) - c0) * pitch;
        for (std::size_t c = 0; c < size; ++c) {
            const double x = (static_cast<double>(c) - c0) * pitch;
            const double rho = std::hypot(x, y) / radius;
            w[r * size + c] = std::exp(-std::pow(rho, 2 * order));
        }
    }
    return w;
}

/// One angular-spectrum vacuum hop of length dz. The paraxial transfer
/// function factorises into x and y chirps.
inline void vacuum_step(ComplexField& field, const Fft2& fft, double dz) {
    const std::size_t n = field.size;
    fft.forward(field.grid);
    const double scale = 1.0 / static_cast<double>(n * n);
    const double a = -std::numbers::pi * field.wavelength * dz;
    std::vector<std::complex<double>> chirp(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double f = fft_frequency(k, n, field.pitch);
        chirp[k] = std::polar(1.0, a * f * f);
    }
    for (std::size_t r = 0; r < n; ++r) {
        const std::complex<double> row = chirp[r] * scale;
        for (std::size_t c = 0; c < n; ++c) field.grid[r * n + c] *= row * chirp[c];
    }
    fft.backward(field.grid);
}

}  // namespace detail

/// Propagates `beam` from the satellite plane to the receiver plane, applying
/// screens[i] at stack.screen_altitudes[i]. Slant distances are stretched by
/// sec(zenith). Vacuum hops longer than max_step are subdivided.
inline ComplexField propagate(ComplexField beam, const LayerStack& stack,
                              std::span<const PhaseScreen> screens, PropagationOptions opt = {}) {
    stack.validate();
    if (screens.size() != stack.size()) {
        throw ShapeError("propagate: need one screen per layer (" + std::to_string(stack.size()) +
                         "), got " + std::to_string(screens.size()));
    }
    for (const auto& s : screens) {
        if (s.size != beam.size || std::abs(s.pitch - beam.pitch) > 1e-12 * beam.pitch) {
            throw ShapeError("propagate: screen geometry does not match the field grid");
        }
    }
    if (!(beam.power() > 0.0)) throw ConfigError("propagate: input field carries no power");

    const double sec = 1.0 / std::cos(stack.zenith_angle);
    const double max_step = opt.max_step > 0.0
                                ? opt.max_step
                                : static_cast<double>(beam.size) * beam.pitch * beam.pitch / beam.wavelength;
    Fft2 fft(beam.size);
    const auto window = opt.absorbing_window
                            ? detail::absorbing_window(beam.size, beam.pitch, opt.window_fraction, opt.window_order)
                            : std::vector<double>{};

    auto hop = [&](double distance) {
        if (distance <= 0.0) return;
        const auto steps = static_cast<std::size_t>(std::ceil(distance / max_step));
        const double dz = distance / static_cast<double>(steps);
        for (std::size_t s = 0; s < steps; ++s) {
            detail::vacuum_step(beam, fft, dz);
            if (!window.empty()) {
                for (std::size_t i = 0; i < beam.grid.size(); ++i) beam.grid[i] *= window[i];
            }
        }
    };

    double altitude = stack.boundaries.back();
    for (std::size_t i = stack.size(); i-- > 0;) {
        hop((altitude - stack.screen_altitudes[i]) * sec);
        altitude = stack.screen_altitudes[i];
        const auto& g = screens[i].grid;
        for (std::size_t j = 0; j < beam.grid.size(); ++j) beam.grid[j] *= std::polar(1.0, g[j]);
    }
    hop((altitude - stack.boundaries.front()) * sec);

    for (const auto& u : beam.grid) {
        if (!std::isfinite(u.real()) || !std::isfinite(u.imag())) {
            throw NumericalError("propagate: non-finite field");
        }
    }
    return beam;
}

/// Vacuum propagation over `distance` with no screens.
inline ComplexField propagate_vacuum(ComplexField beam, double distance, PropagationOptions opt = {}) {
    const double max_step = opt.max_step > 0.0
                                ? opt.max_step
                                : static_cast<double>(beam.size) * beam.pitch * beam.pitch / beam.wavelength;
    Fft2 fft(beam.size);
    const auto window = opt.absorbing_window
                            ? detail::absorbing_window(beam.size, beam.pitch, opt.window_fraction, opt.window_order)
                            : std::vector<double>{};
    const auto steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(distance / max_step)));
    const double dz = distance / static_cast<double>(steps);
    for (std::size_t s = 0; s < steps; ++s) {
        detail::vacuum_step(beam, fft, dz);
        if (!window.empty()) {
            for (std::size_t i = 0; i < beam.grid.size(); ++i) beam.grid[i] *= window[i];
        }
    }
    return beam;
}

/// Fraction of launched power inside a centred circular aperture, clamped to (0, 1].
/// Edge pixels are weighted by their approximate covered fraction.
inline double transmissivity(const ComplexField& field, double aperture_radius) {
    if (!(field.launch_power > 0.0)) throw ConfigError("transmissivity: zero transmitted power");
    const double half = 0.5 * static_cast<double>(field.size) * field.pitch;
    if (aperture_radius > half) throw ConfigError("transmissivity: aperture larger than the grid");
    const double d = field.pitch;
    double received = 0.0;
    for (std::size_t r = 0; r < field.size; ++r) {
        const double y = field.coordinate(r);
        for (std::size_t c = 0; c < field.size; ++c) {
            const double x = field.coordinate(c);
            const double rho = std::hypot(x, y);
            double w = std::clamp((aperture_radius - rho) / d + 0.5, 0.0, 1.0);
            if (rho == 0.0 && aperture_radius < d) {
                w = std::min(1.0, std::numbers::pi * aperture_radius * aperture_radius / (d * d));
            }
            if (w > 0.0) received += w * std::norm(field.grid[r * field.size + c]);
        }
    }
    received *= d * d;
    return std::clamp(received / field.launch_power, std::numeric_limits<double>::min(), 1.0);
}

/// One full channel draw: layers, screens, propagation, aperture, coherence time.
inline ChannelRealization simulate_channel(const AtmosphereProfile& profile, const GridConfig& grid, Rng& rng) {
    profile.validate();
    check_sampling(grid, profile);
    const double pitch = grid_pitch(grid, profile);
    PropagationOptions opt;
    opt.window_fraction = grid.window_fraction;
    opt.window_order = grid.window_order;

    auto beam = gaussian_beam(grid.size, pitch, profile.wavelength, grid.beam_waist);
    ComplexField rx;
    if (grid.turbulence_scale == 0.0) {
        rx = propagate_vacuum(std::move(beam), profile.path_length(), opt);
    } else {
        const auto stack = build_layers(profile, grid.n_layers, grid.turbulence_scale);
        std::vector<PhaseScreen> screens;
        screens.reserve(stack.size());
        const ScreenGenerator make_screen(profile.outer_scale, profile.inner_scale, grid.size, pitch,
                                          grid.subharmonic_levels);
        for (double r0 : stack.r0_per_layer) screens.push_back(make_screen(r0, rng));
        rx = propagate(std::move(beam), stack, screens, opt);
    }
    ChannelRealization out;
    out.profile = profile;
    out.transmissivity = transmissivity(rx, grid.aperture_radius);
    out.coherence_time = coherence_time(profile, grid.turbulence_scale == 0.0 ? 1.0 : grid.turbulence_scale);
    return out;
}

/// Empirical T samples from full propagation runs, resampled during dataset
/// generation in place of per-window propagation.
struct TransmissivityCache {
    std::vector<double> samples;

    void validate() const {
        if (samples.empty()) throw ConfigError("TransmissivityCache: cache is empty");
        for (double t : samples) {
            if (!(t > 0.0 && t <= 1.0)) throw ConfigError("TransmissivityCache: sample outside (0, 1]");
        }
    }

    double mean() const {
        double s = 0.0;
        for (double t : samples) s += t;
        return s / static_cast<double>(samples.size());
    }
};

inline double surrogate_transmissivity(Rng& rng, const TransmissivityCache& cache) {
    cache.validate();
    std::uniform_int_distribution<std::size_t> pick(0, cache.samples.size() - 1);
    return cache.samples[pick(rng)];
}

struct ChannelRecord {
    std::uint64_t realization_id = 0;
    std::uint64_t seed = 0;
    ChannelRealization realization;
};

/// Simulates `count` channels, each from its own derived stream.
inline std::vector<ChannelRecord> simulate_channels(std::uint64_t root_seed, std::size_t count,
                                                    const AtmosphereProfile& fixed, const SamplingRanges& ranges,
                                                    const GridConfig& grid) {
    std::vector<ChannelRecord> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        ChannelRecord rec;
        rec.realization_id = i;
        rec.seed = derive_seed(root_seed, "channel", i);
        Rng rng(rec.seed);
        const auto profile = sample_atmosphere(rng, ranges, fixed);
        rec.realization = simulate_channel(profile, grid, rng);
        out.push_back(rec);
    }
    return out;
}

inline void write_channel_csv(std::ostream& os, std::span<const ChannelRecord> records) {
    os << "realization_id,seed,v_ground,cn2_ground,transmissivity,coherence_time_s\n";
    os.precision(17);
    for (const auto& r : records) {
        os << r.realization_id << ',' << r.seed << ',' << r.realization.profile.v_ground << ','
           << r.realization.profile.cn2_ground << ',' << r.realization.transmissivity << ','
           << r.realization.coherence_time << '\n';
    }
}

/// Parses a channel CSV. Unknown profile fields come from `fixed`.
inline std::vector<ChannelRecord> read_channel_csv(std::istream& is, const AtmosphereProfile& fixed = {}) {
    std::string line;
    if (!std::getline(is, line)) throw ParseError("channel csv: missing header");
    if (line != "realization_id,seed,v_ground,cn2_ground,transmissivity,coherence_time_s") {
        throw ParseError("channel csv line 1: unexpected header");
    }
    static const char* names[] = {"realization_id", "seed", "v_ground", "cn2_ground", "transmissivity",
                                  "coherence_time_s"};
    std::vector<ChannelRecord> out;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 6) {
            throw ParseError("channel csv line " + std::to_string(line_no) + ": missing field '" +
                             names[std::min<std::size_t>(cells.size(), 5)] + "'");
        }
        ChannelRecord rec;
        try {
            rec.realization_id = std::stoull(cells[0]);
            rec.seed = std::stoull(cells[1]);
            rec.realization.profile = fixed;
            rec.realization.profile.v_ground = std::stod(cells[2]);
            rec.realization.profile.cn2_ground = std::stod(cells[3]);
            rec.realization.transmissivity = std::stod(cells[4]);
            rec.realization.coherence_time = std::stod(cells[5]);
        } catch (const std::exception&) {
            throw ParseError("channel csv line " + std::to_string(line_no) + ": malformed number");
        }
        out.push_back(rec);
    }
    return out;
}

inline TransmissivityCache cache_from_records(std::span<const ChannelRecord> records) {
    TransmissivityCache cache;
    for (const auto& r : records) cache.samples.push_back(r.realization.transmissivity);
    cache.validate();
    return cache;
}

}  // namespace satphase
