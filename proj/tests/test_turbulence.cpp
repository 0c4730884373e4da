#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "satphase/quadrature.hpp"
#include "satphase/turbulence.hpp"

using namespace satphase;

namespace {

// Reference values below were computed once with 50-digit mpmath quadrature
// of the same closed-form profiles and frozen here.
constexpr double kBufton0 = 5.64799515287935627;
constexpr double kRmsWindLow = 20.6099768487745814;
constexpr double kRmsWindHigh = 22.9636907989415955;
constexpr double kRmsWindMid = 21.7767908656948248;
constexpr double kCn2At100km = 3.14250925624059035e-45;

// Plain trapezoid on a log-spaced grid: independent of the adaptive code.
template <class F>
double trapezoid_log(F f, double hi, std::size_t n) {
    double sum = 0.0;
    double prev_h = 0.0;
    double prev_f = f(0.0);
    for (std::size_t i = 1; i <= n; ++i) {
        const double h = std::exp(std::log(1.0) + (std::log(hi + 1.0) - std::log(1.0)) * i / n) - 1.0;
        const double fh = f(h);
        sum += 0.5 * (fh + prev_f) * (h - prev_h);
        prev_h = h;
        prev_f = fh;
    }
    return sum;
}

double hv_oracle(double h, double w, double a0) {
    return 0.00594 * std::pow(w / 27.0, 2) * std::pow(h * 1e-5, 10) * std::exp(-h / 1000.0) +
           2.7e-16 * std::exp(-h / 1500.0) + a0 * std::exp(-h / 100.0);
}

}  // namespace

TEST(Wind, BuftonAtGround) {
    EXPECT_NEAR(bufton_wind(0.0, 5.0), kBufton0, 1e-14);
    EXPECT_NEAR(bufton_wind(9400.0, 2.0), 32.0, 1e-14);
}

TEST(Wind, RmsWindFrozenValues) {
    EXPECT_NEAR(rms_wind(2.3), kRmsWindLow, 1e-8);
    EXPECT_NEAR(rms_wind(5.0), kRmsWindHigh, 1e-8);
    EXPECT_NEAR(rms_wind(3.65), kRmsWindMid, 1e-8);
}

TEST(Wind, RmsWindIncreasesWithGroundWind) {
    double prev = 0.0;
    for (double vg = 0.0; vg <= 10.0; vg += 0.5) {
        const double v = rms_wind(vg);
        EXPECT_GT(v, prev);
        prev = v;
    }
}

TEST(Cn2, GroundValue) {
    EXPECT_DOUBLE_EQ(cn2(0.0, 21.0, 1e-14), 1e-14 + 2.7e-16);
}

TEST(Cn2, HighAltitudeFrozenValue) {
    EXPECT_NEAR(cn2(1e5, 21.0, 1e-14) / kCn2At100km, 1.0, 1e-12);
    EXPECT_NEAR(cn2(1e5, 21.0, 1e-14) / hv_oracle(1e5, 21.0, 1e-14), 1.0, 1e-14);
}

TEST(Cn2, NonNegativeAndDecaysAboveTropopause) {
    for (double h = 0.0; h < 5e5; h += 997.0) EXPECT_GE(cn2(h, 21.0, 5e-15), 0.0);
    EXPECT_LT(cn2(3e4, 21.0, 5e-15), cn2(1e4, 21.0, 5e-15));
}

TEST(Quadrature, ExponentialOnGeometricGrid) {
    const auto pts = quad::geometric_breakpoints(1e5);
    const double v = quad::integrate([](double h) { return std::exp(-h / 1000.0); }, pts);
    EXPECT_NEAR(v / (1000.0 * (1.0 - std::exp(-100.0))), 1.0, 1e-9);
}

TEST(Quadrature, MatchesIndependentTrapezoid) {
    const AtmosphereProfile p;
    const double v_rms = rms_wind(p.v_ground);
    const double adaptive = turbulence_integral(p, 0.0, p.path_height());
    const double trap = trapezoid_log([&](double h) { return hv_oracle(h, v_rms, p.cn2_ground); }, p.path_height(),
                                      400000);
    EXPECT_NEAR(adaptive / trap, 1.0, 1e-6);
}

TEST(Quadrature, GridConvergence) {
    const AtmosphereProfile p;
    const double loose = coherence_time(p, 1.0, quad::Options{1e-6, 1e-30, 48});
    const double tight = coherence_time(p, 1.0, quad::Options{1e-11, 1e-40, 60});
    EXPECT_NEAR(loose / tight, 1.0, 1e-6);
}

TEST(Quadrature, NonFiniteIntegrandThrows) {
    EXPECT_THROW(quad::integrate([](double) { return std::nan(""); }, 0.0, 1.0), NumericalError);
}

TEST(CoherenceTime, FrozenValuesOverRanges) {
    struct Case {
        double vg, c0, tau;
    };
    const Case cases[] = {{3.65, 5.85e-15, 0.00931440125849102783},
                          {2.3, 1.7e-15, 0.01141777504232895},
                          {5.0, 1e-14, 0.00751291019779488},
                          {2.3, 1e-14, 0.01051193829797647},
                          {5.0, 1.7e-15, 0.00868068928847125}};
    for (const auto& c : cases) {
        AtmosphereProfile p;
        p.v_ground = c.vg;
        p.cn2_ground = c.c0;
        EXPECT_NEAR(coherence_time(p) / c.tau, 1.0, 1e-7) << "vg=" << c.vg << " cn2=" << c.c0;
    }
}

TEST(CoherenceTime, ShrinksWithStrongerTurbulence) {
    AtmosphereProfile p;
    const double base = coherence_time(p);
    EXPECT_LT(coherence_time(p, 2.0), base);
    p.zenith_angle = 0.5;
    EXPECT_LT(coherence_time(p), base);
    EXPECT_NEAR(coherence_time(p, 2.0) / coherence_time(p), std::pow(2.0, -0.6), 1e-9);
}

TEST(CoherenceTime, WindowLengthIsThousandsOfPulses) {
    const SamplingRanges r;
    for (double vg : {r.v_ground.low, r.v_ground.high}) {
        for (double c0 : {r.cn2_ground.low, r.cn2_ground.high}) {
            AtmosphereProfile p;
            p.v_ground = vg;
            p.cn2_ground = c0;
            const double pulses = coherence_time(p) * 1e6;
            EXPECT_GE(pulses, 1e3);
            EXPECT_LE(pulses, 1e5);
        }
    }
}

TEST(Profile, ValidationRejectsBadValues) {
    AtmosphereProfile p;
    p.cn2_ground = -1e-15;
    EXPECT_THROW(p.validate(), ConfigError);
    p = {};
    p.satellite_altitude = p.receiver_altitude;
    EXPECT_THROW(p.validate(), ConfigError);
    p = {};
    p.zenith_angle = 1.6;
    EXPECT_THROW(p.validate(), ConfigError);
    SamplingRanges r;
    r.v_ground = {5.0, 2.0};
    EXPECT_THROW(r.validate(), ConfigError);
}

TEST(Sampling, DrawsInsideRanges) {
    Rng rng = make_stream(3, "atm");
    const SamplingRanges r;
    for (int i = 0; i < 1000; ++i) {
        const auto p = sample_atmosphere(rng, r, AtmosphereProfile{});
        EXPECT_GE(p.v_ground, r.v_ground.low);
        EXPECT_LE(p.v_ground, r.v_ground.high);
        EXPECT_GE(p.cn2_ground, r.cn2_ground.low);
        EXPECT_LE(p.cn2_ground, r.cn2_ground.high);
    }
}

TEST(Sampling, DegenerateRangeIsFixed) {
    Rng rng = make_stream(3, "atm");
    SamplingRanges r;
    r.v_ground = {4.0, 4.0};
    EXPECT_EQ(sample_atmosphere(rng, r, AtmosphereProfile{}).v_ground, 4.0);
}

TEST(Seeding, StreamsAreDistinctAndReproducible) {
    EXPECT_EQ(derive_seed(1, "a", 0), derive_seed(1, "a", 0));
    EXPECT_NE(derive_seed(1, "a", 0), derive_seed(1, "a", 1));
    EXPECT_NE(derive_seed(1, "a", 0), derive_seed(1, "b", 0));
    EXPECT_NE(derive_seed(1, "a", 0), derive_seed(2, "a", 0));
}
