// One downlink end to end: propagate a beam through a sampled atmosphere,
// build a short phase-error record from it and compare two estimators
// against the quantum limit.

#include <iostream>

#include "satphase/satphase.hpp"

int main() {
    using namespace satphase;

    Rng rng = make_stream(2024, "demo");
    const AtmosphereProfile profile = sample_atmosphere(rng, SamplingRanges{}, AtmosphereProfile{});
    const ChannelRealization channel = simulate_channel(profile, GridConfig{}, rng);
    std::cout << "v_ground " << profile.v_ground << " m/s, Cn2(0) " << profile.cn2_ground << "\n"
              << "T = " << channel.transmissivity << ", tau = " << channel.coherence_time * 1e3 << " ms\n";

    TransmissivityCache cache{{channel.transmissivity}};
    SurrogateChannel source(cache, profile, SamplingRanges{});
    const NoiseParams noise;
    const auto seq = generate_dataset(2024, "demo-pulses", 50'000, noise, source, 1e6, PhaseCase::gaussian_noise);

    const std::size_t n = 40;
    const EvalPlan plan{n - 1, 1};
    const auto truth = truths(seq, plan);
    const double v_id = estimation_error_variance(estimate(IdentityEstimator{}, seq, plan), truth);
    const double v_mean = estimation_error_variance(estimate(ExpectationEstimator{n}, seq, plan), truth);
    std::cout << "identity    " << v_id << " SNU\n"
              << "mean of " << n << "  " << v_mean << " SNU\n"
              << "QCRB(" << n << ")    " << qcrb(n, 10.0) << "\n";
}
