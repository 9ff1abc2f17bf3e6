#include "bwshrink/sequence_model.hpp"

#include <cmath>
#include <stdexcept>

namespace bwshrink {

int observation_resolution(std::int64_t n)
{
    if (n < 1)
        throw std::invalid_argument("observation_resolution: n must be >= 1");
    int j = 0;
    while (j < kMaxDefaultResolution && (std::int64_t{1} << j) < n)
        ++j;
    return j;
}

SequenceObservation simulate_observation(const CoefficientTree& truth, std::int64_t n, Seed seed,
                                         const ObservationOptions& opts)
{
    if (n < 1)
        throw std::invalid_argument("simulate_observation: n must be >= 1");
    if (!truth.is_finite())
        throw std::invalid_argument("simulate_observation: truth has non-finite entries");

    const int resolution = opts.resolution >= 0 ? opts.resolution : observation_resolution(n);
    const double sigma = 1.0 / std::sqrt(static_cast<double>(n));
    const Seed noise_seed = derive_seed(seed, StreamTag::observation);

    CoefficientTree data = truth.resized(resolution);
    for (int j = 0; j <= resolution; ++j) {
        auto level = data.level(j);
        for (std::size_t k = 0; k < level.size(); ++k) {
            auto rng = coefficient_stream(noise_seed, j, static_cast<std::int64_t>(k));
            level[k] += sigma * rng.normal();
        }
    }
    if (opts.noisy_alpha00) {
        auto rng = coefficient_stream(noise_seed, -1, 0);
        data.set_alpha00(truth.alpha00() + sigma * rng.normal());
    }
    return SequenceObservation{std::move(data), n, sigma};
}

} // namespace bwshrink
