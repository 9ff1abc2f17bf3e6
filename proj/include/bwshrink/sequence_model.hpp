#ifndef BWSHRINK_SEQUENCE_MODEL_HPP
#define BWSHRINK_SEQUENCE_MODEL_HPP

#include "bwshrink/coefficient_tree.hpp"
#include "bwshrink/rng.hpp"

#include <cstdint>

namespace bwshrink {

/// Observed coefficients X_jk = beta_jk + z_jk / sqrt(n) of the Gaussian
/// sequence model, stored up to the observation resolution.
struct SequenceObservation {
    CoefficientTree data;
    std::int64_t n = 1;
    double sigma_n = 1.0;

    double noise_variance() const noexcept { return 1.0 / static_cast<double>(n); }
};

struct ObservationOptions {
    // Finest observed level; negative selects observation_resolution(n).
    int resolution = -1;
    // Observe alpha00 with noise instead of copying it from the truth.
    bool noisy_alpha00 = false;
};

// Cap on the default resolution; 2^25 - 1 stored coefficients.
inline constexpr int kMaxDefaultResolution = 24;

/// min(ceil(log2 n), kMaxDefaultResolution): the finest level kept from the
/// white-noise observation when no explicit resolution is configured.
int observation_resolution(std::int64_t n);

/// Simulates the sequence model. Noise for coefficient (j, k) is drawn from a
/// stream keyed by (seed, j, k) only, so the result does not depend on the
/// iteration order. Throws std::invalid_argument for n < 1 or a non-finite
/// truth.
SequenceObservation simulate_observation(const CoefficientTree& truth, std::int64_t n, Seed seed,
                                         const ObservationOptions& opts = {});

} // namespace bwshrink

#endif // BWSHRINK_SEQUENCE_MODEL_HPP
