#ifndef BWSHRINK_DENOISE_HPP
#define BWSHRINK_DENOISE_HPP

#include "bwshrink/besov.hpp"
#include "bwshrink/posterior.hpp"
#include "bwshrink/wavelet.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bwshrink {

enum class Estimator { mean, median };

Estimator parse_estimator(const std::string& name);

struct DenoiseOptions {
    std::string wavelet = "haar";
    double s = 1.0;
    double p = 2.0;
    double gamma = 0.5;
    double c_a = 1.0;
    double c_pi = 1.0;
    Estimator estimator = Estimator::median;
    // Noise standard deviation of each sample. Unset: median absolute
    // deviation of the finest detail level divided by 0.6745.
    std::optional<double> noise_sd = 1.0;
};

struct LevelSummary {
    int j = 0;
    double mean_omega = 0.0;
    std::size_t nonzero = 0;  // coefficients kept by the estimator
};

struct DenoiseResult {
    SampledSignal signal;
    double noise_sd = 0.0;
    double alpha = 0.0;
    std::vector<LevelSummary> levels;
};

/// Regression bridge: Y_i = f(i/N) + z_i with z_i ~ N(0, sd^2). The DWT
/// coefficients divided by sqrt(N) follow the sequence model with noise
/// variance sd^2 / N; the spike-and-slab posterior (alpha from (s, p)) is
/// applied per coefficient and the estimate is transformed back. The
/// scaling coefficient passes through unchanged.
DenoiseResult denoise(const SampledSignal& y, const DenoiseOptions& opts);

/// MAD of the finest level / 0.6745, on the sample scale.
double estimate_noise_sd(const CoefficientTree& dwt);

} // namespace bwshrink

#endif // BWSHRINK_DENOISE_HPP
