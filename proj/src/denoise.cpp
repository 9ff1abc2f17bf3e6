#include "bwshrink/denoise.hpp"

#include "bwshrink/priors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bwshrink {

Estimator parse_estimator(const std::string& name)
{
    if (name == "mean")
        return Estimator::mean;
    if (name == "median")
        return Estimator::median;
    throw std::invalid_argument("unknown estimator '" + name + "' (expected mean or median)");
}

double estimate_noise_sd(const CoefficientTree& dwt)
{
    auto finest = dwt.level(dwt.j_max());
    std::vector<double> abs_vals(finest.size());
    std::transform(finest.begin(), finest.end(), abs_vals.begin(), [](double v) { return std::abs(v); });
    const std::size_t mid = abs_vals.size() / 2;
    std::nth_element(abs_vals.begin(), abs_vals.begin() + mid, abs_vals.end());
    double med = abs_vals[mid];
    if (abs_vals.size() % 2 == 0) {
        const double lower = *std::max_element(abs_vals.begin(), abs_vals.begin() + mid);
        med = 0.5 * (med + lower);
    }
    return med / 0.6745;
}

DenoiseResult denoise(const SampledSignal& y, const DenoiseOptions& opts)
{
    if (y.length() < 2)
        throw std::invalid_argument("denoise: signal needs at least 2 samples");
    const WaveletFilter filter = WaveletFilter::by_name(opts.wavelet);
    const CoefficientTree w = forward_dwt(y, filter);
    const double root_n = std::sqrt(static_cast<double>(y.length()));

    DenoiseResult out{SampledSignal(std::vector<double>(y.length(), 0.0)), 0.0, 0.0, {}};
    out.noise_sd = opts.noise_sd ? *opts.noise_sd : estimate_noise_sd(w);
    if (!(out.noise_sd > 0.0) || !std::isfinite(out.noise_sd))
        throw std::invalid_argument("denoise: noise standard deviation must be positive and finite");
    out.alpha = choose_alpha(opts.s, opts.p);

    SpikeSlabPrior prior{out.alpha, opts.gamma, opts.c_a, opts.c_pi, w.j_max()};
    prior.validate();
    const double sigma_sq = out.noise_sd * out.noise_sd / static_cast<double>(y.length());

    CoefficientTree est(w.j_max(), w.alpha00());
    for (int j = 0; j <= w.j_max(); ++j) {
        const LevelParams lp = level_params(prior, j);
        auto src = w.level(j);
        auto dst = est.level(j);
        LevelSummary summary{j, 0.0, 0};
        for (std::size_t k = 0; k < src.size(); ++k) {
            const CoefficientPosterior cp = coefficient_posterior(src[k] / root_n, sigma_sq, lp.pi, lp.a_sq);
            const double theta = opts.estimator == Estimator::mean ? posterior_mean(cp) : posterior_median(cp);
            dst[k] = theta * root_n;
            summary.mean_omega += cp.omega;
            summary.nonzero += theta != 0.0 ? 1 : 0;
        }
        summary.mean_omega /= static_cast<double>(src.size());
        out.levels.push_back(summary);
    }
    out.signal = inverse_dwt(est, filter);
    return out;
}

} // namespace bwshrink
