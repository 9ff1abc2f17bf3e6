#include "bwshrink/posterior.hpp"

#include "bwshrink/parallel.hpp"
#include "bwshrink/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace bwshrink {

CoefficientPosterior coefficient_posterior(double X, double sigma_sq, double pi, double a_sq)
{
    if (!(sigma_sq > 0.0) || !(a_sq > 0.0) || !(pi >= 0.0 && pi <= 1.0) || !std::isfinite(X))
        throw std::invalid_argument("coefficient_posterior: requires sigma_sq > 0, a_sq > 0, pi in [0, 1]");

    CoefficientPosterior cp;
    const double total = a_sq + sigma_sq;
    cp.m = a_sq * X / total;
    cp.v = a_sq * sigma_sq / total;

    if (pi == 0.0) {
        cp.omega = 0.0;
    } else if (pi == 1.0) {
        cp.omega = 1.0;
    } else {
        const double log_slab = std::log(pi) + log_normal_pdf(X, 0.0, total);
        const double log_spike = std::log1p(-pi) + log_normal_pdf(X, 0.0, sigma_sq);
        const double d = log_slab - log_spike;
        cp.omega = d >= 0.0 ? 1.0 / (1.0 + std::exp(-d)) : std::exp(d) / (1.0 + std::exp(d));
    }
    return cp;
}

double posterior_mean(const CoefficientPosterior& cp) { return cp.omega * cp.m; }

double posterior_cdf(const CoefficientPosterior& cp, double t)
{
    const double slab = cp.omega * normal_cdf((t - cp.m) / std::sqrt(cp.v));
    return t >= 0.0 ? slab + (1.0 - cp.omega) : slab;
}

double posterior_median_bisection(const CoefficientPosterior& cp)
{
    const double below_zero = cp.omega * normal_cdf(-cp.m / std::sqrt(cp.v));
    if (below_zero <= 0.5 && below_zero + (1.0 - cp.omega) >= 0.5)
        return 0.0;

    const double sd = std::sqrt(cp.v);
    double lo;
    double hi;
    if (below_zero > 0.5) {
        lo = cp.m - 40.0 * sd;
        hi = 0.0;
    } else {
        lo = 0.0;
        hi = cp.m + 40.0 * sd;
    }
    for (int iter = 0; iter < 400; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double residual = posterior_cdf(cp, mid) - 0.5;
        if (std::abs(residual) <= 1e-12 || mid == lo || mid == hi)
            return mid;
        (residual < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double posterior_median(const CoefficientPosterior& cp)
{
    if (cp.omega <= 0.5)
        return 0.0;
    const double sd = std::sqrt(cp.v);
    const double z = cp.m / sd;
    double t = 0.0;
    if (cp.omega * normal_cdf(-z) > 0.5)
        t = cp.m + sd * normal_quantile(0.5 / cp.omega);
    else if (cp.omega * normal_cdf(z) > 0.5)
        t = cp.m - sd * normal_quantile(0.5 / cp.omega);
    else
        return 0.0;
    return std::isfinite(t) ? t : posterior_median_bisection(cp);
}

double sample_coefficient(const CoefficientPosterior& cp, SplitMix64& rng)
{
    if (cp.omega >= 1.0 || (cp.omega > 0.0 && rng.uniform() < cp.omega))
        return cp.m + std::sqrt(cp.v) * rng.normal();
    return 0.0;
}

double sample_coefficient(const CoefficientPosterior& cp, Seed seed)
{
    SplitMix64 rng(derive_seed(seed, StreamTag::posterior_draw));
    return sample_coefficient(cp, rng);
}

PosteriorTree::PosteriorTree(int j_max, double alpha00, std::vector<CoefficientPosterior> coeffs)
    : j_max_(j_max), alpha00_(alpha00), coeffs_(std::move(coeffs))
{
    if (coeffs_.size() != tree_size(j_max))
        throw std::invalid_argument("PosteriorTree: coefficient count does not match j_max");
}

std::span<const CoefficientPosterior> PosteriorTree::level(int j) const
{
    if (j < 0 || j > j_max_)
        throw std::out_of_range("PosteriorTree: level " + std::to_string(j) + " out of range");
    return std::span<const CoefficientPosterior>(coeffs_).subspan(level_offset(j), level_width(j));
}

CoefficientTree PosteriorTree::mean_tree() const
{
    CoefficientTree out(j_max_, alpha00_);
    auto flat = out.flat();
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
        flat[i] = posterior_mean(coeffs_[i]);
    return out;
}

CoefficientTree PosteriorTree::median_tree() const
{
    CoefficientTree out(j_max_, alpha00_);
    auto flat = out.flat();
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
        flat[i] = posterior_median(coeffs_[i]);
    return out;
}

CoefficientTree PosteriorTree::sample(Seed seed) const
{
    SplitMix64 rng(derive_seed(seed, StreamTag::posterior_draw));
    CoefficientTree out(j_max_, alpha00_);
    auto flat = out.flat();
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
        flat[i] = sample_coefficient(coeffs_[i], rng);
    return out;
}

double PosteriorTree::total_variance() const
{
    double sum = 0.0;
    for (const auto& cp : coeffs_) {
        const double mean = cp.omega * cp.m;
        sum += cp.omega * (cp.m * cp.m + cp.v) - mean * mean;
    }
    return sum;
}

PosteriorTree posterior_tree(const SequenceObservation& obs, const SpikeSlabPrior& prior)
{
    prior.validate();
    const double sigma_sq = obs.noise_variance();
    const CoefficientTree& data = obs.data;
    std::vector<CoefficientPosterior> coeffs(data.size());
    for (int j = 0; j <= data.j_max(); ++j) {
        const LevelParams lp = prior.level(j);
        const auto x = data.level(j);
        const std::size_t offset = level_offset(j);
        for (std::size_t k = 0; k < x.size(); ++k)
            coeffs[offset + k] = coefficient_posterior(x[k], sigma_sq, lp.pi, lp.a_sq);
    }
    return PosteriorTree(data.j_max(), data.alpha00(), std::move(coeffs));
}

SievePosterior::SievePosterior(std::vector<double> model_weights, CoefficientTree slab_mean,
                               std::vector<double> slab_variance)
    : model_weights_(std::move(model_weights)), slab_mean_(std::move(slab_mean)),
      slab_variance_(std::move(slab_variance))
{
    if (model_weights_.empty())
        throw std::invalid_argument("SievePosterior: at least one model weight is required");
    if (slab_variance_.size() != static_cast<std::size_t>(slab_mean_.num_levels()))
        throw std::invalid_argument("SievePosterior: one slab variance per level is required");
    inclusion_.assign(static_cast<std::size_t>(slab_mean_.num_levels()), 0.0);
    double tail = 0.0;
    for (int m = m_max(); m >= 0; --m) {
        tail += model_weights_[m];
        if (m < slab_mean_.num_levels())
            inclusion_[m] = std::min(tail, 1.0);
    }
}

double SievePosterior::level_inclusion(int j) const
{
    if (j < 0 || j > j_max())
        throw std::out_of_range("SievePosterior: level out of range");
    return inclusion_[j];
}

CoefficientPosterior SievePosterior::marginal(int j, std::size_t k) const
{
    return {level_inclusion(j), slab_mean_.level(j)[k], slab_variance_[j]};
}

CoefficientTree SievePosterior::model_mean_tree(int m) const
{
    if (m < 0 || m > m_max())
        throw std::out_of_range("SievePosterior: model index out of range");
    CoefficientTree out = truncate(slab_mean_, std::min(m, j_max()));
    return out;
}

CoefficientTree SievePosterior::mean_tree() const
{
    CoefficientTree out = slab_mean_;
    for (int j = 0; j <= j_max(); ++j)
        for (double& v : out.level(j))
            v *= inclusion_[j];
    return out;
}

CoefficientTree SievePosterior::median_tree() const
{
    CoefficientTree out(j_max(), alpha00());
    for (int j = 0; j <= j_max(); ++j) {
        auto level = out.level(j);
        for (std::size_t k = 0; k < level.size(); ++k)
            level[k] = posterior_median(marginal(j, k));
    }
    return out;
}

namespace {

int draw_model(std::span<const double> weights, SplitMix64& rng)
{
    const double u = rng.uniform();
    double cumulative = 0.0;
    for (std::size_t m = 0; m < weights.size(); ++m) {
        cumulative += weights[m];
        if (u < cumulative)
            return static_cast<int>(m);
    }
    return static_cast<int>(weights.size()) - 1;
}

} // namespace

CoefficientTree SievePosterior::sample(Seed seed) const
{
    SplitMix64 rng(derive_seed(seed, StreamTag::posterior_draw));
    const int model = draw_model(model_weights_, rng);
    CoefficientTree out(j_max(), alpha00());
    for (int j = 0; j <= std::min(model, j_max()); ++j) {
        const double sd = std::sqrt(slab_variance_[j]);
        const auto mean = slab_mean_.level(j);
        auto level = out.level(j);
        for (std::size_t k = 0; k < level.size(); ++k)
            level[k] = mean[k] + sd * rng.normal();
    }
    return out;
}

double SievePosterior::total_variance() const
{
    double sum = 0.0;
    for (int j = 0; j <= j_max(); ++j) {
        const double w = inclusion_[j];
        for (double m : slab_mean_.level(j))
            sum += w * (m * m + slab_variance_[j]) - (w * m) * (w * m);
    }
    return sum;
}

SievePosterior sieve_posterior(const SequenceObservation& obs, const SievePrior& prior)
{
    prior.validate();
    const double sigma_sq = obs.noise_variance();
    const CoefficientTree& data = obs.data;

    CoefficientTree slab_mean(data.j_max(), data.alpha00());
    std::vector<double> slab_variance(static_cast<std::size_t>(data.num_levels()));
    // Per-level log Bayes factor of "level active" against "level zero".
    std::vector<double> level_log_factor(static_cast<std::size_t>(data.num_levels()), 0.0);
    for (int j = 0; j <= data.j_max(); ++j) {
        const double a_sq = prior.level_variance(j);
        const double total = a_sq + sigma_sq;
        slab_variance[j] = a_sq * sigma_sq / total;
        const auto x = data.level(j);
        auto mean = slab_mean.level(j);
        const double log_det = -0.5 * std::log(total / sigma_sq);
        const double quad = 0.5 * (1.0 / sigma_sq - 1.0 / total);
        double acc = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) {
            mean[k] = a_sq * x[k] / total;
            acc += log_det + quad * x[k] * x[k];
        }
        level_log_factor[j] = acc;
    }

    const auto prior_weights = sieve_weights(prior);
    std::vector<double> log_w(prior_weights.size());
    double cumulative = 0.0;
    for (int m = 0; m <= prior.m_max; ++m) {
        if (m <= data.j_max())
            cumulative += level_log_factor[m];
        log_w[m] = std::log(prior_weights[m]) + cumulative;
    }
    const double peak = *std::max_element(log_w.begin(), log_w.end());
    double total = 0.0;
    std::vector<double> weights(log_w.size());
    for (std::size_t m = 0; m < log_w.size(); ++m) {
        weights[m] = std::exp(log_w[m] - peak);
        total += weights[m];
    }
    for (double& w : weights)
        w /= total;

    return SievePosterior(std::move(weights), std::move(slab_mean), std::move(slab_variance));
}

namespace {

// Contribution of center coefficients above the posterior's j_max, where
// draws are identically zero.
double center_overhang(const CoefficientTree& center, int j_max)
{
    double sum = 0.0;
    for (int j = j_max + 1; j <= center.j_max(); ++j)
        for (double v : center.level(j))
            sum += v * v;
    return sum;
}

} // namespace

std::vector<double> posterior_sample_distances(const PosteriorTree& post, const CoefficientTree& center,
                                               std::int64_t n_samples, Seed seed)
{
    if (n_samples < 1)
        throw std::invalid_argument("posterior_sample_distances: n_samples must be >= 1");
    const CoefficientTree c = center.resized(post.j_max());
    const double base = center_overhang(center, post.j_max()) +
                        (post.alpha00() - center.alpha00()) * (post.alpha00() - center.alpha00());
    const auto cps = post.flat();
    const auto cf = c.flat();
    std::vector<double> out(static_cast<std::size_t>(n_samples));
    const Seed stream = derive_seed(seed, StreamTag::posterior_draw);
    parallel_for(out.size(), worker_count(), [&](std::size_t s) {
        SplitMix64 rng(derive_seed(stream, static_cast<std::uint64_t>(s)));
        double dist = base;
        for (std::size_t i = 0; i < cps.size(); ++i) {
            const double d = sample_coefficient(cps[i], rng) - cf[i];
            dist += d * d;
        }
        out[s] = dist;
    });
    return out;
}

std::vector<double> posterior_sample_distances(const SievePosterior& post, const CoefficientTree& center,
                                               std::int64_t n_samples, Seed seed)
{
    if (n_samples < 1)
        throw std::invalid_argument("posterior_sample_distances: n_samples must be >= 1");
    const CoefficientTree c = center.resized(post.j_max());
    const double base = center_overhang(center, post.j_max()) +
                        (post.alpha00() - center.alpha00()) * (post.alpha00() - center.alpha00());
    std::vector<double> out(static_cast<std::size_t>(n_samples));
    const Seed stream = derive_seed(seed, StreamTag::posterior_draw);
    parallel_for(out.size(), worker_count(), [&](std::size_t s) {
        const CoefficientTree draw = post.sample(derive_seed(stream, static_cast<std::uint64_t>(s)));
        const auto df = draw.flat();
        const auto cf = c.flat();
        double dist = base;
        for (std::size_t i = 0; i < df.size(); ++i) {
            const double d = df[i] - cf[i];
            dist += d * d;
        }
        out[s] = dist;
    });
    return out;
}

MassEstimate complement_fraction(std::span<const double> distances, double radius_sq)
{
    if (distances.empty())
        throw std::invalid_argument("complement_fraction: no samples");
    const auto outside = std::count_if(distances.begin(), distances.end(), [&](double d) { return d > radius_sq; });
    const double n = static_cast<double>(distances.size());
    const double p = static_cast<double>(outside) / n;
    return {p, std::sqrt(p * (1.0 - p) / n)};
}

MassEstimate posterior_ball_complement_mass(const PosteriorTree& post, const CoefficientTree& center,
                                            double radius_sq, std::int64_t n_samples, Seed seed)
{
    return complement_fraction(posterior_sample_distances(post, center, n_samples, seed), radius_sq);
}

MassEstimate posterior_ball_complement_mass(const SievePosterior& post, const CoefficientTree& center,
                                            double radius_sq, std::int64_t n_samples, Seed seed)
{
    return complement_fraction(posterior_sample_distances(post, center, n_samples, seed), radius_sq);
}

} // namespace bwshrink
