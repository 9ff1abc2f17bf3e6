#include "bwshrink/priors.hpp"

#include "bwshrink/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace bwshrink {

double choose_alpha(double s, double p)
{
    return p >= 2.0 ? 2.0 * s + 1.0 : 2.0 * s + 2.0 - 2.0 / p;
}

void SpikeSlabPrior::validate() const
{
    if (!(alpha > 1.0))
        throw std::invalid_argument("SpikeSlabPrior: alpha must be > 1");
    if (!(gamma >= 0.0) || !std::isfinite(gamma))
        throw std::invalid_argument("SpikeSlabPrior: gamma must be >= 0");
    if (!(c_a > 0.0) || !std::isfinite(c_a))
        throw std::invalid_argument("SpikeSlabPrior: c_a must be > 0");
    if (!(c_pi > 0.0 && c_pi <= 1.0))
        throw std::invalid_argument("SpikeSlabPrior: c_pi must lie in (0, 1]");
    if (j_max < 0)
        throw std::invalid_argument("SpikeSlabPrior: J_max must be >= 0");
}

LevelParams SpikeSlabPrior::level(int j) const
{
    return {std::min(1.0, c_pi * std::exp2(-gamma * j)), c_a * std::exp2(-alpha * j)};
}

LevelParams level_params(const SpikeSlabPrior& prior, int j)
{
    if (j < 0 || j > prior.j_max)
        throw std::out_of_range("level_params: level " + std::to_string(j) + " outside [0, " +
                                std::to_string(prior.j_max) + "]");
    return prior.level(j);
}

void SievePrior::validate() const
{
    if (!(mu > 0.0) || !std::isfinite(mu))
        throw std::invalid_argument("SievePrior: mu must be > 0");
    if (!(alpha > 1.0))
        throw std::invalid_argument("SievePrior: alpha must be > 1");
    if (m_max < 0)
        throw std::invalid_argument("SievePrior: m_max must be >= 0");
}

double SievePrior::level_variance(int j) const { return std::exp2(-alpha * j); }

std::vector<double> sieve_weights(const SievePrior& prior)
{
    if (prior.m_max < 0)
        throw std::invalid_argument("sieve_weights: m_max must be >= 0");
    std::vector<double> w(static_cast<std::size_t>(prior.m_max) + 1);
    double total = 0.0;
    for (int m = 0; m <= prior.m_max; ++m) {
        w[m] = std::exp2(-prior.mu * m);
        total += w[m];
    }
    for (double& v : w)
        v /= total;
    return w;
}

CoefficientTree sample_spike_slab(const SpikeSlabPrior& prior, Seed seed)
{
    prior.validate();
    const Seed stream = derive_seed(seed, StreamTag::prior_draw);
    CoefficientTree t(prior.j_max);
    for (int j = 0; j <= prior.j_max; ++j) {
        const LevelParams lp = prior.level(j);
        const double a = std::sqrt(lp.a_sq);
        auto level = t.level(j);
        for (std::size_t k = 0; k < level.size(); ++k) {
            auto rng = coefficient_stream(stream, j, static_cast<std::int64_t>(k));
            if (rng.uniform() < lp.pi)
                level[k] = a * rng.normal();
        }
    }
    return t;
}

SieveDraw sample_sieve(const SievePrior& prior, Seed seed)
{
    prior.validate();
    const Seed stream = derive_seed(seed, StreamTag::prior_draw);
    const auto weights = sieve_weights(prior);
    SplitMix64 model_rng(derive_seed(stream, -1));
    const double u = model_rng.uniform();
    int model = prior.m_max;
    double cumulative = 0.0;
    for (int m = 0; m <= prior.m_max; ++m) {
        cumulative += weights[m];
        if (u < cumulative) {
            model = m;
            break;
        }
    }

    CoefficientTree t(prior.m_max);
    for (int j = 0; j <= model; ++j) {
        const double sd = std::sqrt(prior.level_variance(j));
        auto level = t.level(j);
        for (std::size_t k = 0; k < level.size(); ++k) {
            auto rng = coefficient_stream(stream, j, static_cast<std::int64_t>(k));
            level[k] = sd * rng.normal();
        }
    }
    return {model, std::move(t)};
}

namespace {

struct ActiveLevel {
    double pi;
    double a_sq;
};

struct MassComponent {
    double log_mean = -std::numeric_limits<double>::infinity();  // log of the IS mean
    double log_second = -std::numeric_limits<double>::infinity(); // log of mean of squared terms
    double ess = 0.0;
    std::int64_t hits = 0;
};

double log_add(double a, double b)
{
    if (a == -std::numeric_limits<double>::infinity())
        return b;
    if (b == -std::numeric_limits<double>::infinity())
        return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// P( offset + sum over active levels of (beta - beta0)^2 <= eps_sq ) under
// independent spike-slab levels, by importance sampling with slab proposals
// centred at the truth.
MassComponent estimate_component(const std::vector<ActiveLevel>& levels, const CoefficientTree& truth,
                                 double offset, double eps_sq, std::int64_t n_mc, Seed seed)
{
    MassComponent out;
    const double budget = eps_sq - offset;
    if (!(budget >= 0.0))
        return out;

    const int top = static_cast<int>(levels.size()) - 1;
    std::vector<double> log_terms(static_cast<std::size_t>(n_mc), -std::numeric_limits<double>::infinity());

    parallel_for(static_cast<std::size_t>(n_mc), worker_count(), [&](std::size_t i) {
        SplitMix64 rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
        double dist = 0.0;
        double log_w = 0.0;
        for (int j = 0; j <= top && dist <= budget; ++j) {
            const auto [pi, a_sq] = levels[j];
            const double a = std::sqrt(a_sq);
            const auto beta0 = truth.level(j);
            for (double b0 : beta0) {
                if (pi >= 1.0 || rng.uniform() < pi) {
                    const double beta = b0 + a * rng.normal();
                    log_w += (b0 * b0 - 2.0 * beta * b0) / (2.0 * a_sq);
                    dist += (beta - b0) * (beta - b0);
                } else {
                    dist += b0 * b0;
                }
            }
        }
        if (dist <= budget)
            log_terms[i] = log_w;
    });

    double peak = -std::numeric_limits<double>::infinity();
    for (double v : log_terms)
        peak = std::max(peak, v);
    if (peak == -std::numeric_limits<double>::infinity())
        return out;

    double sum = 0.0;
    double sum_sq = 0.0;
    for (double v : log_terms) {
        if (v == -std::numeric_limits<double>::infinity())
            continue;
        const double w = std::exp(v - peak);
        sum += w;
        sum_sq += w * w;
        ++out.hits;
    }
    const double log_n = std::log(static_cast<double>(n_mc));
    out.log_mean = peak + std::log(sum) - log_n;
    out.log_second = 2.0 * peak + std::log(sum_sq) - log_n;
    out.ess = sum * sum / sum_sq;
    return out;
}

// Standard error of the log of a nonnegative mean estimate, from the log
// first and second moments of the per-sample terms.
double log_se(double log_mean, double log_second, std::int64_t n)
{
    if (log_mean == -std::numeric_limits<double>::infinity())
        return std::numeric_limits<double>::infinity();
    const double rel_second = std::exp(log_second - 2.0 * log_mean);  // E[y^2] / E[y]^2
    const double rel_var = std::max(rel_second - 1.0, 0.0) / static_cast<double>(n);
    return std::sqrt(rel_var);
}

} // namespace

PriorMassEstimate prior_mass_probe(const Prior& prior, const CoefficientTree& truth, double eps_sq, int J,
                                   std::int64_t n_mc, Seed seed)
{
    if (!(eps_sq > 0.0))
        throw std::invalid_argument("prior_mass_probe: eps_sq must be > 0");
    if (J < 0)
        throw std::invalid_argument("prior_mass_probe: J must be >= 0");
    if (n_mc < 1)
        throw std::invalid_argument("prior_mass_probe: n_mc must be >= 1");

    const CoefficientTree beta0 = truth.resized(J);
    const Seed stream = derive_seed(seed, StreamTag::probe);
    PriorMassEstimate est;

    if (const auto* ss = std::get_if<SpikeSlabPrior>(&prior)) {
        ss->validate();
        std::vector<ActiveLevel> levels;
        for (int j = 0; j <= J; ++j) {
            const LevelParams lp = ss->level(j);
            levels.push_back({lp.pi, lp.a_sq});
        }
        const MassComponent c = estimate_component(levels, beta0, 0.0, eps_sq, n_mc, stream);
        est.log_mass = c.log_mean;
        est.log_mass_se = log_se(c.log_mean, c.log_second, n_mc);
        est.ess = c.ess;
        est.hits = c.hits;
        est.samples = n_mc;
    } else {
        const auto& sv = std::get<SievePrior>(prior);
        sv.validate();
        const auto weights = sieve_weights(sv);

        // Models m >= J agree on levels 0..J, so their weights are pooled.
        const int last = std::min(J, sv.m_max);
        std::vector<double> level_energy(static_cast<std::size_t>(J) + 1, 0.0);
        for (int j = 0; j <= J; ++j)
            for (double v : beta0.level(j))
                level_energy[j] += v * v;

        double log_total = -std::numeric_limits<double>::infinity();
        std::vector<double> log_contrib;
        std::vector<MassComponent> parts;
        std::vector<double> model_weight;
        for (int m = 0; m <= last; ++m) {
            double w = weights[m];
            if (m == last)
                for (int r = m + 1; r <= sv.m_max; ++r)
                    w += weights[r];
            double offset = 0.0;
            for (int j = m + 1; j <= J; ++j)
                offset += level_energy[j];
            std::vector<ActiveLevel> levels;
            for (int j = 0; j <= m; ++j)
                levels.push_back({1.0, sv.level_variance(j)});
            MassComponent c = estimate_component(levels, beta0, offset, eps_sq, n_mc,
                                                 derive_seed(stream, static_cast<std::uint64_t>(m)));
            const double lc = std::log(w) + c.log_mean;
            log_total = log_add(log_total, lc);
            log_contrib.push_back(lc);
            parts.push_back(c);
            model_weight.push_back(w);
            est.hits += c.hits;
            est.samples += n_mc;
        }
        est.log_mass = log_total;

        if (log_total == -std::numeric_limits<double>::infinity()) {
            est.log_mass_se = std::numeric_limits<double>::infinity();
        } else {
            // Var(sum_m w_m P_m) = sum_m w_m^2 Var(P_m); relative to the total.
            double rel_var = 0.0;
            double min_ess = std::numeric_limits<double>::infinity();
            for (std::size_t m = 0; m < parts.size(); ++m) {
                if (parts[m].log_mean == -std::numeric_limits<double>::infinity())
                    continue;
                const double share = std::exp(log_contrib[m] - log_total);
                const double rel_second = std::exp(parts[m].log_second - 2.0 * parts[m].log_mean);
                rel_var += share * share * std::max(rel_second - 1.0, 0.0) / static_cast<double>(n_mc);
                if (share >= 0.01)
                    min_ess = std::min(min_ess, parts[m].ess);
            }
            est.log_mass_se = std::sqrt(rel_var);
            est.ess = min_ess;
        }
    }
    est.reliable = est.ess >= kMinEffectiveSampleSize;
    return est;
}

} // namespace bwshrink
