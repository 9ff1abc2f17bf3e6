#include "bwshrink/contraction.hpp"

#include "bwshrink/parallel.hpp"
#include "bwshrink/posterior.hpp"
#include "bwshrink/sequence_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace bwshrink {

int projection_level(std::int64_t n, double alpha)
{
    if (n < 1 || !(alpha > 0.0))
        throw std::invalid_argument("projection_level: requires n >= 1 and alpha > 0");
    return static_cast<int>(std::floor(std::log2(static_cast<double>(n)) / alpha + 1e-12));
}

RateQuantities theoretical_rate(const BesovIndex& idx, std::int64_t n)
{
    if (n < 2)
        throw std::invalid_argument("theoretical_rate: n must be >= 2");
    const double s = idx.s();
    const double p = idx.p();
    const double nd = static_cast<double>(n);
    const double log_n = std::log(nd);

    RateQuantities rq;
    rq.alpha = choose_alpha(s, p);
    if (p >= 2.0) {
        rq.exponent = 2.0 * s / (2.0 * s + 1.0);
        rq.tau_n = std::pow(nd, -(s + 0.5 - 1.0 / p) / (2.0 * s + 1.0));
    } else {
        rq.exponent = (2.0 * s + 1.0 - 2.0 / p) / (2.0 * s + 2.0 - 2.0 / p);
        rq.tau_n = std::pow(nd, -s / (2.0 * s + 2.0 - 2.0 / p));
    }
    rq.eps_n_sq = log_n * log_n * std::pow(nd, -rq.exponent);
    rq.J = projection_level(n, rq.alpha);
    return rq;
}

SlopeFit fit_rate_slope(std::span<const std::int64_t> ns, std::span<const double> losses)
{
    if (ns.size() != losses.size())
        throw std::invalid_argument("fit_rate_slope: ns and losses differ in length");
    if (ns.size() < 3)
        throw std::invalid_argument("fit_rate_slope: at least 3 points are required");
    const std::size_t count = ns.size();
    std::vector<double> x(count);
    std::vector<double> y(count);
    for (std::size_t i = 0; i < count; ++i) {
        if (ns[i] < 1)
            throw std::invalid_argument("fit_rate_slope: n must be positive");
        if (!(losses[i] > 0.0) || !std::isfinite(losses[i]))
            throw std::invalid_argument("fit_rate_slope: losses must be positive and finite");
        x[i] = std::log(static_cast<double>(ns[i]));
        y[i] = std::log(losses[i]);
    }
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / count;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / count;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0)
        throw std::invalid_argument("fit_rate_slope: n values must not all coincide");

    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        rss += r * r;
    }
    fit.residual = std::sqrt(rss / count);
    return fit;
}

void ExperimentConfig::validate() const
{
    if (n_grid.empty())
        throw std::invalid_argument("experiment: n_grid is empty");
    if (n_grid.front() < 2)
        throw std::invalid_argument("experiment: n_grid values must be >= 2");
    for (std::size_t i = 1; i < n_grid.size(); ++i)
        if (n_grid[i] <= n_grid[i - 1])
            throw std::invalid_argument("experiment: n_grid must be strictly increasing");
    if (replicates < 1)
        throw std::invalid_argument("experiment: replicates must be >= 1");
    if (posterior_samples < 1)
        throw std::invalid_argument("experiment: posterior_samples must be >= 1");
    if (!(M > 0.0))
        throw std::invalid_argument("experiment: M must be > 0");
    for (double m : M_sweep)
        if (!(m > 0.0))
            throw std::invalid_argument("experiment: M sweep values must be > 0");
    if (!(resolved_alpha() > 1.0))
        throw std::invalid_argument("experiment: alpha must be > 1");
    if (m_max && *m_max < 0)
        throw std::invalid_argument("experiment: m_max must be >= 0");
    if (!(slope_tolerance > 0.0))
        throw std::invalid_argument("experiment: slope tolerance must be > 0");
}

double ExperimentConfig::resolved_alpha() const { return alpha ? *alpha : choose_alpha(besov.s(), besov.p()); }

CoefficientTree experiment_truth(const ExperimentConfig& cfg)
{
    TruthSpec spec = cfg.truth;
    spec.besov = cfg.besov;
    return make_truth(spec, derive_seed(cfg.seed, StreamTag::truth));
}

namespace {

struct ReplicateOutcome {
    double loss_mean = 0.0;
    double loss_median = 0.0;
    std::vector<double> complement;  // M, then each sweep value
    double sample_loss = 0.0;
    bool variance_check_failed = false;
};

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

MeanSe summarize(const std::vector<double>& v)
{
    MeanSe out;
    const double n = static_cast<double>(v.size());
    out.mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v)
            ss += (x - out.mean) * (x - out.mean);
        out.se = std::sqrt(ss / (n - 1.0) / n);
    }
    return out;
}

template <typename Posterior>
ReplicateOutcome evaluate(const Posterior& post, const CoefficientTree& truth, double eps_sq,
                          const ExperimentConfig& cfg, Seed seed)
{
    ReplicateOutcome out;
    out.loss_mean = l2_distance_sq(post.mean_tree(), truth);
    out.loss_median = l2_distance_sq(post.median_tree(), truth);

    const auto dists = posterior_sample_distances(post, truth, cfg.posterior_samples, seed);
    out.complement.push_back(complement_fraction(dists, cfg.M * eps_sq).estimate);
    for (double m : cfg.M_sweep)
        out.complement.push_back(complement_fraction(dists, m * eps_sq).estimate);

    const MeanSe d = summarize(dists);
    out.sample_loss = d.mean;
    // E||beta - beta0||^2 = ||mean - beta0||^2 + trace Var >= ||mean - beta0||^2.
    out.variance_check_failed = d.mean + 4.0 * d.se < out.loss_mean;
    return out;
}

} // namespace

RateExperimentResult run_contraction_experiment(const ExperimentConfig& cfg)
{
    cfg.validate();
    const double alpha = cfg.resolved_alpha();
    const CoefficientTree truth = experiment_truth(cfg);

    const std::size_t n_points = cfg.n_grid.size();
    const std::size_t reps = static_cast<std::size_t>(cfg.replicates);
    std::vector<ReplicateOutcome> outcomes(n_points * reps);

    parallel_for(outcomes.size(), cfg.workers, [&](std::size_t task) {
        const std::size_t ni = task / reps;
        const std::size_t r = task % reps;
        const std::int64_t n = cfg.n_grid[ni];
        const double eps_sq = theoretical_rate(cfg.besov, n).eps_n_sq;
        const Seed rep_seed = derive_seed(cfg.seed, StreamTag::replicate, n, r);

        ObservationOptions opts;
        opts.noisy_alpha00 = cfg.noisy_alpha00;
        const SequenceObservation obs = simulate_observation(truth, n, rep_seed, opts);
        const Seed draw_seed = derive_seed(rep_seed, StreamTag::posterior_draw);

        if (cfg.prior_kind == PriorKind::spike_slab) {
            SpikeSlabPrior prior{alpha, cfg.gamma, cfg.c_a, cfg.c_pi, obs.data.j_max()};
            outcomes[task] = evaluate(posterior_tree(obs, prior), truth, eps_sq, cfg, draw_seed);
        } else {
            SievePrior prior{cfg.mu, alpha, cfg.m_max.value_or(obs.data.j_max())};
            outcomes[task] = evaluate(sieve_posterior(obs, prior), truth, eps_sq, cfg, draw_seed);
        }
    });

    RateExperimentResult result;
    result.alpha = alpha;
    result.exponent_theoretical = theoretical_rate(cfg.besov, cfg.n_grid.front()).exponent;

    for (std::size_t ni = 0; ni < n_points; ++ni) {
        RateRecord rec;
        rec.n = cfg.n_grid[ni];
        const RateQuantities rq = theoretical_rate(cfg.besov, rec.n);
        rec.eps_sq = rq.eps_n_sq;
        rec.J = projection_level(rec.n, alpha);
        rec.J_data = observation_resolution(rec.n);

        std::vector<double> lm;
        std::vector<double> lmed;
        std::vector<double> sl;
        std::vector<std::vector<double>> comp(1 + cfg.M_sweep.size());
        for (std::size_t r = 0; r < reps; ++r) {
            const ReplicateOutcome& o = outcomes[ni * reps + r];
            lm.push_back(o.loss_mean);
            lmed.push_back(o.loss_median);
            sl.push_back(o.sample_loss);
            for (std::size_t c = 0; c < comp.size(); ++c)
                comp[c].push_back(o.complement[c]);
            rec.variance_check_failures += o.variance_check_failed ? 1 : 0;
        }
        const MeanSe a = summarize(lm);
        const MeanSe b = summarize(lmed);
        const MeanSe s = summarize(sl);
        const MeanSe c0 = summarize(comp[0]);
        rec.loss_mean = a.mean;
        rec.loss_mean_se = a.se;
        rec.loss_median = b.mean;
        rec.loss_median_se = b.se;
        rec.sample_loss = s.mean;
        rec.sample_loss_se = s.se;
        rec.complement_mass = c0.mean;
        rec.complement_mass_se = c0.se;
        for (std::size_t m = 0; m < cfg.M_sweep.size(); ++m) {
            const MeanSe cm = summarize(comp[m + 1]);
            rec.sweep.push_back({cfg.M_sweep[m], cm.mean, cm.se});
        }
        rec.truncation_bias = tail_energy(truth, rec.J_data);
        rec.truncation_flag = rec.truncation_bias > rec.eps_sq / 10.0;
        result.records.push_back(std::move(rec));
    }

    if (n_points >= 3) {
        std::vector<double> mean_losses;
        std::vector<double> median_losses;
        for (const auto& rec : result.records) {
            mean_losses.push_back(rec.loss_mean);
            median_losses.push_back(rec.loss_median);
        }
        result.fit_mean = fit_rate_slope(cfg.n_grid, mean_losses);
        result.fit_median = fit_rate_slope(cfg.n_grid, median_losses);
        result.pass = std::abs(result.fit_mean.slope + result.exponent_theoretical) <= cfg.slope_tolerance;
    }
    return result;
}

ContractionCheck check_contraction(const RateExperimentResult& result, double threshold)
{
    ContractionCheck check;
    const auto& recs = result.records;
    if (recs.empty())
        return check;
    check.nonincreasing = true;
    for (std::size_t i = 1; i < recs.size(); ++i) {
        const double se = std::hypot(recs[i].complement_mass_se, recs[i - 1].complement_mass_se);
        if (recs[i].complement_mass > recs[i - 1].complement_mass + 2.0 * se)
            check.nonincreasing = false;
    }
    for (const auto& c : recs.back().sweep) {
        if (c.mass < check.final_min_mass) {
            check.final_min_mass = c.mass;
            check.final_best_M = c.M;
        }
    }
    check.pass = check.nonincreasing && check.final_min_mass < threshold;
    return check;
}

std::vector<PriorMassRow> run_prior_mass_experiment(const ExperimentConfig& cfg, std::int64_t n_mc)
{
    cfg.validate();
    const double alpha = cfg.resolved_alpha();
    const CoefficientTree truth = experiment_truth(cfg);

    std::vector<PriorMassRow> rows;
    for (std::int64_t n : cfg.n_grid) {
        PriorMassRow row;
        row.n = n;
        row.eps_sq = theoretical_rate(cfg.besov, n).eps_n_sq;
        row.J = projection_level(n, alpha);
        Prior prior = cfg.prior_kind == PriorKind::spike_slab
                          ? Prior{SpikeSlabPrior{alpha, cfg.gamma, cfg.c_a, cfg.c_pi, row.J}}
                          : Prior{SievePrior{cfg.mu, alpha, cfg.m_max.value_or(observation_resolution(n))}};
        row.estimate = prior_mass_probe(prior, truth, row.eps_sq, row.J, n_mc,
                                        derive_seed(cfg.seed, StreamTag::probe, n));
        row.ratio = -row.estimate.log_mass / (static_cast<double>(n) * row.eps_sq);
        rows.push_back(row);
    }
    return rows;
}

PriorMassSummary summarize_prior_mass(const std::vector<PriorMassRow>& rows, double max_spread)
{
    PriorMassSummary out;
    if (rows.empty())
        return out;
    out.min_ratio = std::numeric_limits<double>::infinity();
    out.max_ratio = -std::numeric_limits<double>::infinity();
    out.min_ess = std::numeric_limits<double>::infinity();
    bool finite = true;
    for (const auto& row : rows) {
        if (!(row.ratio > 0.0) || !std::isfinite(row.ratio))
            finite = false;
        out.min_ratio = std::min(out.min_ratio, row.ratio);
        out.max_ratio = std::max(out.max_ratio, row.ratio);
        out.min_ess = std::min(out.min_ess, row.estimate.ess);
    }
    out.spread = finite ? out.max_ratio / out.min_ratio : std::numeric_limits<double>::infinity();
    out.pass = finite && out.spread < max_spread && out.min_ess >= kMinEffectiveSampleSize;
    return out;
}

} // namespace bwshrink
