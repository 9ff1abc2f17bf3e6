#include "bwshrink/checks.hpp"

#include "bwshrink/besov.hpp"
#include "bwshrink/contraction.hpp"
#include "bwshrink/posterior.hpp"
#include "bwshrink/probes.hpp"
#include "bwshrink/text.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

namespace bwshrink {

std::vector<double> gamma_check_a_values() { return {0.5, 1.0, 2.0, 5.0, 10.0, 50.0, 100.0}; }

std::vector<double> gamma_check_b_values()
{
    constexpr int count = 400;
    const double lo = std::log(0.1);
    const double hi = std::log(50.0);
    std::vector<double> b(count);
    for (int i = 0; i < count; ++i)
        b[i] = std::exp(lo + (hi - lo) * i / (count - 1));
    return b;
}

double min_gamma_tail_ratio()
{
    double lowest = std::numeric_limits<double>::infinity();
    for (double a : gamma_check_a_values())
        for (double b : gamma_check_b_values()) {
            const double r = gamma_tail_bound_ratio(b, a);
            if (!std::isfinite(r) || !(r > 0.0))
                return std::numeric_limits<double>::quiet_NaN();
            lowest = std::min(lowest, r);
        }
    return lowest;
}

namespace {

BesovIndex random_index(SplitMix64& rng)
{
    static const double ps[] = {1.0, 1.5, 2.0, 3.0, kInfinity};
    static const double qs[] = {1.0, 1.5, 2.0, 4.0, kInfinity};
    const double p = ps[rng() % 5];
    const double q = qs[rng() % 5];
    const double s = std::max(0.0, 1.0 / p - 0.5) + 0.05 + 2.0 * rng.uniform();
    return BesovIndex(s, p, q, 1.0);
}

CoefficientTree random_tree(SplitMix64& rng, int j_max)
{
    CoefficientTree t(j_max, rng.normal());
    const double keep = 0.2 + 0.8 * rng.uniform();
    const double decay = 2.0 * rng.uniform();
    for (int j = 0; j <= j_max; ++j)
        for (double& v : t.level(j))
            v = rng.uniform() < keep ? rng.normal() * std::exp2(-decay * j) : 0.0;
    return t;
}

bool le(double lhs, double rhs, double slack) { return lhs <= rhs * (1.0 + slack) + slack * 1e-300; }

bool close(double a, double b, double slack) { return std::abs(a - b) <= slack * std::max(std::abs(a), std::abs(b)); }

std::string fmt(double v)
{
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

} // namespace

EmbeddingViolations besov_property_sweep(Seed seed, int trees, double slack)
{
    EmbeddingViolations out;
    for (int i = 0; i < trees; ++i) {
        SplitMix64 rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
        const BesovIndex idx = random_index(rng);
        const int j_max = static_cast<int>(rng() % 9);
        const CoefficientTree a = random_tree(rng, j_max);
        const CoefficientTree b = random_tree(rng, static_cast<int>(rng() % 9));
        const double c = 4.0 * rng.normal();
        ++out.trees;

        const double na = besov_norm(a, idx);
        if (!close(besov_norm(c * a, idx), std::abs(c) * na, slack))
            ++out.homogeneity;
        if (!le(besov_norm(a + b, idx), na + besov_norm(b, idx), slack))
            ++out.triangle;

        double prev = std::abs(a.alpha00());
        for (int J = 0; J <= j_max; ++J) {
            const double nj = besov_norm(truncate(a, J), idx);
            if (!le(prev, nj, slack))
                ++out.projection;
            prev = nj;
        }
        if (!le(prev, na, slack))
            ++out.projection;

        for (int j = 0; j <= j_max; ++j) {
            const double lp = lp_norm(a.level(j), idx.p());
            const double l2 = lp_norm(a.level(j), 2.0);
            if (idx.p() >= 2.0) {
                if (!le(lp, l2, slack))
                    ++out.level_l2;
            } else if (!le(lp, std::exp2(j * (1.0 / idx.p() - 0.5)) * l2, slack)) {
                ++out.level_scaled;
            }
        }

        const int J = static_cast<int>(rng() % static_cast<std::uint64_t>(j_max + 1));
        if (!le(besov_detail_norm(a, idx, J), embedding_chain_bound(a, idx, J), slack))
            ++out.chain;
    }
    return out;
}

int median_bound_violations(Seed seed, int count)
{
    int violations = 0;
    for (int i = 0; i < count; ++i) {
        SplitMix64 rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
        CoefficientPosterior cp;
        if (i % 2 == 0) {
            const double sigma_sq = std::exp(-10.0 * rng.uniform());
            const double a_sq = std::exp(6.0 * rng.normal());
            const double pi = rng.uniform();
            const double X = rng.normal() * std::sqrt(a_sq + sigma_sq) * (1.0 + 3.0 * rng.uniform());
            cp = coefficient_posterior(X, sigma_sq, pi, a_sq);
        } else {
            cp.omega = rng.uniform();
            cp.m = rng.normal() * std::exp(3.0 * rng.normal());
            cp.v = std::exp(4.0 * rng.normal());
        }
        const double med = posterior_median(cp);
        const double bound = 2.0 * std::sqrt(cp.omega * (cp.m * cp.m + cp.v));
        if (!(std::abs(med) <= bound))
            ++violations;
    }
    return violations;
}

std::vector<CheckRow> run_checks(Seed seed, int random_trees, int random_posteriors)
{
    std::vector<CheckRow> rows;

    const double gamma_min = min_gamma_tail_ratio();
    rows.push_back({"gamma tail bound ratio, min over grid", fmt(gamma_min), "> 0.2", gamma_min > 0.2});

    double closed_err = std::abs(lower_incomplete_gamma_regularized(std::log(2.0), 1.0) - 0.5);
    for (double b : gamma_check_b_values()) {
        closed_err = std::max(closed_err, std::abs(lower_incomplete_gamma_regularized(b, 1.0) - (1.0 - std::exp(-b))));
        closed_err = std::max(closed_err,
                              std::abs(lower_incomplete_gamma_regularized(b, 2.0) - (1.0 - std::exp(-b) * (1.0 + b))));
        closed_err = std::max(closed_err, std::abs(lower_incomplete_gamma_regularized(b, 3.0) -
                                                   (1.0 - std::exp(-b) * (1.0 + b + 0.5 * b * b))));
    }
    rows.push_back({"incomplete gamma closed forms, max abs error", fmt(closed_err), "<= 1e-12", closed_err <= 1e-12});

    // n = 2^{alpha k}: the floor in J is exact, so the prior tail drops at every grid point.
    SpikeSlabPrior prior{3.0, 0.5, 1.0, 1.0, 40};
    std::vector<std::int64_t> grid;
    for (int k = 3; k <= 10; ++k)
        grid.push_back(std::int64_t{1} << (3 * k));
    const auto tail = tail_markov_report(prior, BesovIndex(1.0, 2.0, 2.0, 1.0), grid);
    bool decreasing = true;
    for (std::size_t i = 1; i < tail.size(); ++i)
        decreasing = decreasing && tail[i].markov_ratio < tail[i - 1].markov_ratio;
    const double shrink = tail.back().markov_ratio / tail.front().markov_ratio;
    rows.push_back({"prior tail ratio 8E/eps^2 decreasing, last/first", fmt(shrink), "decreasing, < 0.1",
                    decreasing && shrink < 0.1});

    const EmbeddingViolations ev = besov_property_sweep(derive_seed(seed, 1), random_trees);
    rows.push_back({"besov homogeneity/triangle/projection violations",
                    std::to_string(ev.homogeneity + ev.triangle + ev.projection) + " / " + std::to_string(ev.trees),
                    "0", ev.homogeneity + ev.triangle + ev.projection == 0});
    rows.push_back({"level-norm embedding violations", std::to_string(ev.level_l2 + ev.level_scaled), "0",
                    ev.level_l2 + ev.level_scaled == 0});
    rows.push_back({"projected norm chain bound violations", std::to_string(ev.chain), "0", ev.chain == 0});

    const int median_bad = median_bound_violations(derive_seed(seed, 2), random_posteriors);
    rows.push_back({"median bound |med| <= 2 sqrt(E beta^2) violations",
                    std::to_string(median_bad) + " / " + std::to_string(random_posteriors), "0", median_bad == 0});

    double branch_gap = 0.0;
    for (double s : {0.25, 0.5, 1.0, 2.0, 5.0}) {
        const double above = theoretical_rate(BesovIndex(s, 2.0, 2.0), 1024).exponent;
        const double below = theoretical_rate(BesovIndex(s, 2.0 - 1e-9, 2.0), 1024).exponent;
        branch_gap = std::max(branch_gap, std::abs(above - below));
    }
    rows.push_back({"rate exponent branch gap at p = 2", fmt(branch_gap), "<= 1e-8", branch_gap <= 1e-8});

    bool tau_ok = true;
    double prev_ratio = kInfinity;
    for (double p : {1.0, 1.5, 2.0, 4.0}) {
        prev_ratio = kInfinity;
        const BesovIndex idx(1.0, p, 2.0);
        for (int e = 4; e <= 40; ++e) {
            const RateQuantities rq = theoretical_rate(idx, std::int64_t{1} << e);
            const double ratio = rq.tau_n / std::sqrt(rq.eps_n_sq);
            tau_ok = tau_ok && ratio < prev_ratio;
            prev_ratio = ratio;
        }
    }
    rows.push_back({"tau_n / eps_n decreasing in n", fmt(prev_ratio), "decreasing", tau_ok});
    return rows;
}

bool all_passed(const std::vector<CheckRow>& rows)
{
    return std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.pass; });
}

void print_check_table(std::ostream& os, const std::vector<CheckRow>& rows)
{
    std::size_t w_name = 5;
    std::size_t w_meas = 8;
    for (const auto& r : rows) {
        w_name = std::max(w_name, r.name.size());
        w_meas = std::max(w_meas, r.measured.size());
    }
    os << std::left << std::setw(static_cast<int>(w_name)) << "check" << "  " << std::setw(static_cast<int>(w_meas))
       << "measured" << "  " << std::setw(18) << "threshold" << "  result\n";
    for (const auto& r : rows)
        os << std::left << std::setw(static_cast<int>(w_name)) << r.name << "  " << std::setw(static_cast<int>(w_meas))
           << r.measured << "  " << std::setw(18) << r.threshold << "  " << (r.pass ? "PASS" : "FAIL") << '\n';
}

} // namespace bwshrink
