#include "bwshrink/probes.hpp"

#include "bwshrink/contraction.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace bwshrink {

namespace {

constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;
constexpr int kMaxIter = 100000;

// log of the series part of P(a, x):  log[ sum_n x^n / (a (a+1) ... (a+n)) ].
double log_series(double x, double a)
{
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int n = 0; n < kMaxIter; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * kEps)
            break;
    }
    return std::log(sum);
}

// Modified Lentz evaluation of the continued fraction for Q(a, x) e^x x^{-a} Gamma(a).
double continued_fraction(double x, double a)
{
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny)
            d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny)
            c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps)
            break;
    }
    return h;
}

void check_args(double b, double a)
{
    if (!(a > 0.0) || !std::isfinite(a))
        throw std::invalid_argument("incomplete gamma: a must be a positive finite number");
    if (!(b >= 0.0) || std::isnan(b))
        throw std::invalid_argument("incomplete gamma: b must be >= 0");
}

} // namespace

double log_lower_incomplete_gamma_regularized(double b, double a)
{
    check_args(b, a);
    if (b == 0.0)
        return -std::numeric_limits<double>::infinity();
    if (std::isinf(b))
        return 0.0;
    const double log_prefactor = a * std::log(b) - b - std::lgamma(a);
    if (b < a + 1.0)
        return log_prefactor + log_series(b, a);
    const double q = std::exp(log_prefactor) * continued_fraction(b, a);
    return std::log1p(-q);
}

double lower_incomplete_gamma_regularized(double b, double a)
{
    check_args(b, a);
    if (b == 0.0)
        return 0.0;
    if (std::isinf(b))
        return 1.0;
    const double log_prefactor = a * std::log(b) - b - std::lgamma(a);
    if (b < a + 1.0)
        return std::exp(log_prefactor + log_series(b, a));
    return 1.0 - std::exp(log_prefactor) * continued_fraction(b, a);
}

double gamma_tail_bound_ratio(double b, double a)
{
    if (!(b > 0.0) || !std::isfinite(b))
        throw std::invalid_argument("gamma_tail_bound_ratio: b must be > 0");
    if (!(a >= 0.5) || !std::isfinite(a))
        throw std::invalid_argument("gamma_tail_bound_ratio: a must be >= 1/2");
    const double log_bound = a - b + a * std::log(b) - a * std::log(a) - 0.5 * std::log(a);
    return std::exp(log_lower_incomplete_gamma_regularized(b, a) - log_bound);
}

double prior_tail_expectation(const SpikeSlabPrior& prior, int J)
{
    prior.validate();
    // c_pi <= 1 makes pi_j = c_pi 2^{-gamma j} at every level, so the summand
    // is c_pi c_a 2^{j (1 - gamma - alpha)}: a geometric series with ratio < 1.
    const int first = std::max(J + 1, 0);
    const double r = 1.0 - prior.gamma - prior.alpha;
    return prior.c_pi * prior.c_a * std::exp2(first * r) / (1.0 - std::exp2(r));
}

std::vector<TailReportRow> tail_markov_report(const SpikeSlabPrior& prior, const BesovIndex& idx,
                                              const std::vector<std::int64_t>& n_grid,
                                              const CoefficientTree* truth)
{
    if (!(prior.alpha > 1.0))
        throw std::invalid_argument("tail_markov_report: alpha must be > 1 (the prior tail sum diverges)");
    std::vector<TailReportRow> rows;
    rows.reserve(n_grid.size());
    for (std::int64_t n : n_grid) {
        TailReportRow row;
        row.n = n;
        row.J = projection_level(n, prior.alpha);
        row.eps_sq = theoretical_rate(idx, n).eps_n_sq;
        row.prior_tail = prior_tail_expectation(prior, row.J);
        row.markov_ratio = 8.0 * row.prior_tail / row.eps_sq;
        if (truth != nullptr) {
            row.truth_tail = tail_energy(*truth, row.J);
            row.truth_tail_within = row.truth_tail <= row.eps_sq / 8.0;
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace bwshrink
