#include "bwshrink/besov.hpp"

#include "bwshrink/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace bwshrink {

std::string BesovIndex::validate(double s, double p, double q, double radius)
{
    std::ostringstream msg;
    if (std::isnan(p) || p < 1.0)
        msg << "p must satisfy 1 <= p <= inf (got " << p << ")";
    else if (std::isnan(q) || q < 1.0)
        msg << "q must satisfy 1 <= q <= inf (got " << q << ")";
    else if (!(radius > 0.0) || !std::isfinite(radius))
        msg << "B must be a positive finite radius (got " << radius << ")";
    else if (!std::isfinite(s) || !(s > std::max(0.0, 1.0 / p - 0.5)))
        msg << "s must satisfy s > max(0, 1/p - 1/2) = " << std::max(0.0, 1.0 / p - 0.5) << " (got " << s
            << ")";
    return msg.str();
}

BesovIndex::BesovIndex(double s, double p, double q, double radius) : s_(s), p_(p), q_(q), radius_(radius)
{
    if (auto err = validate(s, p, q, radius); !err.empty())
        throw std::invalid_argument("BesovIndex: " + err);
}

double BesovIndex::level_exponent() const noexcept { return s_ + 0.5 - 1.0 / p_; }

double lp_norm(std::span<const double> x, double p)
{
    double peak = 0.0;
    for (double v : x)
        peak = std::max(peak, std::abs(v));
    if (peak == 0.0 || std::isinf(p))
        return peak;
    double sum = 0.0;
    if (p == 1.0) {
        for (double v : x)
            sum += std::abs(v);
        return sum;
    }
    if (p == 2.0) {
        for (double v : x) {
            const double r = v / peak;
            sum += r * r;
        }
        return peak * std::sqrt(sum);
    }
    for (double v : x)
        sum += std::pow(std::abs(v) / peak, p);
    return peak * std::pow(sum, 1.0 / p);
}

namespace {

// l_q aggregate of nonnegative terms, max-scaled.
double lq_aggregate(const std::vector<double>& terms, double q)
{
    double peak = 0.0;
    for (double v : terms)
        peak = std::max(peak, v);
    if (peak == 0.0 || std::isinf(q))
        return peak;
    double sum = 0.0;
    for (double v : terms)
        sum += std::pow(v / peak, q);
    return peak * std::pow(sum, 1.0 / q);
}

} // namespace

double besov_detail_norm(const CoefficientTree& t, const BesovIndex& idx, int J)
{
    const int top = std::min(J, t.j_max());
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(std::max(top + 1, 0)));
    const double e = idx.level_exponent();
    for (int j = 0; j <= top; ++j)
        terms.push_back(std::exp2(j * e) * lp_norm(t.level(j), idx.p()));
    return lq_aggregate(terms, idx.q());
}

double besov_norm(const CoefficientTree& t, const BesovIndex& idx)
{
    return std::abs(t.alpha00()) + besov_detail_norm(t, idx, t.j_max());
}

bool in_ball(const CoefficientTree& t, const BesovIndex& idx) { return besov_norm(t, idx) < idx.radius(); }

double tail_energy(const CoefficientTree& t, int J)
{
    double sum = 0.0;
    for (int j = std::max(J + 1, 0); j <= t.j_max(); ++j)
        for (double v : t.level(j))
            sum += v * v;
    return sum;
}

double fitted_tail_constant(const CoefficientTree& t, const BesovIndex& idx)
{
    const double s_prime = idx.p() >= 2.0 ? idx.s() : idx.level_exponent();
    // Level energies, accumulated from the top down.
    double tail = 0.0;
    double constant = 0.0;
    for (int J = t.j_max(); J >= 0; --J) {
        constant = std::max(constant, tail * std::exp2(2.0 * J * s_prime));
        for (double v : t.level(J))
            tail += v * v;
    }
    return constant;
}

double embedding_chain_bound(const CoefficientTree& t, const BesovIndex& idx, int J)
{
    const int top = std::min(J, t.j_max());
    double energy = 0.0;
    for (int j = 0; j <= top; ++j)
        for (double v : t.level(j))
            energy += v * v;
    const double weight_exponent = idx.p() >= 2.0 ? idx.level_exponent() : idx.s();
    const double count_exponent = std::max(1.0 / idx.q() - 0.5, 0.0);
    const double levels = static_cast<double>(std::max(J, 0) + 1);
    return std::exp2(std::max(J, 0) * weight_exponent) * std::pow(levels, count_exponent) * std::sqrt(energy);
}

TruthKind parse_truth_kind(const std::string& name)
{
    if (name == "level-uniform")
        return TruthKind::level_uniform;
    if (name == "level-sparse")
        return TruthKind::level_sparse;
    if (name == "dwt-of-signal")
        return TruthKind::dwt_of_signal;
    throw std::invalid_argument("unknown truth kind '" + name +
                                "' (expected level-uniform, level-sparse or dwt-of-signal)");
}

std::string to_string(TruthKind kind)
{
    switch (kind) {
    case TruthKind::level_uniform:
        return "level-uniform";
    case TruthKind::level_sparse:
        return "level-sparse";
    case TruthKind::dwt_of_signal:
        return "dwt-of-signal";
    }
    return "unknown";
}

namespace {

CoefficientTree truth_shape(const TruthSpec& spec, Seed seed)
{
    const BesovIndex& idx = spec.besov;
    const double e = idx.level_exponent();
    const double inv_p = 1.0 / idx.p();

    switch (spec.kind) {
    case TruthKind::level_uniform: {
        CoefficientTree t(spec.j_max);
        for (int j = 0; j <= spec.j_max; ++j) {
            const double value = std::exp2(-j * (e + inv_p + spec.decay));
            for (double& v : t.level(j))
                v = value;
        }
        return t;
    }
    case TruthKind::level_sparse: {
        CoefficientTree t(spec.j_max);
        const Seed stream = derive_seed(seed, StreamTag::truth);
        for (int j = 0; j <= spec.j_max; ++j) {
            SplitMix64 rng = coefficient_stream(stream, j, 0);
            const auto width = static_cast<std::uint64_t>(level_width(j));
            const auto k = static_cast<std::size_t>(rng() % width);
            t.level(j)[k] = std::exp2(-j * (e + spec.decay));
        }
        return t;
    }
    case TruthKind::dwt_of_signal: {
        const auto signal = standard_signal(spec.signal, std::size_t{2} << spec.j_max);
        CoefficientTree t = forward_dwt(signal, WaveletFilter::by_name(spec.wavelet));
        t.set_alpha00(0.0);
        return t;
    }
    }
    throw std::logic_error("unreachable truth kind");
}

} // namespace

CoefficientTree make_truth(const TruthSpec& spec, Seed seed)
{
    if (!(spec.margin > 0.0 && spec.margin < 1.0))
        throw std::invalid_argument("make_truth: margin must lie in (0, 1)");
    if (spec.j_max < 0)
        throw std::invalid_argument("make_truth: J_max must be >= 0");
    if (!(spec.decay >= 0.0) || !std::isfinite(spec.decay))
        throw std::invalid_argument("make_truth: decay must be a finite nonnegative number");

    const double radius = spec.besov.radius();
    const double target = (1.0 - spec.margin) * radius;
    const double detail_target = target - std::abs(spec.alpha00);
    if (!(detail_target > 0.0))
        throw std::invalid_argument("make_truth: target norm (1 - margin) B is not reachable with |alpha00| = " +
                                    std::to_string(std::abs(spec.alpha00)));

    CoefficientTree shape = truth_shape(spec, seed);
    if (besov_detail_norm(shape, spec.besov, shape.j_max()) == 0.0)
        throw std::invalid_argument("make_truth: truth shape has no detail energy; target norm unreachable");

    auto norm_at = [&](double c) {
        CoefficientTree t = c * shape;
        t.set_alpha00(spec.alpha00);
        return besov_norm(t, spec.besov);
    };

    double lo = 0.0;
    double hi = 1.0;
    while (norm_at(hi) < target)
        hi *= 2.0;
    const double tol = 1e-9 * radius;
    double c = hi;
    for (int iter = 0; iter < 200; ++iter) {
        c = 0.5 * (lo + hi);
        const double value = norm_at(c);
        if (std::abs(value - target) <= 0.25 * tol || hi - lo <= 1e-300)
            break;
        (value < target ? lo : hi) = c;
    }

    CoefficientTree truth = c * shape;
    truth.set_alpha00(spec.alpha00);
    return truth;
}

} // namespace bwshrink
