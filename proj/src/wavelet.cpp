#include "bwshrink/wavelet.hpp"

#include "bwshrink/text.hpp"

#include <array>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

namespace bwshrink {

WaveletFilter::WaveletFilter(WaveletName name, std::vector<double> lowpass)
    : name_(name), lowpass_(std::move(lowpass))
{
    const std::size_t L = lowpass_.size();
    highpass_.resize(L);
    for (std::size_t k = 0; k < L; ++k)
        highpass_[k] = (k % 2 == 0 ? 1.0 : -1.0) * lowpass_[L - 1 - k];
}

WaveletFilter WaveletFilter::haar()
{
    const double h = 1.0 / std::numbers::sqrt2;
    return WaveletFilter(WaveletName::haar, {h, h});
}

WaveletFilter WaveletFilter::daubechies4()
{
    const double r3 = std::numbers::sqrt3;
    const double d = 4.0 * std::numbers::sqrt2;
    return WaveletFilter(WaveletName::daubechies4, {(1 + r3) / d, (3 + r3) / d, (3 - r3) / d, (1 - r3) / d});
}

WaveletFilter WaveletFilter::by_name(const std::string& name)
{
    if (name == "haar")
        return haar();
    if (name == "d4" || name == "db2" || name == "daubechies4")
        return daubechies4();
    throw std::invalid_argument("unknown wavelet '" + name + "' (expected haar or d4)");
}

std::string WaveletFilter::label() const
{
    return name_ == WaveletName::haar ? "haar" : "d4";
}

bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

SampledSignal::SampledSignal(std::vector<double> values) : values_(std::move(values))
{
    if (!is_power_of_two(values_.size()))
        throw std::invalid_argument("SampledSignal: length " + std::to_string(values_.size()) +
                                    " is not a power of two");
}

namespace {

int log2_exact(std::size_t n)
{
    int j = 0;
    while ((std::size_t{1} << j) < n)
        ++j;
    return j;
}

// One analysis step on the first `len` entries of `work`: approximation goes
// to approx[0..len/2), details to detail[0..len/2).
void analysis_step(std::span<const double> in, std::span<double> approx, std::span<double> detail,
                   const WaveletFilter& f)
{
    const std::size_t len = in.size();
    const auto h = f.lowpass();
    const auto g = f.highpass();
    for (std::size_t k = 0; k < len / 2; ++k) {
        double a = 0.0;
        double d = 0.0;
        for (std::size_t m = 0; m < h.size(); ++m) {
            const double x = in[(2 * k + m) % len];
            a += h[m] * x;
            d += g[m] * x;
        }
        approx[k] = a;
        detail[k] = d;
    }
}

void synthesis_step(std::span<const double> approx, std::span<const double> detail, std::span<double> out,
                    const WaveletFilter& f)
{
    const std::size_t len = out.size();
    const auto h = f.lowpass();
    const auto g = f.highpass();
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t k = 0; k < len / 2; ++k) {
        for (std::size_t m = 0; m < h.size(); ++m)
            out[(2 * k + m) % len] += h[m] * approx[k] + g[m] * detail[k];
    }
}

} // namespace

CoefficientTree forward_dwt(const SampledSignal& x, const WaveletFilter& f)
{
    const std::size_t n = x.length();
    if (n < 2)
        throw std::invalid_argument("forward_dwt: length must be >= 2");
    const int j_max = log2_exact(n) - 1;

    CoefficientTree out(j_max);
    std::vector<double> current(x.values().begin(), x.values().end());
    std::vector<double> approx(n / 2);
    for (int j = j_max; j >= 0; --j) {
        const std::size_t len = std::size_t{2} << j;
        analysis_step(std::span<const double>(current).first(len), std::span<double>(approx).first(len / 2),
                      out.level(j), f);
        std::copy_n(approx.begin(), len / 2, current.begin());
    }
    out.set_alpha00(current[0]);
    return out;
}

SampledSignal inverse_dwt(const CoefficientTree& t, const WaveletFilter& f)
{
    if (!t.is_finite())
        throw std::invalid_argument("inverse_dwt: tree has non-finite entries");
    const std::size_t n = std::size_t{2} << t.j_max();
    std::vector<double> current(n, 0.0);
    std::vector<double> next(n, 0.0);
    current[0] = t.alpha00();
    for (int j = 0; j <= t.j_max(); ++j) {
        const std::size_t len = std::size_t{2} << j;
        synthesis_step(std::span<const double>(current).first(len / 2), t.level(j),
                       std::span<double>(next).first(len), f);
        std::copy_n(next.begin(), len, current.begin());
    }
    return SampledSignal(std::move(current));
}

namespace {

constexpr std::array<double, 11> kBlockPositions = {0.1, 0.13, 0.15, 0.23, 0.25, 0.40, 0.44, 0.65, 0.76, 0.78, 0.81};
constexpr std::array<double, 11> kBlockHeights = {4, -5, 3, -4, 5, -4.2, 2.1, 4.3, -3.1, 2.1, -4.2};
constexpr std::array<double, 11> kBumpHeights = {4, 5, 3, 4, 5, 4.2, 2.1, 4.3, 3.1, 5.1, 4.2};
constexpr std::array<double, 11> kBumpWidths = {0.005, 0.005, 0.006, 0.01, 0.01, 0.03,
                                                0.01,  0.01,  0.005, 0.008, 0.005};

double sgn(double x) { return (x > 0) - (x < 0); }

// Steps are right-continuous so the sampled signal is exactly piecewise constant.
double blocks(double t)
{
    double v = 0.0;
    for (std::size_t i = 0; i < kBlockPositions.size(); ++i)
        if (t >= kBlockPositions[i])
            v += kBlockHeights[i];
    return v;
}

double bumps(double t)
{
    double v = 0.0;
    for (std::size_t i = 0; i < kBlockPositions.size(); ++i)
        v += kBumpHeights[i] * std::pow(1.0 + std::abs(t - kBlockPositions[i]) / kBumpWidths[i], -4.0);
    return v;
}

double doppler(double t)
{
    constexpr double eps = 0.05;
    return std::sqrt(t * (1 - t)) * std::sin(2 * std::numbers::pi * (1 + eps) / (t + eps));
}

double heavisine(double t)
{
    return 4 * std::sin(4 * std::numbers::pi * t) - sgn(t - 0.3) - sgn(0.72 - t);
}

} // namespace

std::span<const double> blocks_breakpoints() { return kBlockPositions; }

SampledSignal standard_signal(const std::string& name, std::size_t length)
{
    if (!is_power_of_two(length))
        throw std::invalid_argument("standard_signal: length must be a power of two");
    double (*fn)(double) = nullptr;
    if (name == "blocks")
        fn = blocks;
    else if (name == "bumps")
        fn = bumps;
    else if (name == "doppler")
        fn = doppler;
    else if (name == "heavisine")
        fn = heavisine;
    else
        throw std::invalid_argument("unknown test signal '" + name + "'");

    std::vector<double> values(length);
    for (std::size_t i = 0; i < length; ++i)
        values[i] = fn(static_cast<double>(i) / static_cast<double>(length));
    return SampledSignal(std::move(values));
}

void write_signal(std::ostream& os, const SampledSignal& x)
{
    for (double v : x.values())
        os << format_double(v) << '\n';
}

SampledSignal read_signal(std::istream& is)
{
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        auto tok = trim(line);
        if (tok.empty() || tok.front() == '#')
            continue;
        auto v = parse_double(tok);
        if (!v || !std::isfinite(*v))
            throw std::runtime_error("signal file, line " + std::to_string(line_no) + ": invalid value '" +
                                     std::string(tok) + "'");
        values.push_back(*v);
    }
    return SampledSignal(std::move(values));
}

} // namespace bwshrink
