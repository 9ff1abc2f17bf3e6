#ifndef BWSHRINK_WAVELET_HPP
#define BWSHRINK_WAVELET_HPP

#include "bwshrink/coefficient_tree.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace bwshrink {

enum class WaveletName { haar, daubechies4 };

/// Orthonormal analysis filter pair. The highpass is the quadrature mirror
/// g[k] = (-1)^k h[L-1-k].
class WaveletFilter {
public:
    static WaveletFilter haar();
    static WaveletFilter daubechies4();
    /// Accepts "haar", "d4", "db2" and "daubechies4".
    static WaveletFilter by_name(const std::string& name);

    WaveletName name() const noexcept { return name_; }
    std::string label() const;
    std::span<const double> lowpass() const noexcept { return lowpass_; }
    std::span<const double> highpass() const noexcept { return highpass_; }

private:
    WaveletFilter(WaveletName name, std::vector<double> lowpass);

    WaveletName name_;
    std::vector<double> lowpass_;
    std::vector<double> highpass_;
};

/// Samples f(i / N), i = 0..N-1, with N a power of two.
class SampledSignal {
public:
    explicit SampledSignal(std::vector<double> values);

    std::size_t length() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    const std::vector<double>& vector() const noexcept { return values_; }

    friend bool operator==(const SampledSignal&, const SampledSignal&) = default;

private:
    std::vector<double> values_;
};

bool is_power_of_two(std::size_t n) noexcept;

/// Full-depth periodized pyramid down to a single scaling coefficient.
/// The result has j_max = log2(length) - 1. Throws for lengths that are not
/// a power of two >= 2.
CoefficientTree forward_dwt(const SampledSignal& x, const WaveletFilter& f);

/// Synthesis counterpart of forward_dwt; returns 2^(j_max+1) samples.
SampledSignal inverse_dwt(const CoefficientTree& t, const WaveletFilter& f);

/// Donoho-Johnstone test functions evaluated at i / length.
SampledSignal standard_signal(const std::string& name, std::size_t length);

/// Breakpoints of the blocks signal on [0, 1].
std::span<const double> blocks_breakpoints();

// One value per line.
void write_signal(std::ostream& os, const SampledSignal& x);
SampledSignal read_signal(std::istream& is);

} // namespace bwshrink

#endif // BWSHRINK_WAVELET_HPP
