#ifndef BWSHRINK_RNG_HPP
#define BWSHRINK_RNG_HPP

#include <cstdint>
#include <limits>
#include <random>

namespace bwshrink {

using Seed = std::uint64_t;

// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Derives a child seed from a parent seed and a list of integer tags.
// Streams keyed this way are independent of the order in which they are
// consumed, which keeps parallel runs bit-identical to serial ones.
template <typename... Tags>
constexpr Seed derive_seed(Seed parent, Tags... tags) noexcept
{
    Seed s = mix64(parent + 0x9e3779b97f4a7c15ULL);
    ((s = mix64(s ^ mix64(static_cast<std::uint64_t>(tags) + 0x632be59bd9b4e019ULL))), ...);
    return s;
}

// Stream tags used across the library so distinct consumers never share a stream.
enum class StreamTag : std::uint64_t {
    observation = 0x6f6273,
    truth = 0x747275,
    prior_draw = 0x707269,
    posterior_draw = 0x706f73,
    probe = 0x707262,
    replicate = 0x726570,
};

// SplitMix64 generator. Satisfies UniformRandomBitGenerator so it can feed
// the standard distributions.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit constexpr SplitMix64(Seed seed) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept
    {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    double normal() { return std::normal_distribution<double>{}(*this); }

private:
    std::uint64_t state_;
};

// Generator for the (j, k) coefficient of a tree under a given seed.
inline SplitMix64 coefficient_stream(Seed seed, int j, std::int64_t k) noexcept
{
    return SplitMix64(derive_seed(seed, j, k));
}

} // namespace bwshrink

#endif // BWSHRINK_RNG_HPP
