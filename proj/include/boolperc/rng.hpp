#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace boolperc {

// All randomness is derived from a master seed by hashing a tuple of tags
// (replica index, interval index, site coordinates, stream purpose). A value
// drawn for a given tuple never depends on the order in which tuples are
// visited, which keeps results identical across worker counts and makes
// nested windows share the uniforms of their common sites.

/// SplitMix64 output finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed) noexcept { return seed; }

template <typename Tag, typename... Tags>
constexpr std::uint64_t derive_seed(std::uint64_t seed, Tag tag, Tags... rest) noexcept
{
    auto const t = static_cast<std::uint64_t>(tag);
    return derive_seed(mix64(seed ^ mix64(t + 0x632be59bd9b4e019ULL)), rest...);
}

/// Maps 64 random bits to a double in (0, 1] with 53 bits of resolution.
constexpr double to_unit_interval(std::uint64_t bits) noexcept
{
    return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

/// Stream purposes used as hash tags.
enum class StreamTag : std::uint64_t {
    occupancy = 0x6f63637570616e63ULL,
    radius = 0x7261646975730000ULL,
    schedule = 0x7363686564756c65ULL,
    coupling = 0x636f75706c696e67ULL,
    replica = 0x7265706c69636100ULL,
};

/// Uniforms attached to lattice sites: the value at a site depends only on
/// (seed, tag, coordinates).
class SiteUniforms {
public:
    constexpr SiteUniforms(std::uint64_t seed, StreamTag tag) noexcept : key_(derive_seed(seed, tag)) {}

    template <typename Coords>
    std::uint64_t bits(const Coords& x) const noexcept
    {
        std::uint64_t h = key_;
        for (auto c : x) {
            h = mix64(h ^ static_cast<std::uint64_t>(c));
        }
        return h;
    }

    template <typename Coords>
    double operator()(const Coords& x) const noexcept
    {
        return to_unit_interval(bits(x));
    }

private:
    std::uint64_t key_;
};

/// Sequential SplitMix64 stream. Satisfies UniformRandomBitGenerator.
class Stream {
public:
    using result_type = std::uint64_t;

    explicit constexpr Stream(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept
    {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform on (0, 1].
    double uniform() noexcept { return to_unit_interval((*this)()); }

    /// Exponential with the given rate, by inversion of a (0,1] uniform.
    double exponential(double rate) noexcept { return -std::log(uniform()) / rate; }

private:
    std::uint64_t state_;
};

}  // namespace boolperc
