#pragma once

// Reproducible random streams.
//
// Every episode and every Monte Carlo walk owns an Rng built from an
// RngState (seed, stream). The pair is mixed with SplitMix64 into a single
// 64-bit seed for std::mt19937_64, whose output sequence is fixed by the C++
// standard. Uniform and Gaussian transforms are implemented here rather than
// through <random> distributions, which are implementation-defined, so the
// same (seed, stream) yields the same draws with any conforming standard
// library. Generator version: "mt19937_64+splitmix64/v1".

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace ocucb {

inline constexpr std::string_view kGeneratorVersion = "mt19937_64+splitmix64/v1";

struct RngState {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    friend bool operator==(const RngState&, const RngState&) = default;
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Order-sensitive combination of two 64-bit words.
constexpr std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) noexcept
{
    return splitmix64(splitmix64(a) ^ (b + 0x632be59bd9b4e019ULL + (a << 6) + (a >> 2)));
}

/// FNV-1a, 64 bit.
constexpr std::uint64_t fnv1a64(std::string_view text) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : text) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

class Rng {
public:
    explicit Rng(RngState state)
        : state_(state)
        , engine_(hash_combine(state.seed, state.stream))
    {}

    const RngState& state() const noexcept { return state_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool coin() { return (engine_() >> 63) != 0; }

    /// Standard normal via the Marsaglia polar method; the second variate of
    /// each accepted pair is cached.
    double gaussian()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u = 0.0;
        double v = 0.0;
        double s = 0.0;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double scale = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * scale;
        has_spare_ = true;
        return u * scale;
    }

private:
    RngState state_;
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace ocucb
