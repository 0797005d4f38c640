#pragma once

// SplitMix64-based generators. The hash form (key, counter) -> word gives a
// counter-based stream: any draw can be recomputed without replaying the
// ones before it, so parallel fills reproduce serial results.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace iidtail {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for sub-stream `index` of `seed`.
inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept
{
    return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

/// Sequential stream over one key; draw n is splitmix64(key + n * gamma).
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key = 0, std::uint64_t counter = 0) noexcept
        : key_(splitmix64(key)), counter_(counter)
    {
    }

    std::uint64_t next() noexcept { return splitmix64(key_ + 0x9e3779b97f4a7c15ULL * counter_++); }

    /// Uniform on [0, n) by rejection; n >= 1.
    std::uint64_t below(std::uint64_t n) noexcept
    {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        for (;;) {
            const std::uint64_t v = next();
            if (v < limit) return v % n;
        }
    }

    std::int64_t between(std::int64_t lo, std::int64_t hi) noexcept
    {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    /// Uniform on (0, 1), never 0 or 1.
    double uniform() noexcept { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

    /// Standard normal by Box-Muller (one value per two uniforms, no caching
    /// so the stream position stays a pure function of the draw count).
    double normal() noexcept
    {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_;
};

} // namespace iidtail
