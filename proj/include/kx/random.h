#pragma once

// Keyed, platform-independent pseudo-random streams. Each draw is a pure
// function of (seed, keys...), so results do not depend on iteration order
// or thread scheduling.

#include <cstdint>
#include <string_view>

namespace kx::random {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

class KeyedStream {
public:
    explicit constexpr KeyedStream(std::uint64_t seed) noexcept : state_(splitmix64(seed)) {}

    constexpr KeyedStream& key(std::string_view s) noexcept {
        state_ = splitmix64(state_ ^ fnv1a(s));
        return *this;
    }
    constexpr KeyedStream& key(std::uint64_t v) noexcept {
        state_ = splitmix64(state_ ^ splitmix64(v + 0x632BE59BD9B4E019ULL));
        return *this;
    }

    constexpr std::uint64_t next_u64() noexcept {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    constexpr double next_unit() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in [0, bound); bound > 0.
    constexpr std::uint64_t next_below(std::uint64_t bound) noexcept {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
        std::uint64_t v = next_u64();
        while (v >= limit) {
            v = next_u64();
        }
        return v % bound;
    }

    constexpr bool bernoulli(double p) noexcept {
        if (p <= 0.0) {
            return false;
        }
        if (p >= 1.0) {
            return true;
        }
        return next_unit() < p;
    }

private:
    std::uint64_t state_;
};

}  // namespace kx::random
