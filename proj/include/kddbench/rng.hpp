#pragma once

// Seedable, portable randomness. Everything that samples or shuffles in this
// project goes through these generators so results are bit-identical across
// platforms and runs. Algorithms: splitmix64 (Steele/Lea/Flood) for seeding
// and stream derivation, xoshiro256** (Blackman/Vigna) as the workhorse.

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace kdd {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Unbiased integer in [0, n). Lemire's multiply-with-rejection.
    std::uint64_t bounded(std::uint64_t n) {
        unsigned __int128 m = static_cast<unsigned __int128>(next()) * n;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (lo < threshold) {
                m = static_cast<unsigned __int128>(next()) * n;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    // Uniform double in [0, 1) with 53 bits.
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t state_[4];
};

// Derived substream seeds: independent per-index / per-label streams from one
// base seed, so work can be resequenced or parallelised without changing
// results.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
    std::uint64_t sm = base ^ (0x6a09e667f3bcc909ULL + tag * 0x9e3779b97f4a7c15ULL);
    return splitmix64(sm);
}

inline std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag) {
    return derive_seed(base, fnv1a64(tag));
}

// Fisher-Yates. Applied to spans so callers shuffle ordinals in place.
template <typename T>
void shuffle(std::span<T> values, Rng& rng) {
    for (std::size_t i = values.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.bounded(i));
        std::swap(values[i - 1], values[j]);
    }
}

// k distinct elements of `pool`, uniformly without replacement, in draw order.
// Partial Fisher-Yates over a scratch copy.
template <typename T>
std::vector<T> sample_without_replacement(std::span<const T> pool, std::size_t k, Rng& rng) {
    std::vector<T> scratch(pool.begin(), pool.end());
    if (k > scratch.size()) k = scratch.size();
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.bounded(scratch.size() - i));
        std::swap(scratch[i], scratch[j]);
    }
    scratch.resize(k);
    return scratch;
}

}  // namespace kdd
