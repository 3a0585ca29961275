#pragma once

#include <cstdint>
#include <cstddef>
#include <limits>
#include <string_view>
#include <vector>

namespace genaug {

// splitmix64 increment; all seed derivation in this project goes through
// mix64/Rng so corpora are reproducible across platforms and thread counts.
inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += kGolden);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Per-item seed: hash of (seed, index). Item i of a generated corpus is
// sampled from Rng(mix64(seed, i)), so parallel and serial runs agree.
inline std::uint64_t mix64(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t state = seed ^ (kGolden * (index + 1));
    return splitmix64(state);
}

// FNV-1a, used for cache keys and per-cell seed streams keyed by names.
inline std::uint64_t hash_str64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

// Deterministic RNG. Not std::mt19937 + std::*_distribution because the
// standard does not pin distribution outputs across implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return splitmix64(state_); }

    // uniform in [0, 1), 53-bit mantissa
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform in [0, n), rejection sampling (no modulo bias)
    std::uint64_t bounded(std::uint64_t n) {
        const std::uint64_t threshold = (-n) % n;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(bounded(i));
            using std::swap;
            swap(v[i - 1], v[j]);
        }
    }

    // k distinct indices drawn uniformly from [0, n), in draw order
    std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k) {
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        if (k > n) k = n;
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(bounded(n - i));
            std::swap(idx[i], idx[j]);
        }
        idx.resize(k);
        return idx;
    }

private:
    std::uint64_t state_;
};

}  // namespace genaug
