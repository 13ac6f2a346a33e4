#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string_view>

namespace apportion {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Stable seed derivation: child = mix(parent, label). Part of the
/// reproducibility contract; changing it changes every seeded output.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t label) {
    return mix64(mix64(parent ^ 0x243F6A8885A308D3ULL) + mix64(label + 0x9E3779B97F4A7C15ULL));
}

/// FNV-1a over the bytes of `label`, then mixed with the parent.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::string_view label) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return derive_seed(parent, h);
}

/// Digest of an integer sequence, used for per-profile seeds.
std::uint64_t digest(std::span<const std::int64_t> values);

/// Counter-based generator: output i is a pure function of (key, i), so a
/// stream can be split, saved and resumed from just the pair.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t key, std::uint64_t counter = 0) : key_(key), counter_(counter) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return mix64(key_ + (++counter_) * 0x9E3779B97F4A7C15ULL); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Unbiased integer in [0, bound). bound must be positive.
    std::uint64_t below(std::uint64_t bound);

    CounterRng split(std::uint64_t label) const { return CounterRng(derive_seed(key_, label)); }
    CounterRng split(std::string_view label) const { return CounterRng(derive_seed(key_, label)); }

    std::uint64_t key() const { return key_; }
    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_;
};

}  // namespace apportion
