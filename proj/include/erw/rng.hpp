#pragma once

#include <bit>
#include <cstdint>

// Counter-based random streams. Every draw is a pure function of
// (seed, domain, key words, counter), so any worker can materialize any
// piece of randomness in any order and replays are bit-identical.

namespace erw {

// SplitMix64 finalizer; full 64-bit avalanche.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Stream domains keep unrelated consumers of the same seed decorrelated.
enum class StreamDomain : std::uint64_t {
    site_component = 0x01,
    coin_toss      = 0x02,
    migration      = 0x03,
    offspring      = 0x04,
    replicate      = 0x05,
    tree_growth    = 0x06,
    resample       = 0x07,
};

constexpr std::uint64_t keyed_u64(std::uint64_t seed, std::uint64_t a,
                                  std::uint64_t b = 0, std::uint64_t c = 0) noexcept {
    std::uint64_t h = mix64(seed + 0x9e3779b97f4a7c15ULL);
    h = mix64(h + a + 0xd1b54a32d192ed03ULL);
    h = mix64(h + b + 0x8cb92ba72f3d8dd7ULL);
    h = mix64(h + c + 0xaef17502108ef2d9ULL);
    return h;
}

constexpr std::uint64_t keyed_u64(std::uint64_t seed, StreamDomain d,
                                  std::uint64_t a = 0, std::uint64_t b = 0) noexcept {
    return keyed_u64(seed, static_cast<std::uint64_t>(d), a, b);
}

// Uniform double in [0, 1) from the top 53 bits.
constexpr double to_unit(std::uint64_t x) noexcept {
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

// Derives the per-replicate seed from a master seed; replicates are
// independent streams and can be computed in isolation.
constexpr std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t replicate) noexcept {
    return keyed_u64(master, StreamDomain::replicate, replicate);
}

// SplitMix64 sequence rooted at a key; satisfies UniformRandomBitGenerator.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t key) noexcept : state_(key) {}
    CounterRng(std::uint64_t seed, StreamDomain d, std::uint64_t a = 0, std::uint64_t b = 0) noexcept
        : state_(keyed_u64(seed, d, a, b)) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~0ULL; }

    result_type operator()() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

    double uniform() noexcept { return to_unit((*this)()); }

private:
    std::uint64_t state_;
};

// Geom(1/2) on {0,1,2,...}: pmf(k) = 2^-(k+1). The index of the first set
// bit of a uniform word has exactly this law.
inline std::int64_t geom_half(CounterRng& rng) noexcept {
    std::int64_t base = 0;
    for (;;) {
        const std::uint64_t bits = rng();
        if (bits != 0) return base + std::countr_zero(bits);
        base += 64;
    }
}

} // namespace erw
