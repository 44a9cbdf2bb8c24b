#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>

namespace oql {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic RNG with independent substreams: (seed, stream) pairs give
// decorrelated engines, so parallel trials can each own a stream without
// coordinating. Bounded draws use rejection sampling rather than
// std::uniform_int_distribution so results are identical across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
        std::uint64_t s = seed;
        std::uint64_t mixed = splitmix64(s) + stream;
        eng_.seed(splitmix64(mixed));
    }

    std::uint64_t u64() { return eng_(); }

    // Uniform in [0, n), n >= 1.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("Rng::below: empty range");
        if ((n & (n - 1)) == 0) return eng_() & (n - 1);
        std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n) - 1;
        std::uint64_t v;
        do { v = eng_(); } while (v > limit);
        return v % n;
    }

    // Uniform in [lo, hi], inclusive; the full 64-bit span is allowed.
    std::uint64_t in_range(std::uint64_t lo, std::uint64_t hi) {
        if (lo > hi) throw std::invalid_argument("Rng::in_range: lo > hi");
        std::uint64_t span = hi - lo;
        if (span == ~std::uint64_t{0}) return eng_();
        return lo + below(span + 1);
    }

    int uniform_int(int lo, int hi) {
        return static_cast<int>(static_cast<std::int64_t>(lo) +
                                static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1))));
    }

    // Uniform double in [0, 1), 53 random bits.
    double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return unit() < p; }

private:
    std::mt19937_64 eng_;
};

} // namespace oql
