#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace pdtsp {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}
}  // namespace detail

// Deterministic random source. Bounded draws and shuffles are hand-rolled so
// that streams are reproducible across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix(seed)) {}

    // Derives an independent stream from (seed, a, b), e.g. per-episode
    // streams keyed by episode index.
    static Rng substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
        std::uint64_t s = seed;
        std::uint64_t x = detail::splitmix64(s);
        s ^= a * 0x9e3779b97f4a7c15ull + 0x165667b19e3779f9ull;
        x ^= detail::splitmix64(s);
        s ^= b * 0xc2b2ae3d27d4eb4full + 0x27d4eb2f165667c5ull;
        x ^= detail::splitmix64(s);
        return Rng(x);
    }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on {0, ..., bound-1}; bound must be positive.
    std::uint64_t below(std::uint64_t bound) {
        std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    // Uniform on {lo, ..., hi} inclusive.
    int range(int lo, int hi) {
        return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = below(i);
            std::swap(v[i - 1], v[j]);
        }
    }

    // Draws a categorical index from non-negative weights summing to ~1.
    int categorical(const std::vector<double>& probs) {
        double u = uniform();
        double acc = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            acc += probs[i];
            if (u < acc) return static_cast<int>(i);
        }
        return static_cast<int>(probs.size()) - 1;
    }

private:
    static std::uint64_t mix(std::uint64_t seed) {
        std::uint64_t s = seed;
        return detail::splitmix64(s);
    }

    std::mt19937_64 engine_;
};

}  // namespace pdtsp
