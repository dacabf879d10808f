#pragma once

#include <cstdint>
#include <cstddef>

namespace catex {

// splitmix64: tiny, fast generator used for seed derivation and as the
// per-row stream in the samplers. Per-row streams are derived from
// (seed, row index), so parallel and serial generation produce identical
// datasets and every draw is reproducible cross-platform (std::shuffle and
// std::uniform_real_distribution are not).
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1) with 53 random bits
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // uniform integer in [0, n), n > 0; unbiased enough for sampling work
    std::size_t uniform_index(std::size_t n) {
        return static_cast<std::size_t>(next_u64() % n);
    }

    // standard normal via Box-Muller (one value per call, no caching)
    double next_gaussian();

  private:
    std::uint64_t state_;
};

// Derive an independent stream for (seed, index), e.g. one per dataset row
// or one per forest tree. The index passes through a full avalanche before
// entering the stream seed; a linear index offset would collide with the
// generator's own additive constant and make neighboring streams overlap.
inline SplitMix64 derived_stream(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 mix(seed ^ 0x6a09e667f3bcc909ull);
    mix.next_u64();
    SplitMix64 ix(index + 0x9e3779b97f4a7c15ull);
    SplitMix64 out(mix.next_u64() ^ ix.next_u64());
    out.next_u64();
    return out;
}

// Deterministic Fisher-Yates shuffle of [0, n) index vectors.
template <typename Vec>
void shuffle_indices(Vec& v, SplitMix64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = rng.uniform_index(i);
        auto tmp = v[i - 1];
        v[i - 1] = v[j];
        v[j] = tmp;
    }
}

}  // namespace catex
