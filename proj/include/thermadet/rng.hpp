#pragma once

#include <cmath>
#include <cstdint>

namespace thermadet {

// Counter-style seed mixer. Used to derive independent per-sequence and
// per-window streams from one master seed so that work items can be
// processed in any order (or on any thread) without changing the result.
inline uint64_t mix_seed(uint64_t seed) {
    uint64_t z = seed + 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline uint64_t derive_seed(uint64_t seed, uint64_t a) { return mix_seed(seed ^ mix_seed(a)); }
inline uint64_t derive_seed(uint64_t seed, uint64_t a, uint64_t b) {
    return mix_seed(derive_seed(seed, a) ^ mix_seed(b + 0x517cc1b727220a95ull));
}

// Small self-contained generator (xoshiro256**). The standard library
// distributions are not bit-reproducible across implementations, so all
// stochastic output that must be byte-identical is drawn through this.
class Rng {
  public:
    explicit Rng(uint64_t seed = 0) {
        for (auto& w : s_) {
            seed = mix_seed(seed);
            w = seed;
        }
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n).
    uint64_t uniform_index(uint64_t n) { return static_cast<uint64_t>(uniform() * static_cast<double>(n)); }

    // Standard normal via Box-Muller; one spare value is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    template <typename It>
    void shuffle(It first, It last) {
        const auto n = static_cast<uint64_t>(last - first);
        for (uint64_t i = n; i > 1; --i) {
            const uint64_t j = uniform_index(i);
            std::swap(first[i - 1], first[j]);
        }
    }

  private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    uint64_t s_[4]{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace thermadet
