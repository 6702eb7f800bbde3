#pragma once

#include <cmath>
#include <cstdint>

namespace tsstn {

// splitmix64 mixing step. Used both as the PRNG core and to derive
// independent sub-seeds (e.g. one per simulated match) from a master seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t s = master ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
    return splitmix64(s);
}

// Small deterministic generator. We do not use <random> distributions:
// their output is implementation-defined, and byte-identical replay of
// simulated datasets and training runs is a contract here.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0x2545f4914f6cdd1dULL) : state_(seed) {}

    std::uint64_t next_u64() { return splitmix64(state_); }

    // uniform in [0, 1) with 53 random bits
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // unbiased integer in [0, n)
    std::uint64_t uniform_int(std::uint64_t n) {
        if (n == 0) return 0;
        std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    // standard normal via Box-Muller, one spare cached
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    bool coin() { return (next_u64() & 1ULL) != 0; }

    // Fisher-Yates with explicit unbiased draws; std::shuffle is
    // implementation-defined and would break cross-platform replay.
    template <typename Seq>
    void shuffle(Seq& seq) {
        for (std::size_t i = seq.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_int(i));
            using std::swap;
            swap(seq[i - 1], seq[j]);
        }
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace tsstn
