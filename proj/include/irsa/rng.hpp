#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace irsa {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// mt19937_64 wrapper with hand-rolled variate mappings so that streams are
// bit-identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // uniform on [0, 1)
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // uniform on (0, 1), never returns an endpoint
    double uniform_open() {
        return (static_cast<double>(eng_() >> 12) + 0.5) * 0x1.0p-52;
    }

    // uniform integer in [0, n), unbiased rejection sampling
    std::uint64_t uniform_int(std::uint64_t n) {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n + 1) % n;
        std::uint64_t v = eng_();
        while (v > limit) v = eng_();
        return v % n;
    }

    // exponential with the given mean, strictly positive
    double exponential(double mean) { return -mean * std::log(uniform_open()); }

private:
    std::mt19937_64 eng_;
};

// Independent per-frame stream: decorrelates frames and makes parallel
// execution order-independent.
inline Rng substream(std::uint64_t master_seed, std::uint64_t index) {
    return Rng(splitmix64(master_seed ^ splitmix64(index + 1)));
}

}  // namespace irsa
