#ifndef CHAOKEY_DETAIL_RNG_HPP
#define CHAOKEY_DETAIL_RNG_HPP

#include <cstdint>

namespace chaokey::detail {

// splitmix64: tiny, fully specified generator. Used wherever a seed must
// reproduce the exact same draws on every platform and standard library
// (std::uniform_*_distribution is not portable across implementations).
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// Uniform real in [lo, hi).
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    /// Uniform integer in [0, n). Modulo bias is irrelevant at n << 2^64.
    std::uint64_t below(std::uint64_t n) {
        return next() % n;
    }

private:
    std::uint64_t state_;
};

} // namespace chaokey::detail

#endif
