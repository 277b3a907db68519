#ifndef CHAOKEY_ZERO_ONE_HPP
#define CHAOKEY_ZERO_ONE_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "chaokey/detail/rng.hpp"
#include "chaokey/errors.hpp"

namespace chaokey {

struct ZeroOneResult {
    double K = 0.0;          // growth-rate statistic, ~1 chaotic, ~0 regular
    double c_used = 0.0;     // frequency behind the reported s/p components
    std::vector<double> s;   // translation components for plotting
    std::vector<double> p;
};

struct ZeroOneOptions {
    int c_draws = 100;
    double c_lo = std::numbers::pi / 5.0;
    double c_hi = 4.0 * std::numbers::pi / 5.0;
    std::uint64_t seed = 0x01dbeef5eedULL;
};

namespace detail {

// Pearson correlation of n = 1..N against M(n).
inline double corr_against_index(std::span<const double> msd) {
    const std::size_t n = msd.size();
    double mean_i = 0.0, mean_m = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        mean_i += static_cast<double>(k + 1);
        mean_m += msd[k];
    }
    mean_i /= static_cast<double>(n);
    mean_m /= static_cast<double>(n);
    double cov = 0.0, var_i = 0.0, var_m = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double di = static_cast<double>(k + 1) - mean_i;
        const double dm = msd[k] - mean_m;
        cov += di * dm;
        var_i += di * di;
        var_m += dm * dm;
    }
    if (var_m == 0.0) return 0.0; // perfectly flat displacement: no growth
    return cov / std::sqrt(var_i * var_m);
}

inline double zero_one_k_for_c(std::span<const double> x, double c) {
    const std::size_t n = x.size();
    std::vector<double> s(n), p(n);
    double ss = 0.0, pp = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double arg = c * static_cast<double>(j + 1);
        ss += x[j] * std::sin(arg);
        pp += x[j] * std::cos(arg);
        s[j] = ss;
        p[j] = pp;
    }
    const std::size_t ncut = n / 10;
    std::vector<double> msd(ncut);
    for (std::size_t lag = 1; lag <= ncut; ++lag) {
        double acc = 0.0;
        for (std::size_t j = 0; j + lag < n; ++j) {
            const double dp = p[j + lag] - p[j];
            const double ds = s[j + lag] - s[j];
            acc += dp * dp + ds * ds;
        }
        msd[lag - 1] = acc / static_cast<double>(n - lag);
    }
    return corr_against_index(msd);
}

} // namespace detail

/// 0-1 test for chaos (correlation form). The translation components s(n)
/// and p(n) are returned for the supplied frequency (or the first random
/// draw when none is given); K is the median correlation between lag and
/// mean-square displacement over seeded random frequencies, which stays off
/// resonances by restricting draws to (pi/5, 4pi/5).
inline ZeroOneResult zero_one_test(std::span<const double> x,
                                   std::optional<double> c01 = std::nullopt,
                                   std::uint64_t seed = ZeroOneOptions{}.seed,
                                   const ZeroOneOptions& opt_in = {}) {
    if (x.size() < 1000) throw InvalidArgError("zero_one_test: need at least 1000 samples");
    if (c01 && !(*c01 > 0.0 && *c01 < std::numbers::pi))
        throw InvalidArgError("zero_one_test: c must lie in (0, pi)");

    ZeroOneOptions opt = opt_in;
    opt.seed = seed;
    detail::SplitMix64 rng(opt.seed);

    std::vector<double> ks;
    ks.reserve(opt.c_draws);
    double first_draw = 0.0;
    for (int d = 0; d < opt.c_draws; ++d) {
        const double c = rng.uniform(opt.c_lo, opt.c_hi);
        if (d == 0) first_draw = c;
        ks.push_back(detail::zero_one_k_for_c(x, c));
    }
    std::sort(ks.begin(), ks.end());
    const std::size_t mid = ks.size() / 2;
    const double k_median = (ks.size() % 2 == 1)
                                ? ks[mid]
                                : 0.5 * (ks[mid - 1] + ks[mid]);

    ZeroOneResult res;
    res.K = k_median;
    res.c_used = c01 ? *c01 : first_draw;
    const std::size_t n = x.size();
    res.s.resize(n);
    res.p.resize(n);
    double ss = 0.0, pp = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double arg = res.c_used * static_cast<double>(j + 1);
        ss += x[j] * std::sin(arg);
        pp += x[j] * std::cos(arg);
        res.s[j] = ss;
        res.p[j] = pp;
    }
    return res;
}

} // namespace chaokey

#endif
