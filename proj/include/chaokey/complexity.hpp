#ifndef CHAOKEY_COMPLEXITY_HPP
#define CHAOKEY_COMPLEXITY_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "chaokey/chen9.hpp"
#include "chaokey/detail/fft.hpp"
#include "chaokey/detail/parallel.hpp"
#include "chaokey/errors.hpp"
#include "chaokey/integrate.hpp"

namespace chaokey {

/// Shannon entropy of the normalized power spectrum, scaled to [0, 1].
/// Mean is removed first; the DC bin is excluded from the half-spectrum.
inline double spectral_entropy(std::span<const double> x) {
    if (x.size() < 256) throw InvalidArgError("spectral_entropy: need at least 256 samples");
    const std::size_t n = x.size();

    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);

    std::vector<double> centered(n);
    double energy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        centered[i] = x[i] - mean;
        energy += centered[i] * centered[i];
    }
    if (energy == 0.0)
        throw DegenerateInputError("spectral_entropy: zero spectrum after mean removal");

    const auto spectrum = detail::fft_forward(centered);
    const std::size_t bins = n / 2; // k = 1 .. n/2
    std::vector<double> power(bins);
    double total = 0.0;
    for (std::size_t k = 1; k <= bins; ++k) {
        const double p = std::norm(spectrum[k]);
        power[k - 1] = p;
        total += p;
    }
    if (total == 0.0)
        throw DegenerateInputError("spectral_entropy: zero spectrum after mean removal");

    double h = 0.0;
    for (double p : power) {
        if (p <= 0.0) continue;
        const double q = p / total;
        h -= q * std::log(q);
    }
    return h / std::log(static_cast<double>(bins));
}

/// Fraction of signal energy outside the dominant spectral components:
/// coefficients at or below r times the mean squared magnitude are treated
/// as irregular, the surviving ones reconstruct the "regular part".
inline double c0_complexity(std::span<const double> x, double r = 5.0) {
    if (x.size() < 256) throw InvalidArgError("c0_complexity: need at least 256 samples");
    const std::size_t n = x.size();

    double energy = 0.0;
    for (double v : x) energy += v * v;
    if (energy == 0.0) throw DegenerateInputError("c0_complexity: zero-energy sequence");

    auto spectrum = detail::fft_forward(x);
    double mean_sq = 0.0;
    for (const auto& c : spectrum) mean_sq += std::norm(c);
    mean_sq /= static_cast<double>(n);

    const double threshold = r * mean_sq;
    for (auto& c : spectrum)
        if (std::norm(c) <= threshold) c = 0.0;

    const std::vector<double> regular = detail::fft_inverse_real(std::move(spectrum));
    double irregular_energy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = x[i] - regular[i];
        irregular_energy += d * d;
    }
    double c0 = irregular_energy / energy;
    // Parseval keeps this in [0,1]; clip the last-ulp rounding spill.
    if (c0 < 0.0) c0 = 0.0;
    if (c0 > 1.0) c0 = 1.0;
    return c0;
}

struct ComplexityGridOptions {
    double dt = 1e-3;
    std::int64_t transient = 50000;
    int downsample = 10;          // decorrelate integrator output
    std::size_t samples = 8192;   // per-cell sequence length after downsampling
    double c0_threshold = 5.0;
    State9 init{0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1};
};

/// SE and C0 over a grid of (a, c) parameter pairs; entries are NaN where the
/// trajectory diverged. Row-major: cell(i, j) = row i (a value), column j (c value).
struct ComplexityGrid {
    std::vector<double> a_values;
    std::vector<double> c_values;
    std::vector<double> se; // a_values.size() * c_values.size(), row-major
    std::vector<double> c0;

    double se_at(std::size_t ai, std::size_t ci) const { return se[ai * c_values.size() + ci]; }
    double c0_at(std::size_t ai, std::size_t ci) const { return c0[ai * c_values.size() + ci]; }
};

/// The u1 sequence a grid cell analyses: post-transient, every
/// `downsample`-th integrator sample.
inline std::vector<double> complexity_cell_sequence(const SystemParams& p,
                                                    const ComplexityGridOptions& opt = {}) {
    const std::int64_t steps =
        static_cast<std::int64_t>(opt.samples) * opt.downsample;
    const Chen9System sys{p};
    State9 s = opt.init;
    for (std::int64_t k = 0; k < opt.transient; ++k) {
        s = rk4_step(sys, s, opt.dt);
        if (!all_finite(s)) throw NonFiniteError("complexity cell: trajectory diverged");
    }
    std::vector<double> seq;
    seq.reserve(opt.samples);
    for (std::int64_t k = 0; k < steps; ++k) {
        s = rk4_step(sys, s, opt.dt);
        if (!all_finite(s)) throw NonFiniteError("complexity cell: trajectory diverged");
        if ((k + 1) % opt.downsample == 0) seq.push_back(s[0]);
    }
    return seq;
}

inline ComplexityGrid complexity_grid(double a_lo, double a_hi, std::size_t a_points,
                                      double c_lo, double c_hi, std::size_t c_points,
                                      double b_fixed,
                                      const ComplexityGridOptions& opt = {}) {
    if (!(a_lo < a_hi) || !(c_lo < c_hi) || a_points < 2 || c_points < 2)
        throw InvalidArgError("complexity_grid: degenerate axis range");

    ComplexityGrid grid;
    grid.a_values.resize(a_points);
    grid.c_values.resize(c_points);
    for (std::size_t i = 0; i < a_points; ++i)
        grid.a_values[i] = a_lo + (a_hi - a_lo) * static_cast<double>(i) / (a_points - 1);
    for (std::size_t j = 0; j < c_points; ++j)
        grid.c_values[j] = c_lo + (c_hi - c_lo) * static_cast<double>(j) / (c_points - 1);

    const std::size_t cells = a_points * c_points;
    grid.se.assign(cells, std::numeric_limits<double>::quiet_NaN());
    grid.c0.assign(cells, std::numeric_limits<double>::quiet_NaN());

    detail::parallel_for(cells, [&](std::size_t cell) {
        const std::size_t ai = cell / c_points;
        const std::size_t ci = cell % c_points;
        SystemParams p{grid.a_values[ai], b_fixed, grid.c_values[ci]};
        try {
            const auto seq = complexity_cell_sequence(p, opt);
            grid.se[cell] = spectral_entropy(seq);
            grid.c0[cell] = c0_complexity(seq, opt.c0_threshold);
        } catch (const NonFiniteError&) {
            // missing value stays NaN
        } catch (const DegenerateInputError&) {
        }
    });
    return grid;
}

} // namespace chaokey

#endif
