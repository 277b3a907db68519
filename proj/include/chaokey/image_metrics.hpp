#ifndef CHAOKEY_IMAGE_METRICS_HPP
#define CHAOKEY_IMAGE_METRICS_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "chaokey/detail/rng.hpp"
#include "chaokey/errors.hpp"
#include "chaokey/image.hpp"

namespace chaokey {

/// Borrowed view of one 8-bit channel plane.
struct ChannelView {
    const std::uint8_t* data = nullptr;
    std::uint32_t width = 0;
    std::uint32_t height = 0;

    ChannelView() = default;
    ChannelView(const std::uint8_t* d, std::uint32_t w, std::uint32_t h)
        : data(d), width(w), height(h) {}
    ChannelView(const RgbImage& img, int channel)
        : data(img.ch[channel].data()), width(img.width), height(img.height) {}

    std::size_t size() const { return static_cast<std::size_t>(width) * height; }
    std::uint8_t at(std::uint32_t x, std::uint32_t y) const {
        return data[static_cast<std::size_t>(y) * width + x];
    }
    std::span<const std::uint8_t> bytes() const { return {data, size()}; }
};

inline std::array<std::uint64_t, 256> histogram(std::span<const std::uint8_t> channel) {
    if (channel.empty()) throw InvalidArgError("histogram: empty channel");
    std::array<std::uint64_t, 256> counts{};
    for (std::uint8_t v : channel) ++counts[v];
    return counts;
}

/// Chi-square statistic of a histogram against the uniform distribution
/// (255 degrees of freedom; the p >= 0.01 critical value is 310.46).
inline double histogram_chi_square(const std::array<std::uint64_t, 256>& counts) {
    std::uint64_t total = 0;
    for (auto c : counts) total += c;
    const double expected = static_cast<double>(total) / 256.0;
    double chi = 0.0;
    for (auto c : counts) {
        const double d = static_cast<double>(c) - expected;
        chi += d * d / expected;
    }
    return chi;
}

enum class Direction { Horizontal, Vertical, Diagonal };

inline const char* direction_name(Direction d) {
    switch (d) {
        case Direction::Horizontal: return "H";
        case Direction::Vertical: return "V";
        default: return "D";
    }
}

/// Correlation coefficient of randomly sampled adjacent pixel pairs,
/// population moments (1/N). Throws DegenerateInput when either margin has
/// zero variance — r is undefined there, not zero.
inline double adjacent_correlation(const ChannelView& ch, Direction dir,
                                   int n_pairs = 3000, std::uint64_t rng_seed = 1) {
    if (n_pairs < 2) throw InvalidArgError("adjacent_correlation: need at least 2 pairs");
    const std::uint32_t max_x = dir == Direction::Vertical ? ch.width : ch.width - 1;
    const std::uint32_t max_y = dir == Direction::Horizontal ? ch.height : ch.height - 1;
    if (ch.width == 0 || ch.height == 0 || max_x == 0 || max_y == 0)
        throw InvalidArgError("adjacent_correlation: channel too small");
    if (static_cast<std::uint64_t>(max_x) * max_y < static_cast<std::uint64_t>(n_pairs))
        throw InvalidArgError("adjacent_correlation: channel too small for n_pairs");

    const std::uint32_t dx = dir != Direction::Vertical ? 1 : 0;
    const std::uint32_t dy = dir != Direction::Horizontal ? 1 : 0;

    detail::SplitMix64 rng(rng_seed);
    std::vector<double> u(n_pairs), v(n_pairs);
    for (int i = 0; i < n_pairs; ++i) {
        const auto x = static_cast<std::uint32_t>(rng.below(max_x));
        const auto y = static_cast<std::uint32_t>(rng.below(max_y));
        u[i] = ch.at(x, y);
        v[i] = ch.at(x + dx, y + dy);
    }

    const double n = static_cast<double>(n_pairs);
    double eu = 0.0, ev = 0.0;
    for (int i = 0; i < n_pairs; ++i) {
        eu += u[i];
        ev += v[i];
    }
    eu /= n;
    ev /= n;
    double du = 0.0, dv = 0.0, cov = 0.0;
    for (int i = 0; i < n_pairs; ++i) {
        du += (u[i] - eu) * (u[i] - eu);
        dv += (v[i] - ev) * (v[i] - ev);
        cov += (u[i] - eu) * (v[i] - ev);
    }
    du /= n;
    dv /= n;
    cov /= n;
    if (du == 0.0 || dv == 0.0)
        throw DegenerateInputError("adjacent_correlation: zero variance sample");
    return cov / (std::sqrt(du) * std::sqrt(dv));
}

/// Shannon entropy of the gray-level histogram, bits per pixel, 8 is ideal.
/// All 256 levels participate; empty levels contribute zero.
inline double information_entropy(std::span<const std::uint8_t> channel) {
    const auto counts = histogram(channel);
    const double total = static_cast<double>(channel.size());
    double f = 0.0;
    for (auto c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / total;
        f -= p * std::log2(p);
    }
    return f;
}

/// Structural similarity with a single global window: luminance, contrast
/// and structure terms over whole-channel moments. The structure constant is
/// half the luminance constant.
inline double ssim(const ChannelView& x, const ChannelView& y) {
    if (x.width != y.width || x.height != y.height)
        throw DimensionMismatchError("ssim: channel dimensions differ");
    if (x.size() == 0) throw InvalidArgError("ssim: empty channel");

    const double n = static_cast<double>(x.size());
    double kx = 0.0, ky = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        kx += x.data[i];
        ky += y.data[i];
    }
    kx /= n;
    ky /= n;

    double vx = 0.0, vy = 0.0, vxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x.data[i] - kx;
        const double dy = y.data[i] - ky;
        vx += dx * dx;
        vy += dy * dy;
        vxy += dx * dy;
    }
    vx /= n;
    vy /= n;
    vxy /= n;
    const double nx = std::sqrt(vx), ny = std::sqrt(vy);

    const double d1 = (0.01 * 255.0) * (0.01 * 255.0);
    const double d2 = (0.03 * 255.0) * (0.03 * 255.0);
    const double d3 = d1 / 2.0;

    const double lum = (2.0 * kx * ky + d1) / (kx * kx + ky * ky + d1);
    const double con = (2.0 * nx * ny + d2) / (vx + vy + d2);
    const double str = (vxy + d3) / (nx * ny + d3);
    return lum * con * str;
}

/// Mean of the per-channel SSIM values.
inline double ssim(const RgbImage& x, const RgbImage& y) {
    if (x.width != y.width || x.height != y.height)
        throw DimensionMismatchError("ssim: image dimensions differ");
    double acc = 0.0;
    for (int c = 0; c < 3; ++c) acc += ssim(ChannelView(x, c), ChannelView(y, c));
    return acc / 3.0;
}

struct PixelDiff {
    int max_difference = 0;
    std::uint64_t differing_pixels = 0;
};

inline PixelDiff pixel_diff(std::span<const std::uint8_t> x, std::span<const std::uint8_t> y) {
    if (x.size() != y.size()) throw DimensionMismatchError("pixel_diff: size mismatch");
    PixelDiff out;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const int d = std::abs(static_cast<int>(x[i]) - static_cast<int>(y[i]));
        if (d > out.max_difference) out.max_difference = d;
        if (d != 0) ++out.differing_pixels;
    }
    return out;
}

inline PixelDiff pixel_diff(const RgbImage& x, const RgbImage& y) {
    if (x.width != y.width || x.height != y.height)
        throw DimensionMismatchError("pixel_diff: image dimensions differ");
    PixelDiff out;
    for (int c = 0; c < 3; ++c) {
        const PixelDiff d = pixel_diff(std::span(x.ch[c]), std::span(y.ch[c]));
        out.max_difference = std::max(out.max_difference, d.max_difference);
        out.differing_pixels += d.differing_pixels;
    }
    return out;
}

} // namespace chaokey

#endif
