#ifndef CHAOKEY_TESTS_TEST_IMAGES_HPP
#define CHAOKEY_TESTS_TEST_IMAGES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "chaokey/detail/rng.hpp"
#include "chaokey/image.hpp"

namespace testimg {

/// Photograph-like synthetic image: smooth bilinear patches plus gentle
/// sinusoidal shading and mild pixel noise. Adjacent-pixel correlation lands
/// around 0.85-0.95, like the natural photos the cipher is measured against.
inline chaokey::RgbImage natural_image(std::uint32_t w, std::uint32_t h,
                                       std::uint64_t seed = 42) {
    chaokey::detail::SplitMix64 rng(seed);
    const std::uint32_t cell = 32;
    const std::uint32_t gw = w / cell + 2, gh = h / cell + 2;

    chaokey::RgbImage img(w, h);
    for (int c = 0; c < 3; ++c) {
        std::vector<double> knots(static_cast<std::size_t>(gw) * gh);
        for (auto& k : knots) k = rng.uniform(40.0, 215.0);
        const double px = rng.uniform(0.0, 6.28), py = rng.uniform(0.0, 6.28);

        for (std::uint32_t y = 0; y < h; ++y) {
            for (std::uint32_t x = 0; x < w; ++x) {
                const double fx = static_cast<double>(x) / cell;
                const double fy = static_cast<double>(y) / cell;
                const auto ix = static_cast<std::uint32_t>(fx);
                const auto iy = static_cast<std::uint32_t>(fy);
                const double tx = fx - ix, ty = fy - iy;
                const double k00 = knots[iy * gw + ix];
                const double k10 = knots[iy * gw + ix + 1];
                const double k01 = knots[(iy + 1) * gw + ix];
                const double k11 = knots[(iy + 1) * gw + ix + 1];
                double v = (1 - tx) * (1 - ty) * k00 + tx * (1 - ty) * k10 +
                           (1 - tx) * ty * k01 + tx * ty * k11;
                v += 25.0 * std::sin(2.0 * 3.14159265 * x / w * 2.0 + px) *
                     std::cos(2.0 * 3.14159265 * y / h * 3.0 + py);
                v += rng.uniform(-12.0, 12.0);
                img.at(c, x, y) = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
            }
        }
    }
    return img;
}

inline chaokey::RgbImage constant_image(std::uint32_t w, std::uint32_t h,
                                        std::uint8_t value) {
    chaokey::RgbImage img(w, h);
    for (auto& plane : img.ch) std::fill(plane.begin(), plane.end(), value);
    return img;
}

inline chaokey::RgbImage random_image(std::uint32_t w, std::uint32_t h,
                                      std::uint64_t seed = 7) {
    chaokey::detail::SplitMix64 rng(seed);
    chaokey::RgbImage img(w, h);
    for (auto& plane : img.ch)
        for (auto& px : plane) px = static_cast<std::uint8_t>(rng.below(256));
    return img;
}

} // namespace testimg

#endif
