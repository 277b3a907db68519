#include "chaokey/image_metrics.hpp"
#include "chaokey/nist.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "chaokey/detail/gamma.hpp"
#include "chaokey/detail/rng.hpp"
#include "test_images.hpp"

using namespace chaokey;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

std::vector<std::uint8_t> random_bits(std::size_t n, std::uint64_t seed) {
    chaokey::detail::SplitMix64 rng(seed);
    std::vector<std::uint8_t> bits(n);
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng.below(2));
    return bits;
}

} // namespace

TEST_CASE("histogram: exact counts", "[metrics]") {
    SECTION("constant channel") {
        const std::vector<std::uint8_t> ch(1000, 0);
        const auto counts = histogram(ch);
        REQUIRE(counts[0] == 1000);
        for (int i = 1; i < 256; ++i) REQUIRE(counts[i] == 0);
    }
    SECTION("256x256 ramp hits every value 256 times") {
        std::vector<std::uint8_t> ch(65536);
        for (std::size_t i = 0; i < ch.size(); ++i)
            ch[i] = static_cast<std::uint8_t>(i % 256);
        for (auto c : histogram(ch)) REQUIRE(c == 256);
    }
    SECTION("empty channel rejected") {
        REQUIRE_THROWS_AS(histogram({}), InvalidArgError);
    }
}

TEST_CASE("histogram chi-square: uniform ramp scores zero", "[metrics]") {
    std::vector<std::uint8_t> ch(65536);
    for (std::size_t i = 0; i < ch.size(); ++i)
        ch[i] = static_cast<std::uint8_t>(i % 256);
    REQUIRE(histogram_chi_square(histogram(ch)) == 0.0);
}

TEST_CASE("adjacent correlation: perfectly correlated pairs give r = 1", "[metrics]") {
    // Every row is constant, rows differ: each horizontal pair has u == v.
    RgbImage img(64, 64);
    for (std::uint32_t y = 0; y < 64; ++y)
        for (std::uint32_t x = 0; x < 64; ++x)
            img.at(0, x, y) = static_cast<std::uint8_t>(y * 4);
    const double r = adjacent_correlation(ChannelView(img, 0), Direction::Horizontal, 500, 3);
    REQUIRE(r == Approx(1.0).margin(1e-12));
}

TEST_CASE("adjacent correlation: zero-variance sample is degenerate", "[metrics]") {
    const RgbImage img = testimg::constant_image(32, 32, 80);
    REQUIRE_THROWS_AS(
        adjacent_correlation(ChannelView(img, 0), Direction::Horizontal, 100, 1),
        DegenerateInputError);
}

TEST_CASE("adjacent correlation: reproducible per seed, bounded, channel checks",
          "[metrics]") {
    const RgbImage img = testimg::random_image(64, 64, 55);
    const ChannelView view(img, 1);
    const double r1 = adjacent_correlation(view, Direction::Vertical, 2000, 42);
    const double r2 = adjacent_correlation(view, Direction::Vertical, 2000, 42);
    REQUIRE(r1 == r2);
    REQUIRE(r1 >= -1.0);
    REQUIRE(r1 <= 1.0);
    REQUIRE(std::fabs(r1) < 0.1); // random noise is uncorrelated

    REQUIRE_THROWS_AS(adjacent_correlation(view, Direction::Diagonal, 64 * 64, 1),
                      InvalidArgError); // not enough distinct positions
}

TEST_CASE("adjacent correlation: natural image is strongly correlated", "[metrics]") {
    const RgbImage img = testimg::natural_image(128, 128, 2);
    const double r = adjacent_correlation(ChannelView(img, 0), Direction::Horizontal, 3000, 1);
    REQUIRE(r > 0.7);
    REQUIRE(r < 0.999);
}

TEST_CASE("information entropy: endpoints", "[metrics]") {
    SECTION("constant channel has zero entropy") {
        const std::vector<std::uint8_t> ch(4096, 9);
        REQUIRE(information_entropy(ch) == 0.0);
    }
    SECTION("perfectly uniform channel reaches 8 bits") {
        std::vector<std::uint8_t> ch(65536);
        for (std::size_t i = 0; i < ch.size(); ++i)
            ch[i] = static_cast<std::uint8_t>(i % 256);
        REQUIRE(information_entropy(ch) == 8.0);
    }
}

TEST_CASE("ssim: identity, symmetry, inversion", "[metrics][ssim]") {
    const RgbImage img = testimg::natural_image(64, 64, 10);
    const ChannelView x(img, 0);

    SECTION("self-similarity is one") {
        REQUIRE(ssim(x, x) == Approx(1.0).margin(1e-12));
        REQUIRE(ssim(img, img) == Approx(1.0).margin(1e-12));
    }
    SECTION("symmetric in its arguments") {
        const ChannelView y(img, 1);
        REQUIRE(ssim(x, y) == Approx(ssim(y, x)).margin(1e-12));
    }
    SECTION("equal constants compare as identical") {
        const RgbImage a = testimg::constant_image(16, 16, 40);
        REQUIRE(ssim(a, a) == Approx(1.0).margin(1e-12));
    }
    SECTION("inverted image scores low") {
        RgbImage inv = img;
        for (auto& plane : inv.ch)
            for (auto& px : plane) px = static_cast<std::uint8_t>(255 - px);
        REQUIRE(ssim(img, inv) < 0.3);
    }
    SECTION("dimension mismatch is an error") {
        const RgbImage small = testimg::constant_image(8, 8, 0);
        REQUIRE_THROWS_AS(ssim(img, small), DimensionMismatchError);
    }
}

TEST_CASE("pixel diff: exact counting", "[metrics]") {
    const RgbImage img = testimg::natural_image(32, 32, 3);
    SECTION("identical images") {
        const PixelDiff d = pixel_diff(img, img);
        REQUIRE(d.max_difference == 0);
        REQUIRE(d.differing_pixels == 0);
    }
    SECTION("one pixel changed by one") {
        RgbImage other = img;
        other.ch[2][100] = static_cast<std::uint8_t>(other.ch[2][100] + 1);
        const PixelDiff d = pixel_diff(img, other);
        REQUIRE(d.max_difference == 1);
        REQUIRE(d.differing_pixels == 1);
    }
    SECTION("everything shifted by one") {
        RgbImage other = img;
        for (auto& plane : other.ch)
            for (auto& px : plane) px = static_cast<std::uint8_t>(px == 255 ? 254 : px + 1);
        const PixelDiff d = pixel_diff(img, other);
        REQUIRE(d.max_difference == 1);
        REQUIRE(d.differing_pixels == 3 * img.pixels());
    }
}

TEST_CASE("regularized incomplete gamma agrees with closed forms", "[metrics][gamma]") {
    // Q(1, x) = exp(-x); Q(1/2, x) = erfc(sqrt(x))
    for (double x : {0.1, 0.5, 1.0, 2.0, 5.0, 20.0}) {
        REQUIRE(chaokey::detail::gamma_q(1.0, x) == Approx(std::exp(-x)).epsilon(1e-10));
        REQUIRE(chaokey::detail::gamma_q(0.5, x) ==
                Approx(std::erfc(std::sqrt(x))).epsilon(1e-10));
    }
    REQUIRE(chaokey::detail::gamma_q(3.0, 0.0) == 1.0);
}

TEST_CASE("nist: alternating sequence", "[metrics][nist]") {
    std::vector<std::uint8_t> bits(100000);
    for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = i % 2;

    SECTION("monobit is perfectly balanced") {
        REQUIRE(nist::monobit_p(bits) == 1.0);
    }
    SECTION("block frequency sees balanced blocks") {
        REQUIRE(nist::block_frequency_p(bits, 128) == Approx(1.0).margin(1e-12));
    }
    SECTION("runs fails: far too many alternations") {
        const auto res = nist::runs_test(bits);
        REQUIRE(res.applicable);
        REQUIRE(res.p < 1e-10);
        REQUIRE_FALSE(res.pass);
    }
}

TEST_CASE("nist: all-ones sequence fails frequency and disables runs", "[metrics][nist]") {
    const std::vector<std::uint8_t> bits(100000, 1);
    REQUIRE(nist::monobit_p(bits) < 1e-10);
    const auto res = nist::runs_test(bits);
    REQUIRE_FALSE(res.applicable);
    REQUIRE_FALSE(res.pass);
}

TEST_CASE("nist: balanced random bits pass the subset", "[metrics][nist]") {
    const auto bits = random_bits(200000, 2024);
    const auto results = nist::nist_subset(bits);
    REQUIRE(results.size() == 3);
    for (const auto& r : results) {
        INFO(r.name << " p = " << r.p);
        REQUIRE(r.applicable);
        REQUIRE(r.pass);
    }
}

TEST_CASE("nist: short input rejected", "[metrics][nist]") {
    const std::vector<std::uint8_t> bits(1000, 1);
    REQUIRE_THROWS_AS(nist::nist_subset(bits), InvalidArgError);
}

TEST_CASE("export_bits writes ASCII 0/1 and round-trips", "[metrics][nist]") {
    const fs::path path = fs::temp_directory_path() / "chaokey_bits_test.txt";
    const std::vector<std::uint8_t> bits{1, 0, 0, 0, 0, 0, 0, 1};
    nist::export_bits(bits, path);

    std::ifstream in(path, std::ios::binary);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    REQUIRE(content == "10000001");
    REQUIRE(fs::file_size(path) == bits.size());
    fs::remove(path);
}

TEST_CASE("export_bits handles a 10^6-bit stream promptly", "[metrics][nist][slow]") {
    const fs::path path = fs::temp_directory_path() / "chaokey_bits_perf.txt";
    const auto bits = random_bits(1000000, 5);
    const auto t0 = std::chrono::steady_clock::now();
    nist::export_bits(bits, path);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    REQUIRE(fs::file_size(path) == bits.size());
    REQUIRE(seconds < 5.0);
    fs::remove(path);
}
