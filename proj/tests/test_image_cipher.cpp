#include "chaokey/image_cipher.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "chaokey/image_metrics.hpp"
#include "test_images.hpp"

using namespace chaokey;

namespace {

CipherKey quick_key(const RgbImage& img) {
    CipherKey key = derive_key(img);
    key.transient_steps = 2000; // plenty of mixing, fast tests
    return key;
}

/// Value that quantizes to exactly `byte` under the default scale.
double value_for_byte(std::uint8_t byte) {
    return (static_cast<double>(byte) + 0.5) / 256.0 / 10000.0;
}

RgbImage crop(const RgbImage& img, const Rect& r) {
    RgbImage out(r.w, r.h);
    for (int c = 0; c < 3; ++c)
        for (std::uint32_t y = 0; y < r.h; ++y)
            for (std::uint32_t x = 0; x < r.w; ++x)
                out.at(c, x, y) = img.at(c, r.x + x, r.y + y);
    return out;
}

} // namespace

TEST_CASE("cipher round-trip is bit-exact on assorted shapes", "[cipher]") {
    for (auto [w, h] : {std::pair<std::uint32_t, std::uint32_t>{1, 1},
                        {3, 5},
                        {4, 4},
                        {17, 9},
                        {64, 64}}) {
        const RgbImage img = testimg::random_image(w, h, 1000 + w * h);
        const CipherKey key = quick_key(img);
        const CipherImage cipher = encrypt_image(img, key);
        const RgbImage back = decrypt_image(cipher, key);
        INFO("shape " << w << "x" << h);
        REQUIRE(back == img);
    }
}

TEST_CASE("cipher round-trip on constant images", "[cipher]") {
    for (std::uint8_t v : {std::uint8_t{0}, std::uint8_t{255}, std::uint8_t{17}}) {
        const RgbImage img = testimg::constant_image(16, 16, v);
        const CipherKey key = quick_key(img);
        REQUIRE(decrypt_image(encrypt_image(img, key), key) == img);
    }
}

TEST_CASE("cipher: padded dimensions are the next multiples of four", "[cipher]") {
    const RgbImage img = testimg::random_image(3, 5);
    const CipherImage cipher = encrypt_image(img, quick_key(img));
    REQUIRE(cipher.padded_w() == 4);
    REQUIRE(cipher.padded_h() == 8);
    REQUIRE(cipher.ch[0].size() == 32);
    REQUIRE(cipher.orig_w == 3);
    REQUIRE(cipher.region == Rect{0, 0, 3, 5});
}

TEST_CASE("cipher: region selection encrypts and restores the sub-image", "[cipher]") {
    const RgbImage img = testimg::natural_image(32, 32, 4);
    const CipherKey key = quick_key(img);

    SECTION("aligned region") {
        const Rect region{4, 4, 16, 12};
        const CipherImage cipher = encrypt_image(img, key, region);
        REQUIRE(decrypt_image(cipher, key) == crop(img, region));
    }
    SECTION("unaligned region") {
        const Rect region{3, 5, 10, 7};
        const CipherImage cipher = encrypt_image(img, key, region);
        REQUIRE(cipher.padded_w() == 12);
        REQUIRE(cipher.padded_h() == 8);
        REQUIRE(decrypt_image(cipher, key) == crop(img, region));
    }
    SECTION("region outside the image is rejected") {
        REQUIRE_THROWS_AS(encrypt_image(img, key, Rect{20, 20, 16, 16}), InvalidArgError);
        REQUIRE_THROWS_AS(encrypt_image(img, key, Rect{0, 0, 0, 4}), InvalidArgError);
    }
}

TEST_CASE("cipher: single block with identity permutations collapses to the DNA core",
          "[cipher]") {
    // Inject synthetic sequences: monotone V/M give identity permutations,
    // X/Y/H pick fixed rules and operator, A carries a chosen mask.
    const std::uint8_t rule_x = 4, rule_y = 6, op_idx = 1; // Sub
    KeystreamSequences seq;
    std::array<std::uint8_t, 16> mask{};
    for (std::size_t i = 0; i < 48; ++i) {
        const auto b = static_cast<std::uint8_t>((i * 37 + 11) & 0xFF);
        if (i < 16) mask[i] = b;
        seq.a.push_back(value_for_byte(b));
    }
    for (int i = 0; i < 3; ++i) {
        seq.x.push_back(value_for_byte(rule_x));
        seq.y.push_back(value_for_byte(rule_y));
        seq.h.push_back(value_for_byte(op_idx));
    }
    for (int i = 0; i < 4; ++i) {
        seq.v.push_back(static_cast<double>(i));
        seq.m.push_back(static_cast<double>(i));
    }

    const auto streams = cipher_detail::derive_streams(seq, 4, 4, 10000);
    REQUIRE(streams.rows.indices == std::vector<std::uint32_t>{0, 1, 2, 3});
    REQUIRE(streams.cols.indices == std::vector<std::uint32_t>{0, 1, 2, 3});
    REQUIRE(streams.xrule[0] == rule_x);
    REQUIRE(streams.hop[0] == op_idx);

    dna::ByteBlock plain;
    for (std::size_t i = 0; i < 16; ++i) plain[i] = static_cast<std::uint8_t>(i * 13 + 7);
    cipher_detail::Plane a1{4, 4, std::vector<std::uint8_t>(plain.begin(), plain.end())};

    const cipher_detail::Plane enc = cipher_detail::encrypt_plane(a1, streams, 0);

    const dna::Rule& rx = dna::rule(rule_x + 1);
    const dna::Rule& ry = dna::rule(rule_y + 1);
    dna::ByteBlock mask_block;
    std::copy(mask.begin(), mask.end(), mask_block.begin());
    const dna::ByteBlock expected =
        dna::decode(dna::block_op(dna::encode(plain, rx), dna::encode(mask_block, ry),
                                  static_cast<dna::Op>(op_idx), rx),
                    rx);
    REQUIRE(std::equal(enc.bytes.begin(), enc.bytes.end(), expected.begin()));

    const cipher_detail::Plane dec = cipher_detail::decrypt_plane(enc, streams, 0);
    REQUIRE(std::equal(dec.bytes.begin(), dec.bytes.end(), plain.begin()));
}

TEST_CASE("cipher: short keystream is rejected", "[cipher]") {
    KeystreamSequences seq;
    seq.a.assign(10, 0.1); // needs 48 for a 4x4 image
    seq.x.assign(3, 0.1);
    seq.y.assign(3, 0.1);
    seq.h.assign(3, 0.1);
    seq.v.assign(4, 0.1);
    seq.m.assign(4, 0.1);
    REQUIRE_THROWS_AS(cipher_detail::derive_streams(seq, 4, 4, 10000), InvalidArgError);
}

TEST_CASE("cipher container: serialize/parse round-trip", "[cipher][container]") {
    const RgbImage img = testimg::random_image(9, 6, 77);
    const CipherKey key = quick_key(img);
    const CipherImage cipher = encrypt_image(img, key);

    const auto bytes = serialize_cipher(cipher);
    const CipherImage back = parse_cipher(bytes);
    REQUIRE(back == cipher);
    REQUIRE(decrypt_image(back, key) == img);
}

TEST_CASE("cipher container: corruption is detected, no partial output", "[cipher][container]") {
    const RgbImage img = testimg::random_image(8, 8, 5);
    const auto bytes = serialize_cipher(encrypt_image(img, quick_key(img)));

    SECTION("truncated payload") {
        const std::vector<std::uint8_t> cut(bytes.begin(), bytes.end() - 7);
        REQUIRE_THROWS_AS(parse_cipher(cut), FormatError);
    }
    SECTION("truncated header") {
        const std::vector<std::uint8_t> cut(bytes.begin(), bytes.begin() + 10);
        REQUIRE_THROWS_AS(parse_cipher(cut), FormatError);
    }
    SECTION("bad magic") {
        auto bad = bytes;
        bad[0] = 'X';
        REQUIRE_THROWS_AS(parse_cipher(bad), FormatError);
    }
    SECTION("unsupported version") {
        auto bad = bytes;
        bad[4] = 9;
        REQUIRE_THROWS_AS(parse_cipher(bad), FormatError);
    }
    SECTION("trailing garbage") {
        auto bad = bytes;
        bad.push_back(0);
        REQUIRE_THROWS_AS(parse_cipher(bad), FormatError);
    }
    SECTION("region outside original bounds") {
        auto bad = bytes;
        bad[21] = 1; // orig_w = 8 -> shrink below region.w
        bad[22] = 0;
        bad[23] = 0;
        bad[24] = 0;
        REQUIRE_THROWS_AS(parse_cipher(bad), FormatError);
    }
}

TEST_CASE("cipher: wrong key produces garbage, not a crash", "[cipher]") {
    const RgbImage img = testimg::natural_image(32, 32, 12);
    const CipherKey key = quick_key(img);
    const CipherImage cipher = encrypt_image(img, key);

    CipherKey wrong = key;
    for (double& u : wrong.init) u += 2e-5;
    const RgbImage garbage = decrypt_image(cipher, wrong);

    const PixelDiff diff = pixel_diff(img, garbage);
    const auto total = static_cast<double>(3 * img.pixels());
    REQUIRE(static_cast<double>(diff.differing_pixels) / total >= 0.99);
}

TEST_CASE("cipher: 512x512 cipher channels reach near-maximal entropy", "[cipher][slow]") {
    const RgbImage img = testimg::natural_image(512, 512, 30);
    const CipherKey key = derive_key(img); // full default transient
    const CipherImage cipher = encrypt_image(img, key);
    for (int c = 0; c < 3; ++c) {
        const double entropy = information_entropy(cipher.ch[c]);
        INFO("channel " << c);
        REQUIRE(entropy >= 7.9989 - 0.003);
    }
}

TEST_CASE("cipher: ciphertext differs from plaintext everywhere it matters", "[cipher]") {
    const RgbImage img = testimg::natural_image(32, 32, 13);
    const CipherKey key = quick_key(img);
    const CipherImage cipher = encrypt_image(img, key);
    // padded plane equals image plane here (32 is a multiple of 4)
    const PixelDiff diff = pixel_diff(std::span(img.ch[0]), std::span(cipher.ch[0]));
    REQUIRE(static_cast<double>(diff.differing_pixels) /
                static_cast<double>(img.pixels()) > 0.99);
}
