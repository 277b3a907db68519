#include "chaokey/modbus.hpp"
#include "chaokey/modbus_crypt.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "chaokey/detail/rng.hpp"
#include "test_images.hpp"

using namespace chaokey;
using namespace chaokey::modbus;

namespace {

// Independent CRC oracle: polynomial long division MSB-first with the
// unreflected polynomial 0x8005, input bytes and the final remainder
// bit-reflected. Same code, different route.
std::uint8_t reflect8(std::uint8_t v) {
    std::uint8_t r = 0;
    for (int i = 0; i < 8; ++i)
        if (v & (1u << i)) r |= 1u << (7 - i);
    return r;
}

std::uint16_t reflect16(std::uint16_t v) {
    std::uint16_t r = 0;
    for (int i = 0; i < 16; ++i)
        if (v & (1u << i)) r |= 1u << (15 - i);
    return r;
}

std::uint16_t crc16_longdiv(std::span<const std::uint8_t> bytes) {
    std::uint16_t crc = 0xFFFF;
    for (std::uint8_t b : bytes) {
        crc ^= static_cast<std::uint16_t>(reflect8(b)) << 8;
        for (int bit = 0; bit < 8; ++bit) {
            if (crc & 0x8000)
                crc = static_cast<std::uint16_t>((crc << 1) ^ 0x8005);
            else
                crc = static_cast<std::uint16_t>(crc << 1);
        }
    }
    return reflect16(crc);
}

CipherKey test_key() {
    CipherKey key = derive_key(testimg::natural_image(16, 16, 21));
    key.transient_steps = 2000;
    return key;
}

} // namespace

TEST_CASE("crc16: reference values", "[modbus][crc]") {
    SECTION("empty input leaves the init value untouched") {
        REQUIRE(crc16({}) == 0xFFFF);
        REQUIRE(crc16_longdiv({}) == 0xFFFF);
    }
    SECTION("check string 123456789") {
        const std::uint8_t msg[] = {'1', '2', '3', '4', '5', '6', '7', '8', '9'};
        REQUIRE(crc16_longdiv(msg) == 0x4B37);
        REQUIRE(crc16(msg) == 0x4B37);
    }
}

TEST_CASE("crc16: appending the little-endian CRC zeroes the remainder", "[modbus][crc]") {
    chaokey::detail::SplitMix64 rng(8);
    for (int iter = 0; iter < 100; ++iter) {
        std::vector<std::uint8_t> msg(rng.below(32) + 1);
        for (auto& b : msg) b = static_cast<std::uint8_t>(rng.below(256));
        const std::uint16_t crc = crc16(msg);
        msg.push_back(static_cast<std::uint8_t>(crc & 0xFF));
        msg.push_back(static_cast<std::uint8_t>(crc >> 8));
        REQUIRE(crc16(msg) == 0x0000);
    }
}

TEST_CASE("crc16: implementation matches the long-division oracle", "[modbus][crc]") {
    chaokey::detail::SplitMix64 rng(99);
    for (int iter = 0; iter < 10000; ++iter) {
        std::vector<std::uint8_t> msg(rng.below(64));
        for (auto& b : msg) b = static_cast<std::uint8_t>(rng.below(256));
        REQUIRE(crc16(msg) == crc16_longdiv(msg));
    }
}

TEST_CASE("frames: build/parse round-trip", "[modbus][frame]") {
    const std::uint8_t payload[] = {0x00, 0x00, 0x00, 0x01};
    const Frame f = build_frame(0x01, 0x03, payload);
    REQUIRE(f.crc == f.computed_crc());

    const auto bytes = to_bytes(f);
    REQUIRE(bytes.size() == 8);
    REQUIRE(bytes[6] == (f.crc & 0xFF)); // low byte first on the wire

    const Frame back = parse_frame(bytes);
    REQUIRE(back.address == 0x01);
    REQUIRE(back.function == 0x03);
    REQUIRE(back.data == f.data);
    REQUIRE(back.crc == f.crc);
}

TEST_CASE("frames: size limits", "[modbus][frame]") {
    const std::vector<std::uint8_t> three(3, 0);
    REQUIRE_THROWS_AS(parse_frame(three), FrameTooShortError);

    const std::vector<std::uint8_t> huge(257, 0);
    REQUIRE_THROWS_AS(parse_frame(huge), FrameTooLongError);

    const std::vector<std::uint8_t> payload(253, 0);
    REQUIRE_THROWS_AS(build_frame(1, 3, payload), FrameTooLongError);

    const std::vector<std::uint8_t> max_payload(252, 0);
    REQUIRE_NOTHROW(build_frame(1, 3, max_payload));
}

TEST_CASE("crc transform: zero mask with xor under an A-first rule is the identity",
          "[modbus][crypt]") {
    modbus::detail::FrameKeystream ks;
    ks.rule_x = dna::rule(1);
    ks.rule_y = dna::rule(1); // 00 -> A, mask bytes 0 encode to all-A
    ks.op = dna::Op::Xor;
    ks.mask = {0, 0};
    for (std::uint16_t crc : {std::uint16_t{0x0000}, std::uint16_t{0x4B37},
                              std::uint16_t{0xFFFF}}) {
        REQUIRE(modbus::detail::transform_crc(crc, ks, true) == crc);
        REQUIRE(modbus::detail::transform_crc(crc, ks, false) == crc);
    }
}

TEST_CASE("crc transform: forward/backward are inverses for every keystream",
          "[modbus][crypt]") {
    chaokey::detail::SplitMix64 rng(13);
    for (int iter = 0; iter < 10000; ++iter) {
        modbus::detail::FrameKeystream ks;
        ks.rule_x = dna::rule(static_cast<int>(rng.below(8)) + 1);
        ks.rule_y = dna::rule(static_cast<int>(rng.below(8)) + 1);
        ks.op = static_cast<dna::Op>(rng.below(3));
        ks.mask = {static_cast<std::uint8_t>(rng.below(256)),
                   static_cast<std::uint8_t>(rng.below(256))};
        const auto crc = static_cast<std::uint16_t>(rng.below(65536));
        REQUIRE(modbus::detail::transform_crc(modbus::detail::transform_crc(crc, ks, true), ks, false) == crc);
    }
}

TEST_CASE("encrypt/decrypt CRC round-trips end to end", "[modbus][crypt]") {
    const CipherKey key = test_key();
    chaokey::detail::SplitMix64 rng(31);
    for (std::uint64_t nonce = 0; nonce < 20; ++nonce) {
        std::vector<std::uint8_t> payload(rng.below(8));
        for (auto& b : payload) b = static_cast<std::uint8_t>(rng.below(256));
        const Frame plain = build_frame(static_cast<std::uint8_t>(rng.below(248)),
                                        0x03, payload);
        const Frame enc = encrypt_crc(plain, key, nonce);
        const Frame dec = decrypt_crc(enc, key, nonce);
        REQUIRE(dec.crc == plain.crc);
        REQUIRE(dec.data == plain.data);
    }
}

TEST_CASE("encrypted CRC advances with the nonce", "[modbus][crypt]") {
    const CipherKey key = test_key();
    const std::uint8_t payload[] = {0x10, 0x20};
    const Frame plain = build_frame(0x11, 0x06, payload);

    const Frame n0 = encrypt_crc(plain, key, 0);
    const Frame n1 = encrypt_crc(plain, key, 1);
    const Frame n2 = encrypt_crc(plain, key, 2);
    // same plain CRC, fresh keystream slots
    REQUIRE(n0.crc != n1.crc);
    REQUIRE(n1.crc != n2.crc);
}

TEST_CASE("verify_frame: accepts the untampered frame", "[modbus][verify]") {
    const CipherKey key = test_key();
    const std::uint8_t payload[] = {0xDE, 0xAD};
    const Frame sent = encrypt_crc(build_frame(0x05, 0x10, payload), key, 7);
    REQUIRE(verify_frame(sent, key, 7) == Verdict::Accept);
}

TEST_CASE("verify_frame: rejects every single-bit tampering of a 6-byte frame",
          "[modbus][verify][slow]") {
    const CipherKey key = test_key();
    const std::uint8_t payload[] = {0xA5, 0x3C};
    const Frame sent = encrypt_crc(build_frame(0x01, 0x03, payload), key, 0);
    const auto wire = to_bytes(sent);
    REQUIRE(wire.size() == 6);

    for (std::size_t byte = 0; byte < wire.size(); ++byte) {
        for (int bit = 0; bit < 8; ++bit) {
            auto tampered = wire;
            tampered[byte] ^= static_cast<std::uint8_t>(1u << bit);
            const Frame received = parse_frame(tampered);
            INFO("flipped byte " << byte << " bit " << bit);
            REQUIRE(verify_frame(received, key, 0) == Verdict::Reject);
        }
    }
}

TEST_CASE("verify_frame: rejects all 1- and 2-bit tamperings of an 8-byte frame",
          "[modbus][verify][slow]") {
    CipherKey key = test_key();
    key.transient_steps = 200; // tamper detection does not depend on mixing depth
    const std::uint8_t payload[] = {0x12, 0x34, 0x56, 0x78};
    const Frame sent = encrypt_crc(build_frame(0x0A, 0x10, payload), key, 5);
    const auto wire = to_bytes(sent);
    REQUIRE(wire.size() == 8);

    const std::size_t nbits = wire.size() * 8;
    std::size_t rejected = 0, cases = 0;
    for (std::size_t i = 0; i < nbits; ++i) {
        for (std::size_t j = i; j < nbits; ++j) { // j == i covers 1-bit flips
            auto tampered = wire;
            tampered[i / 8] ^= static_cast<std::uint8_t>(1u << (i % 8));
            tampered[j / 8] ^= static_cast<std::uint8_t>(1u << (j % 8));
            if (i == j) tampered[i / 8] ^= static_cast<std::uint8_t>(1u << (i % 8)); // re-flip: single
            ++cases;
            if (verify_frame(parse_frame(tampered), key, 5) == Verdict::Reject) ++rejected;
        }
    }
    REQUIRE(cases == nbits * (nbits - 1) / 2 + nbits);
    REQUIRE(rejected == cases);
}

TEST_CASE("verify_frame: wrong nonce misaligns the keystream", "[modbus][verify]") {
    const CipherKey key = test_key();
    const std::uint8_t payload[] = {0x01, 0x02, 0x03};
    const Frame sent = encrypt_crc(build_frame(0x02, 0x04, payload), key, 3);
    REQUIRE(verify_frame(sent, key, 4) == Verdict::Reject);
    REQUIRE(verify_frame(sent, key, 3) == Verdict::Accept);
}

TEST_CASE("build then verify through an identity keystream", "[modbus][verify]") {
    // Plain-path consistency: a frame whose CRC was never encrypted passes
    // verification when the keystream happens to be the identity transform.
    modbus::detail::FrameKeystream identity;
    identity.rule_x = dna::rule(1);
    identity.rule_y = dna::rule(1);
    identity.op = dna::Op::Xor;
    identity.mask = {0, 0};

    const std::uint8_t payload[] = {0x42};
    const Frame plain = build_frame(0x07, 0x05, payload);
    const std::uint16_t wire_crc = modbus::detail::transform_crc(plain.crc, identity, false);
    REQUIRE(wire_crc == plain.computed_crc());
}
