#ifndef CHAOKEY_MODBUS_CRYPT_HPP
#define CHAOKEY_MODBUS_CRYPT_HPP

#include <array>
#include <cstdint>

#include "chaokey/dna.hpp"
#include "chaokey/errors.hpp"
#include "chaokey/keystream.hpp"
#include "chaokey/modbus.hpp"

namespace chaokey::modbus {

enum class Verdict { Accept, Reject };

namespace detail {

// Keystream material for one frame. The nonce indexes the per-frame slot:
// rule/operator streams advance by one entry per frame, the byte mask by
// two. Nonce reuse hands two frames the same pad; keeping the counter
// monotone is the caller's contract.
struct FrameKeystream {
    dna::Rule rule_x{};
    dna::Rule rule_y{};
    dna::Op op{};
    std::array<std::uint8_t, 2> mask{};
};

inline FrameKeystream frame_keystream(const CipherKey& key, std::uint64_t nonce) {
    const std::size_t need = 2 * (static_cast<std::size_t>(nonce) + 1);
    const KeystreamSequences seq = generate_sequences(key, need);

    FrameKeystream ks;
    ks.rule_x = dna::rule(index_stream({&seq.x[nonce], 1}, 8, key.quantizer_scale)[0] + 1);
    ks.rule_y = dna::rule(index_stream({&seq.y[nonce], 1}, 8, key.quantizer_scale)[0] + 1);
    ks.op = static_cast<dna::Op>(index_stream({&seq.h[nonce], 1}, 3, key.quantizer_scale)[0]);
    ks.mask[0] = quantize_byte(seq.a[2 * nonce], key.quantizer_scale);
    ks.mask[1] = quantize_byte(seq.a[2 * nonce + 1], key.quantizer_scale);
    return ks;
}

// The 2-byte cousin of the image pipeline: encode with the X rule, combine
// with the Y-encoded mask under the H operator, decode with the X rule.
// A row-column permutation over 2 bytes would be vacuous and is omitted.
inline std::uint16_t transform_crc(std::uint16_t crc, const FrameKeystream& ks, bool forward) {
    const std::array<std::uint8_t, 2> in{static_cast<std::uint8_t>(crc & 0xFF),
                                         static_cast<std::uint8_t>(crc >> 8)};
    std::array<std::uint8_t, 2> out{};
    for (int i = 0; i < 2; ++i) {
        std::uint8_t acc = 0;
        for (int pair = 3; pair >= 0; --pair) {
            const std::uint8_t bits = (in[i] >> (2 * pair)) & 0x3;
            const std::uint8_t mbits = (ks.mask[i] >> (2 * pair)) & 0x3;
            const dna::Base b1 = ks.rule_x.to_base[bits];
            const dna::Base b2 = ks.rule_y.to_base[mbits];
            const dna::Op op = forward ? ks.op : dna::inverse_op(ks.op);
            const dna::Base cb = dna::op_base(b1, b2, op, ks.rule_x);
            acc = static_cast<std::uint8_t>(acc << 2) |
                  ks.rule_x.to_bits[static_cast<std::uint8_t>(cb)];
        }
        out[i] = acc;
    }
    return static_cast<std::uint16_t>(out[0]) |
           static_cast<std::uint16_t>(out[1]) << 8;
}

} // namespace detail

/// Replaces the frame's plain CRC with its DNA-encrypted form. Each frame
/// must use a fresh nonce (monotone per session, shared with the receiver).
inline Frame encrypt_crc(const Frame& frame, const CipherKey& key, std::uint64_t nonce) {
    if (frame.data.size() > max_data_bytes)
        throw InvalidArgError("encrypt_crc: oversized frame");
    Frame out = frame;
    out.crc = detail::transform_crc(frame.crc, detail::frame_keystream(key, nonce), true);
    return out;
}

/// Inverse of encrypt_crc under the same key and nonce.
inline Frame decrypt_crc(const Frame& frame, const CipherKey& key, std::uint64_t nonce) {
    if (frame.data.size() > max_data_bytes)
        throw InvalidArgError("decrypt_crc: oversized frame");
    Frame out = frame;
    out.crc = detail::transform_crc(frame.crc, detail::frame_keystream(key, nonce), false);
    return out;
}

/// Receiver side: decrypt the CRC field, recompute the CRC over the frame
/// body, Accept iff they agree. Reject is a value, not an error.
inline Verdict verify_frame(const Frame& frame, const CipherKey& key, std::uint64_t nonce) {
    const Frame plain = decrypt_crc(frame, key, nonce);
    return plain.crc == plain.computed_crc() ? Verdict::Accept : Verdict::Reject;
}

} // namespace chaokey::modbus

#endif
