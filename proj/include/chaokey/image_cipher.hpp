#ifndef CHAOKEY_IMAGE_CIPHER_HPP
#define CHAOKEY_IMAGE_CIPHER_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <vector>

#include "chaokey/dna.hpp"
#include "chaokey/errors.hpp"
#include "chaokey/image.hpp"
#include "chaokey/keystream.hpp"

namespace chaokey {

struct Rect {
    std::uint32_t x = 0, y = 0, w = 0, h = 0;
    bool operator==(const Rect&) const = default;
};

inline std::uint32_t pad4(std::uint32_t v) { return (v + 3u) / 4u * 4u; }

/// Encrypted channel planes at padded dimensions, plus enough metadata to
/// crop the zero fill back out after decryption. Padding cannot be dropped
/// from the ciphertext itself: the permutation step mixes it into the body.
struct CipherImage {
    std::uint8_t version = 1;
    Rect region;              // selected sub-image within the original
    std::uint32_t orig_w = 0; // original image dimensions
    std::uint32_t orig_h = 0;
    std::array<std::vector<std::uint8_t>, 3> ch; // padded planes, row-major

    std::uint32_t padded_w() const { return pad4(region.w); }
    std::uint32_t padded_h() const { return pad4(region.h); }
    std::size_t plane_size() const {
        return static_cast<std::size_t>(padded_w()) * padded_h();
    }

    bool operator==(const CipherImage&) const = default;
};

namespace cipher_detail {

// One padded channel plane, row-major bytes.
struct Plane {
    std::uint32_t w = 0, h = 0;
    std::vector<std::uint8_t> bytes;

    std::uint8_t& at(std::uint32_t col, std::uint32_t row) {
        return bytes[static_cast<std::size_t>(row) * w + col];
    }
    std::uint8_t at(std::uint32_t col, std::uint32_t row) const {
        return bytes[static_cast<std::size_t>(row) * w + col];
    }
};

inline dna::ByteBlock get_block(const Plane& p, std::uint32_t bx, std::uint32_t by) {
    dna::ByteBlock blk;
    for (std::uint32_t r = 0; r < 4; ++r)
        for (std::uint32_t c = 0; c < 4; ++c)
            blk[r * 4 + c] = p.at(bx * 4 + c, by * 4 + r);
    return blk;
}

inline void set_block(Plane& p, std::uint32_t bx, std::uint32_t by,
                      const dna::ByteBlock& blk) {
    for (std::uint32_t r = 0; r < 4; ++r)
        for (std::uint32_t c = 0; c < 4; ++c)
            p.at(bx * 4 + c, by * 4 + r) = blk[r * 4 + c];
}

// Derived streams every byte of the pipeline agrees on. Both sides consume
// identical offsets: A in channel-consecutive plane segments, X/Y/H one
// entry per 4x4 block in row-major block order, V/M once for all channels.
struct DerivedStreams {
    std::vector<std::uint8_t> mask;   // quantized A
    std::vector<std::uint8_t> xrule;  // per block, 0..7
    std::vector<std::uint8_t> yrule;
    std::vector<std::uint8_t> hop;    // per block, 0..2
    Permutation rows;
    Permutation cols;
};

inline DerivedStreams derive_streams(const KeystreamSequences& seq, std::uint32_t pw,
                                     std::uint32_t ph, std::int64_t scale) {
    const std::size_t plane = static_cast<std::size_t>(pw) * ph;
    const std::size_t blocks = plane / 16;
    if (seq.a.size() < 3 * plane || seq.x.size() < 3 * blocks ||
        seq.y.size() < 3 * blocks || seq.h.size() < 3 * blocks ||
        seq.v.size() < ph || seq.m.size() < pw)
        throw InvalidArgError("cipher: keystream sequences too short for image");

    DerivedStreams out;
    out.mask = quantize_bytes({seq.a.data(), 3 * plane}, scale);
    out.xrule = index_stream({seq.x.data(), 3 * blocks}, 8, scale);
    out.yrule = index_stream({seq.y.data(), 3 * blocks}, 8, scale);
    out.hop = index_stream({seq.h.data(), 3 * blocks}, 3, scale);
    out.rows = sort_permutation({seq.v.data(), ph});
    out.cols = sort_permutation({seq.m.data(), pw});
    return out;
}

inline Plane permute_forward(const Plane& in, const Permutation& rows,
                             const Permutation& cols) {
    Plane out{in.w, in.h, std::vector<std::uint8_t>(in.bytes.size())};
    for (std::uint32_t r = 0; r < in.h; ++r)
        for (std::uint32_t c = 0; c < in.w; ++c)
            out.at(c, r) = in.at(cols.indices[c], rows.indices[r]);
    return out;
}

inline Plane permute_inverse(const Plane& in, const Permutation& rows,
                             const Permutation& cols) {
    Plane out{in.w, in.h, std::vector<std::uint8_t>(in.bytes.size())};
    for (std::uint32_t r = 0; r < in.h; ++r)
        for (std::uint32_t c = 0; c < in.w; ++c)
            out.at(cols.indices[c], rows.indices[r]) = in.at(c, r);
    return out;
}

/// Forward DNA stage of one channel: encode with the X rule, combine with the
/// encoded mask block under the H operator, decode with the X rule, then
/// apply the V/M row-column permutation.
inline Plane encrypt_plane(const Plane& a1, const DerivedStreams& ks, int channel) {
    const std::uint32_t bw = a1.w / 4, bh = a1.h / 4;
    const std::size_t plane = static_cast<std::size_t>(a1.w) * a1.h;
    const std::size_t nb = static_cast<std::size_t>(bw) * bh;
    const std::size_t mask_base = static_cast<std::size_t>(channel) * plane;
    const std::size_t block_base = static_cast<std::size_t>(channel) * nb;

    Plane a2{a1.w, a1.h,
             std::vector<std::uint8_t>(ks.mask.begin() + mask_base,
                                       ks.mask.begin() + mask_base + plane)};
    Plane out{a1.w, a1.h, std::vector<std::uint8_t>(plane)};

    for (std::uint32_t by = 0; by < bh; ++by)
        for (std::uint32_t bx = 0; bx < bw; ++bx) {
            const std::size_t g = block_base + static_cast<std::size_t>(by) * bw + bx;
            const dna::Rule& rx = dna::rule(ks.xrule[g] + 1);
            const dna::Rule& ry = dna::rule(ks.yrule[g] + 1);
            const dna::Op op = static_cast<dna::Op>(ks.hop[g]);

            const dna::Block b1 = dna::encode(get_block(a1, bx, by), rx);
            const dna::Block b2 = dna::encode(get_block(a2, bx, by), ry);
            const dna::Block c1 = dna::block_op(b1, b2, op, rx);
            set_block(out, bx, by, dna::decode(c1, rx));
        }

    return permute_forward(out, ks.rows, ks.cols);
}

inline Plane decrypt_plane(const Plane& cipher, const DerivedStreams& ks, int channel) {
    const Plane unpermuted = permute_inverse(cipher, ks.rows, ks.cols);
    const std::uint32_t bw = cipher.w / 4, bh = cipher.h / 4;
    const std::size_t plane = static_cast<std::size_t>(cipher.w) * cipher.h;
    const std::size_t nb = static_cast<std::size_t>(bw) * bh;
    const std::size_t mask_base = static_cast<std::size_t>(channel) * plane;
    const std::size_t block_base = static_cast<std::size_t>(channel) * nb;

    Plane a2{cipher.w, cipher.h,
             std::vector<std::uint8_t>(ks.mask.begin() + mask_base,
                                       ks.mask.begin() + mask_base + plane)};
    Plane out{cipher.w, cipher.h, std::vector<std::uint8_t>(plane)};

    for (std::uint32_t by = 0; by < bh; ++by)
        for (std::uint32_t bx = 0; bx < bw; ++bx) {
            const std::size_t g = block_base + static_cast<std::size_t>(by) * bw + bx;
            const dna::Rule& rx = dna::rule(ks.xrule[g] + 1);
            const dna::Rule& ry = dna::rule(ks.yrule[g] + 1);
            const dna::Op op = static_cast<dna::Op>(ks.hop[g]);

            const dna::Block c1 = dna::encode(get_block(unpermuted, bx, by), rx);
            const dna::Block b2 = dna::encode(get_block(a2, bx, by), ry);
            const dna::Block b1 = dna::block_op(c1, b2, dna::inverse_op(op), rx);
            set_block(out, bx, by, dna::decode(b1, rx));
        }
    return out;
}

} // namespace cipher_detail

inline Rect full_region(const RgbImage& img) { return Rect{0, 0, img.width, img.height}; }

inline void validate_region(const Rect& region, std::uint32_t w, std::uint32_t h) {
    if (region.w == 0 || region.h == 0)
        throw InvalidArgError("cipher: empty region");
    if (region.x > w || region.y > h ||
        static_cast<std::uint64_t>(region.x) + region.w > w ||
        static_cast<std::uint64_t>(region.y) + region.h > h)
        throw InvalidArgError("cipher: region outside image bounds");
}

/// Encrypts the selected region (default: whole image). Channels R, G, B are
/// processed in order against channel-consecutive keystream segments.
inline CipherImage encrypt_image(const RgbImage& img, const CipherKey& key,
                                 std::optional<Rect> region_opt = std::nullopt) {
    if (img.empty()) throw InvalidArgError("encrypt_image: empty image");
    const Rect region = region_opt.value_or(full_region(img));
    validate_region(region, img.width, img.height);
    key.validate();

    const std::uint32_t pw = pad4(region.w), ph = pad4(region.h);
    const std::size_t plane = static_cast<std::size_t>(pw) * ph;

    const KeystreamSequences seq = generate_sequences(key, 3 * plane);
    const auto streams = cipher_detail::derive_streams(seq, pw, ph, key.quantizer_scale);

    CipherImage out;
    out.region = region;
    out.orig_w = img.width;
    out.orig_h = img.height;

    for (int c = 0; c < 3; ++c) {
        cipher_detail::Plane a1{pw, ph, std::vector<std::uint8_t>(plane, 0)};
        for (std::uint32_t r = 0; r < region.h; ++r)
            for (std::uint32_t col = 0; col < region.w; ++col)
                a1.at(col, r) = img.at(c, region.x + col, region.y + r);
        out.ch[c] = cipher_detail::encrypt_plane(a1, streams, c).bytes;
    }
    return out;
}

/// Exact inverse of encrypt_image under the same key: returns the selected
/// region as an image, zero fill cropped away. A wrong key is not detected;
/// the output is simply garbage.
inline RgbImage decrypt_image(const CipherImage& cipher, const CipherKey& key) {
    key.validate();
    const std::uint32_t pw = cipher.padded_w(), ph = cipher.padded_h();
    const std::size_t plane = cipher.plane_size();
    for (const auto& c : cipher.ch)
        if (c.size() != plane) throw FormatError("cipher image: channel size mismatch");

    const KeystreamSequences seq = generate_sequences(key, 3 * plane);
    const auto streams = cipher_detail::derive_streams(seq, pw, ph, key.quantizer_scale);

    RgbImage out(cipher.region.w, cipher.region.h);
    for (int c = 0; c < 3; ++c) {
        const cipher_detail::Plane enc{pw, ph, cipher.ch[c]};
        const cipher_detail::Plane plain = cipher_detail::decrypt_plane(enc, streams, c);
        for (std::uint32_t r = 0; r < cipher.region.h; ++r)
            for (std::uint32_t col = 0; col < cipher.region.w; ++col)
                out.at(c, col, r) = plain.at(col, r);
    }
    return out;
}

// --- container format -------------------------------------------------------
//
// magic 'CHK1', version u8, region x/y/w/h u32le, original w/h u32le,
// then three channel planes row-major, padded_h*padded_w bytes each.

namespace cipher_detail {

inline void put_u32le(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xFF));
}

inline std::uint32_t get_u32le(std::span<const std::uint8_t> in, std::size_t pos) {
    return static_cast<std::uint32_t>(in[pos]) |
           static_cast<std::uint32_t>(in[pos + 1]) << 8 |
           static_cast<std::uint32_t>(in[pos + 2]) << 16 |
           static_cast<std::uint32_t>(in[pos + 3]) << 24;
}

constexpr std::size_t header_bytes = 4 + 1 + 6 * 4;
constexpr std::size_t max_plane_pixels = std::size_t{1} << 28;

} // namespace cipher_detail

inline std::vector<std::uint8_t> serialize_cipher(const CipherImage& img) {
    std::vector<std::uint8_t> out;
    out.reserve(cipher_detail::header_bytes + 3 * img.plane_size());
    out.push_back('C');
    out.push_back('H');
    out.push_back('K');
    out.push_back('1');
    out.push_back(img.version);
    cipher_detail::put_u32le(out, img.region.x);
    cipher_detail::put_u32le(out, img.region.y);
    cipher_detail::put_u32le(out, img.region.w);
    cipher_detail::put_u32le(out, img.region.h);
    cipher_detail::put_u32le(out, img.orig_w);
    cipher_detail::put_u32le(out, img.orig_h);
    for (const auto& c : img.ch) out.insert(out.end(), c.begin(), c.end());
    return out;
}

inline CipherImage parse_cipher(std::span<const std::uint8_t> bytes) {
    using namespace cipher_detail;
    if (bytes.size() < header_bytes) throw FormatError("cipher container: truncated header");
    if (bytes[0] != 'C' || bytes[1] != 'H' || bytes[2] != 'K' || bytes[3] != '1')
        throw FormatError("cipher container: bad magic");

    CipherImage img;
    img.version = bytes[4];
    if (img.version != 1) throw FormatError("cipher container: unsupported version");
    img.region.x = get_u32le(bytes, 5);
    img.region.y = get_u32le(bytes, 9);
    img.region.w = get_u32le(bytes, 13);
    img.region.h = get_u32le(bytes, 17);
    img.orig_w = get_u32le(bytes, 21);
    img.orig_h = get_u32le(bytes, 25);

    if (img.region.w == 0 || img.region.h == 0)
        throw FormatError("cipher container: empty region");
    if (static_cast<std::uint64_t>(img.region.x) + img.region.w > img.orig_w ||
        static_cast<std::uint64_t>(img.region.y) + img.region.h > img.orig_h)
        throw FormatError("cipher container: region outside original bounds");

    const std::uint64_t plane =
        static_cast<std::uint64_t>(pad4(img.region.w)) * pad4(img.region.h);
    if (plane > max_plane_pixels)
        throw FormatError("cipher container: implausible dimensions");
    if (bytes.size() != header_bytes + 3 * plane)
        throw FormatError("cipher container: size mismatch (truncated or trailing data)");

    std::size_t pos = header_bytes;
    for (auto& c : img.ch) {
        c.assign(bytes.begin() + pos, bytes.begin() + pos + plane);
        pos += plane;
    }
    return img;
}

inline void save_cipher(const std::filesystem::path& path, const CipherImage& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    const auto bytes = serialize_cipher(img);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write to " + path.string());
}

inline CipherImage load_cipher(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return parse_cipher(bytes);
}

} // namespace chaokey

#endif
