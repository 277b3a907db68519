#ifndef CHAOKEY_DNA_HPP
#define CHAOKEY_DNA_HPP

#include <array>
#include <cstdint>

#include "chaokey/errors.hpp"

namespace chaokey::dna {

enum class Base : std::uint8_t { A = 0, C = 1, G = 2, T = 3 };

inline char base_letter(Base b) {
    constexpr const char* letters = "ACGT";
    return letters[static_cast<std::uint8_t>(b)];
}

inline Base complement(Base b) {
    switch (b) {
        case Base::A: return Base::T;
        case Base::T: return Base::A;
        case Base::C: return Base::G;
        default: return Base::C;
    }
}

/// One of the 8 complement-respecting encodings of 2-bit pairs into bases:
/// complementary bit pairs (00/11, 01/10) always land on Watson-Crick
/// complementary bases.
struct Rule {
    int rule_id;                      // 1..8
    std::array<Base, 4> to_base;      // bit pair -> base
    std::array<std::uint8_t, 4> to_bits; // base -> bit pair (index by Base)
};

namespace detail {

constexpr std::array<std::array<Base, 4>, 8> rule_bases = {{
    {Base::A, Base::C, Base::G, Base::T}, // rule 1
    {Base::A, Base::G, Base::C, Base::T}, // rule 2
    {Base::C, Base::A, Base::T, Base::G}, // rule 3
    {Base::C, Base::T, Base::A, Base::G}, // rule 4
    {Base::G, Base::A, Base::T, Base::C}, // rule 5
    {Base::G, Base::T, Base::A, Base::C}, // rule 6
    {Base::T, Base::C, Base::G, Base::A}, // rule 7
    {Base::T, Base::G, Base::C, Base::A}, // rule 8
}};

inline Rule make_rule(int id) {
    Rule r;
    r.rule_id = id;
    r.to_base = rule_bases[id - 1];
    for (std::uint8_t bits = 0; bits < 4; ++bits)
        r.to_bits[static_cast<std::uint8_t>(r.to_base[bits])] = bits;
    return r;
}

} // namespace detail

inline const Rule& rule(int rule_id) {
    if (rule_id < 1 || rule_id > 8)
        throw InvalidArgError("dna rule id must be in 1..8");
    static const std::array<Rule, 8> rules = [] {
        std::array<Rule, 8> out{};
        for (int id = 1; id <= 8; ++id) out[id - 1] = detail::make_rule(id);
        return out;
    }();
    return rules[rule_id - 1];
}

enum class Op : std::uint8_t { Add = 0, Sub = 1, Xor = 2 };

inline Op inverse_op(Op op) {
    switch (op) {
        case Op::Add: return Op::Sub;
        case Op::Sub: return Op::Add;
        default: return Op::Xor;
    }
}

/// 4x4 byte tile, row-major.
using ByteBlock = std::array<std::uint8_t, 16>;

/// A 4x4 pixel block in base space: 4 bases per byte, MSB pair first.
struct Block {
    std::array<Base, 64> bases;
    int rule_id = 1;
};

inline Block encode(const ByteBlock& bytes, const Rule& r) {
    Block out;
    out.rule_id = r.rule_id;
    for (std::size_t i = 0; i < 16; ++i) {
        const std::uint8_t v = bytes[i];
        out.bases[4 * i + 0] = r.to_base[(v >> 6) & 0x3];
        out.bases[4 * i + 1] = r.to_base[(v >> 4) & 0x3];
        out.bases[4 * i + 2] = r.to_base[(v >> 2) & 0x3];
        out.bases[4 * i + 3] = r.to_base[v & 0x3];
    }
    return out;
}

inline ByteBlock decode(const Block& block, const Rule& r) {
    ByteBlock out;
    for (std::size_t i = 0; i < 16; ++i) {
        std::uint8_t v = 0;
        for (std::size_t k = 0; k < 4; ++k) {
            v = static_cast<std::uint8_t>(v << 2);
            v |= r.to_bits[static_cast<std::uint8_t>(block.bases[4 * i + k])];
        }
        out[i] = v;
    }
    return out;
}

inline Base op_base(Base x, Base y, Op op, const Rule& r) {
    const std::uint8_t vx = r.to_bits[static_cast<std::uint8_t>(x)];
    const std::uint8_t vy = r.to_bits[static_cast<std::uint8_t>(y)];
    std::uint8_t v;
    switch (op) {
        case Op::Add: v = static_cast<std::uint8_t>((vx + vy) & 0x3); break;
        case Op::Sub: v = static_cast<std::uint8_t>((vx - vy) & 0x3); break;
        default: v = static_cast<std::uint8_t>(vx ^ vy); break;
    }
    return r.to_base[v];
}

/// Elementwise base arithmetic; base values are read through `r` (the rule of
/// the x operand in the cipher pipeline). Sub undoes Add, Add undoes Sub,
/// Xor undoes itself.
inline Block block_op(const Block& x, const Block& y, Op op, const Rule& r) {
    Block out;
    out.rule_id = x.rule_id;
    for (std::size_t i = 0; i < 64; ++i) out.bases[i] = op_base(x.bases[i], y.bases[i], op, r);
    return out;
}

} // namespace chaokey::dna

#endif
