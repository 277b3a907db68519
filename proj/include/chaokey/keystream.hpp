#ifndef CHAOKEY_KEYSTREAM_HPP
#define CHAOKEY_KEYSTREAM_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <span>
#include <string>
#include <vector>

#include "chaokey/chen9.hpp"
#include "chaokey/errors.hpp"
#include "chaokey/image.hpp"
#include "chaokey/integrate.hpp"
#include "chaokey/modbus.hpp"

namespace chaokey {

/// Everything a decryptor needs. The key is derived from the plaintext image
/// (its mean feeds the initial conditions), so it cannot be recomputed from
/// ciphertext: the serialized key file is the secret, carried out of band.
struct CipherKey {
    SystemParams params{27.0, 23.0, 1.0};
    State9 init{};
    std::array<int, 6> seq_indices{0, 1, 2, 4, 5, 8}; // A, X, Y, H, V, M
    std::int64_t transient_steps = 50000;
    double dt = 1e-3;
    std::int64_t quantizer_scale = 10000;

    void validate() const {
        params.validate();
        if (!(dt > 0.0)) throw InvalidArgError("key: dt must be > 0");
        if (transient_steps < 0) throw InvalidArgError("key: negative transient");
        if (quantizer_scale < 1) throw InvalidArgError("key: quantizer scale must be >= 1");
        std::array<bool, 9> seen{};
        for (int idx : seq_indices) {
            if (idx < 0 || idx > 8) throw InvalidArgError("key: sequence index out of range");
            if (seen[idx]) throw InvalidArgError("key: sequence indices must be distinct");
            seen[idx] = true;
        }
    }

    bool operator==(const CipherKey&) const = default;
};

/// The six chaotic sequences in their conventional roles: A feeds the byte
/// mask, X and Y pick coding rules, H picks the operator, V and M order rows
/// and columns.
struct KeystreamSequences {
    std::vector<double> a, x, y, h, v, m;
};

namespace detail {

inline double frac(double v) { return v - std::floor(v); }

} // namespace detail

/// Derives a key from the image's mean pixel value, optionally stirred with
/// a user seed. Components are spread by i*0.0101 so all nine initial
/// conditions differ; exact zeros are replaced by 0.5.
inline CipherKey derive_key(const RgbImage& image,
                            std::span<const std::uint8_t> user_seed = {}) {
    if (image.empty()) throw InvalidArgError("derive_key: empty image");

    std::uint64_t sum = 0;
    for (const auto& plane : image.ch)
        sum = std::accumulate(plane.begin(), plane.end(), sum,
                              [](std::uint64_t acc, std::uint8_t v) { return acc + v; });
    const double mean = static_cast<double>(sum) / (3.0 * static_cast<double>(image.pixels()));

    CipherKey key;
    for (int i = 1; i <= 9; ++i) {
        double u = detail::frac(mean / 255.0 + static_cast<double>(i) * 0.0101);
        if (!user_seed.empty()) {
            const std::uint8_t sb = user_seed[static_cast<std::size_t>(i - 1) % user_seed.size()];
            u = detail::frac(u + static_cast<double>(sb) / 256.0);
        }
        if (u == 0.0) u = 0.5;
        key.init[i - 1] = u;
    }
    return key;
}

/// Integrates the key's system through its transient, then collects `len`
/// post-transient values of each selected component. Matches simulate()
/// sample-for-sample (same stepper, same ordering), streamed to avoid
/// holding a full 9-column trajectory.
inline KeystreamSequences generate_sequences(const CipherKey& key, std::size_t len) {
    if (len == 0) throw InvalidArgError("generate_sequences: len must be > 0");
    key.validate();

    const Chen9System sys{key.params};
    State9 s = key.init;
    for (std::int64_t k = 0; k < key.transient_steps; ++k) {
        s = rk4_step(sys, s, key.dt);
        if (!all_finite(s)) throw NonFiniteError("generate_sequences: trajectory diverged");
    }

    KeystreamSequences seq;
    for (auto* v : {&seq.a, &seq.x, &seq.y, &seq.h, &seq.v, &seq.m}) v->reserve(len);
    for (std::size_t k = 0; k < len; ++k) {
        s = rk4_step(sys, s, key.dt);
        if (!all_finite(s)) throw NonFiniteError("generate_sequences: trajectory diverged");
        seq.a.push_back(s[key.seq_indices[0]]);
        seq.x.push_back(s[key.seq_indices[1]]);
        seq.y.push_back(s[key.seq_indices[2]]);
        seq.h.push_back(s[key.seq_indices[3]]);
        seq.v.push_back(s[key.seq_indices[4]]);
        seq.m.push_back(s[key.seq_indices[5]]);
    }
    return seq;
}

/// byte = floor(frac(|x| * scale) * 256), clamped to 255. The scale pushes
/// the fractional part deep into the mantissa where the invariant measure
/// is effectively uniform.
inline std::uint8_t quantize_byte(double x, std::int64_t scale = 10000) {
    const double v = std::fabs(x) * static_cast<double>(scale);
    const double f = v - std::floor(v);
    int b = static_cast<int>(f * 256.0);
    if (b > 255) b = 255;
    return static_cast<std::uint8_t>(b);
}

inline std::vector<std::uint8_t> quantize_bytes(std::span<const double> x,
                                                std::int64_t scale = 10000) {
    std::vector<std::uint8_t> out;
    out.reserve(x.size());
    for (double v : x) out.push_back(quantize_byte(v, scale));
    return out;
}

/// 8 bits per value, most-significant-first, as 0/1 bytes.
inline std::vector<std::uint8_t> quantize_bits(std::span<const double> x,
                                               std::int64_t scale = 10000) {
    std::vector<std::uint8_t> bits;
    bits.reserve(x.size() * 8);
    for (double v : x) {
        const std::uint8_t byte = quantize_byte(v, scale);
        for (int k = 7; k >= 0; --k) bits.push_back((byte >> k) & 1);
    }
    return bits;
}

/// An argsort: indices[k] is the position of the k-th smallest element.
/// Stable, so equal values keep their original order — both sides of the
/// cipher must break ties identically or permuted data cannot be restored.
struct Permutation {
    std::vector<std::uint32_t> indices;

    std::size_t size() const { return indices.size(); }

    /// Inverse permutation: inverse()[indices[k]] == k.
    Permutation inverse() const {
        Permutation inv;
        inv.indices.resize(indices.size());
        for (std::uint32_t k = 0; k < indices.size(); ++k) inv.indices[indices[k]] = k;
        return inv;
    }

    /// Gather: out[k] = in[indices[k]].
    template <typename T>
    std::vector<T> apply(const std::vector<T>& in) const {
        std::vector<T> out(in.size());
        for (std::size_t k = 0; k < indices.size(); ++k) out[k] = in[indices[k]];
        return out;
    }
};

inline Permutation sort_permutation(std::span<const double> x) {
    if (x.empty()) throw InvalidArgError("sort_permutation: empty sequence");
    Permutation perm;
    perm.indices.resize(x.size());
    std::iota(perm.indices.begin(), perm.indices.end(), 0u);
    std::stable_sort(perm.indices.begin(), perm.indices.end(),
                     [&](std::uint32_t i, std::uint32_t j) { return x[i] < x[j]; });
    return perm;
}

/// Quantized values reduced mod m; m=8 selects DNA rules, m=3 operators.
inline std::vector<std::uint8_t> index_stream(std::span<const double> x, int m,
                                              std::int64_t scale = 10000) {
    if (m < 1) throw InvalidArgError("index_stream: m must be >= 1");
    std::vector<std::uint8_t> out;
    out.reserve(x.size());
    for (double v : x)
        out.push_back(static_cast<std::uint8_t>(quantize_byte(v, scale) % m));
    return out;
}

// --- key file -------------------------------------------------------------
//
// Flat text, one name=value per line, floats printed with 17 significant
// digits (lossless for doubles). The final line holds a CRC-16/MODBUS of all
// preceding bytes, newlines included.

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& s) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw FormatError("key file: bad float '" + s + "'");
        return v;
    } catch (const std::logic_error&) {
        throw FormatError("key file: bad float '" + s + "'");
    }
}

inline std::int64_t parse_int(const std::string& s) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(s, &pos);
        if (pos != s.size()) throw FormatError("key file: bad integer '" + s + "'");
        return v;
    } catch (const std::logic_error&) {
        throw FormatError("key file: bad integer '" + s + "'");
    }
}

} // namespace detail

inline std::string serialize_key(const CipherKey& key) {
    std::ostringstream out;
    out << "format=chaokey-1\n";
    out << "a=" << detail::format_double(key.params.a) << "\n";
    out << "b=" << detail::format_double(key.params.b) << "\n";
    out << "c=" << detail::format_double(key.params.c) << "\n";
    for (int i = 0; i < 9; ++i)
        out << "u" << (i + 1) << "=" << detail::format_double(key.init[i]) << "\n";
    out << "seq_indices=";
    for (int i = 0; i < 6; ++i) out << key.seq_indices[i] << (i < 5 ? "," : "\n");
    out << "transient_steps=" << key.transient_steps << "\n";
    out << "dt=" << detail::format_double(key.dt) << "\n";
    out << "quantizer_scale=" << key.quantizer_scale << "\n";

    const std::string body = out.str();
    const std::uint16_t crc = modbus::crc16(
        {reinterpret_cast<const std::uint8_t*>(body.data()), body.size()});
    char crcbuf[8];
    std::snprintf(crcbuf, sizeof(crcbuf), "%04X", crc);
    return body + "checksum=" + crcbuf + "\n";
}

inline CipherKey parse_key(const std::string& text) {
    const std::size_t crc_pos = text.rfind("checksum=");
    if (crc_pos == std::string::npos)
        throw FormatError("key file: missing checksum line");
    const std::string body = text.substr(0, crc_pos);
    std::string crc_line = text.substr(crc_pos);
    while (!crc_line.empty() && (crc_line.back() == '\n' || crc_line.back() == '\r'))
        crc_line.pop_back();

    const std::uint16_t expected = modbus::crc16(
        {reinterpret_cast<const std::uint8_t*>(body.data()), body.size()});
    char crcbuf[8];
    std::snprintf(crcbuf, sizeof(crcbuf), "%04X", expected);
    if (crc_line != std::string("checksum=") + crcbuf)
        throw FormatError("key file: checksum mismatch");

    CipherKey key;
    std::array<bool, 9> have_init{};
    bool have_format = false;

    std::istringstream stream(body);
    std::string line;
    while (std::getline(stream, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) throw FormatError("key file: malformed line '" + line + "'");
        const std::string name = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);

        if (name == "format") {
            if (value != "chaokey-1") throw FormatError("key file: unknown format " + value);
            have_format = true;
        } else if (name == "a") key.params.a = detail::parse_double(value);
        else if (name == "b") key.params.b = detail::parse_double(value);
        else if (name == "c") key.params.c = detail::parse_double(value);
        else if (name.size() == 2 && name[0] == 'u' && name[1] >= '1' && name[1] <= '9') {
            const int i = name[1] - '1';
            key.init[i] = detail::parse_double(value);
            have_init[i] = true;
        } else if (name == "seq_indices") {
            std::istringstream vs(value);
            std::string tok;
            int i = 0;
            while (std::getline(vs, tok, ',')) {
                if (i >= 6) throw FormatError("key file: too many sequence indices");
                key.seq_indices[i++] = static_cast<int>(detail::parse_int(tok));
            }
            if (i != 6) throw FormatError("key file: expected 6 sequence indices");
        } else if (name == "transient_steps") key.transient_steps = detail::parse_int(value);
        else if (name == "dt") key.dt = detail::parse_double(value);
        else if (name == "quantizer_scale") key.quantizer_scale = detail::parse_int(value);
        else throw FormatError("key file: unknown field '" + name + "'");
    }

    if (!have_format) throw FormatError("key file: missing format line");
    for (bool h : have_init)
        if (!h) throw FormatError("key file: missing initial condition");
    try {
        key.validate();
    } catch (const InvalidArgError& e) {
        throw FormatError(std::string("key file: ") + e.what());
    }
    return key;
}

inline void save_key(const std::filesystem::path& path, const CipherKey& key) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write key file " + path.string());
    out << serialize_key(key);
    if (!out) throw IoError("short write to key file " + path.string());
}

inline CipherKey load_key(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read key file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_key(buf.str());
}

} // namespace chaokey

#endif
