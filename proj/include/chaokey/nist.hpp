#ifndef CHAOKEY_NIST_HPP
#define CHAOKEY_NIST_HPP

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "chaokey/detail/gamma.hpp"
#include "chaokey/errors.hpp"

namespace chaokey::nist {

/// One SP 800-22 test outcome. pass <=> p >= 0.01; `applicable` is false when
/// a test's precondition failed (the p-value is then meaningless).
struct TestResult {
    std::string name;
    double p = 0.0;
    bool pass = false;
    bool applicable = true;
};

/// Frequency (monobit): p = erfc(|S| / sqrt(2n)) with S the +/-1 sum.
inline double monobit_p(std::span<const std::uint8_t> bits) {
    if (bits.size() < 100) throw InvalidArgError("monobit: need at least 100 bits");
    std::int64_t s = 0;
    for (std::uint8_t b : bits) s += b ? 1 : -1;
    const double n = static_cast<double>(bits.size());
    return std::erfc(std::fabs(static_cast<double>(s)) / std::sqrt(2.0 * n));
}

/// Block Frequency: chi-square of per-block one-proportions, M bits a block.
inline double block_frequency_p(std::span<const std::uint8_t> bits, std::size_t block_len = 128) {
    if (block_len < 2) throw InvalidArgError("block_frequency: block length too small");
    const std::size_t n_blocks = bits.size() / block_len;
    if (n_blocks < 1) throw InvalidArgError("block_frequency: sequence shorter than one block");

    double chi = 0.0;
    for (std::size_t b = 0; b < n_blocks; ++b) {
        std::size_t ones = 0;
        for (std::size_t i = 0; i < block_len; ++i) ones += bits[b * block_len + i];
        const double pi = static_cast<double>(ones) / static_cast<double>(block_len);
        chi += (pi - 0.5) * (pi - 0.5);
    }
    chi *= 4.0 * static_cast<double>(block_len);
    return detail::gamma_q(static_cast<double>(n_blocks) / 2.0, chi / 2.0);
}

/// Runs test. Applicable only when the monobit proportion passes the
/// |pi - 1/2| < 2/sqrt(n) prerequisite; returns applicable=false otherwise.
inline TestResult runs_test(std::span<const std::uint8_t> bits) {
    if (bits.size() < 100) throw InvalidArgError("runs: need at least 100 bits");
    const double n = static_cast<double>(bits.size());
    std::size_t ones = 0;
    for (std::uint8_t b : bits) ones += b;
    const double pi = static_cast<double>(ones) / n;

    TestResult res;
    res.name = "Runs";
    if (std::fabs(pi - 0.5) >= 2.0 / std::sqrt(n)) {
        res.applicable = false;
        res.p = 0.0;
        res.pass = false;
        return res;
    }

    std::uint64_t v = 1;
    for (std::size_t i = 1; i < bits.size(); ++i)
        if (bits[i] != bits[i - 1]) ++v;
    const double expected = 2.0 * n * pi * (1.0 - pi);
    res.p = std::erfc(std::fabs(static_cast<double>(v) - expected) /
                      (2.0 * std::sqrt(2.0 * n) * pi * (1.0 - pi)));
    res.pass = res.p >= 0.01;
    return res;
}

/// The three closed-form SP 800-22 tests: Frequency, Block Frequency (M=128)
/// and Runs. The remaining twelve are delegated to the official suite via
/// export_bits. Input is one byte per bit (0 or 1).
inline std::vector<TestResult> nist_subset(std::span<const std::uint8_t> bits) {
    if (bits.size() < 100000)
        throw InvalidArgError("nist_subset: need at least 10^5 bits");

    std::vector<TestResult> results;

    TestResult freq;
    freq.name = "Frequency";
    freq.p = monobit_p(bits);
    freq.pass = freq.p >= 0.01;
    results.push_back(freq);

    TestResult block;
    block.name = "Block Frequency";
    block.p = block_frequency_p(bits, 128);
    block.pass = block.p >= 0.01;
    results.push_back(block);

    results.push_back(runs_test(bits));
    return results;
}

/// Writes bits as ASCII '0'/'1' without separators, the format the official
/// test suite consumes directly.
inline void export_bits(std::span<const std::uint8_t> bits, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    std::string buf;
    buf.reserve(bits.size());
    for (std::uint8_t b : bits) buf.push_back(b ? '1' : '0');
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IoError("short write to " + path.string());
}

} // namespace chaokey::nist

#endif
