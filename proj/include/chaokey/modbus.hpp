#ifndef CHAOKEY_MODBUS_HPP
#define CHAOKEY_MODBUS_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "chaokey/errors.hpp"

namespace chaokey::modbus {

class FrameTooShortError : public FormatError {
public:
    using FormatError::FormatError;
};

class FrameTooLongError : public FormatError {
public:
    using FormatError::FormatError;
};

constexpr std::size_t max_frame_bytes = 256;
constexpr std::size_t max_data_bytes = max_frame_bytes - 4; // addr + fn + crc16

/// CRC-16/MODBUS: init 0xFFFF, reflected polynomial 0xA001, no final xor.
inline std::uint16_t crc16(std::span<const std::uint8_t> bytes) {
    std::uint16_t crc = 0xFFFF;
    for (std::uint8_t byte : bytes) {
        crc ^= byte;
        for (int bit = 0; bit < 8; ++bit) {
            if (crc & 0x0001)
                crc = static_cast<std::uint16_t>((crc >> 1) ^ 0xA001);
            else
                crc = static_cast<std::uint16_t>(crc >> 1);
        }
    }
    return crc;
}

/// RTU frame: address, function, payload, CRC-16 transmitted low byte first.
/// `crc` holds whatever is on the wire; it equals crc16(addr||fn||data) only
/// while the frame is in the plain state.
struct Frame {
    std::uint8_t address = 0;
    std::uint8_t function = 0;
    std::vector<std::uint8_t> data;
    std::uint16_t crc = 0;

    std::vector<std::uint8_t> body() const {
        std::vector<std::uint8_t> out;
        out.reserve(2 + data.size());
        out.push_back(address);
        out.push_back(function);
        out.insert(out.end(), data.begin(), data.end());
        return out;
    }

    std::uint16_t computed_crc() const {
        const auto b = body();
        return crc16(b);
    }
};

inline std::vector<std::uint8_t> to_bytes(const Frame& f) {
    std::vector<std::uint8_t> out = f.body();
    out.push_back(static_cast<std::uint8_t>(f.crc & 0xFF));
    out.push_back(static_cast<std::uint8_t>(f.crc >> 8));
    return out;
}

inline Frame parse_frame(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 4)
        throw FrameTooShortError("modbus frame needs at least 4 bytes");
    if (bytes.size() > max_frame_bytes)
        throw FrameTooLongError("modbus frame exceeds 256 bytes");
    Frame f;
    f.address = bytes[0];
    f.function = bytes[1];
    f.data.assign(bytes.begin() + 2, bytes.end() - 2);
    f.crc = static_cast<std::uint16_t>(bytes[bytes.size() - 2]) |
            static_cast<std::uint16_t>(bytes[bytes.size() - 1]) << 8;
    return f;
}

/// Assembles a frame and fills in its plain CRC.
inline Frame build_frame(std::uint8_t address, std::uint8_t function,
                         std::span<const std::uint8_t> data) {
    if (data.size() > max_data_bytes)
        throw FrameTooLongError("modbus payload exceeds 252 bytes");
    Frame f;
    f.address = address;
    f.function = function;
    f.data.assign(data.begin(), data.end());
    f.crc = f.computed_crc();
    return f;
}

} // namespace chaokey::modbus

#endif
