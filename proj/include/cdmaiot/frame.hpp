#pragma once

// CDMA MAC frame: preamble | header | source address | payload | CRC.
//
// Bit layout (MSB first within each byte):
//   header   8 bits  (4-bit version, 4-bit payload length)
//   address  8 bits
//   payload  8 * len bits, len in [0, 15]
//   crc     16 bits  CRC-16/CCITT-FALSE over header, address and payload
// The bits are spread with the user's data code and prefixed by one
// un-modulated preamble code of `order` chips.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cdmaiot/codes.hpp"

namespace cdmaiot {

inline constexpr std::size_t kMaxPayloadBytes = 15;
inline constexpr std::uint8_t kFrameVersion = 0x1;
inline constexpr std::size_t kFrameOverheadBits = 32;

class TruncatedFrameError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct MacFrame {
    std::uint8_t version = kFrameVersion;
    std::uint8_t source_address = 0;
    std::vector<std::uint8_t> payload;
    std::uint16_t crc = 0;

    friend bool operator==(const MacFrame&, const MacFrame&) = default;
};

struct FrameConfig {
    int preamble_code_index = 63;
    int data_code_index = 22;
    int order = 64;

    /// Throws std::invalid_argument on a bad order, out-of-range index, or
    /// shared preamble/data index.
    void validate() const;
    [[nodiscard]] SpreadingCode preamble_code() const { return hadamard_code(order, preamble_code_index); }
    [[nodiscard]] SpreadingCode data_code() const { return hadamard_code(order, data_code_index); }
};

/// CRC-16/CCITT-FALSE: poly 0x1021, init 0xFFFF, no reflection, no final xor.
[[nodiscard]] std::uint16_t crc16(std::span<const std::uint8_t> bytes) noexcept;

/// True when the trailing two bytes (big-endian) are the CRC of the rest.
[[nodiscard]] bool crc16_check(std::span<const std::uint8_t> bytes_with_crc) noexcept;

/// Assembles a frame and fills in its CRC. Throws std::invalid_argument if the
/// payload is longer than 15 bytes.
[[nodiscard]] MacFrame make_frame(std::uint8_t address, std::span<const std::uint8_t> payload);

/// Header, address, payload and CRC as bytes (the on-air byte order).
[[nodiscard]] std::vector<std::uint8_t> frame_bytes(const MacFrame& frame);
[[nodiscard]] std::vector<Bit> frame_bits(const MacFrame& frame);

[[nodiscard]] std::size_t frame_bit_length(std::size_t payload_len) noexcept;
[[nodiscard]] std::size_t frame_chip_length(std::size_t payload_len, int order) noexcept;

[[nodiscard]] ChipSequence build_frame(std::uint8_t address, std::span<const std::uint8_t> payload,
                                       const FrameConfig& cfg);

struct ParsedFrame {
    MacFrame frame;
    bool crc_ok = false;
};

/// Reads the length field from the first soft values and parses the frame.
/// Extra trailing soft values are ignored. Throws TruncatedFrameError when
/// fewer than 32 values are given or the declared length needs more bits
/// than are available.
[[nodiscard]] ParsedFrame parse_frame(std::span<const double> soft_bits);

/// `ver:len:addr:payload:crc`, all lower-case hex, e.g. `1:2:2a:beef:02cb`.
[[nodiscard]] std::string to_hex_line(const MacFrame& frame);
/// Inverse of to_hex_line. Throws std::invalid_argument on malformed input.
[[nodiscard]] MacFrame from_hex_line(std::string_view line);

}  // namespace cdmaiot
