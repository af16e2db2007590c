#include "cdmaiot/frame.hpp"

#include <array>
#include <charconv>
#include <cstdio>

namespace cdmaiot {

namespace {

constexpr std::array<std::uint16_t, 256> make_crc_table() {
    std::array<std::uint16_t, 256> table{};
    for (unsigned i = 0; i < 256; ++i) {
        auto crc = static_cast<std::uint16_t>(i << 8);
        for (int k = 0; k < 8; ++k) {
            crc = (crc & 0x8000U) ? static_cast<std::uint16_t>((crc << 1) ^ 0x1021U)
                                  : static_cast<std::uint16_t>(crc << 1);
        }
        table[i] = crc;
    }
    return table;
}

constexpr auto kCrcTable = make_crc_table();

std::uint8_t decide_byte(std::span<const double> soft, std::size_t first_bit) {
    std::uint8_t value = 0;
    for (std::size_t i = 0; i < 8; ++i) {
        value = static_cast<std::uint8_t>((value << 1) | (soft[first_bit + i] < 0.0 ? 1U : 0U));
    }
    return value;
}

std::uint64_t parse_hex(std::string_view field, std::string_view what) {
    std::uint64_t value = 0;
    const auto* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, value, 16);
    if (field.empty() || ec != std::errc{} || ptr != end) {
        throw std::invalid_argument("from_hex_line: bad " + std::string(what) + " field '" + std::string(field) + "'");
    }
    return value;
}

}  // namespace

void FrameConfig::validate() const {
    if (order < 2 || order > 1024 || !is_power_of_two(order)) {
        throw std::invalid_argument("FrameConfig: order must be a power of two in [2, 1024]");
    }
    if (preamble_code_index < 0 || preamble_code_index >= order || data_code_index < 0 ||
        data_code_index >= order) {
        throw std::invalid_argument("FrameConfig: code index out of range");
    }
    if (preamble_code_index == data_code_index) {
        throw std::invalid_argument("FrameConfig: preamble and data code indices must differ");
    }
}

std::uint16_t crc16(std::span<const std::uint8_t> bytes) noexcept {
    std::uint16_t crc = 0xFFFF;
    for (const auto byte : bytes) {
        crc = static_cast<std::uint16_t>((crc << 8) ^ kCrcTable[((crc >> 8) ^ byte) & 0xFFU]);
    }
    return crc;
}

bool crc16_check(std::span<const std::uint8_t> bytes_with_crc) noexcept {
    if (bytes_with_crc.size() < 2) return false;
    const auto n = bytes_with_crc.size();
    const auto received = static_cast<std::uint16_t>((bytes_with_crc[n - 2] << 8) | bytes_with_crc[n - 1]);
    return crc16(bytes_with_crc.first(n - 2)) == received;
}

MacFrame make_frame(std::uint8_t address, std::span<const std::uint8_t> payload) {
    if (payload.size() > kMaxPayloadBytes) {
        throw std::invalid_argument("payload of " + std::to_string(payload.size()) + " bytes exceeds the " +
                                    std::to_string(kMaxPayloadBytes) + "-byte limit");
    }
    MacFrame frame{kFrameVersion, address, {payload.begin(), payload.end()}, 0};
    auto bytes = frame_bytes(frame);
    frame.crc = crc16(std::span(bytes).first(bytes.size() - 2));
    return frame;
}

std::vector<std::uint8_t> frame_bytes(const MacFrame& frame) {
    std::vector<std::uint8_t> bytes;
    bytes.reserve(frame.payload.size() + 4);
    bytes.push_back(static_cast<std::uint8_t>(((frame.version & 0x0FU) << 4) | (frame.payload.size() & 0x0FU)));
    bytes.push_back(frame.source_address);
    bytes.insert(bytes.end(), frame.payload.begin(), frame.payload.end());
    bytes.push_back(static_cast<std::uint8_t>(frame.crc >> 8));
    bytes.push_back(static_cast<std::uint8_t>(frame.crc & 0xFFU));
    return bytes;
}

std::vector<Bit> frame_bits(const MacFrame& frame) {
    const auto bytes = frame_bytes(frame);
    std::vector<Bit> bits;
    bits.reserve(bytes.size() * 8);
    for (const auto byte : bytes) {
        for (int i = 7; i >= 0; --i) bits.push_back(static_cast<Bit>((byte >> i) & 1U));
    }
    return bits;
}

std::size_t frame_bit_length(std::size_t payload_len) noexcept { return kFrameOverheadBits + 8 * payload_len; }

std::size_t frame_chip_length(std::size_t payload_len, int order) noexcept {
    const auto n = static_cast<std::size_t>(order);
    return n + frame_bit_length(payload_len) * n;
}

ChipSequence build_frame(std::uint8_t address, std::span<const std::uint8_t> payload, const FrameConfig& cfg) {
    cfg.validate();
    const auto frame = make_frame(address, payload);
    const auto preamble = cfg.preamble_code();
    const auto data = cfg.data_code();

    ChipSequence out;
    out.samples.reserve(frame_chip_length(payload.size(), cfg.order));
    for (const auto chip : preamble.chips) out.samples.push_back(chip);
    const auto bits = frame_bits(frame);
    spread_into(bits, data, out.samples);
    return out;
}

ParsedFrame parse_frame(std::span<const double> soft_bits) {
    if (soft_bits.size() < kFrameOverheadBits) {
        throw TruncatedFrameError("parse_frame: " + std::to_string(soft_bits.size()) +
                                  " soft values, need at least " + std::to_string(kFrameOverheadBits));
    }
    const auto header = decide_byte(soft_bits, 0);
    const std::size_t len = header & 0x0FU;
    const std::size_t needed = frame_bit_length(len);
    if (soft_bits.size() < needed) {
        throw TruncatedFrameError("parse_frame: header declares " + std::to_string(len) + " payload bytes (" +
                                  std::to_string(needed) + " bits), only " + std::to_string(soft_bits.size()) +
                                  " available");
    }

    ParsedFrame out;
    out.frame.version = static_cast<std::uint8_t>(header >> 4);
    out.frame.source_address = decide_byte(soft_bits, 8);
    out.frame.payload.resize(len);
    for (std::size_t i = 0; i < len; ++i) out.frame.payload[i] = decide_byte(soft_bits, 16 + 8 * i);
    const std::size_t crc_at = 16 + 8 * len;
    out.frame.crc = static_cast<std::uint16_t>((decide_byte(soft_bits, crc_at) << 8) |
                                               decide_byte(soft_bits, crc_at + 8));

    const auto bytes = frame_bytes(out.frame);
    out.crc_ok = crc16_check(bytes);
    return out;
}

std::string to_hex_line(const MacFrame& frame) {
    std::string line;
    char buf[8];
    std::snprintf(buf, sizeof buf, "%x:%x:", frame.version & 0x0FU, static_cast<unsigned>(frame.payload.size()));
    line += buf;
    std::snprintf(buf, sizeof buf, "%02x:", frame.source_address);
    line += buf;
    for (const auto byte : frame.payload) {
        std::snprintf(buf, sizeof buf, "%02x", byte);
        line += buf;
    }
    std::snprintf(buf, sizeof buf, ":%04x", frame.crc);
    line += buf;
    return line;
}

MacFrame from_hex_line(std::string_view line) {
    std::array<std::string_view, 5> fields;
    std::size_t start = 0;
    for (std::size_t f = 0; f < fields.size(); ++f) {
        const auto colon = line.find(':', start);
        const bool last = f + 1 == fields.size();
        if (last != (colon == std::string_view::npos)) {
            throw std::invalid_argument("from_hex_line: expected 5 colon-separated fields");
        }
        fields[f] = line.substr(start, last ? std::string_view::npos : colon - start);
        start = colon + 1;
    }

    MacFrame frame;
    const auto version = parse_hex(fields[0], "version");
    const auto len = parse_hex(fields[1], "length");
    const auto addr = parse_hex(fields[2], "address");
    const auto crc = parse_hex(fields[4], "crc");
    if (version > 0xF || len > kMaxPayloadBytes || addr > 0xFF || crc > 0xFFFF) {
        throw std::invalid_argument("from_hex_line: field out of range");
    }
    if (fields[3].size() != 2 * len) {
        throw std::invalid_argument("from_hex_line: payload has " + std::to_string(fields[3].size()) +
                                    " hex digits, length field says " + std::to_string(len) + " bytes");
    }
    frame.version = static_cast<std::uint8_t>(version);
    frame.source_address = static_cast<std::uint8_t>(addr);
    for (std::size_t i = 0; i < len; ++i) {
        frame.payload.push_back(static_cast<std::uint8_t>(parse_hex(fields[3].substr(2 * i, 2), "payload")));
    }
    frame.crc = static_cast<std::uint16_t>(crc);
    return frame;
}

}  // namespace cdmaiot
