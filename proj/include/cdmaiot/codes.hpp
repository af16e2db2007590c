#pragma once

// Walsh-Hadamard spreading codes and the BPSK spread/despread pair.
//
// Codes are rows of the Sylvester-construction Hadamard matrix. Bit 0 maps to
// the +1 symbol and bit 1 to -1; every module in the library uses this
// polarity. Baseband is real-valued at one sample per chip.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace cdmaiot {

using Bit = std::uint8_t;

inline constexpr double kDefaultChipRateHz = 1.0e6;

/// One row of a Sylvester Hadamard matrix, entries +1/-1.
struct SpreadingCode {
    int order = 0;
    int index = 0;
    std::vector<std::int8_t> chips;

    [[nodiscard]] std::size_t length() const noexcept { return chips.size(); }
};

/// Real-valued baseband samples at one sample per chip.
struct ChipSequence {
    std::vector<double> samples;
    double chip_rate_hz = kDefaultChipRateHz;

    [[nodiscard]] std::size_t size() const noexcept { return samples.size(); }
    [[nodiscard]] std::span<const double> view() const noexcept { return samples; }
};

[[nodiscard]] bool is_power_of_two(long long n) noexcept;

/// Row `index` of the order-`order` Sylvester matrix. Throws
/// std::invalid_argument unless order is a power of two in [2, 1024] and
/// 0 <= index < order.
[[nodiscard]] SpreadingCode hadamard_code(int order, int index);

[[nodiscard]] constexpr int bpsk_symbol(Bit b) noexcept { return b ? -1 : 1; }

/// Spreads each bit over `code.order` chips. Throws on empty input.
[[nodiscard]] ChipSequence spread(std::span<const Bit> bits, const SpreadingCode& code,
                                  double chip_rate_hz = kDefaultChipRateHz);

/// Appends the spread chips of `bits` to `out` (no allocation per bit).
void spread_into(std::span<const Bit> bits, const SpreadingCode& code, std::vector<double>& out);

/// Per-bit correlation sums. A noiseless round trip yields +/-order exactly.
/// Throws std::invalid_argument if the length is not a multiple of the order.
[[nodiscard]] std::vector<double> despread(std::span<const double> chips, const SpreadingCode& code);
[[nodiscard]] std::vector<double> despread(const ChipSequence& chips, const SpreadingCode& code);

/// Sign decision: negative soft value -> bit 1.
[[nodiscard]] std::vector<Bit> hard_decide(std::span<const double> soft);

}  // namespace cdmaiot
