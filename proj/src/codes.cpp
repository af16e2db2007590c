#include "cdmaiot/codes.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace cdmaiot {

bool is_power_of_two(long long n) noexcept { return n > 0 && (n & (n - 1)) == 0; }

SpreadingCode hadamard_code(int order, int index) {
    if (order < 2 || order > 1024 || !is_power_of_two(order)) {
        throw std::invalid_argument("hadamard_code: order must be a power of two in [2, 1024], got " +
                                    std::to_string(order));
    }
    if (index < 0 || index >= order) {
        throw std::invalid_argument("hadamard_code: index " + std::to_string(index) + " out of range for order " +
                                    std::to_string(order));
    }
    // Sylvester entry H[i][j] = (-1)^popcount(i & j).
    SpreadingCode code{order, index, std::vector<std::int8_t>(static_cast<std::size_t>(order))};
    const auto row = static_cast<unsigned>(index);
    for (unsigned j = 0; j < static_cast<unsigned>(order); ++j) {
        code.chips[j] = (std::popcount(row & j) & 1U) ? std::int8_t{-1} : std::int8_t{1};
    }
    return code;
}

void spread_into(std::span<const Bit> bits, const SpreadingCode& code, std::vector<double>& out) {
    out.reserve(out.size() + bits.size() * code.length());
    for (const Bit b : bits) {
        const double symbol = bpsk_symbol(b);
        for (const auto chip : code.chips) out.push_back(symbol * chip);
    }
}

ChipSequence spread(std::span<const Bit> bits, const SpreadingCode& code, double chip_rate_hz) {
    if (bits.empty()) throw std::invalid_argument("spread: empty bit sequence");
    ChipSequence out{{}, chip_rate_hz};
    spread_into(bits, code, out.samples);
    return out;
}

std::vector<double> despread(std::span<const double> chips, const SpreadingCode& code) {
    const std::size_t order = code.length();
    if (order == 0 || chips.size() % order != 0) {
        throw std::invalid_argument("despread: chip count " + std::to_string(chips.size()) +
                                    " is not a multiple of the code order " + std::to_string(order));
    }
    std::vector<double> soft(chips.size() / order);
    for (std::size_t b = 0; b < soft.size(); ++b) {
        const double* x = chips.data() + b * order;
        double acc = 0.0;
        for (std::size_t i = 0; i < order; ++i) acc += x[i] * code.chips[i];
        soft[b] = acc;
    }
    return soft;
}

std::vector<double> despread(const ChipSequence& chips, const SpreadingCode& code) {
    return despread(chips.view(), code);
}

std::vector<Bit> hard_decide(std::span<const double> soft) {
    std::vector<Bit> bits(soft.size());
    for (std::size_t i = 0; i < soft.size(); ++i) bits[i] = soft[i] < 0.0 ? Bit{1} : Bit{0};
    return bits;
}

}  // namespace cdmaiot
