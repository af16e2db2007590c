#pragma once

// Chip-level impairments: path loss, AWGN, asynchronous multi-user
// superposition and a gated multi-tone stand-in for a co-channel LTE uplink.
//
// SNR is defined per chip as signal power over noise variance of the real
// baseband samples. Every random draw comes from an explicit seed; Monte-Carlo
// trials derive their seed as base_seed + trial_index.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "cdmaiot/codes.hpp"

namespace cdmaiot {

/// Sentinel for a noiseless channel.
inline constexpr double kNoNoise = std::numeric_limits<double>::infinity();

[[nodiscard]] constexpr std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t trial_index) noexcept {
    return base_seed + trial_index;
}

struct PathLossModel {
    double distance_m = 600.0;
    double freq_ghz = 2.6205;

    [[nodiscard]] double loss_db() const;
};

/// 36.7 log10(d) + 22.7 + 26 log10(f). Valid for d >= 1 m and 2 < f < 6 GHz;
/// throws std::invalid_argument outside that range.
[[nodiscard]] double pathloss_db(double distance_m, double freq_ghz);

/// Adds zero-mean Gaussian noise of variance mean(chip^2) * 10^(-snr_db/10).
/// snr_db == kNoNoise returns the input unchanged. Throws on empty input.
[[nodiscard]] ChipSequence awgn(const ChipSequence& chips, double snr_db, std::uint64_t seed);

/// Same as awgn() but with the noise referenced to an explicit signal power
/// instead of the measured mean power (for streams with idle gaps).
[[nodiscard]] ChipSequence awgn_referenced(const ChipSequence& chips, double snr_db, double signal_power,
                                           std::uint64_t seed);

/// In-place Gaussian noise of the given variance.
void add_gaussian_noise(std::vector<double>& samples, double variance, std::uint64_t seed);

struct StreamPlacement {
    std::span<const double> samples;
    std::size_t delay_chips = 0;
    double gain = 1.0;
};

/// Sample-wise sum of delayed, scaled streams, zero-padded to the longest end.
/// Throws std::invalid_argument on an empty stream list.
[[nodiscard]] ChipSequence superpose(std::span<const StreamPlacement> streams,
                                     double chip_rate_hz = kDefaultChipRateHz);

struct InterfererConfig {
    double power_ratio_db = 0.0;  ///< active power relative to a unit-power CDMA signal
    int num_tones = 12;
    double tone_spacing_hz = 15.0e3;
    double center_offset_hz = 250.0e3;  ///< comb centre relative to the CDMA carrier
    double occupancy = 1.0;             ///< fraction of gate slots that are active
    std::size_t gate_slot_samples = 1000;

    void validate() const;
};

/// Sum of `num_tones` cosines on a comb around `center_offset_hz` with seeded
/// random phases. Power while active is 10^(power_ratio_db/10); slots of
/// `gate_slot_samples` are switched on so that the active fraction tracks the
/// occupancy (error-diffusion pattern with a seeded start phase).
[[nodiscard]] ChipSequence ofdm_interferer(std::size_t length, const InterfererConfig& cfg, std::uint64_t seed,
                                           double chip_rate_hz = kDefaultChipRateHz);

[[nodiscard]] double mean_power(std::span<const double> samples) noexcept;

}  // namespace cdmaiot
