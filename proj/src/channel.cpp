#include "cdmaiot/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace cdmaiot {

double PathLossModel::loss_db() const { return pathloss_db(distance_m, freq_ghz); }

double pathloss_db(double distance_m, double freq_ghz) {
    if (!(freq_ghz > 2.0 && freq_ghz < 6.0)) {
        throw std::invalid_argument("pathloss_db: model valid for 2 < f < 6 GHz, got " + std::to_string(freq_ghz));
    }
    if (!(distance_m >= 1.0)) {
        throw std::invalid_argument("pathloss_db: distance must be >= 1 m, got " + std::to_string(distance_m));
    }
    return 36.7 * std::log10(distance_m) + 22.7 + 26.0 * std::log10(freq_ghz);
}

double mean_power(std::span<const double> samples) noexcept {
    if (samples.empty()) return 0.0;
    double acc = 0.0;
    for (const double s : samples) acc += s * s;
    return acc / static_cast<double>(samples.size());
}

void add_gaussian_noise(std::vector<double>& samples, double variance, std::uint64_t seed) {
    if (!(variance > 0.0)) return;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(variance));
    for (double& s : samples) s += normal(rng);
}

ChipSequence awgn_referenced(const ChipSequence& chips, double snr_db, double signal_power, std::uint64_t seed) {
    if (chips.samples.empty()) throw std::invalid_argument("awgn: empty chip sequence");
    ChipSequence out = chips;
    if (std::isinf(snr_db) && snr_db > 0) return out;
    add_gaussian_noise(out.samples, signal_power * std::pow(10.0, -snr_db / 10.0), seed);
    return out;
}

ChipSequence awgn(const ChipSequence& chips, double snr_db, std::uint64_t seed) {
    if (chips.samples.empty()) throw std::invalid_argument("awgn: empty chip sequence");
    return awgn_referenced(chips, snr_db, mean_power(chips.samples), seed);
}

ChipSequence superpose(std::span<const StreamPlacement> streams, double chip_rate_hz) {
    if (streams.empty()) throw std::invalid_argument("superpose: need at least one stream");
    std::size_t length = 0;
    for (const auto& s : streams) length = std::max(length, s.delay_chips + s.samples.size());

    ChipSequence out{std::vector<double>(length, 0.0), chip_rate_hz};
    for (const auto& s : streams) {
        double* dst = out.samples.data() + s.delay_chips;
        for (std::size_t i = 0; i < s.samples.size(); ++i) dst[i] += s.gain * s.samples[i];
    }
    return out;
}

void InterfererConfig::validate() const {
    if (num_tones < 1) throw std::invalid_argument("InterfererConfig: num_tones must be >= 1");
    if (!(occupancy >= 0.0 && occupancy <= 1.0)) {
        throw std::invalid_argument("InterfererConfig: occupancy must lie in [0, 1]");
    }
    if (!(tone_spacing_hz > 0.0)) throw std::invalid_argument("InterfererConfig: tone spacing must be > 0");
    if (gate_slot_samples == 0) throw std::invalid_argument("InterfererConfig: gate slot must be > 0 samples");
}

ChipSequence ofdm_interferer(std::size_t length, const InterfererConfig& cfg, std::uint64_t seed,
                             double chip_rate_hz) {
    cfg.validate();
    if (length == 0) throw std::invalid_argument("ofdm_interferer: length must be > 0");
    ChipSequence out{std::vector<double>(length, 0.0), chip_rate_hz};
    if (cfg.occupancy == 0.0) return out;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const double power = std::pow(10.0, cfg.power_ratio_db / 10.0);
    const double amplitude = std::sqrt(2.0 * power / cfg.num_tones);
    const double first = cfg.center_offset_hz - 0.5 * (cfg.num_tones - 1) * cfg.tone_spacing_hz;

    for (int m = 0; m < cfg.num_tones; ++m) {
        const double omega = 2.0 * std::numbers::pi * (first + m * cfg.tone_spacing_hz) / chip_rate_hz;
        const double phase = 2.0 * std::numbers::pi * unit(rng);
        for (std::size_t n = 0; n < length; ++n) {
            out.samples[n] += amplitude * std::cos(omega * static_cast<double>(n) + phase);
        }
    }

    if (cfg.occupancy < 1.0) {
        double credit = unit(rng);
        for (std::size_t start = 0; start < length; start += cfg.gate_slot_samples) {
            credit += cfg.occupancy;
            const bool active = credit >= 1.0;
            if (active) credit -= 1.0;
            if (!active) {
                const auto end = std::min(length, start + cfg.gate_slot_samples);
                std::fill(out.samples.begin() + static_cast<std::ptrdiff_t>(start),
                          out.samples.begin() + static_cast<std::ptrdiff_t>(end), 0.0);
            }
        }
    }
    return out;
}

}  // namespace cdmaiot
