#pragma once

// Packet receiver: preamble search by normalized cross-correlation, frame
// decoding with the user's data code, and PER/SNR metering.
//
// The detection statistic at lag k is
//
//     rho(k) = |sum_i x[k+i] p[i]| / (L * rms(x[k .. k+L)))
//
// i.e. the correlation normalized by the RMS of the samples it spans, which
// bounds rho to [0, 1] and makes one threshold usable across SNRs.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "cdmaiot/channel.hpp"
#include "cdmaiot/codes.hpp"
#include "cdmaiot/frame.hpp"
#include "json.hpp"

namespace cdmaiot {

struct DetectorConfig {
    SpreadingCode preamble = hadamard_code(64, 63);
    std::size_t window_samples = 10'000;
    double threshold = 0.6;
    std::size_t search_step = 1;
    /// Span over which detect_preamble keeps a single local maximum. Defaults
    /// to the longest frame at order 64.
    std::size_t holdoff_samples = 9'792;

    void validate() const;

    [[nodiscard]] static DetectorConfig for_frame(const FrameConfig& frame, double threshold);
};

struct Detection {
    std::size_t offset = 0;
    double peak = 0.0;

    friend bool operator==(const Detection&, const Detection&) = default;
};

/// rho(k) for every lag k in [0, n - L]. Lags over an all-zero span give 0.
[[nodiscard]] std::vector<double> correlation_profile(std::span<const double> samples,
                                                      const SpreadingCode& preamble);

/// Lags where rho exceeds the threshold, keeping one local maximum per
/// holdoff span (the span starts at the first crossing). Returns an empty list
/// when the input is shorter than the preamble.
[[nodiscard]] std::vector<Detection> detect_preamble(std::span<const double> samples, const DetectorConfig& cfg);

/// Counters for one decoded stream. Reports merge with operator+=, which is
/// associative and commutative on the counters.
struct LinkReport {
    std::uint64_t packets_sent = 0;
    std::uint64_t packets_detected = 0;
    std::uint64_t packets_crc_ok = 0;
    std::uint64_t false_detections = 0;

    // Pooled decision-directed soft statistics of CRC-valid frames.
    double soft_sum = 0.0;
    double soft_sq_sum = 0.0;
    std::uint64_t soft_count = 0;
    int chips_per_bit = 64;

    /// 1 - crc_ok / sent; nullopt when nothing was sent (no traffic).
    [[nodiscard]] std::optional<double> per() const;
    /// Per-chip SNR estimated from the despread soft values.
    [[nodiscard]] std::optional<double> mean_snr_db() const;

    LinkReport& operator+=(const LinkReport& other);
};

/// Flat object: packets_sent, packets_detected, packets_crc_ok, per,
/// false_detections, mean_snr_db. Undefined values serialize as null.
[[nodiscard]] nlohmann::json to_json(const LinkReport& report);

struct DecodedFrame {
    std::size_t offset = 0;
    ParsedFrame parsed;
    std::vector<double> soft_bits;

    [[nodiscard]] std::size_t chip_length(int order) const {
        return frame_chip_length(parsed.frame.payload.size(), order);
    }
};

/// Despreads and parses a frame whose preamble starts at `offset`. Returns
/// nullopt if the stream ends before the declared frame does.
[[nodiscard]] std::optional<DecodedFrame> decode_at(std::span<const double> samples, std::size_t offset,
                                                    const FrameConfig& fcfg);

struct StreamDecodeResult {
    std::vector<MacFrame> frames;  ///< CRC-valid frames in stream order
    LinkReport report;
};

/// Scans the stream, decodes a frame at each detection and resolves false
/// detections by CRC. After a threshold crossing, every crossing within one
/// preamble length is tried, highest peak first, until one passes the CRC.
/// `planted` lists the true preamble offsets when they are
/// known: it sets packets_sent, and any detection away from a planted offset
/// counts as false. Without ground truth every CRC failure counts as a false
/// detection and packets_sent stays 0. Never throws on malformed regions.
[[nodiscard]] StreamDecodeResult decode_stream(std::span<const double> samples, const DetectorConfig& cfg,
                                               const FrameConfig& fcfg,
                                               std::optional<std::span<const std::size_t>> planted = std::nullopt);

class CalibrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CalibrationOptions {
    FrameConfig frame;
    std::size_t window_samples = 10'000;
    std::optional<InterfererConfig> interferer;
};

struct CalibrationPoint {
    double threshold = 0.0;
    double false_alarm_rate = 0.0;  ///< noise-only windows with any crossing
    double miss_rate = 0.0;         ///< planted preambles whose peak stays at or below threshold
};

struct CalibrationResult {
    double threshold = 0.0;
    double false_alarm_rate = 0.0;
    double miss_rate = 0.0;
    std::vector<CalibrationPoint> grid;
};

/// The threshold grid {0.05, 0.10, ..., 0.95}.
[[nodiscard]] std::vector<double> threshold_grid();

/// Smallest grid threshold whose measured false-alarm rate per noise-only
/// window is <= target, over `trials` Monte-Carlo windows. The miss rate at
/// each grid point is measured with a frame planted at `snr_db`. A target of 1
/// trivially selects the lowest grid point. Throws std::invalid_argument for a
/// target outside (0, 1] or trials < 1, and CalibrationError if no grid point
/// meets the target.
[[nodiscard]] CalibrationResult calibrate_threshold(double target_false_alarm, double snr_db, int trials,
                                                    std::uint64_t seed, const CalibrationOptions& opts = {});

}  // namespace cdmaiot
