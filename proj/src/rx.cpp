#include "cdmaiot/rx.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace cdmaiot {

namespace {

class Correlator {
public:
    Correlator(std::span<const double> samples, const SpreadingCode& preamble)
        : x_(samples), p_(preamble.chips.begin(), preamble.chips.end()), energy_(samples.size() + 1, 0.0) {
        for (std::size_t i = 0; i < samples.size(); ++i) energy_[i + 1] = energy_[i] + samples[i] * samples[i];
    }

    [[nodiscard]] std::size_t lags() const noexcept {
        return x_.size() >= p_.size() ? x_.size() - p_.size() + 1 : 0;
    }

    [[nodiscard]] double rho(std::size_t k) const noexcept {
        const std::size_t len = p_.size();
        const double e = energy_[k + len] - energy_[k];
        if (e <= 0.0) return 0.0;
        const double* x = x_.data() + k;
        double c = 0.0;
        for (std::size_t i = 0; i < len; ++i) c += x[i] * p_[i];
        return std::min(1.0, std::abs(c) / std::sqrt(static_cast<double>(len) * e));
    }

    /// Arg-max of rho over [begin, end) on the search grid.
    [[nodiscard]] Detection peak(std::size_t begin, std::size_t end, std::size_t step) const noexcept {
        Detection best{begin, rho(begin)};
        for (std::size_t j = begin + step; j < end; j += step) {
            const double r = rho(j);
            if (r > best.peak) best = {j, r};
        }
        return best;
    }

private:
    std::span<const double> x_;
    std::vector<double> p_;
    std::vector<double> energy_;
};

std::vector<double> noise_window(std::size_t length, double variance, std::uint64_t seed) {
    std::vector<double> samples(length, 0.0);
    add_gaussian_noise(samples, variance, seed);
    return samples;
}

}  // namespace

void DetectorConfig::validate() const {
    if (preamble.chips.empty()) throw std::invalid_argument("DetectorConfig: empty preamble");
    if (window_samples < preamble.length()) {
        throw std::invalid_argument("DetectorConfig: window must be at least the preamble length");
    }
    if (!(threshold > 0.0 && threshold <= 1.0)) {
        throw std::invalid_argument("DetectorConfig: threshold must lie in (0, 1]");
    }
    if (search_step == 0) throw std::invalid_argument("DetectorConfig: search step must be positive");
    if (holdoff_samples == 0) throw std::invalid_argument("DetectorConfig: holdoff must be positive");
}

DetectorConfig DetectorConfig::for_frame(const FrameConfig& frame, double threshold) {
    frame.validate();
    DetectorConfig cfg;
    cfg.preamble = frame.preamble_code();
    cfg.threshold = threshold;
    cfg.holdoff_samples = frame_chip_length(kMaxPayloadBytes, frame.order);
    cfg.window_samples = std::max(cfg.window_samples, cfg.preamble.length());
    return cfg;
}

std::vector<double> correlation_profile(std::span<const double> samples, const SpreadingCode& preamble) {
    const Correlator corr(samples, preamble);
    std::vector<double> out(corr.lags());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = corr.rho(k);
    return out;
}

std::vector<Detection> detect_preamble(std::span<const double> samples, const DetectorConfig& cfg) {
    cfg.validate();
    const Correlator corr(samples, cfg.preamble);
    const std::size_t lags = corr.lags();
    std::vector<Detection> out;
    std::size_t k = 0;
    while (k < lags) {
        if (corr.rho(k) <= cfg.threshold) {
            k += cfg.search_step;
            continue;
        }
        const auto best = corr.peak(k, std::min(lags, k + cfg.holdoff_samples), cfg.search_step);
        out.push_back(best);
        k = best.offset + cfg.holdoff_samples;
    }
    return out;
}

std::optional<double> LinkReport::per() const {
    if (packets_sent == 0) return std::nullopt;
    const double ok = static_cast<double>(std::min(packets_crc_ok, packets_sent));
    return 1.0 - ok / static_cast<double>(packets_sent);
}

std::optional<double> LinkReport::mean_snr_db() const {
    if (soft_count == 0) return std::nullopt;
    const double n = static_cast<double>(soft_count);
    const double mean = soft_sum / n;
    const double var = soft_sq_sum / n - mean * mean;
    if (!(var > 0.0)) return std::nullopt;
    return 10.0 * std::log10(mean * mean / (var * chips_per_bit));
}

LinkReport& LinkReport::operator+=(const LinkReport& other) {
    packets_sent += other.packets_sent;
    packets_detected += other.packets_detected;
    packets_crc_ok += other.packets_crc_ok;
    false_detections += other.false_detections;
    if (soft_count == 0) chips_per_bit = other.chips_per_bit;
    soft_sum += other.soft_sum;
    soft_sq_sum += other.soft_sq_sum;
    soft_count += other.soft_count;
    return *this;
}

nlohmann::json to_json(const LinkReport& report) {
    auto optional_value = [](std::optional<double> v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    return {
        {"packets_sent", report.packets_sent},
        {"packets_detected", report.packets_detected},
        {"packets_crc_ok", report.packets_crc_ok},
        {"per", optional_value(report.per())},
        {"false_detections", report.false_detections},
        {"mean_snr_db", optional_value(report.mean_snr_db())},
    };
}

std::optional<DecodedFrame> decode_at(std::span<const double> samples, std::size_t offset, const FrameConfig& fcfg) {
    const auto order = static_cast<std::size_t>(fcfg.order);
    const std::size_t data_start = offset + order;
    const std::size_t min_end = data_start + kFrameOverheadBits * order;
    if (offset > samples.size() || min_end > samples.size()) return std::nullopt;

    const auto code = fcfg.data_code();
    const auto header = despread(samples.subspan(data_start, 8 * order), code);
    std::size_t len = 0;
    for (const double s : header) len = (len << 1) | (s < 0.0 ? 1U : 0U);
    len &= 0x0FU;

    const std::size_t bits = frame_bit_length(len);
    if (data_start + bits * order > samples.size()) return std::nullopt;

    DecodedFrame out;
    out.offset = offset;
    out.soft_bits = despread(samples.subspan(data_start, bits * order), code);
    out.parsed = parse_frame(out.soft_bits);
    return out;
}

StreamDecodeResult decode_stream(std::span<const double> samples, const DetectorConfig& cfg, const FrameConfig& fcfg,
                                 std::optional<std::span<const std::size_t>> planted) {
    cfg.validate();
    fcfg.validate();

    StreamDecodeResult result;
    auto& report = result.report;
    report.chips_per_bit = fcfg.order;

    std::vector<std::size_t> truth;
    if (planted) {
        truth.assign(planted->begin(), planted->end());
        std::sort(truth.begin(), truth.end());
        truth.erase(std::unique(truth.begin(), truth.end()), truth.end());
        report.packets_sent = truth.size();
    }
    auto is_planted = [&](std::size_t offset) { return std::binary_search(truth.begin(), truth.end(), offset); };

    const Correlator corr(samples, cfg.preamble);
    const std::size_t lags = corr.lags();
    const std::size_t refine = cfg.preamble.length();

    std::vector<Detection> candidates;
    std::size_t k = 0;
    while (k < lags) {
        if (corr.rho(k) <= cfg.threshold) {
            k += cfg.search_step;
            continue;
        }
        // Every crossing within one preamble span is a candidate; they are
        // tried from the highest peak down until one passes the CRC.
        const std::size_t end = std::min(lags, k + refine);
        candidates.clear();
        for (std::size_t j = k; j < end; j += cfg.search_step) {
            const double r = corr.rho(j);
            if (r > cfg.threshold) candidates.push_back({j, r});
        }
        std::stable_sort(candidates.begin(), candidates.end(),
                         [](const Detection& a, const Detection& b) { return a.peak > b.peak; });

        std::optional<DecodedFrame> accepted;
        for (const auto& c : candidates) {
            auto decoded = decode_at(samples, c.offset, fcfg);
            if (decoded && decoded->parsed.crc_ok) {
                accepted = std::move(decoded);
                break;
            }
        }

        const std::size_t offset = accepted ? accepted->offset : candidates.front().offset;
        const bool genuine = !planted || is_planted(offset);
        if (genuine) {
            ++report.packets_detected;
        } else {
            ++report.false_detections;
        }
        if (accepted && genuine) {
            ++report.packets_crc_ok;
            for (const double s : accepted->soft_bits) {
                report.soft_sum += std::abs(s);
                report.soft_sq_sum += s * s;
            }
            report.soft_count += accepted->soft_bits.size();
            result.frames.push_back(accepted->parsed.frame);
            k = offset + accepted->chip_length(fcfg.order);
        } else {
            // Without ground truth a CRC failure is how a false detection shows up.
            if (!accepted && !planted) ++report.false_detections;
            k = accepted ? offset + 1 : end;
        }
    }
    return result;
}

std::vector<double> threshold_grid() {
    std::vector<double> grid;
    for (int i = 1; i <= 19; ++i) grid.push_back(i / 20.0);
    return grid;
}

CalibrationResult calibrate_threshold(double target_false_alarm, double snr_db, int trials, std::uint64_t seed,
                                      const CalibrationOptions& opts) {
    if (!(target_false_alarm > 0.0 && target_false_alarm <= 1.0)) {
        throw std::invalid_argument("calibrate_threshold: target false-alarm rate must lie in (0, 1]");
    }
    if (trials < 1) throw std::invalid_argument("calibrate_threshold: trials must be >= 1");
    opts.frame.validate();
    if (opts.interferer) opts.interferer->validate();

    const auto preamble = opts.frame.preamble_code();
    const double noise_var = std::pow(10.0, -snr_db / 10.0);
    const auto n_trials = static_cast<std::uint64_t>(trials);

    // Seed bases: noise-only windows, planted windows, payload bytes, interferer.
    const std::uint64_t noise_base = seed;
    const std::uint64_t planted_base = seed + n_trials;
    const std::uint64_t payload_base = seed + 2 * n_trials;
    const std::uint64_t interferer_base = seed + 3 * n_trials;

    auto add_interference = [&](std::vector<double>& x, std::uint64_t s) {
        if (!opts.interferer) return;
        const auto tones = ofdm_interferer(x.size(), *opts.interferer, s);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += tones.samples[i];
    };

    std::vector<double> noise_peaks(static_cast<std::size_t>(trials));
    std::vector<double> planted_peaks(static_cast<std::size_t>(trials));
    const std::size_t frame_len = frame_chip_length(kMaxPayloadBytes, opts.frame.order);
    const std::size_t planted_len = std::max(opts.window_samples, frame_len);

    for (std::uint64_t t = 0; t < n_trials; ++t) {
        auto noise = noise_window(opts.window_samples, noise_var, trial_seed(noise_base, t));
        add_interference(noise, trial_seed(interferer_base, t));
        const auto profile = correlation_profile(noise, preamble);
        noise_peaks[t] = profile.empty() ? 0.0 : *std::max_element(profile.begin(), profile.end());

        std::mt19937_64 rng(trial_seed(payload_base, t));
        std::uniform_int_distribution<int> byte(0, 255);
        std::vector<std::uint8_t> payload(kMaxPayloadBytes);
        for (auto& b : payload) b = static_cast<std::uint8_t>(byte(rng));
        const auto frame = build_frame(static_cast<std::uint8_t>(byte(rng)), payload, opts.frame);
        const std::size_t offset = (planted_len - frame_len) / 2;
        auto x = noise_window(planted_len, noise_var, trial_seed(planted_base, t));
        for (std::size_t i = 0; i < frame.size(); ++i) x[offset + i] += frame.samples[i];
        add_interference(x, trial_seed(interferer_base, t) + n_trials);
        planted_peaks[t] = correlation_profile(std::span(x).subspan(offset, preamble.length()), preamble).front();
    }

    CalibrationResult result;
    for (const double threshold : threshold_grid()) {
        const auto fa = std::count_if(noise_peaks.begin(), noise_peaks.end(), [&](double r) { return r > threshold; });
        const auto miss =
            std::count_if(planted_peaks.begin(), planted_peaks.end(), [&](double r) { return r <= threshold; });
        result.grid.push_back({threshold, static_cast<double>(fa) / trials, static_cast<double>(miss) / trials});
    }
    const auto chosen = std::find_if(result.grid.begin(), result.grid.end(),
                                     [&](const CalibrationPoint& p) { return p.false_alarm_rate <= target_false_alarm; });
    if (chosen == result.grid.end()) {
        throw CalibrationError("calibrate_threshold: no grid threshold reaches a false-alarm rate of " +
                               std::to_string(target_false_alarm));
    }
    result.threshold = chosen->threshold;
    result.false_alarm_rate = chosen->false_alarm_rate;
    result.miss_rate = chosen->miss_rate;
    return result;
}

}  // namespace cdmaiot
