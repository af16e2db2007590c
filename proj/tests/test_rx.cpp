#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "cdmaiot/analytic.hpp"
#include "cdmaiot/rx.hpp"
#include "cdmaiot/scenario.hpp"
#include "oracles.hpp"

using namespace cdmaiot;

namespace {

std::vector<std::uint8_t> payload_of(std::size_t len, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> byte(0, 255);
    std::vector<std::uint8_t> p(len);
    for (auto& b : p) b = static_cast<std::uint8_t>(byte(rng));
    return p;
}

/// A frame planted at `offset` inside `length` samples of noise at the given chip SNR.
std::vector<double> planted_stream(std::size_t length, std::size_t offset, double snr_db, std::uint64_t seed,
                                   const FrameConfig& fcfg = {}) {
    const auto frame = build_frame(0x42, payload_of(15, seed), fcfg);
    std::vector<double> x(length, 0.0);
    std::copy(frame.samples.begin(), frame.samples.end(), x.begin() + static_cast<std::ptrdiff_t>(offset));
    add_gaussian_noise(x, oracle::from_db(-snr_db), seed + 1'000'000);
    return x;
}

PacketRunSpec per_point(double snr_db) {
    PacketRunSpec spec;
    spec.snr_db = snr_db;
    spec.packets = 1000;
    spec.seed = 1;
    return spec;
}

}  // namespace

TEST(Detect, CleanFrameAtZero) {
    const FrameConfig fcfg;
    const auto chips = build_frame(7, payload_of(15, 1), fcfg);
    const auto det = detect_preamble(chips.samples, DetectorConfig::for_frame(fcfg, 0.5));
    ASSERT_EQ(det.size(), 1U);
    EXPECT_EQ(det[0].offset, 0U);
    EXPECT_NEAR(det[0].peak, 1.0, 1e-12);
}

TEST(Detect, ShortInputGivesNothing) {
    const std::vector<double> x(10, 1.0);
    EXPECT_TRUE(detect_preamble(x, DetectorConfig{}).empty());
}

TEST(Detect, RhoIsBounded) {
    const auto x = planted_stream(12'000, 500, -3.0, 3);
    for (const double r : correlation_profile(x, FrameConfig{}.preamble_code())) {
        ASSERT_GE(r, 0.0);
        ASSERT_LE(r, 1.0 + 1e-12);
    }
}

TEST(Detect, PlantedOffsetRecoveredAtSixDb) {
    const auto x = planted_stream(15'000, 3117, 6.0, 5);
    const auto det = detect_preamble(x, DetectorConfig::for_frame(FrameConfig{}, 0.6));
    ASSERT_FALSE(det.empty());
    EXPECT_EQ(det[0].offset, 3117U);
}

TEST(Detect, OffsetExactnessOverThousandTrials) {
    const FrameConfig fcfg;
    const auto cfg = DetectorConfig::for_frame(fcfg, 0.6);
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<std::size_t> where(0, 10'000 - 64);
    int exact = 0;
    for (int t = 0; t < 1000; ++t) {
        const auto offset = where(rng);
        const auto x = planted_stream(offset + 9'792 + 100, offset, 6.0, 100 + t, fcfg);
        const auto det = detect_preamble(x, cfg);
        if (!det.empty() && det[0].offset == offset) ++exact;
    }
    EXPECT_GE(exact, 990);
}

TEST(Detect, FalseAlarmsFallWithThreshold) {
    std::vector<double> noise(1'000'000, 0.0);
    add_gaussian_noise(noise, 1.0, 23);
    const auto rho = correlation_profile(noise, FrameConfig{}.preamble_code());
    std::size_t previous = rho.size() + 1;
    for (const double t : threshold_grid()) {
        const auto crossings = static_cast<std::size_t>(std::count_if(rho.begin(), rho.end(), [&](double r) { return r > t; }));
        ASSERT_LE(crossings, previous) << "threshold " << t;
        previous = crossings;
    }
    auto cfg = DetectorConfig::for_frame(FrameConfig{}, 0.9);
    EXPECT_TRUE(detect_preamble(noise, cfg).empty());
}

TEST(DetectorConfig, Validation) {
    DetectorConfig cfg;
    cfg.threshold = 0.0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg.threshold = 1.2;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.window_samples = 10;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.search_step = 0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(DecodeStream, EmptyInputMeansNoTraffic) {
    const std::vector<double> empty;
    const auto r = decode_stream(empty, DetectorConfig{}, FrameConfig{});
    EXPECT_TRUE(r.frames.empty());
    EXPECT_FALSE(r.report.per().has_value());
    EXPECT_TRUE(to_json(r.report)["per"].is_null());
}

TEST(DecodeStream, RecoversCleanFramesInOrder) {
    const FrameConfig fcfg;
    std::vector<double> x(40'000, 0.0);
    std::vector<MacFrame> sent;
    std::vector<std::size_t> planted;
    for (std::size_t i = 0; i < 3; ++i) {
        const auto payload = payload_of(i * 5, 40 + i);
        sent.push_back(make_frame(static_cast<std::uint8_t>(i), payload));
        const auto chips = build_frame(static_cast<std::uint8_t>(i), payload, fcfg);
        const std::size_t offset = 1000 + i * 12'000;
        std::copy(chips.samples.begin(), chips.samples.end(), x.begin() + static_cast<std::ptrdiff_t>(offset));
        planted.push_back(offset);
    }
    add_gaussian_noise(x, oracle::from_db(-10.0), 3);
    const auto r = decode_stream(x, DetectorConfig::for_frame(fcfg, 0.6), fcfg, std::span<const std::size_t>(planted));
    EXPECT_EQ(r.frames, sent);
    EXPECT_EQ(r.report.packets_sent, 3U);
    EXPECT_EQ(r.report.packets_crc_ok, 3U);
    EXPECT_EQ(r.report.false_detections, 0U);
    EXPECT_DOUBLE_EQ(*r.report.per(), 0.0);
    EXPECT_NEAR(*r.report.mean_snr_db(), 10.0, 0.5);
}

TEST(DecodeStream, GarbageNeverThrows) {
    std::vector<double> x(30'000, 0.0);
    add_gaussian_noise(x, 1.0, 9);
    const auto pre = FrameConfig{}.preamble_code();
    for (std::size_t i = 0; i < pre.length(); ++i) x[29'990 - 64 + i] = 10.0 * pre.chips[i];
    StreamDecodeResult r;
    EXPECT_NO_THROW(r = decode_stream(x, DetectorConfig::for_frame(FrameConfig{}, 0.3), FrameConfig{}));
    EXPECT_TRUE(r.frames.empty());
    EXPECT_EQ(r.report.packets_sent, 0U);
}

TEST(LinkReport, MergeIsAssociativeAndCommutative) {
    LinkReport a{10, 9, 8, 1, 5.0, 30.0, 6, 64};
    LinkReport b{20, 20, 19, 0, 7.0, 11.0, 3, 64};
    LinkReport c{5, 4, 4, 3, 1.0, 2.0, 1, 64};
    LinkReport ab = a;
    ab += b;
    LinkReport ab_c = ab;
    ab_c += c;
    LinkReport bc = b;
    bc += c;
    LinkReport a_bc = a;
    a_bc += bc;
    LinkReport ba = b;
    ba += a;
    EXPECT_EQ(to_json(ab_c), to_json(a_bc));
    EXPECT_EQ(to_json(ab), to_json(ba));
    EXPECT_EQ(ab_c.packets_sent, 35U);
    EXPECT_NEAR(*ab_c.per(), 1.0 - 31.0 / 35.0, 1e-12);
}

TEST(LinkReport, JsonFieldNames) {
    const LinkReport r{4, 3, 2, 1, 0.0, 0.0, 0, 64};
    const auto j = to_json(r);
    for (const char* key : {"packets_sent", "packets_detected", "packets_crc_ok", "per", "false_detections",
                            "mean_snr_db"}) {
        EXPECT_TRUE(j.contains(key)) << key;
    }
    EXPECT_EQ(j.size(), 6U);
    EXPECT_DOUBLE_EQ(j["per"].get<double>(), 0.5);
    EXPECT_TRUE(j["mean_snr_db"].is_null());
}

TEST(PacketRun, HighSnrAlmostLossless) {
    const auto r = simulate_packets(per_point(8.0));
    EXPECT_EQ(r.packets_sent, 1000U);
    EXPECT_LT(*r.per(), 0.01);
}

TEST(PacketRun, PerShapeAcrossSnr) {
    const double p0 = *simulate_packets(per_point(0.0)).per();
    const double p3 = *simulate_packets(per_point(3.0)).per();
    const double p6 = *simulate_packets(per_point(6.0)).per();
    EXPECT_GT(p0, 0.0);
    EXPECT_LE(p0, 0.35);
    EXPECT_GT(p0, p3);
    EXPECT_GE(p3, p6);
}

TEST(PacketRun, SameSeedSameReport) {
    auto spec = per_point(1.0);
    spec.packets = 200;
    EXPECT_EQ(to_json(simulate_packets(spec)), to_json(simulate_packets(spec)));
}

TEST(PacketRun, WorstCaseInterfererPerEnvelope) {
    // LTE power into the CDMA channel at the full-load corner, relative to
    // the CDMA received power S of the reference link budget.
    const analytic::LinkParams link;
    const analytic::CoexParams coex;
    const double ratio_db = analytic::coex_lte_power_into_cdma(coex, link.cell_radius_m, link.freq_ghz) -
                            link.rx_power_dbm();
    EXPECT_NEAR(ratio_db, 10.0 * std::log10(3.0 * 5.5), 1e-9);

    InterfererConfig tones;
    tones.power_ratio_db = ratio_db;
    tones.occupancy = 1.0;
    auto spec = per_point(-1.4);
    spec.packets = 400;
    spec.threshold = 0.25;
    spec.interferer = tones;
    EXPECT_LT(*simulate_packets(spec).per(), 0.25);
}

TEST(Calibrate, TargetOnePicksLowestGridPoint) {
    const auto r = calibrate_threshold(1.0, 0.0, 20, 1);
    EXPECT_DOUBLE_EQ(r.threshold, 0.05);
    EXPECT_EQ(r.grid.size(), 19U);
}

TEST(Calibrate, ThresholdNonDecreasingAsTargetFalls) {
    double previous = 0.0;
    for (const double target : {1.0, 0.9, 0.5, 0.1, 0.01, 0.001}) {
        const auto r = calibrate_threshold(target, 0.0, 1000, 7);
        EXPECT_GE(r.threshold, previous) << "target " << target;
        EXPECT_LE(r.false_alarm_rate, target);
        previous = r.threshold;
    }
}

TEST(Calibrate, TradeOffMonotone) {
    const auto r = calibrate_threshold(0.001, 0.0, 1000, 11);
    for (std::size_t i = 1; i < r.grid.size(); ++i) {
        EXPECT_LE(r.grid[i].false_alarm_rate, r.grid[i - 1].false_alarm_rate);
        EXPECT_GE(r.grid[i].miss_rate, r.grid[i - 1].miss_rate);
    }
    EXPECT_GE(r.miss_rate, 0.0);
    EXPECT_LE(r.miss_rate, 1.0);
}

TEST(Calibrate, BadArguments) {
    EXPECT_THROW((void)calibrate_threshold(0.0, 0.0, 10, 1), std::invalid_argument);
    EXPECT_THROW((void)calibrate_threshold(1.5, 0.0, 10, 1), std::invalid_argument);
    EXPECT_THROW((void)calibrate_threshold(0.1, 0.0, 0, 1), std::invalid_argument);
}

TEST(Calibrate, UnreachableTargetThrows) {
    // A two-chip preamble normalizes to near 1 on noise somewhere in any long window.
    CalibrationOptions opts;
    opts.frame = FrameConfig{1, 0, 2};
    EXPECT_THROW((void)calibrate_threshold(0.001, 0.0, 50, 1, opts), CalibrationError);
}

TEST(Multiuser, TooManyUsersThrows) {
    EXPECT_THROW((void)simulate_multiuser(FrameConfig{}, 64, 0.0, 15, 1, 1), std::invalid_argument);
    EXPECT_THROW((void)simulate_multiuser(FrameConfig{}, 0, 0.0, 15, 1, 1), std::invalid_argument);
}

TEST(Multiuser, SingleUserAtHighSnrIsClean) {
    const auto p = simulate_multiuser(FrameConfig{}, 1, 6.0, 15, 100, 3);
    EXPECT_EQ(p.frame_errors, 0U);
    EXPECT_NEAR(p.measured_sinr_db, 6.0, 0.3);
}

TEST(Multiuser, SinrTracksTheory) {
    const double snr_db = -analytic::linear_to_db(analytic::LinkParams{}.eta_over_s());
    for (const int n : {2, 4, 8, 13}) {
        const auto p = simulate_multiuser(FrameConfig{}, n, snr_db, 15, 100, 5);
        const double eta = oracle::from_db(-snr_db);
        EXPECT_NEAR(p.theory_sinr_db, 10.0 * std::log10(1.0 / ((n - 1) + eta)), 1e-9);
        EXPECT_NEAR(p.measured_sinr_db, p.theory_sinr_db, 1.0) << n << " users";
    }
}

TEST(Multiuser, ThirteenUsersPerMatchesBinomialFrameOracle) {
    // Frame error rate against independent bit errors at the measured BER.
    const double snr_db = -analytic::linear_to_db(analytic::LinkParams{}.eta_over_s());
    const auto p = simulate_multiuser(FrameConfig{}, 13, snr_db, 15, 400, 7);
    const double expected = 1.0 - std::pow(1.0 - p.ber(), 152.0);
    EXPECT_NEAR(p.per(), expected, oracle::three_sigma(expected, 400.0));
}
