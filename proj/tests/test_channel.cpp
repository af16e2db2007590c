#include <gtest/gtest.h>

#include <random>

#include "cdmaiot/channel.hpp"
#include "oracles.hpp"

using namespace cdmaiot;

namespace {

ChipSequence unit_power_chips(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(0.5);
    ChipSequence c;
    c.samples.resize(n);
    for (auto& s : c.samples) s = coin(rng) ? 1.0 : -1.0;
    return c;
}

}  // namespace

TEST(PathLoss, ReferenceValues) {
    EXPECT_NEAR(pathloss_db(600, 2.6205), 135.53, 0.01);
    EXPECT_NEAR(pathloss_db(600, 2.6205), oracle::pathloss(600, 2.6205), 1e-12);
    EXPECT_NEAR(pathloss_db(1, 2.6205), 33.58, 0.01);
    EXPECT_NEAR(pathloss_db(1200, 3.5) - pathloss_db(600, 3.5), 36.7 * std::log10(2.0), 1e-9);
    EXPECT_DOUBLE_EQ((PathLossModel{600, 2.6205}.loss_db()), pathloss_db(600, 2.6205));
}

TEST(PathLoss, OutOfRangeThrows) {
    EXPECT_THROW((void)pathloss_db(600, 2.0), std::invalid_argument);
    EXPECT_THROW((void)pathloss_db(600, 6.0), std::invalid_argument);
    EXPECT_THROW((void)pathloss_db(0.5, 2.6), std::invalid_argument);
}

TEST(Awgn, NoNoiseSentinelIsIdentity) {
    const auto c = unit_power_chips(1000, 1);
    EXPECT_EQ(awgn(c, kNoNoise, 5).samples, c.samples);
}

TEST(Awgn, VarianceAtZeroDb) {
    const auto c = unit_power_chips(1'000'000, 2);
    const auto y = awgn(c, 0.0, 11);
    double acc = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) acc += (y.samples[i] - c.samples[i]) * (y.samples[i] - c.samples[i]);
    EXPECT_NEAR(acc / static_cast<double>(c.size()), 1.0, 0.03);
}

TEST(Awgn, VarianceTracksSignalPower) {
    auto c = unit_power_chips(200'000, 3);
    for (auto& s : c.samples) s *= 2.0;  // power 4
    const auto y = awgn(c, 6.0, 12);
    double acc = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) acc += (y.samples[i] - c.samples[i]) * (y.samples[i] - c.samples[i]);
    EXPECT_NEAR(acc / static_cast<double>(c.size()), 4.0 * oracle::from_db(-6.0), 0.03);
}

TEST(Awgn, SameSeedSameOutput) {
    const auto c = unit_power_chips(5000, 4);
    EXPECT_EQ(awgn(c, 3.0, 77).samples, awgn(c, 3.0, 77).samples);
    EXPECT_NE(awgn(c, 3.0, 77).samples, awgn(c, 3.0, 78).samples);
}

TEST(Awgn, EmptyThrows) { EXPECT_THROW((void)awgn(ChipSequence{}, 0.0, 1), std::invalid_argument); }

TEST(Superpose, IdentityAndDoubling) {
    const auto a = unit_power_chips(100, 5);
    const std::vector<StreamPlacement> one{{a.view(), 0, 1.0}};
    EXPECT_EQ(superpose(one).samples, a.samples);
    const std::vector<StreamPlacement> two{{a.view(), 0, 1.0}, {a.view(), 0, 1.0}};
    const auto sum = superpose(two);
    for (std::size_t i = 0; i < a.size(); ++i) ASSERT_EQ(sum.samples[i], 2.0 * a.samples[i]);
}

TEST(Superpose, DelaysPadAndGainsScale) {
    const std::vector<double> a{1, 2, 3};
    const std::vector<double> b{10, 20};
    const std::vector<StreamPlacement> s{{a, 0, 1.0}, {b, 2, 0.5}};
    EXPECT_EQ(superpose(s).samples, (std::vector<double>{1, 2, 8, 10}));
}

TEST(Superpose, EmptyListThrows) {
    EXPECT_THROW((void)superpose(std::vector<StreamPlacement>{}), std::invalid_argument);
}

TEST(Superpose, Linear) {
    const auto a = unit_power_chips(300, 6);
    const auto b = unit_power_chips(200, 7);
    const auto c = unit_power_chips(250, 8);
    const std::vector<StreamPlacement> first{{a.view(), 3, 0.7}};
    const std::vector<StreamPlacement> second{{b.view(), 50, -1.2}, {c.view(), 11, 2.0}};
    const std::vector<StreamPlacement> all{{a.view(), 3, 0.7}, {b.view(), 50, -1.2}, {c.view(), 11, 2.0}};
    const auto x = superpose(first);
    const auto y = superpose(second);
    const auto z = superpose(all);
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double xi = i < x.size() ? x.samples[i] : 0.0;
        const double yi = i < y.size() ? y.samples[i] : 0.0;
        ASSERT_NEAR(z.samples[i], xi + yi, 1e-12);
    }
}

TEST(Superpose, SynchronousUsersDespreadSinr) {
    // Chip-aligned users on distinct rows are orthogonal, so the despread
    // SINR is L_c S / sigma^2 whatever N is.
    const int n_users = 8;
    const int n_bits = 20'000;
    const double noise_var = 0.5;
    std::mt19937_64 rng(9);
    std::bernoulli_distribution coin(0.5);
    std::vector<ChipSequence> streams;
    std::vector<std::vector<Bit>> bits(n_users, std::vector<Bit>(n_bits));
    for (int u = 0; u < n_users; ++u) {
        for (auto& b : bits[u]) b = coin(rng);
        streams.push_back(spread(bits[u], hadamard_code(64, 10 + u)));
    }
    std::vector<StreamPlacement> placements;
    for (const auto& s : streams) placements.push_back({s.view(), 0, 1.0});
    auto rx = superpose(placements);
    add_gaussian_noise(rx.samples, noise_var, 21);
    const auto soft = despread(rx, hadamard_code(64, 10));
    double sum = 0.0;
    double sq = 0.0;
    for (int i = 0; i < n_bits; ++i) {
        const double y = soft[i] * bpsk_symbol(bits[0][i]);
        sum += y;
        sq += y * y;
    }
    const double mean = sum / n_bits;
    const double var = sq / n_bits - mean * mean;
    const double measured_db = 10.0 * std::log10(mean * mean / var);
    const double theory_db = 10.0 * std::log10(64.0 / noise_var);
    EXPECT_NEAR(measured_db, theory_db, 0.5);
}

TEST(Interferer, OccupancyZeroIsSilent) {
    InterfererConfig cfg;
    cfg.occupancy = 0.0;
    for (const double s : ofdm_interferer(10'000, cfg, 1).samples) ASSERT_EQ(s, 0.0);
}

TEST(Interferer, PowerAtZeroDb) {
    InterfererConfig cfg;
    const auto x = ofdm_interferer(1'000'000, cfg, 2);
    EXPECT_NEAR(mean_power(x.samples), 1.0, 0.05);
}

TEST(Interferer, PowerFollowsRatio) {
    InterfererConfig cfg;
    cfg.power_ratio_db = 10.0;
    EXPECT_NEAR(mean_power(ofdm_interferer(200'000, cfg, 3).samples), 10.0, 0.5);
}

TEST(Interferer, GatingMatchesOccupancy) {
    InterfererConfig cfg;
    cfg.occupancy = 0.3;
    const auto x = ofdm_interferer(1'000'000, cfg, 4);
    std::size_t active = 0;
    for (std::size_t s = 0; s < x.size(); s += cfg.gate_slot_samples) {
        if (x.samples[s] != 0.0 || x.samples[s + 1] != 0.0) ++active;
    }
    const double slots = static_cast<double>(x.size() / cfg.gate_slot_samples);
    EXPECT_NEAR(active / slots, 0.3, 0.01);
}

TEST(Interferer, Deterministic) {
    InterfererConfig cfg;
    cfg.occupancy = 0.5;
    EXPECT_EQ(ofdm_interferer(5000, cfg, 9).samples, ofdm_interferer(5000, cfg, 9).samples);
}

TEST(Interferer, InvalidConfigThrows) {
    InterfererConfig cfg;
    cfg.num_tones = 0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.occupancy = 1.5;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(Interferer, SingleToneSuppressedByDespreading) {
    // Averaged over random codes and tone phases, despreading a narrowband
    // tone leaves at least 15 dB less power per chip than it had before.
    InterfererConfig cfg;
    cfg.num_tones = 1;
    const std::size_t n_bits = 2000;
    std::mt19937_64 rng(13);
    std::uniform_int_distribution<int> row(1, 63);
    double before = 0.0;
    double after = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const auto code = hadamard_code(64, row(rng));
        const auto x = ofdm_interferer(64 * n_bits, cfg, 100 + trial);
        before += mean_power(x.samples);
        const auto soft = despread(x, code);
        double p = 0.0;
        for (const double s : soft) p += s * s;
        after += p / static_cast<double>(soft.size()) / (64.0 * 64.0);
    }
    EXPECT_GE(10.0 * std::log10(before / after), 15.0);
}

TEST(Seeds, TrialSeedRule) {
    EXPECT_EQ(trial_seed(100, 0), 100U);
    EXPECT_EQ(trial_seed(100, 7), 107U);
}

TEST(Awgn, SpreadBpskBerMatchesQ) {
    // Real baseband at one sample per chip: Eb/N0 = L_c * SNR_chip / 2.
    const auto code = hadamard_code(64, 22);
    const int n_bits = 100'000;
    for (const int ebn0_db : {0, 2, 4, 6, 8}) {
        std::mt19937_64 rng(trial_seed(50, ebn0_db));
        std::bernoulli_distribution coin(0.5);
        std::vector<Bit> bits(n_bits);
        for (auto& b : bits) b = coin(rng);
        const double snr_chip_db = ebn0_db - 10.0 * std::log10(32.0);
        const auto decided = hard_decide(despread(awgn(spread(bits, code), snr_chip_db, trial_seed(60, ebn0_db)), code));
        int errors = 0;
        for (int i = 0; i < n_bits; ++i) errors += decided[i] != bits[i];
        const double p = oracle::q_tail(std::sqrt(2.0 * oracle::from_db(ebn0_db)));
        EXPECT_NEAR(static_cast<double>(errors) / n_bits, p, oracle::three_sigma(p, n_bits)) << ebn0_db << " dB";
    }
}
