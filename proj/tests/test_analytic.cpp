#include <gtest/gtest.h>

#include <limits>
#include <random>

#include "cdmaiot/analytic.hpp"
#include "cdmaiot/channel.hpp"
#include "oracles.hpp"

using namespace cdmaiot::analytic;

TEST(Conversions, RoundTrip) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> db(-200.0, 100.0);
    for (int i = 0; i < 1000; ++i) {
        const double x = db(rng);
        ASSERT_NEAR(linear_to_db(db_to_linear(x)), x, 1e-12 * std::max(1.0, std::abs(x)));
        ASSERT_NEAR(mw_to_dbm(dbm_to_mw(x)), x, 1e-12 * std::max(1.0, std::abs(x)));
        const double lin = db_to_linear(x);
        ASSERT_NEAR(db_to_linear(linear_to_db(lin)) / lin, 1.0, 1e-12);
    }
}

TEST(ProcessingGain, Examples) {
    EXPECT_DOUBLE_EQ(processing_gain(1e6, 15'625), 64.0);
    EXPECT_DOUBLE_EQ(processing_gain(1e6, 1e6), 1.0);
    EXPECT_DOUBLE_EQ(processing_gain(2e6, 15'625), 128.0);
    EXPECT_THROW((void)processing_gain(0.0, 1.0), std::invalid_argument);
}

TEST(BerBpsk, Examples) {
    EXPECT_NEAR(ber_bpsk(7.0), 7.7e-4, 7.7e-4 * 0.05);
    EXPECT_DOUBLE_EQ(ber_bpsk(-std::numeric_limits<double>::infinity()), 0.5);
    EXPECT_NEAR(ber_bpsk(0.0), 0.0786, 0.0786 * 0.01);
    for (const double e : {0.0, 2.0, 4.0, 6.0, 8.0}) {
        EXPECT_NEAR(ber_bpsk(e), oracle::q_tail(std::sqrt(2.0 * oracle::from_db(e))), 1e-9);
    }
}

TEST(LinkBudget, ReferenceDeployment) {
    const LinkParams link;
    EXPECT_NEAR(link.rx_power_dbm(), 23.0 - oracle::pathloss(600, 2.6205), 1e-12);
    EXPECT_NEAR(link.noise_power_dbm(), -174.0 + 60.0, 1e-12);
    EXPECT_DOUBLE_EQ(link.processing_gain(), 64.0);
}

TEST(CapacityStandalone, ThirteenUsers) {
    const LinkParams link;
    const double n = capacity_standalone(64.0, oracle::from_db(7.0), link.eta_over_s());
    EXPECT_EQ(users_supported(n), 13);
    EXPECT_EQ(network_capacity(users_supported(n), channels_in_band(20e6, 1e6)), 260);
}

TEST(CapacityStandalone, NoNoiseAtEbn0EqualToLc) { EXPECT_DOUBLE_EQ(capacity_standalone(64.0, 64.0, 0.0), 2.0); }

TEST(CapacityStandalone, ConsistentWithEbn0) {
    // Plugging N back into the per-user Eb/N0 returns the requirement.
    const double eta_s = 0.3;
    const double req = oracle::from_db(7.0);
    const double n = capacity_standalone(64.0, req, eta_s);
    const double lc = 64.0;
    EXPECT_NEAR(lc / ((n - 1.0) + eta_s), req, 1e-9);
    EXPECT_NEAR(ebn0_standalone(1e6 / 15'625, 1, eta_s), lc / eta_s, 1e-9);
}

TEST(UsersSupported, FloorsAndClamps) {
    EXPECT_EQ(users_supported(13.7), 13);
    EXPECT_EQ(users_supported(-2.5), 0);
    EXPECT_EQ(users_supported(0.99), 0);
}

TEST(Reuse, Examples) {
    EXPECT_EQ(reuse_factor(20, 4), 80);
    EXPECT_EQ(reuse_factor(1, 1), 1);
    EXPECT_EQ(reuse_factor(20, 1), 20);
    EXPECT_EQ(code_groups(64, 13), 4);
    EXPECT_EQ(channels_in_band(20e6, 1e6), 20);
    EXPECT_THROW((void)reuse_factor(0, 4), std::invalid_argument);
}

TEST(CoexPower, Examples) {
    CoexParams coex;
    coex.occupancy_beta = 0.0;
    EXPECT_EQ(coex_lte_power_into_cdma(coex, 600, 2.6205), -std::numeric_limits<double>::infinity());
    coex.occupancy_beta = 0.4;
    const double a = coex_lte_power_into_cdma(coex, 600, 2.6205);
    coex.occupancy_beta = 0.8;
    EXPECT_NEAR(coex_lte_power_into_cdma(coex, 600, 2.6205) - a, 10.0 * std::log10(2.0), 1e-9);
    coex.occupancy_beta = 1.0;
    const double expected = 10.0 * std::log10(3.0 * 1.0 * 100 * 5.5 / 100) + 23.0 - oracle::pathloss(600, 2.6205);
    EXPECT_NEAR(coex_lte_power_into_cdma(coex, 600, 2.6205), expected, 1e-9);
}

TEST(CoexCapacity, FullLoadLeavesNoRoom) {
    const LinkParams link;
    const CoexParams coex;  // M = 100, beta = 1
    EXPECT_LT(capacity_coex(link, coex), 1.0);
}

TEST(CoexCapacity, ReducesToStandaloneWithoutLte) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> lc(4.0, 256.0);
    std::uniform_real_distribution<double> ebn0(0.5, 50.0);
    std::uniform_real_distribution<double> pr(1e-14, 1e-9);
    std::uniform_real_distribution<double> eta(1e-15, 1e-10);
    for (int i = 0; i < 1000; ++i) {
        const double l = lc(rng);
        const double e = ebn0(rng);
        const double p = pr(rng);
        const double n0 = eta(rng);
        const double a = capacity_coex(l, e, p, 0.0, n0);
        const double b = capacity_standalone(l, e, n0 / p);
        ASSERT_NEAR(a, b, 1e-12 * std::max(1.0, std::abs(b)));
    }
}

TEST(CoexCapacity, DecreasingInLtePower) {
    double previous = std::numeric_limits<double>::infinity();
    for (double q = 0.0; q < 1e-9; q += 1e-11) {
        const double n = capacity_coex(64.0, 5.0, 1e-11, q, 4e-12);
        ASSERT_LT(n, previous);
        previous = n;
    }
    EXPECT_THROW((void)capacity_coex(64.0, 5.0, 0.0, 0.0, 1.0), std::invalid_argument);
}

TEST(CoexCapacity, DecreasingInUsersAndOccupancy) {
    const LinkParams link;
    for (const double beta : {0.25, 0.5, 0.75, 1.0}) {
        double previous = std::numeric_limits<double>::infinity();
        for (int m = 1; m <= 100; m += 5) {
            CoexParams coex;
            coex.lte_users_m = m;
            coex.occupancy_beta = beta;
            const double n = capacity_coex(link, coex);
            ASSERT_LT(n, previous) << "beta " << beta << " M " << m;
            previous = n;
        }
    }
    for (int m : {1, 10, 50, 100}) {
        double previous = std::numeric_limits<double>::infinity();
        for (const double beta : {0.25, 0.5, 0.75, 1.0}) {
            CoexParams coex;
            coex.lte_users_m = m;
            coex.occupancy_beta = beta;
            const double n = capacity_coex(link, coex);
            ASSERT_LT(n, previous);
            previous = n;
        }
    }
}

TEST(CapacityFamily, BerAndCapacityMonotone) {
    const LinkParams link;
    for (double e = 0.0; e < 12.0; e += 0.5) ASSERT_GT(ber_bpsk(e), ber_bpsk(e + 0.5));
    for (double e = 0.0; e <= 12.0; e += 0.5) {
        double previous = -std::numeric_limits<double>::infinity();
        for (const double lc : {16.0, 32.0, 64.0, 128.0}) {
            const double n = capacity_standalone(lc, oracle::from_db(e), link.eta_over_s());
            ASSERT_GT(n, previous);
            previous = n;
        }
    }
}

TEST(LteSinr, AverageBeatsWorstAndFallsWithN) {
    const LinkParams link;
    const CoexParams coex;
    for (int n = 0; n <= 20; ++n) {
        ASSERT_GT(lte_sinr(coex, LteCase::average, n, link), lte_sinr(coex, LteCase::worst, n, link));
        ASSERT_GT(lte_sinr(coex, LteCase::worst, n, link), lte_sinr(coex, LteCase::worst, n + 1, link));
        ASSERT_GT(lte_sinr(coex, LteCase::average, n, link), lte_sinr(coex, LteCase::average, n + 1, link));
    }
}

TEST(LteSinr, DegenerateIsCapped) {
    LinkParams link;
    link.noise_density_dbm_hz = -std::numeric_limits<double>::infinity();
    EXPECT_DOUBLE_EQ(lte_sinr(CoexParams{}, LteCase::worst, 0, link), kGammaCap);
    EXPECT_THROW((void)lte_sinr(CoexParams{}, LteCase::worst, -1, LinkParams{}), std::invalid_argument);
}

TEST(LteSinr, MatchesFormula) {
    const LinkParams link;
    const CoexParams coex;
    const double k = 5.5 * 100 / 100;
    const double pr_l = oracle::from_db(23.0 - oracle::pathloss(600, 2.6205));
    const double pr_c = oracle::from_db(link.rx_power_dbm());
    const double eta = oracle::from_db(-114.0);
    EXPECT_NEAR(lte_sinr(coex, LteCase::worst, 4, link) / (k * pr_l / (4 * pr_c + eta)), 1.0, 1e-9);
    const double pr_l_avg = oracle::from_db(23.0 - oracle::pathloss(300, 2.6205));
    EXPECT_NEAR(lte_sinr(coex, LteCase::average, 4, link) / (k * pr_l_avg / (4 * pr_c + eta)), 1.0, 1e-9);
}

TEST(LteThroughput, Examples) {
    CoexParams coex;
    EXPECT_DOUBLE_EQ(lte_throughput(0.0, coex), 0.0);
    const double t = lte_throughput(10.0, coex);
    EXPECT_NEAR(t, 0.75 * 20e6 * std::log2(11.0), 1e-6);
    coex.shannon_gap_a = 1.5;
    EXPECT_NEAR(lte_throughput(10.0, coex), 2.0 * t, 1e-6);
    EXPECT_THROW((void)lte_throughput(-1.0, coex), std::invalid_argument);
}

TEST(LteThroughput, RatioFallsWithN) {
    const LinkParams link;
    const CoexParams coex;
    for (const auto which : {LteCase::worst, LteCase::average}) {
        EXPECT_DOUBLE_EQ(lte_throughput_ratio(coex, which, 0, link), 1.0);
        for (int n = 0; n < 20; ++n) {
            ASSERT_GT(lte_throughput_ratio(coex, which, n, link), lte_throughput_ratio(coex, which, n + 1, link));
        }
    }
}

TEST(Params, Validation) {
    LinkParams link;
    link.bitrate_rb_hz = 2e6;
    EXPECT_THROW(link.validate(), std::invalid_argument);
    CoexParams coex;
    coex.occupancy_beta = 1.1;
    EXPECT_THROW(coex.validate(), std::invalid_argument);
    coex = {};
    coex.lte_users_m = 0;
    EXPECT_THROW(coex.validate(), std::invalid_argument);
    EXPECT_DOUBLE_EQ(CoexParams{}.overlap_factor_k(), 5.5);
}
