#include "cdmaiot/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cdmaiot/channel.hpp"

namespace cdmaiot::analytic {

double db_to_linear(double db) noexcept { return std::pow(10.0, db / 10.0); }

double linear_to_db(double linear) noexcept {
    if (linear <= 0.0) return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(linear);
}

double q_function(double x) noexcept { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

void LinkParams::validate() const {
    if (!(bitrate_rb_hz > 0.0) || !(bandwidth_w_hz >= bitrate_rb_hz)) {
        throw std::invalid_argument("LinkParams: need W >= R_b > 0");
    }
    if (!(cell_radius_m >= 1.0)) throw std::invalid_argument("LinkParams: cell radius must be >= 1 m");
}

double LinkParams::processing_gain() const { return analytic::processing_gain(bandwidth_w_hz, bitrate_rb_hz); }

double LinkParams::rx_power_dbm() const {
    if (rx_power_s_dbm) return *rx_power_s_dbm;
    return tx_power_dbm - pathloss_db(cell_radius_m, freq_ghz);
}

double LinkParams::noise_power_dbm() const { return noise_density_dbm_hz + 10.0 * std::log10(bandwidth_w_hz); }

double LinkParams::eta_over_s() const { return db_to_linear(noise_power_dbm() - rx_power_dbm()); }

void CoexParams::validate() const {
    if (lte_users_m < 1 || total_rbs_r < 1) throw std::invalid_argument("CoexParams: M and R must be >= 1");
    if (!(occupancy_beta >= 0.0 && occupancy_beta <= 1.0)) {
        throw std::invalid_argument("CoexParams: beta must lie in [0, 1]");
    }
    if (!(cdma_equiv_rbs_rc > 0.0)) throw std::invalid_argument("CoexParams: R_c must be > 0");
    if (!(lte_bandwidth_hz > 0.0)) throw std::invalid_argument("CoexParams: W_L must be > 0");
}

double processing_gain(double w_hz, double rb_hz) {
    if (!(w_hz > 0.0 && rb_hz > 0.0)) throw std::invalid_argument("processing_gain: W and R_b must be > 0");
    return w_hz / rb_hz;
}

double ber_bpsk(double ebn0_db) noexcept {
    if (std::isinf(ebn0_db) && ebn0_db < 0) return 0.5;
    return q_function(std::sqrt(2.0 * db_to_linear(ebn0_db)));
}

double ebn0_standalone(double lc, int n_users, double eta_over_s) {
    if (n_users < 1) throw std::invalid_argument("ebn0_standalone: need at least one user");
    return lc / ((n_users - 1) + eta_over_s);
}

double capacity_standalone(double lc, double ebn0_linear, double eta_over_s) {
    if (!(ebn0_linear > 0.0)) throw std::invalid_argument("capacity_standalone: Eb/N0 must be > 0");
    return 1.0 + lc / ebn0_linear - eta_over_s;
}

int users_supported(double capacity) noexcept {
    if (!(capacity > 0.0)) return 0;
    return static_cast<int>(std::floor(capacity));
}

long long network_capacity(int users_per_channel, int channels) {
    if (users_per_channel < 0 || channels < 0) throw std::invalid_argument("network_capacity: negative input");
    return static_cast<long long>(users_per_channel) * channels;
}

int channels_in_band(double band_hz, double channel_hz) {
    if (!(band_hz > 0.0 && channel_hz > 0.0)) throw std::invalid_argument("channels_in_band: bandwidths must be > 0");
    return static_cast<int>(std::floor(band_hz / channel_hz + 1e-9));
}

int code_groups(int order, int users_per_group) {
    if (order < 1 || users_per_group < 1) throw std::invalid_argument("code_groups: inputs must be >= 1");
    return order / users_per_group;
}

int reuse_factor(int channels, int groups) {
    if (channels < 1 || groups < 1) throw std::invalid_argument("reuse_factor: inputs must be >= 1");
    return channels * groups;
}

double coex_lte_power_into_cdma(const CoexParams& coex, double distance_m, double freq_ghz) {
    coex.validate();
    const double per_rb_share = static_cast<double>(coex.lte_users_m) * coex.cdma_equiv_rbs_rc / coex.total_rbs_r;
    const double rx_mw = dbm_to_mw(coex.lte_tx_power_dbm - pathloss_db(distance_m, freq_ghz));
    return mw_to_dbm(3.0 * coex.occupancy_beta * per_rb_share * rx_mw);
}

double ebn0_coex(double lc, int n_users, double pr_c_mw, double q_lte_mw, double eta_mw) {
    return lc * pr_c_mw / (n_users * pr_c_mw + q_lte_mw + eta_mw);
}

double capacity_coex(double lc, double ebn0_req_linear, double pr_c_mw, double q_lte_mw, double eta_mw) {
    if (!(pr_c_mw > 0.0)) throw std::invalid_argument("capacity_coex: P_r^C must be > 0");
    if (!(ebn0_req_linear > 0.0)) throw std::invalid_argument("capacity_coex: Eb/N0 must be > 0");
    return 1.0 + lc / ebn0_req_linear - (q_lte_mw + eta_mw) / pr_c_mw;
}

double capacity_coex(const LinkParams& link, const CoexParams& coex) {
    link.validate();
    const double q = dbm_to_mw(coex_lte_power_into_cdma(coex, link.cell_radius_m, link.freq_ghz));
    return capacity_coex(link.processing_gain(), db_to_linear(link.ebn0_db), dbm_to_mw(link.rx_power_dbm()), q,
                         dbm_to_mw(link.noise_power_dbm()));
}

double lte_sinr_with_cdma_power(const CoexParams& coex, LteCase which, int n_cdma, double pr_c_mw,
                                const LinkParams& link) {
    coex.validate();
    if (n_cdma < 0) throw std::invalid_argument("lte_sinr: n_cdma must be >= 0");
    const double distance = which == LteCase::worst ? link.cell_radius_m : link.cell_radius_m / 2.0;
    const double pr_lte_mw = dbm_to_mw(coex.lte_tx_power_dbm - pathloss_db(distance, link.freq_ghz));
    const double denom = n_cdma * pr_c_mw + dbm_to_mw(link.noise_power_dbm());
    if (!(denom > 0.0)) return kGammaCap;
    return std::min(kGammaCap, coex.overlap_factor_k() * pr_lte_mw / denom);
}

double lte_sinr(const CoexParams& coex, LteCase which, int n_cdma, const LinkParams& link) {
    return lte_sinr_with_cdma_power(coex, which, n_cdma, dbm_to_mw(link.rx_power_dbm()), link);
}

double lte_throughput(double gamma_linear, const CoexParams& coex) {
    if (gamma_linear < 0.0) throw std::invalid_argument("lte_throughput: SINR must be >= 0");
    return coex.shannon_gap_a * coex.lte_bandwidth_hz * std::log2(1.0 + coex.bw_efficiency_b * gamma_linear);
}

double lte_throughput_ratio(const CoexParams& coex, LteCase which, int n_cdma, const LinkParams& link) {
    const double base = lte_throughput(lte_sinr(coex, which, 0, link), coex);
    return lte_throughput(lte_sinr(coex, which, n_cdma, link), coex) / base;
}

}  // namespace cdmaiot::analytic
