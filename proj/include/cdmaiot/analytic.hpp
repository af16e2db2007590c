#pragma once

// Closed-form link budget, CDMA capacity and LTE coexistence model.
//
// Powers are carried in mW (linear) inside the formulas and in dBm at the
// interfaces; Eb/N0 is passed in dB or linear as the parameter name says.

#include <optional>

namespace cdmaiot::analytic {

[[nodiscard]] double db_to_linear(double db) noexcept;
[[nodiscard]] double linear_to_db(double linear) noexcept;
[[nodiscard]] inline double dbm_to_mw(double dbm) noexcept { return db_to_linear(dbm); }
[[nodiscard]] inline double mw_to_dbm(double mw) noexcept { return linear_to_db(mw); }

/// Gaussian tail probability, Q(x) = erfc(x / sqrt 2) / 2.
[[nodiscard]] double q_function(double x) noexcept;

/// Standalone CDMA link. Defaults: 1 MHz channel, 15.625 kbit/s, 600 m cell edge at 2.6205 GHz.
struct LinkParams {
    double bandwidth_w_hz = 1.0e6;
    double bitrate_rb_hz = 15'625.0;
    double ebn0_db = 7.0;
    /// Received power S. When unset it is tx_power_dbm minus the path loss at
    /// the cell edge.
    std::optional<double> rx_power_s_dbm;
    double noise_density_dbm_hz = -174.0;
    double tx_power_dbm = 23.0;
    double cell_radius_m = 600.0;
    double freq_ghz = 2.6205;

    void validate() const;

    [[nodiscard]] double processing_gain() const;
    [[nodiscard]] double rx_power_dbm() const;
    /// Noise power eta over the CDMA bandwidth W.
    [[nodiscard]] double noise_power_dbm() const;
    [[nodiscard]] double eta_over_s() const;
};

enum class LteCase { worst, average };

/// LTE overlay. Each of the M UEs holds R/M resource blocks.
struct CoexParams {
    int lte_users_m = 100;
    int total_rbs_r = 100;
    double cdma_equiv_rbs_rc = 5.5;  ///< 1 MHz / 180 kHz
    double occupancy_beta = 1.0;
    double lte_tx_power_dbm = 23.0;
    double shannon_gap_a = 0.75;
    double bw_efficiency_b = 1.0;
    double lte_bandwidth_hz = 20.0e6;

    void validate() const;

    /// K = R_c * M / R.
    [[nodiscard]] double overlap_factor_k() const noexcept {
        return cdma_equiv_rbs_rc * lte_users_m / total_rbs_r;
    }
};

/// L_c = W / R_b.
[[nodiscard]] double processing_gain(double w_hz, double rb_hz);

/// BPSK bit error probability Q(sqrt(2 Eb/N0)).
[[nodiscard]] double ber_bpsk(double ebn0_db) noexcept;

/// Eb/N0 (linear) seen by each of N equal-power users:
/// (W/R_b) / ((N - 1) + eta/S).
[[nodiscard]] double ebn0_standalone(double lc, int n_users, double eta_over_s);

/// N = 1 + L_c / (Eb/N0) - eta/S.
[[nodiscard]] double capacity_standalone(double lc, double ebn0_linear, double eta_over_s);

/// Integer user count: floor(N), never negative.
[[nodiscard]] int users_supported(double capacity) noexcept;

/// Users per channel times channel count.
[[nodiscard]] long long network_capacity(int users_per_channel, int channels);
/// Number of W-wide channels that fit in a band.
[[nodiscard]] int channels_in_band(double band_hz, double channel_hz);
/// Groups of `users_per_group` mutually exclusive code rows out of `order` rows.
[[nodiscard]] int code_groups(int order, int users_per_group);
/// Code-channel reuse factor: channels times code groups.
[[nodiscard]] int reuse_factor(int channels, int code_groups);

/// Q_Rc^L = 3 beta (M R_c / R) P_t^L / PL(d, f), in dBm (-inf when beta = 0).
[[nodiscard]] double coex_lte_power_into_cdma(const CoexParams& coex, double distance_m, double freq_ghz);

/// CDMA Eb/N0 under LTE interference: L_c P_r / (N P_r + Q + eta).
[[nodiscard]] double ebn0_coex(double lc, int n_users, double pr_c_mw, double q_lte_mw, double eta_mw);

/// N = 1 + L_c / (Eb/N0) - (Q + eta) / P_r. Throws if pr_c_mw <= 0.
[[nodiscard]] double capacity_coex(double lc, double ebn0_req_linear, double pr_c_mw, double q_lte_mw, double eta_mw);

/// Convenience wrapper: coexistence capacity with Q and P_r derived from the
/// link and overlay parameters.
[[nodiscard]] double capacity_coex(const LinkParams& link, const CoexParams& coex);

/// Linear LTE SINR cap for degenerate (interference- and noise-free) cases.
inline constexpr double kGammaCap = 1.0e6;

/// Gamma = K P_r^L / (N P_r^C + eta), with the LTE UE at r_d (worst) or r_d/2
/// (average). CDMA users arrive at the link's received power S.
[[nodiscard]] double lte_sinr(const CoexParams& coex, LteCase which, int n_cdma, const LinkParams& link);

/// Same, with the per-user CDMA received power given explicitly (mW).
[[nodiscard]] double lte_sinr_with_cdma_power(const CoexParams& coex, LteCase which, int n_cdma, double pr_c_mw,
                                              const LinkParams& link);

/// T = a W_L log2(1 + b Gamma), bits/s. Throws for negative gamma.
[[nodiscard]] double lte_throughput(double gamma_linear, const CoexParams& coex);

/// T(n_cdma) / T(0) for the given case.
[[nodiscard]] double lte_throughput_ratio(const CoexParams& coex, LteCase which, int n_cdma, const LinkParams& link);

}  // namespace cdmaiot::analytic
