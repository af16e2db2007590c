#pragma once

// IoT demand model (truncated Pareto payloads, periodicity mixture, device
// density) and the daily demand/supply ledger.

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "cdmaiot/analytic.hpp"
#include "json.hpp"

namespace cdmaiot::traffic {

struct PeriodClass {
    double period_hours = 24.0;
    double weight = 1.0;
};

struct TrafficProfile {
    double pareto_alpha = 2.5;
    double pl_min_bytes = 20.0;
    double pl_max_bytes = 200.0;
    std::vector<PeriodClass> periodicity_mix{{24.0, 0.40}, {2.0, 0.40}, {1.0, 0.15}, {0.5, 0.05}};
    long long devices_per_sector = 52'547;
    double overhead_bytes = 65.0;
    double max_payload_bytes = 20.0;  ///< application bytes carried per CDMA packet
    int repetition_delta = 2;

    /// Throws std::invalid_argument when the weights do not sum to 1 (within
    /// 1e-9), alpha <= 1, or any size/count is out of domain.
    void validate() const;
};

/// Inverse-CDF draw: x_m (1 - u)^(-1/alpha), clipped at the maximum and
/// rounded to whole bytes. u in [0, 1).
[[nodiscard]] int payload_from_uniform(const TrafficProfile& profile, double u);

[[nodiscard]] int sample_payload(const TrafficProfile& profile, std::mt19937_64& rng);
[[nodiscard]] int sample_payload(const TrafficProfile& profile, std::uint64_t seed);

/// Sum over classes of weight * 24 h / period.
[[nodiscard]] double messages_per_device_per_day(const TrafficProfile& profile);

/// Monte-Carlo mean payload over `draws` samples.
[[nodiscard]] double mean_payload_bytes(const TrafficProfile& profile, std::uint64_t seed, int draws = 100'000);

/// devices * messages/day * mean sampled payload (application bytes only).
[[nodiscard]] double daily_demand_bytes(const TrafficProfile& profile, std::uint64_t seed, int draws = 100'000);

/// R_b/8 * 86400 * n * payload / (payload + overhead) / delta, bytes per day,
/// with R_b = W / L_c from the link.
[[nodiscard]] double cdma_supply_bytes(int n_simultaneous, int delta, const analytic::LinkParams& link,
                                       const TrafficProfile& profile);

struct CapacityLedger {
    double demand_bytes_per_day = 0.0;
    double supply_bytes_per_day = 0.0;
    std::optional<double> nbiot_reference_bytes_per_day;
    bool feasible = false;
};

[[nodiscard]] CapacityLedger build_ledger(const TrafficProfile& profile, int n_simultaneous, int delta,
                                          const analytic::LinkParams& link, std::optional<double> nbiot_reference,
                                          std::uint64_t seed, int draws = 100'000);

/// Ledger with an already-computed demand figure.
[[nodiscard]] CapacityLedger build_ledger_for_demand(double demand_bytes_per_day, int n_simultaneous, int delta,
                                                     const analytic::LinkParams& link, const TrafficProfile& profile,
                                                     std::optional<double> nbiot_reference);

[[nodiscard]] nlohmann::json to_json(const CapacityLedger& ledger);

}  // namespace cdmaiot::traffic
