#include "cdmaiot/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cdmaiot::traffic {

void TrafficProfile::validate() const {
    if (!(pareto_alpha > 1.0)) throw std::invalid_argument("TrafficProfile: alpha must be > 1");
    if (!(pl_min_bytes > 0.0 && pl_max_bytes >= pl_min_bytes)) {
        throw std::invalid_argument("TrafficProfile: need 0 < pl_min <= pl_max");
    }
    if (periodicity_mix.empty()) throw std::invalid_argument("TrafficProfile: empty periodicity mixture");
    double total = 0.0;
    for (const auto& c : periodicity_mix) {
        if (!(c.period_hours > 0.0) || c.weight < 0.0) {
            throw std::invalid_argument("TrafficProfile: periods must be > 0 and weights >= 0");
        }
        total += c.weight;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw std::invalid_argument("TrafficProfile: periodicity weights sum to " + std::to_string(total) +
                                    ", expected 1");
    }
    if (devices_per_sector < 0) throw std::invalid_argument("TrafficProfile: negative device count");
    if (overhead_bytes < 0.0 || !(max_payload_bytes > 0.0)) {
        throw std::invalid_argument("TrafficProfile: bad packet overhead or payload size");
    }
    if (repetition_delta < 1) throw std::invalid_argument("TrafficProfile: repetition factor must be >= 1");
}

int payload_from_uniform(const TrafficProfile& profile, double u) {
    if (!(u >= 0.0 && u < 1.0)) throw std::invalid_argument("payload_from_uniform: u must lie in [0, 1)");
    const double x = profile.pl_min_bytes * std::pow(1.0 - u, -1.0 / profile.pareto_alpha);
    return static_cast<int>(std::lround(std::min(x, profile.pl_max_bytes)));
}

int sample_payload(const TrafficProfile& profile, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    return payload_from_uniform(profile, unit(rng));
}

int sample_payload(const TrafficProfile& profile, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return sample_payload(profile, rng);
}

double messages_per_device_per_day(const TrafficProfile& profile) {
    profile.validate();
    double total = 0.0;
    for (const auto& c : profile.periodicity_mix) total += c.weight * 24.0 / c.period_hours;
    return total;
}

double mean_payload_bytes(const TrafficProfile& profile, std::uint64_t seed, int draws) {
    profile.validate();
    if (draws < 1) throw std::invalid_argument("mean_payload_bytes: draws must be >= 1");
    std::mt19937_64 rng(seed);
    double total = 0.0;
    for (int i = 0; i < draws; ++i) total += sample_payload(profile, rng);
    return total / draws;
}

double daily_demand_bytes(const TrafficProfile& profile, std::uint64_t seed, int draws) {
    profile.validate();
    if (profile.devices_per_sector == 0) return 0.0;
    return static_cast<double>(profile.devices_per_sector) * messages_per_device_per_day(profile) *
           mean_payload_bytes(profile, seed, draws);
}

double cdma_supply_bytes(int n_simultaneous, int delta, const analytic::LinkParams& link,
                         const TrafficProfile& profile) {
    if (n_simultaneous < 0) throw std::invalid_argument("cdma_supply_bytes: negative user count");
    if (delta < 1) throw std::invalid_argument("cdma_supply_bytes: repetition factor must be >= 1");
    link.validate();
    const double rb = link.bandwidth_w_hz / link.processing_gain();
    const double efficiency = profile.max_payload_bytes / (profile.max_payload_bytes + profile.overhead_bytes);
    return rb / 8.0 * 86'400.0 * n_simultaneous * efficiency / delta;
}

CapacityLedger build_ledger_for_demand(double demand_bytes_per_day, int n_simultaneous, int delta,
                                       const analytic::LinkParams& link, const TrafficProfile& profile,
                                       std::optional<double> nbiot_reference) {
    CapacityLedger ledger;
    ledger.demand_bytes_per_day = demand_bytes_per_day;
    ledger.supply_bytes_per_day = cdma_supply_bytes(n_simultaneous, delta, link, profile);
    ledger.nbiot_reference_bytes_per_day = nbiot_reference;
    ledger.feasible = ledger.supply_bytes_per_day >= ledger.demand_bytes_per_day;
    return ledger;
}

CapacityLedger build_ledger(const TrafficProfile& profile, int n_simultaneous, int delta,
                            const analytic::LinkParams& link, std::optional<double> nbiot_reference,
                            std::uint64_t seed, int draws) {
    return build_ledger_for_demand(daily_demand_bytes(profile, seed, draws), n_simultaneous, delta, link, profile,
                                   nbiot_reference);
}

nlohmann::json to_json(const CapacityLedger& ledger) {
    return {
        {"demand_bytes_per_day", ledger.demand_bytes_per_day},
        {"supply_bytes_per_day", ledger.supply_bytes_per_day},
        {"nbiot_reference_bytes_per_day", ledger.nbiot_reference_bytes_per_day
                                              ? nlohmann::json(*ledger.nbiot_reference_bytes_per_day)
                                              : nlohmann::json(nullptr)},
        {"feasible", ledger.feasible},
    };
}

}  // namespace cdmaiot::traffic
