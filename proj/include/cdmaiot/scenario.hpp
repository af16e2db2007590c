#pragma once

// Named experiments and their reproducible outputs.
//
// A run is fully described by (scenario name, parameter set, seed). Sweep
// points run on a small work queue; results are stored by grid index so the
// output never depends on scheduling or worker count.
//
// Seed layout. Stream-level draws use trial_seed(base, index) with the bases
// below, where `seed` is the run seed:
//   payload bytes   seed
//   channel noise   seed + kNoiseSeedOffset
//   interferer      seed + kInterfererSeedOffset
// The same bases are reused at every grid point (common random numbers), so
// PER curves differ only through the swept parameter.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "cdmaiot/config.hpp"
#include "cdmaiot/frame.hpp"
#include "cdmaiot/rx.hpp"
#include "cdmaiot/table.hpp"
#include "json.hpp"

namespace cdmaiot {

inline constexpr const char* kToolName = "cdmaiot-sim";
inline constexpr const char* kToolVersion = "0.1.0";

inline constexpr std::uint64_t kNoiseSeedOffset = 1ULL << 32;
inline constexpr std::uint64_t kInterfererSeedOffset = 2ULL << 32;

/// Runs fn(i) for i in [0, n) on up to `workers` threads (0 = hardware
/// concurrency). The first exception thrown by any job is rethrown.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn);

// ---------------------------------------------------------------------------
// Packet-level simulation

struct PacketRunSpec {
    FrameConfig frame;
    double threshold = 0.6;
    double snr_db = 0.0;  ///< per chip, noise referenced to unit signal power
    std::size_t payload_bytes = 15;
    std::size_t packets = 1000;
    std::size_t chunk_packets = 50;
    std::size_t spacing_samples = 15'000;  ///< preamble-to-preamble distance
    std::size_t window_samples = 10'000;
    std::optional<InterfererConfig> interferer;
    std::uint64_t seed = 1;
};

/// Plants `packets` random frames at fixed spacing, adds noise (and the
/// interferer), and decodes the stream against the planted offsets.
[[nodiscard]] LinkReport simulate_packets(const PacketRunSpec& spec);

struct MultiuserPoint {
    int n_users = 1;
    std::uint64_t trials = 0;
    std::uint64_t frame_errors = 0;
    std::uint64_t bits = 0;
    std::uint64_t bit_errors = 0;
    double measured_sinr_db = 0.0;  ///< per chip, from the data-aided despread statistics
    double theory_sinr_db = 0.0;    ///< S / ((N - 1) S + eta), per chip

    [[nodiscard]] double per() const { return trials ? static_cast<double>(frame_errors) / trials : 0.0; }
    [[nodiscard]] double ber() const { return bits ? static_cast<double>(bit_errors) / bits : 0.0; }
};

/// n equal-power asynchronous users. User 0 sends on the frame's data code;
/// every other user gets a distinct random code (never the preamble or the
/// target code) and a random chip delay, and transmits back-to-back frames
/// covering user 0's frame. User 0 is decoded at its known offset.
/// snr_db is S / eta per chip. Throws std::invalid_argument when n exceeds
/// the order - 1 available codes.
[[nodiscard]] MultiuserPoint simulate_multiuser(const FrameConfig& frame, int n_users, double snr_db,
                                                std::size_t payload_bytes, std::size_t trials, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Scenarios

enum class OutputFormat { csv, json };

[[nodiscard]] OutputFormat parse_format(const std::string& text);
[[nodiscard]] std::string format_name(OutputFormat format);

struct ScenarioSpec {
    std::string name;
    Config params;
    std::uint64_t seed = 1;
    std::string output_path;
    OutputFormat format = OutputFormat::csv;
};

struct ScenarioResult {
    std::vector<Table> tables;
    nlohmann::json derived_seeds = nlohmann::json::object();
    nlohmann::json summary = nlohmann::json::object();
};

[[nodiscard]] const std::vector<std::string>& scenario_names();

/// Validates the parameters and runs the named scenario. Throws ConfigError
/// for bad parameters and std::invalid_argument for an unknown scenario.
[[nodiscard]] ScenarioResult run_scenario(const ScenarioSpec& spec);

[[nodiscard]] ScenarioResult run_per_sweep(const Config& cfg, std::uint64_t seed);
[[nodiscard]] ScenarioResult run_multiuser(const Config& cfg, std::uint64_t seed);
[[nodiscard]] ScenarioResult run_coex(const Config& cfg, std::uint64_t seed);
[[nodiscard]] ScenarioResult run_capacity_tables(const Config& cfg);
[[nodiscard]] ScenarioResult run_traffic_ledger(const Config& cfg, std::uint64_t seed);
[[nodiscard]] ScenarioResult run_calibrate(const Config& cfg, std::uint64_t seed);

/// Single JSON document for the whole result (no timestamp, deterministic).
[[nodiscard]] nlohmann::json result_json(const ScenarioSpec& spec, const ScenarioResult& result);

/// Rendered output files: one CSV per table (suffixed with the table name
/// when there are several), or one JSON document.
[[nodiscard]] std::vector<std::pair<std::filesystem::path, std::string>> render_outputs(
    const ScenarioSpec& spec, const ScenarioResult& result);

[[nodiscard]] std::filesystem::path manifest_path(const std::string& output_path);
[[nodiscard]] nlohmann::json make_manifest(const ScenarioSpec& spec, const ScenarioResult& result,
                                           const std::string& timestamp);
/// Inverse of make_manifest for the run-defining fields.
[[nodiscard]] ScenarioSpec spec_from_manifest(const nlohmann::json& manifest);

/// Writes the rendered outputs and the manifest sidecar. Returns the paths.
std::vector<std::filesystem::path> write_outputs(const ScenarioSpec& spec, const ScenarioResult& result);

[[nodiscard]] std::string utc_timestamp();

}  // namespace cdmaiot
