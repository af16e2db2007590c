#pragma once

// Flat key = value parameter sets.
//
// Every accepted key is listed in the registry with its default; anything else
// is rejected. Keys follow the symbols of the link-budget and traffic tables
// (w_hz, rb_hz, lc, beta, m, ...). Lines starting with '#' are comments.
//
// Grids are written either as a comma list ("10,12,15") or as
// start:stop:step ("0:8:0.5", both ends included).

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cdmaiot/analytic.hpp"
#include "cdmaiot/channel.hpp"
#include "cdmaiot/frame.hpp"
#include "cdmaiot/traffic.hpp"

namespace cdmaiot {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct ConfigKey {
    std::string name;
    std::string default_value;  ///< empty means unset
    std::string description;
};

/// All accepted keys in documentation order.
[[nodiscard]] const std::vector<ConfigKey>& config_keys();

/// Parses "a,b,c" or "start:stop:step". Throws ConfigError naming `key`.
[[nodiscard]] std::vector<double> parse_grid(std::string_view key, std::string_view text);

class Config {
public:
    /// Registry defaults.
    Config();

    [[nodiscard]] static Config from_file(const std::filesystem::path& path);

    /// Reads key = value lines. `source` names the input in error messages.
    void load_text(std::string_view text, std::string_view source = "<config>");

    /// Throws ConfigError for an unknown key. Accepts '-' in place of '_'.
    void set(std::string_view key, std::string value);

    [[nodiscard]] bool has(std::string_view key) const;  ///< set to a non-empty value
    [[nodiscard]] const std::string& text(std::string_view key) const;
    [[nodiscard]] double real(std::string_view key) const;
    [[nodiscard]] std::optional<double> optional_real(std::string_view key) const;
    [[nodiscard]] long long integer(std::string_view key) const;
    [[nodiscard]] std::vector<double> grid(std::string_view key) const;
    [[nodiscard]] std::vector<int> integer_grid(std::string_view key) const;

    [[nodiscard]] const std::map<std::string, std::string>& values() const noexcept { return values_; }

    /// Domain checks on every key (beta in [0, 1], payload <= 15 bytes,
    /// power-of-two code order, ...). Throws ConfigError naming the key.
    void validate() const;

    friend bool operator==(const Config&, const Config&) = default;

private:
    std::map<std::string, std::string> values_;
};

[[nodiscard]] std::string canonical_key(std::string_view key);

[[nodiscard]] analytic::LinkParams link_params(const Config& cfg);
[[nodiscard]] analytic::CoexParams coex_params(const Config& cfg);
[[nodiscard]] traffic::TrafficProfile traffic_profile(const Config& cfg);
[[nodiscard]] FrameConfig frame_config(const Config& cfg);
/// Interferer for the coexistence runs (power, comb, occupancy = beta).
[[nodiscard]] InterfererConfig interferer_config(const Config& cfg);

}  // namespace cdmaiot
