#include "cdmaiot/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace cdmaiot {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::optional<double> parse_real(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

[[noreturn]] void fail(std::string_view key, const std::string& what) {
    throw ConfigError(std::string(key) + ": " + what);
}

void require(bool ok, std::string_view key, const std::string& what) {
    if (!ok) fail(key, what);
}

bool is_whole(double v) { return std::isfinite(v) && v == std::floor(v); }

std::vector<traffic::PeriodClass> parse_periodicity(std::string_view text) {
    std::vector<traffic::PeriodClass> out;
    std::string_view rest = text;
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const auto item = trim(rest.substr(0, comma));
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        const auto colon = item.find(':');
        if (colon == std::string_view::npos) fail("periodicity", "expected hours:weight pairs, got '" + std::string(item) + "'");
        const auto hours = parse_real(item.substr(0, colon));
        const auto weight = parse_real(item.substr(colon + 1));
        if (!hours || !weight) fail("periodicity", "bad entry '" + std::string(item) + "'");
        out.push_back({*hours, *weight});
    }
    if (out.empty()) fail("periodicity", "empty mixture");
    return out;
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys{
        // Link budget
        {"w_hz", "1000000", "CDMA channel bandwidth W (Hz)"},
        {"rb_hz", "15625", "IoT bit rate R_b (bit/s)"},
        {"lc", "", "processing gain L_c; when set, R_b = W / L_c"},
        {"ebn0_db", "7", "required Eb/N0 (dB)"},
        {"s_dbm", "", "received CDMA power S (dBm); default P_t - PL(r_d)"},
        {"n0_dbm_hz", "-174", "noise density N_0 (dBm/Hz)"},
        {"pt_dbm", "23", "IoT UE transmit power P_t (dBm)"},
        {"rd_m", "600", "cell radius r_d (m)"},
        {"f_ghz", "2.6205", "carrier frequency (GHz)"},
        // LTE overlay
        {"m", "100", "LTE UEs M"},
        {"r", "100", "LTE resource blocks R"},
        {"rc", "5.5", "CDMA channel width in resource blocks R_c"},
        {"beta", "1", "LTE occupancy factor beta"},
        {"ptl_dbm", "23", "LTE UE transmit power P_t^L (dBm)"},
        {"a", "0.75", "Shannon gap a"},
        {"b", "1", "bandwidth efficiency b"},
        {"wl_hz", "20000000", "LTE bandwidth W_L (Hz)"},
        // Traffic
        {"alpha", "2.5", "Pareto shape of the payload size"},
        {"pl_min", "20", "minimum payload (bytes)"},
        {"pl_max", "200", "payload clip (bytes)"},
        {"periodicity", "24:0.4,2:0.4,1:0.15,0.5:0.05", "period_hours:weight mixture"},
        {"n_ms", "52547", "IoT devices per sector N_MS"},
        {"overhead", "65", "packet overhead (bytes)"},
        {"max_payload", "20", "application bytes per CDMA packet"},
        {"n_sim", "5", "simultaneous CDMA users N in the ledger"},
        {"delta_grid", "2,3", "repetition factors delta of the ledger cases"},
        {"nbiot_ref", "", "NB-IoT reference capacity (bytes/day)"},
        {"draws", "100000", "payload draws for the demand estimate"},
        // Physical layer and packet simulation
        {"order", "64", "spreading code length"},
        {"preamble_code", "63", "Hadamard row of the preamble"},
        {"data_code", "22", "Hadamard row of the target user's data"},
        {"payloads", "10,12,15", "payload sizes of the PER sweep (bytes)"},
        {"snr_grid", "0:8:0.5", "per-chip SNR grid of the PER sweep (dB)"},
        {"packets", "1000", "packets per sweep point"},
        {"chunk_packets", "50", "packets per simulated stream segment"},
        {"threshold", "0.6", "detection threshold of the PER sweep"},
        {"spacing_ms", "60", "inter-packet spacing (ms)"},
        {"idle_compression", "4", "factor dividing the inter-packet spacing"},
        {"window", "10000", "correlation window (samples)"},
        // Multi-user
        {"n_grid", "1,2,4,8,13", "simultaneous users of the multiuser run"},
        {"mu_snr_db", "", "per-chip S/eta of the multiuser run (dB); default from the link budget"},
        {"mu_payload", "15", "payload of the multiuser frames (bytes)"},
        {"mu_trials", "1000", "frames per multiuser point"},
        // Coexistence
        {"coex_snr_grid", "-7.1:-1.4:0.95", "per-chip CDMA SNR grid of the coexistence run (dB)"},
        {"coex_payload", "15", "payload of the coexistence frames (bytes)"},
        {"coex_threshold", "0.25", "detection threshold under the LTE interferer"},
        {"interferer_db", "0", "LTE interferer power relative to the CDMA signal (dB)"},
        {"tones", "12", "interferer subcarriers"},
        {"tone_spacing_hz", "15000", "interferer subcarrier spacing (Hz)"},
        {"tone_offset_hz", "250000", "interferer comb centre offset (Hz)"},
        {"coex_n_cdma", "1", "active CDMA users seen by the LTE receiver"},
        {"lte_case", "average", "LTE UE position: worst or average"},
        // Analytic tables
        {"lc_grid", "16,32,64,128", "processing gains of the BER/capacity table"},
        {"ebn0_grid", "0:12:0.5", "Eb/N0 grid of the BER/capacity table (dB)"},
        {"m_grid", "1,5,10,20,30,40,50,60,70,80,90,100", "LTE UE counts of the coexistence capacity table"},
        {"beta_grid", "0.25,0.5,0.75,1", "occupancy factors of the coexistence capacity table"},
        {"n_lte_grid", "0:20:1", "CDMA user counts of the LTE throughput table"},
        // Threshold calibration
        {"target_fa", "0.001", "target false-alarm rate per window"},
        {"cal_snr_db", "0", "per-chip SNR of the planted calibration frames (dB)"},
        {"cal_trials", "1000", "calibration windows"},
        // Execution
        {"workers", "0", "worker threads; 0 uses the hardware concurrency"},
    };
    return keys;
}

std::string canonical_key(std::string_view key) {
    std::string out(key);
    std::replace(out.begin(), out.end(), '-', '_');
    return out;
}

std::vector<double> parse_grid(std::string_view key, std::string_view text) {
    text = trim(text);
    if (text.empty()) fail(key, "empty grid");
    std::vector<double> out;
    if (text.find(':') != std::string_view::npos) {
        std::vector<double> parts;
        std::string_view rest = text;
        while (true) {
            const auto colon = rest.find(':');
            const auto v = parse_real(rest.substr(0, colon));
            if (!v) fail(key, "bad range '" + std::string(text) + "'");
            parts.push_back(*v);
            if (colon == std::string_view::npos) break;
            rest = rest.substr(colon + 1);
        }
        if (parts.size() != 3) fail(key, "range must be start:stop:step");
        const double start = parts[0], stop = parts[1], step = parts[2];
        if (!(step > 0.0) || stop < start || !std::isfinite(start) || !std::isfinite(stop)) {
            fail(key, "range needs step > 0 and stop >= start");
        }
        const auto count = static_cast<long long>(std::floor((stop - start) / step + 1e-9)) + 1;
        if (count > 1'000'000) fail(key, "range has too many points");
        // Snap to 1e-9 so that accumulated steps print as the values written.
        for (long long i = 0; i < count; ++i) {
            out.push_back(std::round((start + static_cast<double>(i) * step) * 1e9) / 1e9);
        }
        return out;
    }
    std::string_view rest = text;
    while (true) {
        const auto comma = rest.find(',');
        const auto v = parse_real(rest.substr(0, comma));
        if (!v) fail(key, "bad list '" + std::string(text) + "'");
        out.push_back(*v);
        if (comma == std::string_view::npos) break;
        rest = rest.substr(comma + 1);
    }
    return out;
}

Config::Config() {
    for (const auto& k : config_keys()) values_[k.name] = k.default_value;
}

Config Config::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    Config cfg;
    cfg.load_text(text.str(), path.string());
    return cfg;
}

void Config::load_text(std::string_view text, std::string_view source) {
    int line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        auto line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(std::string(source) + ":" + std::to_string(line_no) + ": expected key = value");
        }
        set(trim(line.substr(0, eq)), std::string(trim(line.substr(eq + 1))));
    }
}

void Config::set(std::string_view key, std::string value) {
    const auto name = canonical_key(key);
    const auto it = values_.find(name);
    if (it == values_.end()) throw ConfigError("unknown key '" + std::string(key) + "'");
    it->second = std::move(value);
}

bool Config::has(std::string_view key) const { return !text(key).empty(); }

const std::string& Config::text(std::string_view key) const {
    const auto it = values_.find(canonical_key(key));
    if (it == values_.end()) throw ConfigError("unknown key '" + std::string(key) + "'");
    return it->second;
}

double Config::real(std::string_view key) const {
    const auto& s = text(key);
    const auto v = parse_real(s);
    if (!v) fail(key, s.empty() ? "value required" : "expected a number, got '" + s + "'");
    return *v;
}

std::optional<double> Config::optional_real(std::string_view key) const {
    if (!has(key)) return std::nullopt;
    return real(key);
}

long long Config::integer(std::string_view key) const {
    const double v = real(key);
    if (!is_whole(v)) fail(key, "expected an integer, got '" + text(key) + "'");
    return static_cast<long long>(v);
}

std::vector<double> Config::grid(std::string_view key) const { return parse_grid(key, text(key)); }

std::vector<int> Config::integer_grid(std::string_view key) const {
    std::vector<int> out;
    for (const double v : grid(key)) {
        if (!is_whole(v)) fail(key, "grid values must be integers");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

void Config::validate() const {
    auto positive = [&](std::string_view k) { require(real(k) > 0.0, k, "must be > 0"); };
    auto at_least = [&](std::string_view k, long long lo) {
        require(integer(k) >= lo, k, "must be an integer >= " + std::to_string(lo));
    };
    auto payload = [&](std::string_view k, double v) {
        require(is_whole(v) && v >= 0 && v <= kMaxPayloadBytes, k,
                "payload must be a whole number of bytes in [0, " + std::to_string(kMaxPayloadBytes) + "]");
    };
    auto unit_interval = [&](std::string_view k, double v) { require(v >= 0.0 && v <= 1.0, k, "must lie in [0, 1]"); };
    auto threshold = [&](std::string_view k) {
        const double t = real(k);
        require(t > 0.0 && t <= 1.0, k, "threshold must lie in (0, 1]");
    };

    positive("w_hz");
    positive("rb_hz");
    if (has("lc")) positive("lc");
    (void)real("ebn0_db");
    (void)optional_real("s_dbm");
    (void)real("n0_dbm_hz");
    (void)real("pt_dbm");
    require(real("rd_m") >= 1.0, "rd_m", "must be >= 1 m");
    require(real("f_ghz") > 2.0 && real("f_ghz") < 6.0, "f_ghz", "path-loss model needs 2 < f < 6 GHz");
    require(link_params(*this).bandwidth_w_hz >= link_params(*this).bitrate_rb_hz, "rb_hz", "must not exceed W");

    at_least("m", 1);
    at_least("r", 1);
    positive("rc");
    unit_interval("beta", real("beta"));
    (void)real("ptl_dbm");
    positive("a");
    positive("b");
    positive("wl_hz");

    require(real("alpha") > 1.0, "alpha", "Pareto shape must be > 1");
    positive("pl_min");
    require(real("pl_max") >= real("pl_min"), "pl_max", "must be >= pl_min");
    double weight_sum = 0.0;
    for (const auto& c : parse_periodicity(text("periodicity"))) {
        require(c.period_hours > 0.0 && c.weight >= 0.0, "periodicity", "periods must be > 0 and weights >= 0");
        weight_sum += c.weight;
    }
    require(std::abs(weight_sum - 1.0) <= 1e-9, "periodicity", "weights must sum to 1");
    at_least("n_ms", 0);
    require(real("overhead") >= 0.0, "overhead", "must be >= 0");
    positive("max_payload");
    at_least("n_sim", 0);
    for (const int d : integer_grid("delta_grid")) require(d >= 1, "delta_grid", "repetition factors must be >= 1");
    if (has("nbiot_ref")) require(real("nbiot_ref") >= 0.0, "nbiot_ref", "must be >= 0");
    at_least("draws", 1);

    const auto order = integer("order");
    require(order >= 2 && order <= 1024 && is_power_of_two(order), "order",
            "code order must be a power of two in [2, 1024]");
    for (const char* k : {"preamble_code", "data_code"}) {
        const auto idx = integer(k);
        require(idx >= 0 && idx < order, k, "code index must lie in [0, order)");
    }
    require(integer("preamble_code") != integer("data_code"), "data_code", "must differ from the preamble code");
    for (const double p : grid("payloads")) payload("payloads", p);
    (void)grid("snr_grid");
    at_least("packets", 1);
    at_least("chunk_packets", 1);
    threshold("threshold");
    positive("spacing_ms");
    require(real("idle_compression") >= 1.0, "idle_compression", "must be >= 1");
    require(integer("window") >= order, "window", "must be at least the code order");

    for (const int n : integer_grid("n_grid")) {
        require(n >= 1 && n < order, "n_grid", "user counts must lie in [1, order - 1]");
    }
    (void)optional_real("mu_snr_db");
    payload("mu_payload", real("mu_payload"));
    at_least("mu_trials", 1);

    (void)grid("coex_snr_grid");
    payload("coex_payload", real("coex_payload"));
    threshold("coex_threshold");
    (void)real("interferer_db");
    at_least("tones", 1);
    positive("tone_spacing_hz");
    (void)real("tone_offset_hz");
    at_least("coex_n_cdma", 0);
    require(text("lte_case") == "worst" || text("lte_case") == "average", "lte_case", "must be worst or average");

    for (const double l : grid("lc_grid")) require(l >= 1.0, "lc_grid", "processing gains must be >= 1");
    (void)grid("ebn0_grid");
    for (const int m : integer_grid("m_grid")) require(m >= 1, "m_grid", "UE counts must be >= 1");
    for (const double b : grid("beta_grid")) unit_interval("beta_grid", b);
    for (const int n : integer_grid("n_lte_grid")) require(n >= 0, "n_lte_grid", "user counts must be >= 0");

    const double fa = real("target_fa");
    require(fa > 0.0 && fa <= 1.0, "target_fa", "must lie in (0, 1]");
    (void)real("cal_snr_db");
    at_least("cal_trials", 1);
    at_least("workers", 0);
}

analytic::LinkParams link_params(const Config& cfg) {
    analytic::LinkParams link;
    link.bandwidth_w_hz = cfg.real("w_hz");
    link.bitrate_rb_hz = cfg.has("lc") ? link.bandwidth_w_hz / cfg.real("lc") : cfg.real("rb_hz");
    link.ebn0_db = cfg.real("ebn0_db");
    link.rx_power_s_dbm = cfg.optional_real("s_dbm");
    link.noise_density_dbm_hz = cfg.real("n0_dbm_hz");
    link.tx_power_dbm = cfg.real("pt_dbm");
    link.cell_radius_m = cfg.real("rd_m");
    link.freq_ghz = cfg.real("f_ghz");
    return link;
}

analytic::CoexParams coex_params(const Config& cfg) {
    analytic::CoexParams coex;
    coex.lte_users_m = static_cast<int>(cfg.integer("m"));
    coex.total_rbs_r = static_cast<int>(cfg.integer("r"));
    coex.cdma_equiv_rbs_rc = cfg.real("rc");
    coex.occupancy_beta = cfg.real("beta");
    coex.lte_tx_power_dbm = cfg.real("ptl_dbm");
    coex.shannon_gap_a = cfg.real("a");
    coex.bw_efficiency_b = cfg.real("b");
    coex.lte_bandwidth_hz = cfg.real("wl_hz");
    return coex;
}

traffic::TrafficProfile traffic_profile(const Config& cfg) {
    traffic::TrafficProfile p;
    p.pareto_alpha = cfg.real("alpha");
    p.pl_min_bytes = cfg.real("pl_min");
    p.pl_max_bytes = cfg.real("pl_max");
    p.periodicity_mix = parse_periodicity(cfg.text("periodicity"));
    p.devices_per_sector = cfg.integer("n_ms");
    p.overhead_bytes = cfg.real("overhead");
    p.max_payload_bytes = cfg.real("max_payload");
    return p;
}

FrameConfig frame_config(const Config& cfg) {
    FrameConfig f;
    f.order = static_cast<int>(cfg.integer("order"));
    f.preamble_code_index = static_cast<int>(cfg.integer("preamble_code"));
    f.data_code_index = static_cast<int>(cfg.integer("data_code"));
    return f;
}

InterfererConfig interferer_config(const Config& cfg) {
    InterfererConfig i;
    i.power_ratio_db = cfg.real("interferer_db");
    i.num_tones = static_cast<int>(cfg.integer("tones"));
    i.tone_spacing_hz = cfg.real("tone_spacing_hz");
    i.center_offset_hz = cfg.real("tone_offset_hz");
    i.occupancy = cfg.real("beta");
    return i;
}

}  // namespace cdmaiot
