#include "cdmaiot/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

#include "cdmaiot/analytic.hpp"
#include "cdmaiot/traffic.hpp"

namespace cdmaiot {

namespace {

using nlohmann::json;

std::vector<std::uint8_t> random_bytes(std::mt19937_64& rng, std::size_t n) {
    std::uniform_int_distribution<int> byte(0, 255);
    std::vector<std::uint8_t> out(n);
    for (auto& b : out) b = static_cast<std::uint8_t>(byte(rng));
    return out;
}

std::uint8_t random_address(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> byte(0, 255);
    return static_cast<std::uint8_t>(byte(rng));
}

unsigned worker_count(const Config& cfg) { return static_cast<unsigned>(cfg.integer("workers")); }

std::size_t packet_spacing(const Config& cfg) {
    const double samples = cfg.real("spacing_ms") * 1e-3 * kDefaultChipRateHz / cfg.real("idle_compression");
    return static_cast<std::size_t>(std::llround(samples));
}

PacketRunSpec packet_spec(const Config& cfg, std::uint64_t seed) {
    PacketRunSpec spec;
    spec.frame = frame_config(cfg);
    spec.packets = static_cast<std::size_t>(cfg.integer("packets"));
    spec.chunk_packets = static_cast<std::size_t>(cfg.integer("chunk_packets"));
    spec.spacing_samples = packet_spacing(cfg);
    spec.window_samples = static_cast<std::size_t>(cfg.integer("window"));
    spec.seed = seed;
    const auto longest = frame_chip_length(kMaxPayloadBytes, spec.frame.order);
    if (spec.spacing_samples < longest + static_cast<std::size_t>(spec.frame.order)) {
        throw ConfigError("idle_compression: packet spacing of " + std::to_string(spec.spacing_samples) +
                          " samples is shorter than a frame");
    }
    return spec;
}

json stream_seeds(std::uint64_t seed) {
    return {{"payload", seed}, {"noise", seed + kNoiseSeedOffset}, {"interferer", seed + kInterfererSeedOffset},
            {"rule", "trial_seed = base + stream_segment_index"}};
}

Cell real_cell(std::optional<double> v) { return v ? Cell{*v} : Cell{}; }
Cell int_cell(long long v) { return Cell{static_cast<std::int64_t>(v)}; }

}  // namespace

void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    if (workers == 0) workers = std::max(1U, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto drain = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                const std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next = n;
            }
        }
    };
    if (workers == 1) {
        drain();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(drain);
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);
}

LinkReport simulate_packets(const PacketRunSpec& spec) {
    spec.frame.validate();
    if (spec.payload_bytes > kMaxPayloadBytes) throw std::invalid_argument("simulate_packets: payload too long");
    if (spec.packets == 0 || spec.chunk_packets == 0) {
        throw std::invalid_argument("simulate_packets: packet and chunk counts must be >= 1");
    }
    const std::size_t frame_len = frame_chip_length(spec.payload_bytes, spec.frame.order);
    if (spec.spacing_samples < frame_len) throw std::invalid_argument("simulate_packets: spacing shorter than a frame");

    auto det = DetectorConfig::for_frame(spec.frame, spec.threshold);
    det.window_samples = std::max(spec.window_samples, det.preamble.length());
    const double noise_var = std::isinf(spec.snr_db) ? 0.0 : std::pow(10.0, -spec.snr_db / 10.0);

    LinkReport total;
    total.chips_per_bit = spec.frame.order;
    const std::size_t chunks = (spec.packets + spec.chunk_packets - 1) / spec.chunk_packets;
    for (std::size_t c = 0; c < chunks; ++c) {
        const std::size_t count = std::min(spec.chunk_packets, spec.packets - c * spec.chunk_packets);
        std::vector<double> x(count * spec.spacing_samples, 0.0);
        std::vector<std::size_t> planted;
        std::mt19937_64 rng(trial_seed(spec.seed, c));
        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t offset = i * spec.spacing_samples + (spec.spacing_samples - frame_len);
            const auto payload = random_bytes(rng, spec.payload_bytes);
            const auto frame = build_frame(random_address(rng), payload, spec.frame);
            std::copy(frame.samples.begin(), frame.samples.end(), x.begin() + static_cast<std::ptrdiff_t>(offset));
            planted.push_back(offset);
        }
        add_gaussian_noise(x, noise_var, trial_seed(spec.seed + kNoiseSeedOffset, c));
        if (spec.interferer) {
            const auto tones = ofdm_interferer(x.size(), *spec.interferer, trial_seed(spec.seed + kInterfererSeedOffset, c));
            for (std::size_t i = 0; i < x.size(); ++i) x[i] += tones.samples[i];
        }
        total += decode_stream(x, det, spec.frame, std::span<const std::size_t>(planted)).report;
    }
    return total;
}

MultiuserPoint simulate_multiuser(const FrameConfig& frame, int n_users, double snr_db, std::size_t payload_bytes,
                                  std::size_t trials, std::uint64_t seed) {
    frame.validate();
    if (n_users < 1 || n_users > frame.order - 1) {
        throw std::invalid_argument("simulate_multiuser: " + std::to_string(n_users) + " users exceed the " +
                                    std::to_string(frame.order - 1) + " available codes");
    }
    if (payload_bytes > kMaxPayloadBytes) throw std::invalid_argument("simulate_multiuser: payload too long");
    if (trials == 0) throw std::invalid_argument("simulate_multiuser: trials must be >= 1");

    std::vector<int> pool;
    for (int i = 0; i < frame.order; ++i) {
        if (i != frame.preamble_code_index && i != frame.data_code_index) pool.push_back(i);
    }
    const std::size_t frame_len = frame_chip_length(payload_bytes, frame.order);
    const double noise_var = std::isinf(snr_db) ? 0.0 : std::pow(10.0, -snr_db / 10.0);

    MultiuserPoint out;
    out.n_users = n_users;
    double sum = 0.0;
    double sq_sum = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        std::mt19937_64 rng(trial_seed(seed, t));
        const auto payload = random_bytes(rng, payload_bytes);
        const auto address = random_address(rng);
        const auto target = build_frame(address, payload, frame);

        std::vector<ChipSequence> others;
        std::vector<StreamPlacement> streams{{target.view(), frame_len, 1.0}};
        std::shuffle(pool.begin(), pool.end(), rng);
        std::uniform_int_distribution<std::size_t> delay(0, frame_len - 1);
        others.reserve(static_cast<std::size_t>(n_users - 1));
        for (int k = 1; k < n_users; ++k) {
            const FrameConfig fk{frame.preamble_code_index, pool[static_cast<std::size_t>(k - 1)], frame.order};
            auto first = build_frame(random_address(rng), random_bytes(rng, payload_bytes), fk);
            const auto second = build_frame(random_address(rng), random_bytes(rng, payload_bytes), fk);
            first.samples.insert(first.samples.end(), second.samples.begin(), second.samples.end());
            others.push_back(std::move(first));
        }
        for (const auto& o : others) streams.push_back({o.view(), delay(rng), 1.0});

        auto rx = superpose(streams);
        add_gaussian_noise(rx.samples, noise_var, trial_seed(seed + kNoiseSeedOffset, t));

        const auto sent = make_frame(address, payload);
        const auto bits = frame_bits(sent);
        const auto decoded = decode_at(rx.samples, frame_len, frame);
        ++out.trials;
        if (!decoded || !decoded->parsed.crc_ok || decoded->parsed.frame != sent) ++out.frame_errors;
        if (!decoded) continue;
        for (std::size_t j = 0; j < bits.size() && j < decoded->soft_bits.size(); ++j) {
            const double y = decoded->soft_bits[j] * bpsk_symbol(bits[j]);
            sum += y;
            sq_sum += y * y;
            ++out.bits;
            if (y < 0.0) ++out.bit_errors;
        }
    }
    const double lc = frame.order;
    if (out.bits > 0) {
        const double n = static_cast<double>(out.bits);
        const double mean = sum / n;
        const double var = sq_sum / n - mean * mean;
        out.measured_sinr_db = analytic::linear_to_db(mean * mean / (var * lc));
    }
    out.theory_sinr_db = analytic::linear_to_db(1.0 / ((n_users - 1) + noise_var));
    return out;
}

OutputFormat parse_format(const std::string& text) {
    if (text == "csv") return OutputFormat::csv;
    if (text == "json") return OutputFormat::json;
    throw std::invalid_argument("unknown output format '" + text + "' (expected csv or json)");
}

std::string format_name(OutputFormat format) { return format == OutputFormat::csv ? "csv" : "json"; }

const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names{"per-sweep",      "multiuser",      "coex",
                                                "capacity-tables", "traffic-ledger", "calibrate"};
    return names;
}

ScenarioResult run_scenario(const ScenarioSpec& spec) {
    spec.params.validate();
    if (spec.name == "per-sweep") return run_per_sweep(spec.params, spec.seed);
    if (spec.name == "multiuser") return run_multiuser(spec.params, spec.seed);
    if (spec.name == "coex") return run_coex(spec.params, spec.seed);
    if (spec.name == "capacity-tables") return run_capacity_tables(spec.params);
    if (spec.name == "traffic-ledger") return run_traffic_ledger(spec.params, spec.seed);
    if (spec.name == "calibrate") return run_calibrate(spec.params, spec.seed);
    throw std::invalid_argument("unknown scenario '" + spec.name + "'");
}

ScenarioResult run_per_sweep(const Config& cfg, std::uint64_t seed) {
    const auto base = packet_spec(cfg, seed);
    const auto snrs = cfg.grid("snr_grid");
    const auto payloads = cfg.integer_grid("payloads");
    const double threshold = cfg.real("threshold");

    std::vector<LinkReport> reports(snrs.size() * payloads.size());
    parallel_for(reports.size(), worker_count(cfg), [&](std::size_t job) {
        auto spec = base;
        spec.payload_bytes = static_cast<std::size_t>(payloads[job / snrs.size()]);
        spec.snr_db = snrs[job % snrs.size()];
        spec.threshold = threshold;
        reports[job] = simulate_packets(spec);
    });

    Table table{"per_sweep",
                {"snr_db", "payload_bytes", "per", "packets", "packets_detected", "false_detections", "mean_snr_db"},
                {}};
    for (std::size_t job = 0; job < reports.size(); ++job) {
        const auto& r = reports[job];
        table.add_row({snrs[job % snrs.size()], int_cell(payloads[job / snrs.size()]), real_cell(r.per()),
                       int_cell(static_cast<long long>(r.packets_sent)),
                       int_cell(static_cast<long long>(r.packets_detected)),
                       int_cell(static_cast<long long>(r.false_detections)), real_cell(r.mean_snr_db())});
    }
    ScenarioResult result;
    result.tables.push_back(std::move(table));
    result.derived_seeds = stream_seeds(seed);
    result.summary = {{"spacing_samples", base.spacing_samples}, {"idle_compression", cfg.real("idle_compression")}};
    return result;
}

ScenarioResult run_multiuser(const Config& cfg, std::uint64_t seed) {
    const auto frame = frame_config(cfg);
    const auto link = link_params(cfg);
    const double snr_db = cfg.has("mu_snr_db") ? cfg.real("mu_snr_db") : -analytic::linear_to_db(link.eta_over_s());
    const auto n_grid = cfg.integer_grid("n_grid");
    const auto payload = static_cast<std::size_t>(cfg.integer("mu_payload"));
    const auto trials = static_cast<std::size_t>(cfg.integer("mu_trials"));

    std::vector<MultiuserPoint> points(n_grid.size());
    parallel_for(points.size(), worker_count(cfg), [&](std::size_t i) {
        points[i] = simulate_multiuser(frame, n_grid[i], snr_db, payload, trials, seed);
    });

    Table table{"multiuser",
                {"n_users", "target_per", "mean_soft_sinr_db", "theory_sinr_db", "ber", "per_binomial_oracle",
                 "trials"},
                {}};
    const double frame_bits_count = static_cast<double>(frame_bit_length(payload));
    for (const auto& p : points) {
        const double pb = analytic::q_function(std::sqrt(frame.order * analytic::db_to_linear(p.theory_sinr_db)));
        table.add_row({int_cell(p.n_users), p.per(), p.measured_sinr_db, p.theory_sinr_db, p.ber(),
                       1.0 - std::pow(1.0 - pb, frame_bits_count), int_cell(static_cast<long long>(p.trials))});
    }
    ScenarioResult result;
    result.tables.push_back(std::move(table));
    result.derived_seeds = {{"trial", seed}, {"noise", seed + kNoiseSeedOffset}, {"rule", "trial_seed = base + trial_index"}};
    result.summary = {{"snr_db", snr_db}};
    return result;
}

ScenarioResult run_coex(const Config& cfg, std::uint64_t seed) {
    auto base = packet_spec(cfg, seed);
    base.payload_bytes = static_cast<std::size_t>(cfg.integer("coex_payload"));
    base.threshold = cfg.real("coex_threshold");
    base.interferer = interferer_config(cfg);
    const auto snrs = cfg.grid("coex_snr_grid");

    std::vector<LinkReport> reports(snrs.size());
    parallel_for(reports.size(), worker_count(cfg), [&](std::size_t i) {
        auto spec = base;
        spec.snr_db = snrs[i];
        reports[i] = simulate_packets(spec);
    });

    const auto link = link_params(cfg);
    const auto coex = coex_params(cfg);
    const auto which = cfg.text("lte_case") == "worst" ? analytic::LteCase::worst : analytic::LteCase::average;
    const auto n_cdma = static_cast<int>(cfg.integer("coex_n_cdma"));
    const double eta_mw = analytic::dbm_to_mw(link.noise_power_dbm());
    const double t0 = analytic::lte_throughput(analytic::lte_sinr_with_cdma_power(coex, which, 0, 0.0, link), coex);

    Table table{"coex", {"cdma_snr_db", "cdma_per", "lte_throughput_ratio", "packets", "false_detections"}, {}};
    for (std::size_t i = 0; i < snrs.size(); ++i) {
        const double pr_c = eta_mw * analytic::db_to_linear(snrs[i]);
        const double t =
            analytic::lte_throughput(analytic::lte_sinr_with_cdma_power(coex, which, n_cdma, pr_c, link), coex);
        table.add_row({snrs[i], real_cell(reports[i].per()), t / t0,
                       int_cell(static_cast<long long>(reports[i].packets_sent)),
                       int_cell(static_cast<long long>(reports[i].false_detections))});
    }
    ScenarioResult result;
    result.tables.push_back(std::move(table));
    result.derived_seeds = stream_seeds(seed);
    result.summary = {{"spacing_samples", base.spacing_samples}, {"idle_compression", cfg.real("idle_compression")}};
    return result;
}

ScenarioResult run_capacity_tables(const Config& cfg) {
    const auto link = link_params(cfg);
    const auto coex = coex_params(cfg);
    const double eta_over_s = link.eta_over_s();

    Table ber_table{"ber_capacity", {"lc", "ebn0_db", "pb", "capacity_n", "users_supported"}, {}};
    for (const double lc : cfg.grid("lc_grid")) {
        for (const double ebn0 : cfg.grid("ebn0_grid")) {
            const double n = analytic::capacity_standalone(lc, analytic::db_to_linear(ebn0), eta_over_s);
            ber_table.add_row({lc, ebn0, analytic::ber_bpsk(ebn0), n, int_cell(analytic::users_supported(n))});
        }
    }

    Table coex_table{"coex_capacity", {"lte_users_m", "beta", "capacity_n", "users_supported"}, {}};
    for (const double beta : cfg.grid("beta_grid")) {
        for (const int m : cfg.integer_grid("m_grid")) {
            auto c = coex;
            c.lte_users_m = m;
            c.occupancy_beta = beta;
            const double n = analytic::capacity_coex(link, c);
            coex_table.add_row({int_cell(m), beta, n, int_cell(analytic::users_supported(n))});
        }
    }

    Table lte_table{"lte_throughput", {"n_cdma", "lte_case", "sinr_db", "throughput_bps", "throughput_ratio"}, {}};
    for (const auto which : {analytic::LteCase::worst, analytic::LteCase::average}) {
        const double t0 = analytic::lte_throughput(analytic::lte_sinr(coex, which, 0, link), coex);
        for (const int n : cfg.integer_grid("n_lte_grid")) {
            const double gamma = analytic::lte_sinr(coex, which, n, link);
            const double t = analytic::lte_throughput(gamma, coex);
            lte_table.add_row({int_cell(n), std::string(which == analytic::LteCase::worst ? "worst" : "average"),
                          analytic::linear_to_db(gamma), t, t / t0});
        }
    }

    const double n_link = analytic::capacity_standalone(link.processing_gain(), analytic::db_to_linear(link.ebn0_db),
                                                        eta_over_s);
    const int users = analytic::users_supported(n_link);
    const int channels = analytic::channels_in_band(coex.lte_bandwidth_hz, link.bandwidth_w_hz);
    const auto order = static_cast<int>(cfg.integer("order"));
    Table network{"network_capacity",
                  {"lc", "ebn0_db", "eta_over_s", "capacity_n", "users_per_channel", "channels", "network_capacity",
                   "code_groups", "reuse_factor"},
                  {}};
    const int groups = users > 0 ? analytic::code_groups(order, users) : 0;
    network.add_row({link.processing_gain(), link.ebn0_db, eta_over_s, n_link, int_cell(users), int_cell(channels),
                     int_cell(analytic::network_capacity(users, channels)), int_cell(groups),
                     groups > 0 && channels > 0 ? int_cell(analytic::reuse_factor(channels, groups)) : Cell{}});

    ScenarioResult result;
    result.tables = {std::move(ber_table), std::move(coex_table), std::move(lte_table), std::move(network)};
    return result;
}

ScenarioResult run_traffic_ledger(const Config& cfg, std::uint64_t seed) {
    const auto profile = traffic_profile(cfg);
    const auto link = link_params(cfg);
    const auto n = static_cast<int>(cfg.integer("n_sim"));
    const auto nbiot = cfg.optional_real("nbiot_ref");
    const double demand = traffic::daily_demand_bytes(profile, seed, static_cast<int>(cfg.integer("draws")));

    Table table{"capacity_ledger", {"series", "n_simultaneous", "delta", "bytes_per_day", "feasible"}, {}};
    table.add_row({std::string("ideal demand"), Cell{}, Cell{}, demand, Cell{}});
    table.add_row({std::string("NB-IoT reference"), Cell{}, Cell{}, real_cell(nbiot), Cell{}});
    auto ledgers = json::array();
    int case_no = 0;
    for (const int delta : cfg.integer_grid("delta_grid")) {
        const auto ledger = traffic::build_ledger_for_demand(demand, n, delta, link, profile, nbiot);
        table.add_row({"CDMA case " + std::to_string(++case_no), int_cell(n), int_cell(delta),
                       ledger.supply_bytes_per_day, ledger.feasible});
        auto j = traffic::to_json(ledger);
        j["n_simultaneous"] = n;
        j["delta"] = delta;
        ledgers.push_back(std::move(j));
    }

    ScenarioResult result;
    result.tables.push_back(std::move(table));
    result.derived_seeds = {{"payload_draws", seed}};
    result.summary = {{"messages_per_device_per_day", traffic::messages_per_device_per_day(profile)},
                      {"ledgers", std::move(ledgers)}};
    return result;
}

ScenarioResult run_calibrate(const Config& cfg, std::uint64_t seed) {
    CalibrationOptions opts;
    opts.frame = frame_config(cfg);
    opts.window_samples = static_cast<std::size_t>(cfg.integer("window"));
    const auto cal = calibrate_threshold(cfg.real("target_fa"), cfg.real("cal_snr_db"),
                                         static_cast<int>(cfg.integer("cal_trials")), seed, opts);

    Table table{"threshold_calibration", {"threshold", "false_alarm_rate", "miss_rate", "selected"}, {}};
    for (const auto& p : cal.grid) {
        table.add_row({p.threshold, p.false_alarm_rate, p.miss_rate, p.threshold == cal.threshold});
    }
    ScenarioResult result;
    result.tables.push_back(std::move(table));
    const auto trials = static_cast<std::uint64_t>(cfg.integer("cal_trials"));
    result.derived_seeds = {{"noise_windows", seed},
                            {"planted_windows", seed + trials},
                            {"payload", seed + 2 * trials},
                            {"rule", "trial_seed = base + trial_index"}};
    result.summary = {{"threshold", cal.threshold},
                      {"false_alarm_rate", cal.false_alarm_rate},
                      {"miss_rate", cal.miss_rate}};
    return result;
}

json result_json(const ScenarioSpec& spec, const ScenarioResult& result) {
    json tables = json::object();
    for (const auto& t : result.tables) tables[t.name] = to_json(t);
    return {{"scenario", spec.name}, {"seed", spec.seed}, {"tables", std::move(tables)}, {"summary", result.summary}};
}

std::vector<std::pair<std::filesystem::path, std::string>> render_outputs(const ScenarioSpec& spec,
                                                                         const ScenarioResult& result) {
    const std::filesystem::path out(spec.output_path);
    if (spec.format == OutputFormat::json) return {{out, result_json(spec, result).dump(2) + "\n"}};
    if (result.tables.size() == 1) return {{out, to_csv(result.tables.front())}};
    std::vector<std::pair<std::filesystem::path, std::string>> files;
    for (const auto& t : result.tables) {
        auto path = out;
        path.replace_filename(out.stem().string() + "_" + t.name + out.extension().string());
        files.emplace_back(path, to_csv(t));
    }
    return files;
}

std::filesystem::path manifest_path(const std::string& output_path) { return output_path + ".manifest.json"; }

json make_manifest(const ScenarioSpec& spec, const ScenarioResult& result, const std::string& timestamp) {
    return {
        {"tool", kToolName},
        {"version", kToolVersion},
        {"timestamp", timestamp},
        {"scenario", spec.name},
        {"seed", spec.seed},
        {"format", format_name(spec.format)},
        {"output_path", spec.output_path},
        {"params", spec.params.values()},
        {"derived_seeds", result.derived_seeds},
        {"results", result_json(spec, result)},
    };
}

ScenarioSpec spec_from_manifest(const json& manifest) {
    ScenarioSpec spec;
    try {
        spec.name = manifest.at("scenario").get<std::string>();
        spec.seed = manifest.at("seed").get<std::uint64_t>();
        spec.format = parse_format(manifest.at("format").get<std::string>());
        spec.output_path = manifest.at("output_path").get<std::string>();
        for (const auto& [key, value] : manifest.at("params").items()) spec.params.set(key, value.get<std::string>());
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed manifest: ") + e.what());
    }
    return spec;
}

std::vector<std::filesystem::path> write_outputs(const ScenarioSpec& spec, const ScenarioResult& result) {
    if (spec.output_path.empty()) throw std::invalid_argument("write_outputs: no output path");
    std::vector<std::filesystem::path> written;
    auto write = [&](const std::filesystem::path& path, const std::string& content) {
        if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        out << content;
        written.push_back(path);
    };
    for (const auto& [path, content] : render_outputs(spec, result)) write(path, content);
    write(manifest_path(spec.output_path), make_manifest(spec, result, utc_timestamp()).dump(2) + "\n");
    return written;
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace cdmaiot
