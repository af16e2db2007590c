// cdmaiot-sim: runs the named experiments and writes CSV/JSON tables with a
// manifest sidecar.
//
//   cdmaiot-sim run <scenario> [--config FILE] [--seed N] [--out PATH]
//                   [--format csv|json] [--<key> VALUE ...]
//   cdmaiot-sim rerun <manifest> [--out PATH]
//   cdmaiot-sim keys

#include <fstream>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "cdmaiot/config.hpp"
#include "cdmaiot/scenario.hpp"

using namespace cdmaiot;

namespace {

std::string flag_name(const std::string& key) {
    std::string flag = key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    return "--" + flag;
}

int emit(const ScenarioSpec& spec) {
    const auto result = run_scenario(spec);
    if (spec.output_path.empty()) {
        const auto files = render_outputs(spec, result);
        for (std::size_t i = 0; i < files.size(); ++i) {
            if (i) std::cout << "\n";
            std::cout << files[i].second;
        }
        return 0;
    }
    for (const auto& path : write_outputs(spec, result)) std::cerr << "wrote " << path.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CDMA-underlay IoT uplink simulator"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run a scenario");
    std::string scenario;
    std::string config_path;
    std::uint64_t seed = 1;
    std::string out;
    std::string format = "csv";
    run->add_option("scenario", scenario, "Scenario name")->required()->check(CLI::IsMember(scenario_names()));
    run->add_option("--config", config_path, "Key = value parameter file")->check(CLI::ExistingFile);
    run->add_option("--seed", seed, "Base seed");
    run->add_option("--out", out, "Output path (stdout when omitted)");
    run->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    std::map<std::string, std::string> overrides;
    for (const auto& key : config_keys()) {
        run->add_option_function<std::string>(
               flag_name(key.name), [&overrides, name = key.name](const std::string& v) { overrides[name] = v; },
               key.description)
            ->group("Parameters");
    }

    auto* rerun = app.add_subcommand("rerun", "Re-run from a manifest");
    std::string manifest_file;
    std::string rerun_out;
    rerun->add_option("manifest", manifest_file, "Manifest JSON")->required()->check(CLI::ExistingFile);
    rerun->add_option("--out", rerun_out, "Output path (defaults to the manifest's)");

    auto* keys = app.add_subcommand("keys", "List parameter keys and defaults");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            ScenarioSpec spec;
            spec.name = scenario;
            spec.seed = seed;
            spec.output_path = out;
            spec.format = parse_format(format);
            if (!config_path.empty()) spec.params = Config::from_file(config_path);
            for (const auto& [key, value] : overrides) spec.params.set(key, value);
            return emit(spec);
        }
        if (*rerun) {
            std::ifstream in(manifest_file);
            auto spec = spec_from_manifest(nlohmann::json::parse(in));
            if (!rerun_out.empty()) spec.output_path = rerun_out;
            return emit(spec);
        }
        if (*keys) {
            for (const auto& key : config_keys()) {
                std::cout << "# " << key.description << "\n" << key.name << " = " << key.default_value << "\n";
            }
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
