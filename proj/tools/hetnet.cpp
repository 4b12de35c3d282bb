#include "hetnet/cli.hpp"
#include "hetnet/errors.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kConfigError = 2;
constexpr int kValidationFailed = 3;

std::string preset_path(std::string id) {
    if (id.rfind("fig", 0) == 0) id = id.substr(3);
    const char* dir = std::getenv("HETNET_CONFIG_DIR");
    return std::string(dir && *dir ? dir : HETNET_CONFIG_DIR) + "/fig" + id + ".cfg";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Association, rate and queueing analytics for cache-enabled three-tier networks", "hetnet"};
    app.set_version_flag("--version", hetnet::tool_version());

    std::string config_path, out_path, mode, format = "csv";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> samples, jobs;
    std::vector<std::string> sets;
    app.add_option("--config", config_path, "Scenario file");
    app.add_option("--out", out_path, "Output file (default: stdout)");
    app.add_option("--seed", seed, "Monte Carlo seed (mc.seed)");
    app.add_option("--samples", samples, "Monte Carlo realizations (mc.realizations)");
    app.add_option("--mode", mode, "clustered, baseline or both (run.mode)")
        ->check(CLI::IsMember({"clustered", "baseline", "both"}));
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--jobs", jobs, "Worker threads for sweep points (run.jobs)");
    app.add_option("--set", sets, "Override a config entry, key=value (repeatable)");

    std::string figure_id;
    for (const char* name : {"assoc", "rates", "traffic", "qos", "validate"})
        app.add_subcommand(name)->fallthrough();
    app.get_subcommand("assoc")->description("Association probabilities and case aggregates");
    app.get_subcommand("rates")->description("Ergodic rates per case and tier, case-weighted total");
    app.get_subcommand("traffic")->description("State, arrival, capacity and load matrices");
    app.get_subcommand("qos")->description("DPS and EPS mean requests, delay and throughput");
    app.get_subcommand("validate")->description("Analytic results against Monte Carlo oracles");
    auto* figure = app.add_subcommand("figure", "Run a shipped figure preset");
    figure->add_option("id", figure_id, "3, 4, 5, 6 or 7")->required();
    figure->fallthrough();
    app.require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kConfigError;
    }

    try {
        std::string command = app.get_subcommands().front()->get_name();
        hetnet::ConfigMap cfg;
        if (command == "figure") {
            if (!config_path.empty()) throw hetnet::ConfigError("--config", "figure reads its own preset");
            cfg = hetnet::ConfigMap::load(preset_path(figure_id));
        } else {
            if (config_path.empty()) throw hetnet::ConfigError("--config", "required");
            cfg = hetnet::ConfigMap::load(config_path);
        }
        for (const auto& s : sets) {
            const auto eq = s.find('=');
            if (eq == std::string::npos) throw hetnet::ConfigError("--set", "expected key=value, got '" + s + "'");
            cfg.set(s.substr(0, eq), s.substr(eq + 1));
        }
        if (seed) cfg.set("mc.seed", std::to_string(*seed));
        if (samples) cfg.set("mc.realizations", std::to_string(*samples));
        if (jobs) cfg.set("run.jobs", std::to_string(*jobs));
        if (!mode.empty()) cfg.set("run.mode", mode);
        if (command == "figure") {
            command = cfg.get("run.command").value_or("");
            if (command.empty()) throw hetnet::ConfigError("run.command", "required in a figure preset");
        }

        const auto table = hetnet::run_command(command, cfg);
        std::ostringstream text;
        if (format == "json") hetnet::write_json(text, table);
        else hetnet::write_csv(text, table);

        if (out_path.empty()) {
            std::cout << text.str() << std::flush;
        } else {
            std::ofstream f(out_path, std::ios::binary);
            if (!(f << text.str())) throw std::runtime_error("cannot write " + out_path);
        }
        if (const auto n = table.failures(); n > 0) {
            std::cerr << "hetnet: " << n << " validation check(s) failed\n";
            return kValidationFailed;
        }
        return 0;
    } catch (const hetnet::ConfigError& e) {
        std::cerr << "hetnet: config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "hetnet: " << e.what() << '\n';
        return 1;
    }
}
