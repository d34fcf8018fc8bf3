// Command-line front-end: sodexo --config scenario.json [--out DIR] [--seed N] [--quiet]

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sodexo/config.hpp"
#include "sodexo/error.hpp"
#include "sodexo/scenario.hpp"

namespace {

constexpr int exit_config = 2;
constexpr int exit_runtime = 3;

int fail(int code, const std::string& type, const std::string& message) {
    nlohmann::ordered_json j = {{"error", {{"type", type}, {"message", message}, {"exit_code", code}}}};
    std::cerr << j.dump() << '\n';
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Botnet and honeybot defense models: ODE, agent-based, game and deployment scenarios"};
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    bool quiet = false;
    app.add_option("--config", config_path, "Scenario configuration (JSON)")->required();
    app.add_option("--out", out_dir, "Output directory (default: $SODEXO_OUT, the config's output_dir, or ./out)");
    app.add_option("--seed", seed, "Seed overriding the configuration");
    app.add_flag("--quiet", quiet, "Suppress the summary on stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(exit_config, "usage", e.what());
    }

    try {
        auto cfg = sodexo::config::parse_config(config_path);
        if (seed) sodexo::scenario::apply_seed(cfg, *seed);

        std::string dir = out_dir;
        if (dir.empty()) {
            if (const char* env = std::getenv("SODEXO_OUT"); env && *env) dir = env;
        }
        if (dir.empty()) dir = cfg.output_dir;
        if (dir.empty()) dir = "./out";

        const auto rep = sodexo::scenario::run(cfg, dir);
        if (!quiet) {
            std::cout << rep.scenario << " scenario -> " << rep.output_dir.string() << '\n';
            for (const auto& line : rep.summary) std::cout << "  " << line << '\n';
            for (const auto& w : rep.warnings) std::cout << "  warning: " << w << '\n';
            std::cout << "  wrote " << rep.files.size() + 1 << " files in "
                      << sodexo::scenario::fmt(rep.elapsed_seconds) << " s\n";
        }
        return 0;
    } catch (const sodexo::ConfigError& e) {
        return fail(exit_config, "config", e.what());
    } catch (const sodexo::ModelError& e) {
        return fail(exit_runtime, "model", e.what());
    } catch (const std::exception& e) {
        return fail(exit_runtime, "runtime", e.what());
    }
}
