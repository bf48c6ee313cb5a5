#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "cryptodyn/config.hpp"
#include "cryptodyn/runner.hpp"

int main(int argc, char** argv) {
    using namespace cryptodyn::cli;

    CLI::App app{"Cryptohermitian dynamics: metrics, Dyson maps, covariant evolution, quasi-stationarity checks"};
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    bool quiet = false;
    app.add_option("--config", config_path, "Run configuration (JSON)")->required();
    app.add_option("--out", out_dir, "Output directory (default ./out or output.dir)");
    app.add_option("--seed", seed, "Override the config seed");
    app.add_flag("--quiet", quiet, "Suppress the human-readable summary");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    RunConfig config;
    try {
        config = load_config(config_path);
    } catch (const ConfigError& e) {
        std::cerr << e.name() << ":\n";
        for (const auto& p : e.problems()) std::cerr << "  " << p << '\n';
        return kExitConfig;
    }

    RunOptions options;
    if (!out_dir.empty()) options.out_dir = out_dir;
    options.seed = seed;
    options.quiet = quiet;
    return run(config, options, std::cout, std::cerr);
}
