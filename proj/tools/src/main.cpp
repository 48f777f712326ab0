#include <iostream>

#include <CLI11.hpp>

#include "cmfg_tools/run.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Ergodic mean-field game solver with Riesz coupling on the unit box"};
    std::string config_path;
    std::string mode;
    std::uint64_t seed = 0;
    std::string output_dir;
    bool reference = false;

    app.add_option("config", config_path, "flat key = value config file");
    app.add_option("--mode", mode, "override the config mode")
        ->check(CLI::IsMember({"solve", "continuation", "scaling", "threshold", "verify"}));
    auto* seed_opt = app.add_option("--seed", seed, "override rng_seed");
    app.add_option("--output-dir", output_dir, "override output_dir");
    app.add_flag("--config-reference", reference, "print every config key with its default and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cmfg::tools::kExitConfigError;
    }

    if (reference) {
        std::cout << cmfg::tools::config_reference();
        return 0;
    }
    if (config_path.empty()) {
        std::cerr << "config error: a config file path is required\n";
        return cmfg::tools::kExitConfigError;
    }

    cmfg::tools::RunOverrides overrides;
    if (!mode.empty()) overrides.mode = cmfg::tools::parse_mode(mode);
    if (*seed_opt) overrides.seed = seed;
    if (!output_dir.empty()) overrides.output_dir = output_dir;
    return cmfg::tools::run(config_path, overrides, std::cerr);
}
