#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "polblock/config.hpp"
#include "polblock/dispatch.hpp"
#include "polblock/errors.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Exciton-resonator polariton simulations: coupling, spectral densities, linear dynamics and blockade"};
    app.set_version_flag("--version", std::string(POLBLOCK_VERSION));
    app.require_subcommand(1, 1);

    std::string config_path;
    std::string out_dir;
    unsigned threads = 1;
    for (const auto& name : polblock::cli::kSubcommands) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "run configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory (overrides [output] dir)");
        sub->add_option("--threads", threads, "worker threads for grid scans")->check(CLI::PositiveNumber);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        polblock::Error err(polblock::ErrorKind::parse, "cli", e.what());
        std::cerr << polblock::cli::error_json(err) << "\n";
        return 2;
    }

    const std::string subcommand = app.get_subcommands().front()->get_name();
    try {
        const auto cfg = polblock::config::load_config(config_path);
        polblock::cli::dispatch(cfg, subcommand, out_dir.empty() ? cfg.out_dir : out_dir, threads);
    } catch (const std::exception& e) {
        std::cerr << polblock::cli::error_json(e) << "\n";
        return 1;
    }
    return 0;
}
