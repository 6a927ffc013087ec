// photon-detect <subcommand> --config <path> [--out <path>] [--reproducible]

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "photon_detect/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Finite-mode photon detection simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    bool reproducible = false;
    for (const auto& name : photon_detect::experiment_names()) {
        auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
        sub->add_option("--config", config_path, "experiment config file")->required();
        sub->add_option("--out", out_path, "output CSV path (default: [output] path, else stdout)");
        sub->add_flag("--reproducible", reproducible, "omit the timestamp line from the output header");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    const std::string subcommand = app.get_subcommands().front()->get_name();
    try {
        const auto config = photon_detect::parse_config(config_path);
        if (config.experiment != subcommand)
            throw photon_detect::ConfigError("subcommand '" + subcommand + "' does not match config table [" +
                                             config.experiment + "]");
        const auto table = photon_detect::run(config, reproducible);
        photon_detect::write_table(table, out_path.empty() ? config.output_path : out_path);
    } catch (const photon_detect::Error& e) {
        std::cerr << "photon-detect: " << e.what() << '\n';
        return photon_detect::exit_code(e);
    } catch (const std::exception& e) {
        std::cerr << "photon-detect: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
