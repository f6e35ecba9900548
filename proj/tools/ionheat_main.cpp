// Command-line scenario runner for the single-ion heat engine simulator.

#include "ionheat/scenarios.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"ionheat: two-mode trapped-ion heat engine simulator"};
    app.require_subcommand(1);

    ionheat::scenarios::RunOptions opts;
    auto* run = app.add_subcommand("run", "run a scenario from a JSON config");
    run->add_option("config", opts.config_path, "configuration file")->required();
    run->add_option("--scenario", opts.scenario_override,
                    "override the scenario named in the config");
    run->add_option("--out", opts.out_override, "override the output directory");
    run->add_option("--threads", opts.threads_override, "worker thread count");

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "check a config without running");
    validate->add_option("config", validate_path, "configuration file")->required();

    auto* version = app.add_subcommand("version", "print the version");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return ionheat::scenarios::run(opts);
    if (validate->parsed()) return ionheat::scenarios::validate_cli(validate_path);
    if (version->parsed()) {
        std::cout << "ionheat " << ionheat::scenarios::version << "\n";
        return 0;
    }
    return 0;
}
