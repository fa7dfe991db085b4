#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hierfed/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Hierarchical private aggregation: simulate, sweep, audit, train"};
    app.require_subcommand(1);

    std::string config;
    std::string out;
    bool broken = false;
    for (const char* name : {"simulate", "sweep", "audit", "train"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config, "key = value config file")->required();
        sub->add_flag("--broken", broken, "run the mask-free variant of the scheme");
        sub->add_option("--out", out, "output path (overrides `out` in the config)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : hierfed::exit_code::kConfig;
    }

    const auto command = hierfed::parse_command(app.get_subcommands().front()->get_name());
    return hierfed::run_cli(command, config, broken, out, std::cout, std::cerr);
}
