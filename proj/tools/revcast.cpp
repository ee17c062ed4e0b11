#include <exception>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "revcast/cli/commands.hpp"

namespace {

void report(const std::string& what) {
    std::istringstream lines(what);
    std::string line;
    while (std::getline(lines, line)) std::cerr << "revcast: error: " << line << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discount-factor DLM revenue forecasting with multi-scale hierarchy"};
    app.require_subcommand(1, 1);
    std::string config_path;
    int jobs = -1;
    for (const char* name : {"synth", "fit", "forecast", "evaluate", "crosscat"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("-c,--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
        sub->add_option("-j,--jobs", jobs, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        report(e.what());
        return 2;
    }
    try {
        const auto command = revcast::cli::parse_command(app.get_subcommands().front()->get_name());
        auto cfg = revcast::cli::load_config(config_path);
        if (jobs >= 0) cfg.study.jobs = jobs;
        revcast::cli::dispatch(command, cfg);
    } catch (const std::exception& e) {
        report(e.what());
        return 1;
    }
    return 0;
}
