// main.cpp — floquet-if: command line front end

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "app.hpp"
#include "floquet_if/errors.hpp"

int main(int argc, char** argv) {
    using floquet::app::AppOptions;

    std::string commands;
    for (const auto& c : floquet::app::command_names()) commands += "\n  " + c;

    CLI::App cli{"Floquet influence-functional simulations of driven open quantum systems"};
    cli.footer("Commands:" + commands +
               "\n\nEnvironment: FLOQUET_IF_OUT overrides the output directory, FLOQUET_IF_WORKERS the worker count.");
    AppOptions options;
    int workers = -1;
    cli.add_option("command", options.command, "Command to run")->required();
    cli.add_option("-c,--config", options.config_path, "JSON run configuration")->required();
    cli.add_option("-o,--out", options.out_dir, "Output directory");
    cli.add_option("-w,--workers", workers, "Worker threads for sweeps (0: available cores)")->check(CLI::NonNegativeNumber);
    cli.add_flag("--no-cache", options.no_cache, "Do not read or write the influence-functional cache");

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return cli.exit(e) == 0 ? 0 : 2;
    }
    if (workers >= 0) options.workers = workers;
    if (!floquet::app::is_command(options.command)) {
        std::cerr << "error: unknown command '" << options.command << "'\n\n" << cli.help();
        return 2;
    }

    try {
        floquet::app::run(options, std::cerr);
    } catch (const floquet::InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
