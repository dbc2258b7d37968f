// epictl: command-line front end for the two-strain network epidemic model.
//
//   epictl simulate    --config cfg.json [--out DIR]
//   epictl equilibrium --config cfg.json [--verify]
//   epictl optimize    --config cfg.json [--seed N] [--threads N]
//   epictl sweep       --config cfg.json
//
// Exit codes: 0 ok, 2 invalid config, 3 solver non-convergence, 4 integration failure.

#include "epictl/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    CLI::App app{"Two-strain network epidemic model: simulation, equilibria, optimal control"};
    app.require_subcommand(1);

    std::string config;
    std::string out_dir;
    std::uint64_t seed = 0;
    int threads = 1;
    bool verify = false;

    for (const char* name : {"simulate", "equilibrium", "optimize", "sweep"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory (overrides config 'out')");
        sub->add_option("--seed", seed, "multi-start seed (overrides config)");
        sub->add_option("--threads", threads, "worker threads (results do not depend on it)")
            ->check(CLI::PositiveNumber);
        sub->add_flag("--verify", verify, "check the equilibrium against the ODE oracle");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : epictl::cli::kValidationFailure;
    }

    const auto* sub = app.get_subcommands().front();
    epictl::cli::FlagOverrides flags;
    if (sub->count("--out"))
        flags.out_dir = out_dir;
    if (sub->count("--seed"))
        flags.seed = seed;
    if (sub->count("--threads"))
        flags.threads = threads;
    flags.verify = verify;

    return epictl::cli::run_command(sub->get_name(), config, flags, std::cout, std::cerr);
}
