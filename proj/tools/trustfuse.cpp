// trustfuse: resilient event detection experiments from the command line.
//
//   trustfuse sweep --spec specs/numerical_study.cfg --out results/
//   trustfuse run   --spec specs/hardware_analog.cfg --trials 50000 --threads 4

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "trustfuse/trustfuse.hpp"

namespace {

struct Flags {
    std::string spec_path;
    std::uint64_t seed = 0;
    std::uint64_t trials = 0;
    std::size_t threads = 1;
    std::string out_dir = "out";
};

void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_option("--spec", f.spec_path, "experiment spec file")->required();
    cmd->add_option("--seed", f.seed, "override the spec's seed");
    cmd->add_option("--trials", f.trials, "override the spec's trial count");
    cmd->add_option("--threads", f.threads, "worker threads (0 = all cores)");
    cmd->add_option("--out", f.out_dir, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Resilient hypothesis testing with untrusted robots"};
    app.require_subcommand(1);
    Flags f;
    auto* run = app.add_subcommand("run", "paired experiment at the spec's malicious count");
    auto* sweep = app.add_subcommand("sweep", "experiment over a grid of malicious proportions");
    auto* mstar = app.add_subcommand("mstar", "critical malicious proportion, exact vs normal approximation");
    auto* bounds = app.add_subcommand("bounds", "exact worst-case error against its upper bound");
    for (auto* cmd : {run, sweep, mstar, bounds}) add_common(cmd, f);
    CLI11_PARSE(app, argc, argv);

    try {
        const auto spec = trustfuse::parse_spec(f.spec_path);
        trustfuse::CommandOptions opt;
        for (auto* cmd : {run, sweep, mstar, bounds}) {
            if (cmd->count("--seed")) opt.seed = f.seed;
            if (cmd->count("--trials")) opt.trials = f.trials;
        }
        opt.threads = f.threads;
        opt.out_dir = f.out_dir;
        if (app.got_subcommand(run)) return trustfuse::cmd_run(spec, opt, std::cout, std::cerr);
        if (app.got_subcommand(sweep)) return trustfuse::cmd_sweep(spec, opt, std::cout, std::cerr);
        if (app.got_subcommand(mstar)) return trustfuse::cmd_mstar(spec, opt, std::cout, std::cerr);
        return trustfuse::cmd_bounds(spec, opt, std::cout, std::cerr);
    } catch (const trustfuse::SpecError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
