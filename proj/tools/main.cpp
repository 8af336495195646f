#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "urnsim/commands.hpp"

namespace {

struct CliOptions {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = -1;
};

void add_common(CLI::App* sub, CliOptions& opts) {
    sub->add_option("--config", opts.config_path, "experiment configuration (JSON)")
        ->required();
    sub->add_option("--seed", opts.seed, "override the config seed")
        ->each([&](const std::string&) { opts.seed_set = true; });
    sub->add_option("--threads", opts.threads, "cap on parallel replications");
    sub->add_option("--out", opts.out_dir, "output directory (default .)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"simulator and equilibrium analyzer for interacting reinforced processes"};
    app.require_subcommand(1);

    CliOptions opts;
    CLI::App* simulate = app.add_subcommand("simulate", "run replications, write trajectory and report CSVs");
    CLI::App* equilibria = app.add_subcommand("equilibria", "enumerate and classify the zeros of the drift");
    CLI::App* field = app.add_subcommand("field", "export the N=2 drift/potential grid");
    CLI::App* mc = app.add_subcommand("mc", "Monte Carlo basin report");
    CLI::App* clt = app.add_subcommand("clt-check", "empirical check of the Gaussian fluctuation regime");
    for (CLI::App* sub : {simulate, equilibria, field, mc, clt}) add_common(sub, opts);

    CLI11_PARSE(app, argc, argv);

    try {
        urnsim::ExperimentConfig cfg = urnsim::load_config(opts.config_path);
        if (opts.seed_set) cfg.seed = opts.seed;
        if (opts.threads >= 0) cfg.threads = opts.threads;

        if (simulate->parsed())
            return urnsim::cmd_simulate(cfg, opts.out_dir, std::cout);
        if (equilibria->parsed())
            return urnsim::cmd_equilibria(cfg, opts.out_dir, std::cout);
        if (field->parsed())
            return urnsim::cmd_field(cfg, opts.out_dir, std::cout);
        if (mc->parsed())
            return urnsim::cmd_mc(cfg, opts.out_dir, std::cout);
        if (clt->parsed())
            return urnsim::cmd_clt_check(cfg, opts.out_dir, std::cout);
    } catch (const urnsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid parameters: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
