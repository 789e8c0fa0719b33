#include <filesystem>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

// Options are collected as strings so that a --config file can supply
// defaults and flags given on the command line take precedence.
struct Flags {
    std::map<std::string, std::string> values;
    std::string config_path;
    bool plot = false;

    void attach(CLI::App& app, bool sweep_options) {
        app.add_option("--config", config_path, "key = value settings file");
        add(app, "--graph", "graph", "graph file");
        add(app, "--x0", "x0", "initial state v1,...,vn or a file");
        add(app, "--T", "T", "horizon");
        add(app, "--dt", "dt", "integration step");
        add(app, "--epoch", "epoch", "attack decision interval (multiple of dt)");
        add(app, "--strategy", "strategy", "none|fixed:i-j[,i-j...]|random:<seed>|greedy");
        add(app, "--alpha", "alpha", "links broken per epoch");
        add(app, "--mode", "mode", "permanent|per-epoch");
        add(app, "--kernel", "kernel", "constant:<c>|exp:<lambda>");
        add(app, "--out", "out", "output directory");
        app.add_flag("--plot", plot, "write a static SVG plot");
        if (sweep_options) {
            add(app, "--max-iter", "max_iter", "sweep iteration cap");
            add(app, "--damping", "damping", "switching threshold in [0,1)");
            add(app, "--f-formula", "f_formula", "verbatim|sign-adjusted");
            add(app, "--rule", "rule", "hamiltonian|literal");
        }
    }

    void add(CLI::App& app, const std::string& flag, const std::string& key, const std::string& help) {
        app.add_option_function<std::string>(flag, [this, key](const std::string& v) { values[key] = v; }, help);
    }

    bicon::cli::RunConfig resolve() const {
        bicon::cli::RunConfig cfg;
        if (!config_path.empty()) {
            bicon::cli::apply_settings(cfg, bicon::parse_config(bicon::cli::detail::read_file(config_path)),
                                       std::filesystem::path(config_path).parent_path());
        }
        bicon::cli::apply_settings(cfg, values);
        if (plot) cfg.emit_plot = true;
        return cfg;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bipartite consensus under link-breaking attacks"};
    app.require_subcommand(1);

    std::string check_graph;
    auto* check = app.add_subcommand("check", "report structural balance of a graph file");
    check->add_option("--graph", check_graph, "graph file")->required();

    Flags sim_flags, cmp_flags, sweep_flags;
    auto* simulate = app.add_subcommand("simulate", "integrate one strategy and write the trajectory");
    sim_flags.attach(*simulate, false);

    std::string strategies;
    auto* compare = app.add_subcommand("compare", "cost of several strategies against no attack");
    cmp_flags.attach(*compare, false);
    compare->add_option("--strategies", strategies, "strategy specs separated by ';'");

    auto* sweep = app.add_subcommand("sweep", "forward-backward sweep for the optimal schedule");
    sweep_flags.attach(*sweep, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    using namespace bicon::cli;
    if (*check) return cmd_check(check_graph, std::cout, std::cerr);

    Flags* flags = *simulate ? &sim_flags : (*compare ? &cmp_flags : &sweep_flags);
    RunConfig cfg;
    const int rc = guarded(std::cerr, [&] {
        cfg = flags->resolve();
        if (*compare && !strategies.empty()) cfg.strategies = detail::split_list(strategies);
        return 0;
    });
    if (rc != 0) return rc;

    if (*simulate) return cmd_simulate(cfg, std::cout, std::cerr);
    if (*compare) return cmd_compare(cfg, std::cout, std::cerr);
    return cmd_sweep(cfg, std::cout, std::cerr);
}
