#pragma once

// Subcommand implementations for the bicon executable. Each returns the
// process exit code: 0 success, 1 semantic negative, 2 validation or parse
// failure, 3 numeric failure.

#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bicon/bicon.hpp"
#include "bicon/io.hpp"

namespace bicon::cli {

struct RunConfig {
    std::string graph_path;
    std::string x0;  // literal "v1,...,vn" or a path to a file holding one
    double T = 60.0;
    double dt = 0.01;
    std::optional<double> epoch;  // defaults to dt
    std::string strategy = "none";
    int alpha = 1;
    std::string mode = "permanent";
    std::string kernel = "constant:1";
    std::string output_dir = ".";
    bool emit_plot = false;

    int max_iter = 50;
    double damping = 0.0;
    std::string f_formula = "sign-adjusted";
    std::string rule = "hamiltonian";

    std::vector<std::string> strategies;  // compare only
};

namespace detail {

inline double to_real(const std::string& key, const std::string& v) {
    const auto r = bicon::detail::parse_real(v);
    if (!r) throw ValidationError(key + ": not a real number: '" + v + "'");
    return *r;
}

inline int to_int(const std::string& key, const std::string& v) {
    const auto r = bicon::detail::parse_int(v);
    if (!r) throw ValidationError(key + ": not an integer: '" + v + "'");
    return static_cast<int>(*r);
}

inline bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ValidationError(key + ": not a boolean: '" + v + "'");
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot read file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::string cur;
    // strategy specs may contain commas themselves (fixed:1-2,3-4); split on ';'
    // when present, otherwise on ','.
    const char sep = v.find(';') != std::string::npos ? ';' : ',';
    std::istringstream in(v);
    while (std::getline(in, cur, sep)) {
        auto t = std::string(bicon::detail::trim(cur));
        if (!t.empty()) out.push_back(t);
    }
    return out;
}

}  // namespace detail

// Applies "key = value" settings on top of cfg. Unknown keys are rejected.
// Relative file paths are resolved against base_dir when one is given.
inline void apply_settings(RunConfig& cfg, const std::map<std::string, std::string>& kv,
                           const std::filesystem::path& base_dir = {}) {
    auto resolve = [&](const std::string& v) {
        const std::filesystem::path p(v);
        if (base_dir.empty() || p.is_absolute()) return v;
        return (base_dir / p).string();
    };
    for (const auto& [key, v] : kv) {
        if (key == "graph") cfg.graph_path = resolve(v);
        else if (key == "x0") {
            std::error_code ec;
            cfg.x0 = std::filesystem::is_regular_file(resolve(v), ec) ? resolve(v) : v;
        }
        else if (key == "T") cfg.T = detail::to_real(key, v);
        else if (key == "dt") cfg.dt = detail::to_real(key, v);
        else if (key == "epoch") cfg.epoch = detail::to_real(key, v);
        else if (key == "strategy") cfg.strategy = v;
        else if (key == "alpha") cfg.alpha = detail::to_int(key, v);
        else if (key == "mode") cfg.mode = v;
        else if (key == "kernel") cfg.kernel = v;
        else if (key == "out") cfg.output_dir = v;
        else if (key == "plot") cfg.emit_plot = detail::to_bool(key, v);
        else if (key == "max_iter") cfg.max_iter = detail::to_int(key, v);
        else if (key == "damping") cfg.damping = detail::to_real(key, v);
        else if (key == "f_formula") cfg.f_formula = v;
        else if (key == "rule") cfg.rule = v;
        else if (key == "strategies") cfg.strategies = detail::split_list(v);
        else throw ValidationError("unknown config key '" + key + "'");
    }
}

inline SignedGraph load_graph(const std::string& path) {
    if (path.empty()) throw ValidationError("no graph file given (--graph)");
    return parse_graph(detail::read_file(path));
}

inline Vector load_x0(const std::string& spec) {
    if (spec.empty()) throw ValidationError("no initial state given (--x0)");
    std::string text = spec;
    std::error_code ec;
    if (std::filesystem::is_regular_file(spec, ec)) text = detail::read_file(spec);
    const auto v = parse_real_list(text);
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline SimConfig sim_config(const RunConfig& cfg, int n) {
    SimConfig sc;
    sc.T = cfg.T;
    sc.dt = cfg.dt;
    sc.epoch = cfg.epoch.value_or(cfg.dt);
    sc.x0 = load_x0(cfg.x0);
    sc.validate(n);
    return sc;
}

inline AttackStrategy strategy_of(const RunConfig& cfg, const std::string& spec) {
    auto s = parse_strategy(spec, cfg.alpha, parse_mode(cfg.mode));
    return s;
}

inline std::ofstream open_output(const RunConfig& cfg, const std::string& name) {
    std::filesystem::create_directories(cfg.output_dir);
    const auto path = std::filesystem::path(cfg.output_dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + path.string() + "'");
    return out;
}

// Maps library exceptions onto exit codes.
inline int guarded(std::ostream& err, const std::function<int()>& body) {
    try {
        return body();
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << '\n';
        return 3;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return 2;
    } catch (const ValidationError& e) {
        err << "invalid input: " << e.what() << '\n';
        return 2;
    } catch (const ContractError& e) {
        err << "contract violation: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

inline int cmd_check(const std::string& graph_path, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto g = load_graph(graph_path);
        const auto r = check_structural_balance(g);
        if (const auto* u = std::get_if<Unbalanced>(&r)) {
            out << "unbalanced witness=" << to_string(u->witness) << '\n';
            return 1;
        }
        out << "balanced sigma=";
        const auto& sigma = std::get<Gauge>(r);
        for (std::size_t k = 0; k < sigma.size(); ++k) out << (k ? "," : "") << (sigma[k] > 0 ? "+1" : "-1");
        out << '\n';
        return 0;
    });
}

inline int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto g = load_graph(cfg.graph_path);
        const auto sc = sim_config(cfg, g.n());
        const auto strategy = strategy_of(cfg, cfg.strategy);
        const auto cost = CostSpec::for_graph(g, parse_kernel(cfg.kernel));

        const auto tr = simulate(g, sc, strategy, cost);
        {
            auto f = open_output(cfg, "trajectory.csv");
            write_trajectory_csv(f, tr);
        }
        out << "J=" << fmt17(tr.total_cost()) << '\n';

        std::optional<Trajectory> baseline;
        if (strategy.kind != AttackStrategy::Kind::none) {
            baseline = simulate(g, sc, AttackStrategy::none(), cost);
            const double J0 = baseline->total_cost();
            auto f = open_output(cfg, "cost_comparison.csv");
            f << "J_noattack,J_attack,ratio\n"
              << fmt17(J0) << ',' << fmt17(tr.total_cost()) << ',' << fmt17(tr.total_cost() / J0) << '\n';
            out << "J_noattack,J_attack,ratio\n"
                << fmt17(J0) << ',' << fmt17(tr.total_cost()) << ',' << fmt17(tr.total_cost() / J0) << '\n';
        }
        if (cfg.emit_plot) {
            auto f = open_output(cfg, "trajectory.svg");
            write_svg_plot(f, tr, baseline ? &baseline->cum_cost : nullptr);
        }
        return 0;
    });
}

inline int cmd_compare(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto g = load_graph(cfg.graph_path);
        const auto sc = sim_config(cfg, g.n());
        const auto cost = CostSpec::for_graph(g, parse_kernel(cfg.kernel));
        const auto specs = cfg.strategies.empty() ? std::vector<std::string>{"none", cfg.strategy} : cfg.strategies;

        std::vector<AttackStrategy> strategies;
        for (const auto& s : specs) {
            strategies.push_back(strategy_of(cfg, s));
            strategies.back().validate(g);
        }

        auto run = [&](const AttackStrategy& s) { return simulate(g, sc, s, cost).total_cost(); };
        auto baseline = std::async(std::launch::async, run, AttackStrategy::none());
        std::vector<std::future<double>> jobs;
        for (const auto& s : strategies) jobs.push_back(std::async(std::launch::async, run, s));
        const double J0 = baseline.get();

        std::ostringstream table;
        table << "strategy,J,ratio_vs_none\n";
        for (std::size_t k = 0; k < jobs.size(); ++k) {
            const double J = jobs[k].get();
            table << specs[k] << ',' << fmt17(J) << ',' << fmt17(J / J0) << '\n';
        }
        out << table.str();
        auto f = open_output(cfg, "compare.csv");
        f << table.str();
        return 0;
    });
}

inline FFormula parse_formula(const std::string& s) {
    if (s == "verbatim") return FFormula::verbatim;
    if (s == "sign-adjusted") return FFormula::sign_adjusted;
    throw ValidationError("f formula must be verbatim or sign-adjusted, got '" + s + "'");
}

inline UpdateRule parse_rule(const std::string& s) {
    if (s == "hamiltonian") return UpdateRule::hamiltonian;
    if (s == "literal") return UpdateRule::literal;
    throw ValidationError("rule must be hamiltonian or literal, got '" + s + "'");
}

inline int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto g = load_graph(cfg.graph_path);
        const auto sc = sim_config(cfg, g.n());
        const auto cost = CostSpec::for_graph(g, parse_kernel(cfg.kernel));
        if (cfg.alpha < 0) throw ValidationError("alpha must be nonnegative");

        SweepOptions opt;
        opt.max_iter = cfg.max_iter;
        opt.damping = cfg.damping;
        opt.formula = parse_formula(cfg.f_formula);
        opt.rule = parse_rule(cfg.rule);
        const auto res = sweep(g, sc, cost, static_cast<std::size_t>(cfg.alpha), opt);

        out << "iter,J,changed_epochs\n";
        for (const auto& h : res.history) out << h.iter << ',' << fmt17(h.J) << ',' << h.changed_epochs << '\n';
        out << "converged=" << (res.converged ? "true" : "false") << " iterations=" << res.iterations << '\n';
        out << "J=" << fmt17(res.J) << '\n';

        auto f = open_output(cfg, "schedule.csv");
        f << "epoch_start,links\n";
        for (std::size_t e = 0; e < res.control.size(); ++e) {
            f << fmt17(res.trajectory.times[e * res.control.steps_per_epoch]) << ',' << to_string(res.control.epochs[e], ';') << '\n';
        }
        return 0;
    });
}

}  // namespace bicon::cli
