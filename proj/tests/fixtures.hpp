#pragma once

// Shared test instances and brute-force helpers. Nothing here calls into the
// code paths it is used to check beyond the public API.

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "bicon/bicon.hpp"

namespace bicon::test {

// Four agents; a12 = -0.1, a14 = +0.1, a23 = +0.1, a34 = -0.1.
inline const char* kFourAgentGraph =
    "# four-agent balanced example\n"
    "n 4\n"
    "1 2 -0.1\n"
    "2 3 0.1\n"
    "3 4 -0.1\n"
    "1 4 0.1\n";

inline SignedGraph four_agent() { return parse_graph(kFourAgentGraph); }

inline Vector four_agent_x0() {
    Vector x(4);
    x << -20.0, -5.0, 25.0, 10.0;
    return x;
}

inline SimConfig four_agent_config(double T = 60.0, double dt = 0.01) {
    SimConfig c;
    c.T = T;
    c.dt = dt;
    c.epoch = dt;
    c.x0 = four_agent_x0();
    return c;
}

struct Instance {
    SignedGraph g;
    Gauge sigma;
    Vector x0;
};

// Connected balanced graph with n in [3, 5], at most 6 edges, weights with
// magnitude in [0.05, 0.5] and sign sigma_i sigma_j, x0 uniform in [-10, 10].
inline Instance random_balanced(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> pick_n(3, 5);
    std::uniform_real_distribution<double> mag(0.05, 0.5);
    std::uniform_real_distribution<double> state(-10.0, 10.0);
    std::bernoulli_distribution coin(0.5);

    const int n = pick_n(rng);
    Gauge sigma(n);
    for (auto& s : sigma) s = coin(rng) ? 1 : -1;

    std::vector<Edge> edges;
    LinkSet used;
    auto add = [&](int a, int b) {
        const Link l(a, b);
        if (used.contains(l)) return;
        used.insert(l);
        edges.push_back({l, sigma[a - 1] * sigma[b - 1] * mag(rng)});
    };
    for (int v = 2; v <= n; ++v) {
        std::uniform_int_distribution<int> parent(1, v - 1);
        add(parent(rng), v);
    }
    std::uniform_int_distribution<int> extra(0, 6 - (n - 1));
    const int target = (n - 1) + extra(rng);
    std::uniform_int_distribution<int> node(1, n);
    for (int guard = 0; static_cast<int>(edges.size()) < target && guard < 200; ++guard) {
        const int a = node(rng), b = node(rng);
        if (a != b) add(a, b);
    }

    Vector x0(n);
    for (int i = 0; i < n; ++i) x0[i] = state(rng);
    SignedGraph g(n, std::move(edges));
    return {g, sigma, x0};
}

// J over [0, horizon] with the given links held broken, by full simulation.
inline double short_horizon_cost(const SignedGraph& g, const Vector& x0, const LinkSet& broken, double horizon,
                                 double dt) {
    SimConfig c;
    c.T = horizon;
    c.dt = dt;
    c.epoch = dt;
    c.x0 = x0;
    const auto cost = CostSpec::for_graph(g);
    return simulate(g, c, AttackStrategy::fixed(broken), cost).total_cost();
}

}  // namespace bicon::test
