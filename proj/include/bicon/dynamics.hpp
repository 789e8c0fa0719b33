#pragma once

// Integration of x' = -L(t) x with a piecewise-constant attacked Laplacian.

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bicon/adversary.hpp"
#include "bicon/cost.hpp"
#include "bicon/errors.hpp"
#include "bicon/graph.hpp"
#include "bicon/trajectory.hpp"

namespace bicon {

struct SimConfig {
    double T = 60.0;
    double dt = 0.01;
    double epoch = 0.01;  // attack decision interval, a multiple of dt
    Vector x0;

    std::size_t steps() const { return static_cast<std::size_t>(std::llround(T / dt)); }
    std::size_t steps_per_epoch() const { return static_cast<std::size_t>(std::llround(epoch / dt)); }
    std::size_t epochs() const { return (steps() + steps_per_epoch() - 1) / steps_per_epoch(); }

    void validate(int n) const {
        if (!(T > 0.0) || !std::isfinite(T)) throw ValidationError("T must be positive and finite");
        if (!(dt > 0.0) || dt > T) throw ValidationError("dt must satisfy 0 < dt <= T");
        if (std::abs(static_cast<double>(steps()) * dt - T) > 1e-9 * T) throw ValidationError("T must be an integer multiple of dt");
        if (!(epoch >= dt * (1.0 - 1e-12))) throw ValidationError("epoch must be at least dt");
        const double ratio = epoch / dt;
        if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) throw ValidationError("epoch must be an integer multiple of dt");
        if (x0.size() != n) {
            throw ValidationError("x0 has " + std::to_string(x0.size()) + " entries, graph has " + std::to_string(n) + " nodes");
        }
        if (!x0.allFinite()) throw ValidationError("x0 must be finite");
    }
};

// Per-epoch attack sets, epoch e covering grid steps [e*steps_per_epoch, (e+1)*steps_per_epoch).
struct AttackSchedule {
    std::size_t steps_per_epoch = 1;
    std::vector<LinkSet> epochs;

    std::size_t size() const noexcept { return epochs.size(); }
    const LinkSet& at_step(std::size_t k) const { return epochs.at(std::min(k / steps_per_epoch, epochs.size() - 1)); }

    static AttackSchedule empty(const SimConfig& cfg) {
        return {cfg.steps_per_epoch(), std::vector<LinkSet>(cfg.epochs())};
    }

    friend bool operator==(const AttackSchedule&, const AttackSchedule&) = default;
};

// One classical RK4 step of x' = -L x.
inline Vector step_rk4(const Matrix& L, const Vector& x, double dt) {
    if (L.rows() != x.size() || L.cols() != x.size()) throw ContractError("Laplacian and state dimensions disagree");
    if (!(dt > 0.0)) throw ContractError("dt must be positive");
    if (!x.allFinite() || !L.allFinite()) throw NumericError(0, "non-finite input to RK4 step");
    const Vector k1 = -(L * x);
    const Vector k2 = -(L * (x + 0.5 * dt * k1));
    const Vector k3 = -(L * (x + 0.5 * dt * k2));
    const Vector k4 = -(L * (x + dt * k3));
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

inline double inf_norm(const Matrix& A) {
    return A.rows() == 0 ? 0.0 : A.cwiseAbs().rowwise().sum().maxCoeff();
}

// exp(-L t) x0 by scaling and squaring a truncated Taylor series. Used as the
// accuracy reference for step_rk4.
inline Vector expm_reference(const Matrix& L, double t, const Vector& x0) {
    if (t < 0.0) throw ContractError("expm_reference requires t >= 0");
    if (t == 0.0) return x0;

    Matrix A = -L * t;
    int squarings = 0;
    while (inf_norm(A) >= 0.5) {
        A *= 0.5;
        ++squarings;
    }

    const auto n = L.rows();
    Matrix E = Matrix::Identity(n, n);
    Matrix term = Matrix::Identity(n, n);
    for (int k = 1; k < 64; ++k) {
        term = term * A / static_cast<double>(k);
        E += term;
        if (inf_norm(term) <= 1e-14 * inf_norm(E)) break;
    }
    for (int s = 0; s < squarings; ++s) E = E * E;
    return E * x0;
}

// Chooses the active link set at an epoch boundary from (epoch, t, x).
using AttackChooser = std::function<LinkSet(std::size_t epoch, double t, const Vector& x)>;

namespace detail {

inline Trajectory integrate(const SignedGraph& g, const SimConfig& cfg, const std::optional<CostSpec>& cost,
                            std::size_t budget, const AttackChooser& choose) {
    cfg.validate(g.n());
    const std::size_t K = cfg.steps();
    const std::size_t per_epoch = cfg.steps_per_epoch();
    const double h = cfg.T / static_cast<double>(K);

    Trajectory tr;
    tr.times.reserve(K + 1);
    tr.states.reserve(K + 1);
    tr.attacks.reserve(K + 1);

    Vector x = cfg.x0;
    LinkSet active;
    Matrix L = build_laplacian(g);

    auto record_cost = [&](double t) {
        if (!cost) return;
        const double c = inst_cost(*cost, t, x);
        const double prev_cum = tr.cum_cost.empty() ? 0.0 : tr.cum_cost.back();
        const double inc = tr.inst_cost.empty() ? 0.0 : 0.5 * (t - tr.times[tr.times.size() - 2]) * (tr.inst_cost.back() + c);
        tr.inst_cost.push_back(c);
        tr.cum_cost.push_back(prev_cum + inc);
    };

    for (std::size_t k = 0; k <= K; ++k) {
        const double t = cfg.T * static_cast<double>(k) / static_cast<double>(K);
        if (k < K && k % per_epoch == 0) {
            LinkSet next = choose(k / per_epoch, t, x);
            if (next.size() > budget) {
                throw ContractError("strategy selected " + std::to_string(next.size()) + " links, budget is " + std::to_string(budget));
            }
            for (const auto& l : next) {
                if (!g.has_edge(l)) throw ContractError("strategy selected non-edge " + to_string(l));
            }
            if (next != active || k == 0) {
                active = std::move(next);
                L = build_laplacian(remove_links(g, active));
            }
        }
        tr.times.push_back(t);
        tr.states.push_back(x);
        tr.attacks.push_back(active);
        record_cost(t);

        if (k == K) break;
        x = step_rk4(L, x, h);
        if (!x.allFinite()) throw NumericError(k + 1, "state became non-finite");
    }
    return tr;
}

}  // namespace detail

// Runs the strategy: at each epoch boundary it picks at most alpha links,
// which stay broken until the next boundary. The cost integrand and its
// trapezoid running sum are recorded when cost is given.
inline Trajectory simulate(const SignedGraph& g, const SimConfig& cfg, const AttackStrategy& strategy,
                           const std::optional<CostSpec>& cost) {
    if (strategy.kind != AttackStrategy::Kind::none || cost) require_gauge(g);
    strategy.validate(g);
    AttackPlanner planner(strategy);
    AttackChooser choose = [&](std::size_t epoch, double, const Vector& x) {
        return planner.select(score_links(g, x), epoch).links;
    };
    return detail::integrate(g, cfg, cost, static_cast<std::size_t>(strategy.alpha), choose);
}

// Replays an explicit schedule. Every epoch's set must satisfy the budget.
inline Trajectory simulate(const SignedGraph& g, const SimConfig& cfg, const AttackSchedule& schedule,
                           std::size_t budget, const std::optional<CostSpec>& cost) {
    cfg.validate(g.n());
    if (schedule.steps_per_epoch != cfg.steps_per_epoch() || schedule.size() != cfg.epochs()) {
        throw ContractError("schedule epochs do not match the simulation grid");
    }
    AttackChooser choose = [&](std::size_t epoch, double, const Vector&) { return schedule.epochs[epoch]; };
    return detail::integrate(g, cfg, cost, budget, choose);
}

// Reconstructs the per-epoch schedule recorded in a trajectory.
inline AttackSchedule schedule_of(const Trajectory& tr, const SimConfig& cfg) {
    AttackSchedule s = AttackSchedule::empty(cfg);
    for (std::size_t e = 0; e < s.size(); ++e) s.epochs[e] = tr.attacks.at(e * s.steps_per_epoch);
    return s;
}

}  // namespace bicon
