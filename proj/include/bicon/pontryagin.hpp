#pragma once

// First-order optimality machinery for the link-breaking adversary:
// Hamiltonian, backward costate, per-link switching values and a
// forward-backward sweep over bang-bang schedules.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bicon/cost.hpp"
#include "bicon/dynamics.hpp"
#include "bicon/errors.hpp"
#include "bicon/graph.hpp"

namespace bicon {

struct CostateTrajectory {
    std::vector<double> times;
    std::vector<Vector> costates;
};

// H = k(t) x^T M x - p^T L x, with L the attacked Laplacian.
inline double hamiltonian(const Vector& x, const Vector& p, const SignedGraph& g_attacked, double t,
                          const CostSpec& spec) {
    if (x.size() != g_attacked.n() || p.size() != x.size()) throw ContractError("hamiltonian: dimension mismatch");
    return inst_cost(spec, t, x) - p.dot(build_laplacian(g_attacked) * x);
}

// verbatim:      f_ij = (p_i - sgn(a_ij) p_j)(x_i - x_j)
// sign_adjusted: f_ij = (p_i - sgn(a_ij) p_j)(x_i - sgn(a_ij) x_j)
// Only the sign-adjusted form satisfies p^T L x = sum |a_ij| f_ij.
enum class FFormula { verbatim, sign_adjusted };

struct LinkValue {
    Link link;
    double value = 0.0;
};

inline std::vector<LinkValue> f_values(const SignedGraph& g, const Vector& x, const Vector& p,
                                       FFormula formula = FFormula::verbatim) {
    if (x.size() != g.n() || p.size() != x.size()) throw ContractError("f_values: dimension mismatch");
    std::vector<LinkValue> out;
    out.reserve(g.edge_count());
    for (const auto& e : g.edges()) {
        const int a = e.link.i - 1;
        const int b = e.link.j - 1;
        const double s = sign(e.weight);
        const double dp = p[a] - s * p[b];
        const double dx = formula == FFormula::verbatim ? x[a] - x[b] : x[a] - s * x[b];
        out.push_back({e.link, dp * dx});
    }
    return out;
}

// Integrates p' = -k(t) M x + L^T p backward from p(T) = terminal_p with RK4
// on the trajectory grid. x at half steps is linearly interpolated and the
// Laplacian on [t_k, t_{k+1}) is the graph minus schedule.at_step(k).
inline CostateTrajectory costate_backward(const SignedGraph& g, const Trajectory& traj, const CostSpec& spec,
                                          const AttackSchedule& schedule, const Vector& terminal_p) {
    const std::size_t N = traj.size();
    if (N < 2 || traj.states.size() != N || traj.attacks.size() != N) throw ContractError("costate_backward: malformed trajectory");
    if (terminal_p.size() != g.n()) throw ContractError("costate_backward: terminal costate has wrong length");
    for (std::size_t k = 0; k + 1 < N; ++k) {
        if (schedule.at_step(k) != traj.attacks[k]) throw ContractError("costate_backward: schedule does not match trajectory grid at step " + std::to_string(k));
    }

    CostateTrajectory out;
    out.times = traj.times;
    out.costates.assign(N, Vector());
    out.costates[N - 1] = terminal_p;

    const Matrix& M = spec.M;
    const LinkSet* cached = nullptr;
    Matrix LT;
    Vector p = terminal_p;
    for (std::size_t k = N - 1; k-- > 0;) {
        if (!cached || *cached != traj.attacks[k]) {
            cached = &traj.attacks[k];
            LT = build_laplacian(remove_links(g, *cached)).transpose();
        }
        const double t1 = traj.times[k + 1];
        const double t0 = traj.times[k];
        const double h = t1 - t0;
        const double tm = 0.5 * (t0 + t1);
        const Vector& x1 = traj.states[k + 1];
        const Vector& x0 = traj.states[k];
        const Vector xm = 0.5 * (x0 + x1);

        auto rhs = [&](double t, const Vector& x, const Vector& q) -> Vector {
            return -spec.kernel(t) * (M * x) + LT * q;
        };
        const Vector k1 = rhs(t1, x1, p);
        const Vector k2 = rhs(tm, xm, p - 0.5 * h * k1);
        const Vector k3 = rhs(tm, xm, p - 0.5 * h * k2);
        const Vector k4 = rhs(t0, x0, p - h * k3);
        p = p - (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!p.allFinite()) throw NumericError(k, "costate became non-finite");
        out.costates[k] = p;
    }
    return out;
}

// hamiltonian: break the alpha links with the largest positive |a_ij| f_ij;
//              this is the set that maximizes H pointwise.
// literal:     break the alpha links with the most negative f_ij (the I_t
//              rule as written, unweighted).
enum class UpdateRule { hamiltonian, literal };

struct SweepOptions {
    int max_iter = 50;
    double damping = 0.0;
    FFormula formula = FFormula::sign_adjusted;
    UpdateRule rule = UpdateRule::hamiltonian;
    std::optional<Vector> terminal_p;  // zero when unset
};

struct SweepIteration {
    int iter = 0;
    double J = 0.0;
    std::size_t changed_epochs = 0;
};

struct SweepResult {
    AttackSchedule control;
    double J = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<SweepIteration> history;
    Trajectory trajectory;  // final forward pass, driven by control
    CostateTrajectory costate;
};

namespace detail {

// Value each link contributes to H when broken, under the chosen rule. Larger
// is more attractive; only strictly positive values are eligible.
inline std::vector<LinkValue> attack_gains(const SignedGraph& g, const Vector& x, const Vector& p,
                                           const SweepOptions& opt) {
    auto f = f_values(g, x, p, opt.formula);
    for (std::size_t k = 0; k < f.size(); ++k) {
        if (opt.rule == UpdateRule::hamiltonian) {
            f[k].value *= std::abs(g.edges()[k].weight);
        } else {
            f[k].value = -f[k].value;
        }
    }
    return f;
}

inline double set_gain(const std::vector<LinkValue>& gains, const LinkSet& set) {
    double s = 0.0;
    for (const auto& gv : gains) {
        if (set.contains(gv.link)) s += gv.value;
    }
    return s;
}

}  // namespace detail

// One control update at a single grid point: the rule's best set of at most
// alpha links, keeping `current` unless the new set is better by more than
// damping * |gain(new)|.
inline LinkSet update_epoch(const SignedGraph& g, const Vector& x, const Vector& p, std::size_t alpha,
                            const LinkSet& current, const SweepOptions& opt) {
    auto gains = detail::attack_gains(g, x, p, opt);
    auto ranked = gains;
    std::stable_sort(ranked.begin(), ranked.end(), [](const LinkValue& a, const LinkValue& b) {
        if (a.value != b.value) return a.value > b.value;
        return a.link < b.link;
    });
    LinkSet best;
    for (const auto& lv : ranked) {
        if (best.size() >= alpha || !(lv.value > 0.0)) break;
        best.insert(lv.link);
    }
    if (best == current) return best;
    const double g_new = detail::set_gain(gains, best);
    const double g_old = detail::set_gain(gains, current);
    if (g_new - g_old > opt.damping * std::abs(g_new)) return best;
    return current;
}

// Schedule derived from a forward pass and its costate, epoch by epoch.
inline AttackSchedule derive_schedule(const SignedGraph& g, const Trajectory& traj, const CostateTrajectory& costate,
                                      const AttackSchedule& current, std::size_t alpha, const SweepOptions& opt) {
    AttackSchedule next = current;
    for (std::size_t e = 0; e < next.size(); ++e) {
        const std::size_t k = e * next.steps_per_epoch;
        next.epochs[e] = update_epoch(g, traj.states[k], costate.costates[k], alpha, current.epochs[e], opt);
    }
    return next;
}

// Fixed-point iteration from the empty schedule: forward pass, backward
// costate, per-epoch Hamiltonian update; stops when the schedule repeats.
// The returned control is the one driving the last forward pass, so J always
// matches it. Non-convergence is reported through `converged`.
inline SweepResult sweep(const SignedGraph& g, const SimConfig& cfg, const CostSpec& spec, std::size_t alpha,
                         const SweepOptions& opt = {}) {
    if (opt.max_iter < 1) throw ValidationError("max_iter must be at least 1");
    if (!(opt.damping >= 0.0 && opt.damping < 1.0)) throw ValidationError("damping must lie in [0, 1)");
    if (alpha > g.edge_count()) throw ValidationError("alpha exceeds edge count");
    require_gauge(g);
    cfg.validate(g.n());
    const Vector pT = opt.terminal_p.value_or(Vector::Zero(g.n()));

    SweepResult res;
    AttackSchedule schedule = AttackSchedule::empty(cfg);
    for (int it = 1; it <= opt.max_iter; ++it) {
        Trajectory traj = simulate(g, cfg, schedule, alpha, spec);
        CostateTrajectory costate = costate_backward(g, traj, spec, schedule, pT);
        AttackSchedule next = derive_schedule(g, traj, costate, schedule, alpha, opt);

        std::size_t changed = 0;
        for (std::size_t e = 0; e < schedule.size(); ++e) changed += next.epochs[e] != schedule.epochs[e];

        res.history.push_back({it, traj.total_cost(), changed});
        res.iterations = it;
        res.J = traj.total_cost();
        res.control = schedule;
        res.trajectory = std::move(traj);
        res.costate = std::move(costate);
        if (changed == 0) {
            res.converged = true;
            break;
        }
        schedule = std::move(next);
    }
    return res;
}

}  // namespace bicon
