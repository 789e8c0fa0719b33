#pragma once

// Adversary objective J(u) = int_0^T k(t) x^T M x dt.

#include <cmath>
#include <string>

#include "bicon/errors.hpp"
#include "bicon/graph.hpp"
#include "bicon/trajectory.hpp"

namespace bicon {

struct Kernel {
    enum class Kind { constant, exponential };

    Kind kind = Kind::constant;
    double value = 1.0;  // c for constant, lambda for exponential

    static Kernel constant(double c) {
        if (!(c > 0.0) || !std::isfinite(c)) throw ValidationError("constant kernel must be positive and finite");
        return {Kind::constant, c};
    }

    static Kernel exponential(double lambda) {
        if (!std::isfinite(lambda)) throw ValidationError("exponential kernel rate must be finite");
        return {Kind::exponential, lambda};
    }

    double operator()(double t) const {
        return kind == Kind::constant ? value : std::exp(value * t);
    }
};

struct CostSpec {
    Kernel kernel;
    Matrix M;

    // k = 1 and M built from the graph's gauge.
    static CostSpec for_graph(const SignedGraph& g, Kernel k = Kernel{}) {
        return {k, connection_matrix(require_gauge(g))};
    }
};

inline double inst_cost(const CostSpec& spec, double t, const Vector& x) {
    return spec.kernel(t) * x.dot(spec.M * x);
}

// Composite trapezoid of the trajectory's integrand over its grid.
inline double integrate_cost(const CostSpec& spec, const Trajectory& traj) {
    if (traj.empty()) throw ContractError("cannot integrate cost over an empty trajectory");
    double J = 0.0;
    double prev = inst_cost(spec, traj.times[0], traj.states[0]);
    for (std::size_t k = 1; k < traj.size(); ++k) {
        const double cur = inst_cost(spec, traj.times[k], traj.states[k]);
        J += 0.5 * (traj.times[k] - traj.times[k - 1]) * (prev + cur);
        prev = cur;
    }
    return J;
}

}  // namespace bicon
