#pragma once

#include <cstddef>
#include <vector>

#include "bicon/graph.hpp"

namespace bicon {

// Sampled solution of x' = -L(t) x on a uniform grid. attacks[k] is the set
// of broken links active on [t_k, t_{k+1}); the last entry repeats the final
// epoch's set.
struct Trajectory {
    std::vector<double> times;
    std::vector<Vector> states;
    std::vector<double> inst_cost;
    std::vector<double> cum_cost;
    std::vector<LinkSet> attacks;

    std::size_t size() const noexcept { return times.size(); }
    bool empty() const noexcept { return times.empty(); }
    double total_cost() const { return cum_cost.empty() ? 0.0 : cum_cost.back(); }
};

}  // namespace bicon
