#pragma once

// Link-breaking attack strategies. The greedy rule breaks the alpha links
// with the largest score w_ij = |a_ij| (x_j - sgn(a_ij) x_i)^2.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "bicon/errors.hpp"
#include "bicon/graph.hpp"

namespace bicon {

struct LinkScore {
    Link link;
    double w = 0.0;
};

inline double link_score(const Edge& e, const Vector& x) {
    const double d = x[e.link.j - 1] - sign(e.weight) * x[e.link.i - 1];
    return std::abs(e.weight) * d * d;
}

// One score per edge, in edge order.
inline std::vector<LinkScore> score_links(const SignedGraph& g, const Vector& x) {
    if (x.size() != g.n()) throw ContractError("state length does not match node count");
    std::vector<LinkScore> out;
    out.reserve(g.edge_count());
    for (const auto& e : g.edges()) out.push_back({e.link, link_score(e, x)});
    return out;
}

// Largest w first; equal scores fall back to the smaller link.
inline void sort_by_score(std::vector<LinkScore>& scores) {
    std::stable_sort(scores.begin(), scores.end(), [](const LinkScore& a, const LinkScore& b) {
        if (a.w != b.w) return a.w > b.w;
        return a.link < b.link;
    });
}

enum class AttackMode { permanent, per_epoch };

struct AttackStrategy {
    enum class Kind { none, fixed, random, greedy };

    Kind kind = Kind::none;
    int alpha = 0;
    AttackMode mode = AttackMode::permanent;
    LinkSet fixed_links;
    std::uint64_t seed = 0;

    static AttackStrategy none() { return {}; }

    static AttackStrategy greedy(int alpha, AttackMode mode = AttackMode::permanent) {
        return {Kind::greedy, alpha, mode, {}, 0};
    }

    static AttackStrategy random(std::uint64_t seed, int alpha, AttackMode mode = AttackMode::permanent) {
        return {Kind::random, alpha, mode, {}, seed};
    }

    static AttackStrategy fixed(LinkSet links, std::optional<int> alpha = std::nullopt) {
        const int a = alpha.value_or(static_cast<int>(links.size()));
        return {Kind::fixed, a, AttackMode::permanent, std::move(links), 0};
    }

    // Checks the invariants that depend on the target graph.
    void validate(const SignedGraph& g) const {
        if (alpha < 0) throw ValidationError("alpha must be nonnegative");
        if (static_cast<std::size_t>(alpha) > g.edge_count()) {
            throw ValidationError("alpha " + std::to_string(alpha) + " exceeds edge count " + std::to_string(g.edge_count()));
        }
        for (const auto& l : fixed_links) {
            if (!g.has_edge(l)) throw ValidationError("fixed attack link " + to_string(l) + " is not an edge");
        }
    }
};

inline std::string to_string(const AttackStrategy& s) {
    switch (s.kind) {
        case AttackStrategy::Kind::none: return "none";
        case AttackStrategy::Kind::fixed: return "fixed:" + to_string(s.fixed_links, ',');
        case AttackStrategy::Kind::random: return "random:" + std::to_string(s.seed);
        case AttackStrategy::Kind::greedy: return "greedy";
    }
    return "?";
}

struct Selection {
    LinkSet links;
    bool budget_surplus = false;  // alpha exceeded the available edges
};

namespace detail {

// Unbiased draw in [0, bound) from a 64-bit engine; fixed algorithm so seeds
// reproduce across standard libraries.
inline std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t r;
    do {
        r = rng();
    } while (r >= limit);
    return r % bound;
}

}  // namespace detail

// Stateful per-run selector. Advanced once per epoch by the simulator.
class AttackPlanner {
public:
    explicit AttackPlanner(AttackStrategy s) : strategy_(std::move(s)), rng_(strategy_.seed) {}

    const AttackStrategy& strategy() const noexcept { return strategy_; }

    // scores must cover every current edge.
    Selection select(const std::vector<LinkScore>& scores, std::size_t epoch_index) {
        if (strategy_.mode == AttackMode::permanent && held_) {
            Selection out;
            for (const auto& l : held_->links) {
                const bool present = std::any_of(scores.begin(), scores.end(),
                                                 [&](const LinkScore& s) { return s.link == l; });
                if (present) out.links.insert(l);
            }
            out.budget_surplus = held_->budget_surplus;
            return out;
        }
        Selection out = fresh(scores, epoch_index);
        if (strategy_.mode == AttackMode::permanent) held_ = out;
        return out;
    }

private:
    Selection fresh(const std::vector<LinkScore>& scores, std::size_t /*epoch_index*/) {
        Selection out;
        const auto budget = static_cast<std::size_t>(std::max(strategy_.alpha, 0));
        out.budget_surplus = budget > scores.size();
        const std::size_t take = std::min(budget, scores.size());

        switch (strategy_.kind) {
            case AttackStrategy::Kind::none:
                out.budget_surplus = false;
                break;
            case AttackStrategy::Kind::fixed:
                out.links = strategy_.fixed_links;
                out.budget_surplus = false;
                break;
            case AttackStrategy::Kind::greedy: {
                auto sorted = scores;
                sort_by_score(sorted);
                for (std::size_t k = 0; k < take; ++k) out.links.insert(sorted[k].link);
                break;
            }
            case AttackStrategy::Kind::random: {
                std::vector<Link> pool;
                pool.reserve(scores.size());
                for (const auto& s : scores) pool.push_back(s.link);
                std::sort(pool.begin(), pool.end());
                // partial Fisher-Yates
                for (std::size_t k = 0; k < take; ++k) {
                    const auto r = k + detail::bounded(rng_, pool.size() - k);
                    std::swap(pool[k], pool[r]);
                    out.links.insert(pool[k]);
                }
                break;
            }
        }
        return out;
    }

    AttackStrategy strategy_;
    std::mt19937_64 rng_;
    std::optional<Selection> held_;
};

// Stateless form for a single decision.
inline Selection select_attack(const AttackStrategy& strategy, const std::vector<LinkScore>& scores,
                               std::size_t epoch_index = 0) {
    AttackPlanner planner(strategy);
    return planner.select(scores, epoch_index);
}

}  // namespace bicon
