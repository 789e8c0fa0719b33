#pragma once

// Signed undirected graphs: parsing, Laplacians, structural balance and
// the bipartite connection matrix.

#include <Eigen/Dense>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "bicon/errors.hpp"

namespace bicon {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Undirected link between two 1-based node ids, stored with i < j.
struct Link {
    int i = 0;
    int j = 0;

    Link() = default;
    Link(int a, int b) : i(std::min(a, b)), j(std::max(a, b)) {}

    friend auto operator<=>(const Link&, const Link&) = default;
};

using LinkSet = std::set<Link>;

inline std::string to_string(const Link& l) {
    return std::to_string(l.i) + "-" + std::to_string(l.j);
}

// "a-b;c-d" (empty set -> empty string).
inline std::string to_string(const LinkSet& links, char sep = ';') {
    std::string out;
    for (const auto& l : links) {
        if (!out.empty()) out += sep;
        out += to_string(l);
    }
    return out;
}

struct Edge {
    Link link;
    double weight = 0.0;
};

inline int sign(double w) { return w > 0.0 ? 1 : (w < 0.0 ? -1 : 0); }

// n agents plus weighted signed undirected edges, kept sorted by link.
class SignedGraph {
public:
    SignedGraph() = default;

    // Validates every edge; throws ValidationError naming the offending edge.
    SignedGraph(int n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
        if (n_ < 1) throw ValidationError("node count must be positive, got " + std::to_string(n_));
        for (auto& e : edges_) e.link = Link(e.link.i, e.link.j);
        std::sort(edges_.begin(), edges_.end(),
                  [](const Edge& a, const Edge& b) { return a.link < b.link; });
        for (std::size_t k = 0; k < edges_.size(); ++k) {
            const auto& e = edges_[k];
            const std::string name = "edge " + to_string(e.link);
            if (e.link.i == e.link.j) throw ValidationError(name + ": self-loop");
            if (e.link.i < 1 || e.link.j > n_) throw ValidationError(name + ": node id out of range [1, " + std::to_string(n_) + "]");
            if (e.weight == 0.0) throw ValidationError(name + ": zero weight");
            if (!std::isfinite(e.weight)) throw ValidationError(name + ": non-finite weight");
            if (k > 0 && edges_[k - 1].link == e.link) throw ValidationError(name + ": duplicate edge");
        }
    }

    int n() const noexcept { return n_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    std::size_t edge_count() const noexcept { return edges_.size(); }

    const Edge* find(const Link& l) const {
        auto it = std::lower_bound(edges_.begin(), edges_.end(), l,
                                   [](const Edge& e, const Link& key) { return e.link < key; });
        return (it != edges_.end() && it->link == l) ? &*it : nullptr;
    }

    bool has_edge(const Link& l) const { return find(l) != nullptr; }

    LinkSet links() const {
        LinkSet out;
        for (const auto& e : edges_) out.insert(e.link);
        return out;
    }

    friend bool operator==(const SignedGraph& a, const SignedGraph& b) {
        if (a.n_ != b.n_ || a.edges_.size() != b.edges_.size()) return false;
        for (std::size_t k = 0; k < a.edges_.size(); ++k) {
            if (a.edges_[k].link != b.edges_[k].link || a.edges_[k].weight != b.edges_[k].weight) return false;
        }
        return true;
    }

private:
    int n_ = 0;
    std::vector<Edge> edges_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split_ws(std::string_view s) {
    std::vector<std::string> out;
    std::istringstream in{std::string(s)};
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

inline std::optional<long> parse_int(const std::string& tok) {
    char* end = nullptr;
    errno = 0;
    const long v = std::strtol(tok.c_str(), &end, 10);
    if (errno != 0 || end == tok.c_str() || *end != '\0') return std::nullopt;
    return v;
}

inline std::optional<double> parse_real(const std::string& tok) {
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(tok.c_str(), &end);
    if (errno != 0 || end == tok.c_str() || *end != '\0') return std::nullopt;
    return v;
}

}  // namespace detail

// Graph file: first non-comment line "n <N>", then "<i> <j> <w>" per edge.
// Lines starting with '#' and blank lines are skipped. Reversed or repeated
// pairs are rejected.
inline SignedGraph parse_graph(std::string_view text) {
    std::optional<int> n;
    std::vector<Edge> edges;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const auto raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
        ++line_no;

        const auto line = detail::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto tok = detail::split_ws(line);

        if (!n) {
            if (tok.size() != 2 || tok[0] != "n") throw ParseError(line_no, "expected header 'n <N>'");
            const auto v = detail::parse_int(tok[1]);
            if (!v || *v < 1) throw ParseError(line_no, "node count must be a positive integer");
            n = static_cast<int>(*v);
            continue;
        }

        if (tok.size() != 3) throw ParseError(line_no, "expected '<i> <j> <w>'");
        const auto i = detail::parse_int(tok[0]);
        const auto j = detail::parse_int(tok[1]);
        const auto w = detail::parse_real(tok[2]);
        if (!i || !j) throw ParseError(line_no, "node ids must be integers");
        if (!w) throw ParseError(line_no, "weight must be a decimal real");

        const Link link(static_cast<int>(*i), static_cast<int>(*j));
        const std::string name = "edge " + std::to_string(*i) + "-" + std::to_string(*j) + " (line " + std::to_string(line_no) + ")";
        if (*i == *j) throw ValidationError(name + ": self-loop");
        if (*i < 1 || *j < 1 || *i > *n || *j > *n) throw ValidationError(name + ": node id out of range [1, " + std::to_string(*n) + "]");
        if (*w == 0.0) throw ValidationError(name + ": zero weight");
        for (const auto& e : edges) {
            if (e.link == link) throw ValidationError(name + ": duplicate of an earlier edge");
        }
        edges.push_back({link, *w});
    }

    if (!n) throw ParseError(line_no, "missing header 'n <N>'");
    return SignedGraph(*n, std::move(edges));
}

// Canonical text form; parse_graph(format_graph(g)) == g.
inline std::string format_graph(const SignedGraph& g) {
    std::ostringstream out;
    out.precision(17);
    out << "n " << g.n() << '\n';
    for (const auto& e : g.edges()) out << e.link.i << ' ' << e.link.j << ' ' << e.weight << '\n';
    return out.str();
}

// L_ii = sum |a_ij| over neighbours, L_ij = -a_ij.
inline Matrix build_laplacian(const SignedGraph& g) {
    Matrix L = Matrix::Zero(g.n(), g.n());
    for (const auto& e : g.edges()) {
        const int a = e.link.i - 1;
        const int b = e.link.j - 1;
        L(a, a) += std::abs(e.weight);
        L(b, b) += std::abs(e.weight);
        L(a, b) = -e.weight;
        L(b, a) = -e.weight;
    }
    return L;
}

// Per-node sign labels; sigma[0] corresponds to node 1.
using Gauge = std::vector<int>;

struct Unbalanced {
    Link witness;
};

using BalanceResult = std::variant<Gauge, Unbalanced>;

// BFS sign propagation per connected component. The lowest id in each
// component is labelled +1. A non-tree edge whose sign check fails closes a
// negative cycle and is returned as the witness.
inline BalanceResult check_structural_balance(const SignedGraph& g) {
    const int n = g.n();
    std::vector<std::vector<std::pair<int, int>>> adj(n);
    for (const auto& e : g.edges()) {
        adj[e.link.i - 1].emplace_back(e.link.j - 1, sign(e.weight));
        adj[e.link.j - 1].emplace_back(e.link.i - 1, sign(e.weight));
    }

    Gauge sigma(n, 0);
    for (int root = 0; root < n; ++root) {
        if (sigma[root] != 0) continue;
        sigma[root] = 1;
        std::queue<int> q;
        q.push(root);
        while (!q.empty()) {
            const int u = q.front();
            q.pop();
            for (const auto& [v, s] : adj[u]) {
                if (sigma[v] == 0) {
                    sigma[v] = sigma[u] * s;
                    q.push(v);
                } else if (sigma[u] * sigma[v] * s != 1) {
                    return Unbalanced{Link(u + 1, v + 1)};
                }
            }
        }
    }
    return sigma;
}

inline bool is_balanced(const SignedGraph& g) {
    return std::holds_alternative<Gauge>(check_structural_balance(g));
}

// Throws ValidationError with the witness edge when g is not balanced.
inline Gauge require_gauge(const SignedGraph& g) {
    auto r = check_structural_balance(g);
    if (auto* u = std::get_if<Unbalanced>(&r)) {
        throw ValidationError("graph is not structurally balanced (negative cycle through edge " + to_string(u->witness) + ")");
    }
    return std::get<Gauge>(std::move(r));
}

inline Vector gauge_vector(const Gauge& sigma) {
    Vector v(static_cast<Eigen::Index>(sigma.size()));
    for (std::size_t k = 0; k < sigma.size(); ++k) v[static_cast<Eigen::Index>(k)] = sigma[k];
    return v;
}

// M = n I - sigma sigma^T. On edges this gives M_ij = -sign(a_ij).
inline Matrix connection_matrix(const Gauge& sigma) {
    const auto n = static_cast<Eigen::Index>(sigma.size());
    const Vector s = gauge_vector(sigma);
    return static_cast<double>(n) * Matrix::Identity(n, n) - s * s.transpose();
}

// Deletes the given links (u_ij = 1). Every link must be an edge of g.
inline SignedGraph remove_links(const SignedGraph& g, const LinkSet& links) {
    for (const auto& l : links) {
        if (!g.has_edge(l)) throw ContractError("cannot remove link " + to_string(l) + ": not an edge of the graph");
    }
    std::vector<Edge> kept;
    kept.reserve(g.edge_count());
    for (const auto& e : g.edges()) {
        if (!links.contains(e.link)) kept.push_back(e);
    }
    return SignedGraph(g.n(), std::move(kept));
}

// Flips edge signs by the gauge: w -> sigma_i sigma_j w. For a balanced graph
// and its own gauge the result has only positive weights.
inline SignedGraph gauge_transform(const SignedGraph& g, const Gauge& sigma) {
    std::vector<Edge> edges = g.edges();
    for (auto& e : edges) e.weight *= sigma[e.link.i - 1] * sigma[e.link.j - 1];
    return SignedGraph(g.n(), std::move(edges));
}

}  // namespace bicon
