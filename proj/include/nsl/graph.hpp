#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace nsl {

// Undirected multigraph with loops. Edge j (0-based, file order) carries two
// bonds: bond j directed u->v and bond j+E directed v->u. Immutable after
// construction; all members are value types safe to share across threads.
struct Graph {
    int vertex_count = 0;
    std::vector<std::pair<int, int>> edges;

    int edge_count() const { return static_cast<int>(edges.size()); }
    int bond_count() const { return 2 * edge_count(); }

    // first Betti number, valid for connected graphs
    int betti() const { return edge_count() - vertex_count + 1; }

    bool is_loop(int e) const { return edges[e].first == edges[e].second; }

    // reversal involution on bonds
    int reversed_bond(int b) const {
        const int E = edge_count();
        return b < E ? b + E : b - E;
    }

    int bond_origin(int b) const {
        const int E = edge_count();
        return b < E ? edges[b].first : edges[b - E].second;
    }

    int bond_terminus(int b) const {
        const int E = edge_count();
        return b < E ? edges[b].second : edges[b - E].first;
    }

    // a loop contributes 2 to the degree of its vertex
    std::vector<int> degrees() const {
        std::vector<int> deg(vertex_count, 0);
        for (const auto& [u, v] : edges) {
            deg[u] += 1;
            deg[v] += 1;
        }
        return deg;
    }

    std::vector<int> loops() const {
        std::vector<int> out;
        for (int e = 0; e < edge_count(); ++e)
            if (is_loop(e)) out.push_back(e);
        return out;
    }
};

// First violated invariant, or nullopt if the graph is valid.
inline std::optional<std::string> validate(const Graph& g) {
    if (g.vertex_count < 1 || g.edges.empty()) return "graph must have V >= 1 and E >= 1";
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        const auto& [u, v] = g.edges[e];
        if (u < 0 || u >= g.vertex_count || v < 0 || v >= g.vertex_count)
            return "edge " + std::to_string(e + 1) + " references vertex out of range";
    }

    const auto deg = g.degrees();
    for (int v = 0; v < g.vertex_count; ++v)
        if (deg[v] == 2) return "vertex " + std::to_string(v) + " has degree 2";
    for (int v = 0; v < g.vertex_count; ++v)
        if (deg[v] == 0) return "vertex " + std::to_string(v) + " is isolated";

    // connectivity by traversal; loops are self-incidences and do not help
    std::vector<char> seen(g.vertex_count, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (const auto& [a, b] : g.edges) {
            if (a == u && !seen[b]) {
                seen[b] = 1;
                stack.push_back(b);
            } else if (b == u && !seen[a]) {
                seen[a] = 1;
                stack.push_back(a);
            }
        }
    }
    for (int v = 0; v < g.vertex_count; ++v)
        if (!seen[v]) return "graph is disconnected (vertex " + std::to_string(v) + " unreachable from 0)";
    return std::nullopt;
}

inline bool is_valid(const Graph& g) { return !validate(g).has_value(); }

} // namespace nsl
