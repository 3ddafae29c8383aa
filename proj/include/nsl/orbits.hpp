#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "nsl/graph.hpp"

namespace nsl {

// Partition of the edge set into orbits of the graph automorphism group.
// Orbits are sorted internally and listed by their smallest edge index.
struct EdgeOrbitPartition {
    std::vector<std::vector<int>> orbits;
    std::vector<int> orbit_of; // edge index -> orbit index

    int representative(int orbit) const { return orbits[orbit].front(); }
};

namespace autdetail {

struct AdjView {
    int V = 0;
    std::vector<int> adj; // V*V multiplicity matrix, loops counted once on the diagonal
    std::vector<long long> label;

    explicit AdjView(const Graph& g) : V(g.vertex_count), adj(V * V, 0) {
        for (const auto& [u, v] : g.edges) {
            if (u == v) {
                adj[u * V + u] += 1;
            } else {
                adj[u * V + v] += 1;
                adj[v * V + u] += 1;
            }
        }
        // invariant label: degree, loop count, sorted neighbor-degree multiset
        const auto deg = g.degrees();
        label.resize(V);
        std::vector<std::vector<int>> nbr(V);
        for (int u = 0; u < V; ++u) {
            for (int v = 0; v < V; ++v)
                for (int m = 0; m < adj[u * V + v]; ++m)
                    if (u != v) nbr[u].push_back(deg[v]);
            std::sort(nbr[u].begin(), nbr[u].end());
            long long h = deg[u] * 1315423911ll + adj[u * V + u] * 2654435761ll;
            for (int d : nbr[u]) h = h * 1000003ll + d;
            label[u] = h;
        }
    }

    int at(int u, int v) const { return adj[u * V + v]; }
};

inline bool extend(const AdjView& a, std::vector<int>& target, std::vector<char>& used,
                   const std::vector<int>& order, std::size_t pos) {
    if (pos == order.size()) return true;
    const int u = order[pos];
    if (target[u] >= 0) return extend(a, target, used, order, pos + 1);
    for (int w = 0; w < a.V; ++w) {
        if (used[w] || a.label[u] != a.label[w]) continue;
        if (a.at(u, u) != a.at(w, w)) continue;
        bool ok = true;
        for (int x = 0; x < a.V && ok; ++x)
            if (x != u && target[x] >= 0 && a.at(u, x) != a.at(w, target[x])) ok = false;
        if (!ok) continue;
        target[u] = w;
        used[w] = 1;
        if (extend(a, target, used, order, pos + 1)) return true;
        target[u] = -1;
        used[w] = 0;
    }
    return false;
}

// Searches for a vertex automorphism extending the given partial assignment.
inline std::optional<std::vector<int>> find_automorphism(const AdjView& a,
                                                         std::vector<int> target) {
    std::vector<char> used(a.V, 0);
    for (int u = 0; u < a.V; ++u) {
        if (target[u] < 0) continue;
        if (used[target[u]]) return std::nullopt;
        if (a.label[u] != a.label[target[u]]) return std::nullopt;
        if (a.at(u, u) != a.at(target[u], target[u])) return std::nullopt;
        used[target[u]] = 1;
    }
    // pairwise consistency of the pinned part
    for (int u = 0; u < a.V; ++u)
        for (int x = 0; x < a.V; ++x)
            if (target[u] >= 0 && target[x] >= 0 && a.at(u, x) != a.at(target[u], target[x]))
                return std::nullopt;

    std::vector<int> order(a.V);
    std::iota(order.begin(), order.end(), 0);
    // most-constrained first: rare labels early, pinned vertices come for free
    std::map<long long, int> freq;
    for (int u = 0; u < a.V; ++u) freq[a.label[u]]++;
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
        return freq[a.label[x]] < freq[a.label[y]];
    });

    if (extend(a, target, used, order, 0)) return target;
    return std::nullopt;
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
    void unite(int x, int y) { parent[find(x)] = find(y); }
};

} // namespace autdetail

// True if the vertex permutation preserves the edge multiset.
inline bool is_automorphism(const Graph& g, const std::vector<int>& perm) {
    if (static_cast<int>(perm.size()) != g.vertex_count) return false;
    autdetail::AdjView a(g);
    for (int u = 0; u < g.vertex_count; ++u)
        for (int v = 0; v < g.vertex_count; ++v)
            if (a.at(u, v) != a.at(perm[u], perm[v])) return false;
    return true;
}

// Exact edge-orbit partition under the full automorphism group.
// Parallel edges between the same vertex pair always share an orbit (they are
// exchanged by automorphisms fixing all vertices); beyond that, orbits merge
// when a vertex automorphism maps one endpoint pair onto the other.
inline EdgeOrbitPartition edge_orbits(const Graph& g, int vertex_guard = 64) {
    if (auto viol = validate(g)) throw std::invalid_argument("edge_orbits: " + *viol);
    if (g.vertex_count > vertex_guard)
        throw std::runtime_error("edge_orbits: graph exceeds exact-search vertex guard (" +
                                 std::to_string(vertex_guard) + "); supply orbits manually");

    const int E = g.edge_count();
    autdetail::AdjView a(g);
    autdetail::UnionFind uf(E);

    std::map<std::pair<int, int>, std::vector<int>> by_pair;
    for (int e = 0; e < E; ++e) {
        auto [u, v] = g.edges[e];
        auto key = std::minmax(u, v);
        by_pair[key].push_back(e);
    }
    for (const auto& [pair, group] : by_pair)
        for (std::size_t i = 1; i < group.size(); ++i) uf.unite(group[0], group[i]);

    std::vector<std::pair<int, int>> pairs;
    for (const auto& [pair, group] : by_pair) pairs.push_back(pair);

    auto merge_along = [&](const std::vector<int>& perm) {
        for (const auto& [pair, group] : by_pair) {
            auto image = std::minmax(perm[pair.first], perm[pair.second]);
            const auto& igroup = by_pair.at({image.first, image.second});
            uf.unite(group[0], igroup[0]);
        }
    };

    for (std::size_t i = 0; i < pairs.size(); ++i) {
        for (std::size_t j = i + 1; j < pairs.size(); ++j) {
            const int e1 = by_pair[pairs[i]][0], e2 = by_pair[pairs[j]][0];
            if (uf.find(e1) == uf.find(e2)) continue;
            const auto [u1, v1] = pairs[i];
            const auto [u2, v2] = pairs[j];
            std::vector<int> pinned(g.vertex_count, -1);
            pinned[u1] = u2;
            pinned[v1] = v2;
            auto perm = autdetail::find_automorphism(a, pinned);
            if (!perm && u1 != v1) {
                std::fill(pinned.begin(), pinned.end(), -1);
                pinned[u1] = v2;
                pinned[v1] = u2;
                perm = autdetail::find_automorphism(a, pinned);
            }
            if (perm) merge_along(*perm);
        }
    }

    EdgeOrbitPartition part;
    part.orbit_of.assign(E, -1);
    std::map<int, int> root_to_orbit;
    for (int e = 0; e < E; ++e) {
        const int r = uf.find(e);
        auto [it, fresh] = root_to_orbit.try_emplace(r, static_cast<int>(part.orbits.size()));
        if (fresh) part.orbits.emplace_back();
        part.orbits[it->second].push_back(e);
        part.orbit_of[e] = it->second;
    }
    return part;
}

} // namespace nsl
