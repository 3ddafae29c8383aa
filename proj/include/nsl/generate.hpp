#pragma once

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsl/graph.hpp"
#include "nsl/rng.hpp"

namespace nsl {

// Graph generators for the experiment families. Random families are
// deterministic functions of the seed. Every generator returns a graph that
// passes validate(); invalid parameters throw std::invalid_argument.

namespace detail {

inline Graph checked(Graph g, const std::string& family) {
    if (auto viol = validate(g))
        throw std::invalid_argument(family + ": generated graph invalid: " + *viol);
    return g;
}

} // namespace detail

inline Graph make_complete(int n) {
    // K_3 is a triangle of degree-2 vertices and is excluded by assumption
    if (n < 4) throw std::invalid_argument("complete: need n >= 4");
    Graph g;
    g.vertex_count = n;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) g.edges.emplace_back(u, v);
    return detail::checked(std::move(g), "complete");
}

// circular ladder with n rungs: two n-cycles plus rungs, all degrees 3
inline Graph make_ladder(int n) {
    if (n < 3) throw std::invalid_argument("ladder: need n >= 3");
    Graph g;
    g.vertex_count = 2 * n;
    for (int i = 0; i < n; ++i) g.edges.emplace_back(i, (i + 1) % n);
    for (int i = 0; i < n; ++i) g.edges.emplace_back(n + i, n + (i + 1) % n);
    for (int i = 0; i < n; ++i) g.edges.emplace_back(i, n + i);
    return detail::checked(std::move(g), "ladder");
}

// Cayley graph of Z^2/nZ^2: n^2 vertices of degree 4
inline Graph make_lattice(int n) {
    if (n < 3) throw std::invalid_argument("lattice: need n >= 3");
    Graph g;
    g.vertex_count = n * n;
    auto id = [n](int x, int y) { return ((x % n + n) % n) * n + ((y % n + n) % n); };
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            g.edges.emplace_back(id(x, y), id(x + 1, y));
            g.edges.emplace_back(id(x, y), id(x, y + 1));
        }
    return detail::checked(std::move(g), "lattice");
}

// stower: one center with `loops` loops and `tails` pendant edges
inline Graph make_stower(int loops, int tails) {
    if (loops < 0 || tails < 0 || loops + tails == 0)
        throw std::invalid_argument("stower: need loops >= 0, tails >= 0, loops+tails >= 1");
    if (2 * loops + tails == 2)
        throw std::invalid_argument("stower: center would have degree 2");
    Graph g;
    g.vertex_count = 1 + tails;
    for (int i = 0; i < loops; ++i) g.edges.emplace_back(0, 0);
    for (int t = 0; t < tails; ++t) g.edges.emplace_back(0, 1 + t);
    return detail::checked(std::move(g), "stower");
}

inline Graph make_flower(int m) { return make_stower(m, 0); }

// two vertices joined by m parallel edges
inline Graph make_mandarin(int m) {
    if (m < 3) throw std::invalid_argument("mandarin: need m >= 3");
    Graph g;
    g.vertex_count = 2;
    for (int i = 0; i < m; ++i) g.edges.emplace_back(0, 1);
    return detail::checked(std::move(g), "mandarin");
}

// two loops joined by a bridge
inline Graph make_dumbbell() {
    Graph g;
    g.vertex_count = 2;
    g.edges.emplace_back(0, 0);
    g.edges.emplace_back(1, 1);
    g.edges.emplace_back(0, 1);
    return detail::checked(std::move(g), "dumbbell");
}

// one loop plus one tail
inline Graph make_lollipop() {
    Graph g;
    g.vertex_count = 2;
    g.edges.emplace_back(0, 0);
    g.edges.emplace_back(0, 1);
    return detail::checked(std::move(g), "lollipop");
}

// d-regular simple graph via the configuration model, rejecting pairings
// with loops or multi-edges and disconnected outcomes
inline Graph make_regular(int d, int n, std::uint64_t seed, int max_retries = 10000) {
    if (d < 3) throw std::invalid_argument("regular: need d >= 3 (d = 2 is excluded)");
    if (n <= d) throw std::invalid_argument("regular: need n > d");
    if ((static_cast<long long>(d) * n) % 2 != 0)
        throw std::invalid_argument("regular: d*n must be even");
    Rng rng(mix64(seed ^ 0x5E65ull));
    for (int attempt = 0; attempt < max_retries; ++attempt) {
        std::vector<int> stubs;
        stubs.reserve(static_cast<std::size_t>(d) * n);
        for (int v = 0; v < n; ++v)
            for (int i = 0; i < d; ++i) stubs.push_back(v);
        for (std::size_t i = stubs.size(); i > 1; --i)
            std::swap(stubs[i - 1], stubs[rng.next_below(i)]);

        Graph g;
        g.vertex_count = n;
        std::set<std::pair<int, int>> used;
        bool ok = true;
        for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
            int u = stubs[i], v = stubs[i + 1];
            if (u == v) { ok = false; break; }
            auto key = std::minmax(u, v);
            if (!used.insert({key.first, key.second}).second) { ok = false; break; }
            g.edges.emplace_back(key.first, key.second);
        }
        if (ok && !validate(g)) return g;
    }
    throw std::runtime_error("regular: no valid pairing found within retry budget");
}

// G(n,p), resampled until connected with no degree-2 vertex
inline Graph make_erdos_renyi(int n, double p, std::uint64_t seed, int max_retries = 10000) {
    if (n < 2) throw std::invalid_argument("erdos-renyi: need n >= 2");
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("erdos-renyi: need p in (0,1]");
    Rng rng(mix64(seed ^ 0xE12D05ull));
    for (int attempt = 0; attempt < max_retries; ++attempt) {
        Graph g;
        g.vertex_count = n;
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v)
                if (rng.next_unit() < p) g.edges.emplace_back(u, v);
        if (g.edges.empty()) continue;
        if (!validate(g)) return g;
    }
    throw std::runtime_error("erdos-renyi: no valid sample within retry budget");
}

// Parses a family spec as used by the CLI: name plus numeric parameters.
// Accepted: complete n | ladder n | lattice n | regular d n | erdos-renyi n p |
// stower loops tails | mandarin m | flower m | dumbbell | lollipop
inline Graph generate_family(const std::string& name, const std::vector<double>& params,
                             std::uint64_t seed) {
    auto need = [&](std::size_t k) {
        if (params.size() != k)
            throw std::invalid_argument("family '" + name + "' expects " + std::to_string(k) +
                                        " parameter(s), got " + std::to_string(params.size()));
    };
    auto as_int = [](double x) {
        int i = static_cast<int>(x);
        if (static_cast<double>(i) != x) throw std::invalid_argument("parameter must be an integer");
        return i;
    };
    if (name == "complete") { need(1); return make_complete(as_int(params[0])); }
    if (name == "ladder") { need(1); return make_ladder(as_int(params[0])); }
    if (name == "lattice") { need(1); return make_lattice(as_int(params[0])); }
    if (name == "regular") { need(2); return make_regular(as_int(params[0]), as_int(params[1]), seed); }
    if (name == "erdos-renyi") { need(2); return make_erdos_renyi(as_int(params[0]), params[1], seed); }
    if (name == "stower") { need(2); return make_stower(as_int(params[0]), as_int(params[1])); }
    if (name == "mandarin") { need(1); return make_mandarin(as_int(params[0])); }
    if (name == "flower") { need(1); return make_flower(as_int(params[0])); }
    if (name == "dumbbell") { need(0); return make_dumbbell(); }
    if (name == "lollipop") { need(0); return make_lollipop(); }
    throw std::invalid_argument("unknown graph family '" + name + "'");
}

} // namespace nsl
