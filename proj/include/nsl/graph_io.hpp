#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "nsl/graph.hpp"

namespace nsl {

// Canonical serialization: fixed layout, 0-based vertices, edge order defines
// edge indices. This exact byte form is what gets hashed and written.
inline std::string graph_to_json(const Graph& g) {
    std::ostringstream os;
    os << "{\"vertices\": " << g.vertex_count << ", \"edges\": [";
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        if (e) os << ",";
        os << "[" << g.edges[e].first << "," << g.edges[e].second << "]";
    }
    os << "]}";
    return os.str();
}

inline Graph graph_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    Graph g;
    g.vertex_count = j.at("vertices").get<int>();
    for (const auto& edge : j.at("edges")) {
        if (!edge.is_array() || edge.size() != 2)
            throw std::invalid_argument("graph json: each edge must be a pair [u, v]");
        g.edges.emplace_back(edge[0].get<int>(), edge[1].get<int>());
    }
    if (auto viol = validate(g)) throw std::invalid_argument("graph json: " + *viol);
    return g;
}

inline std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

inline std::string graph_hash_hex(const Graph& g) {
    char buf[19];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(graph_to_json(g))));
    return buf;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

} // namespace nsl
