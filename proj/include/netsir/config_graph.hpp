#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "netsir/degree_model.hpp"

namespace netsir {

// Configuration-model multigraph. Self-loops and parallel edges are kept.
// incident(v) lists the ids of edges at v; a self-loop id appears twice.
struct Graph {
    int n = 0;
    std::vector<std::pair<int, int>> edges;
    std::vector<int> degree_sequence;  // as prescribed, before any stub is discarded
    std::vector<int> offsets;          // size n+1, CSR into incidence
    std::vector<int> incidence;

    std::span<const int> incident(int v) const {
        return {incidence.data() + offsets[static_cast<std::size_t>(v)],
                static_cast<std::size_t>(offsets[static_cast<std::size_t>(v) + 1] - offsets[static_cast<std::size_t>(v)])};
    }
    int degree(int v) const { return offsets[static_cast<std::size_t>(v) + 1] - offsets[static_cast<std::size_t>(v)]; }
    int other_end(int edge, int v) const {
        const auto& e = edges[static_cast<std::size_t>(edge)];
        return e.first == v ? e.second : e.first;
    }
};

// Uniform stub pairing. An odd stub total loses one uniformly chosen stub first.
Graph build_mr(const std::vector<int>& degree_sequence, std::uint64_t seed);
// iid degrees from dist, then the same pairing.
Graph build_nsw(const DegreeDistribution& dist, int n, std::uint64_t seed);
std::vector<int> sample_degrees(const DegreeDistribution& dist, int n, std::uint64_t seed);

int giant_component_size(const Graph& g);
// Component label per node, labels in [0, component count).
std::vector<int> component_labels(const Graph& g);

// "u v" per line.
void write_edge_list(const Graph& g, std::ostream& out);

}  // namespace netsir
