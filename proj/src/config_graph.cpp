#include "netsir/config_graph.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>

namespace netsir {

namespace {

Graph pair_stubs(const std::vector<int>& seq, std::mt19937_64& rng) {
    if (seq.empty()) throw std::invalid_argument("degree sequence is empty");
    Graph g;
    g.n = static_cast<int>(seq.size());
    g.degree_sequence = seq;
    std::vector<int> stubs;
    for (int v = 0; v < g.n; ++v) {
        if (seq[static_cast<std::size_t>(v)] < 0) throw std::invalid_argument("degrees must be nonnegative");
        stubs.insert(stubs.end(), static_cast<std::size_t>(seq[static_cast<std::size_t>(v)]), v);
    }
    if (stubs.size() % 2 == 1) {
        std::uniform_int_distribution<std::size_t> pick(0, stubs.size() - 1);
        const std::size_t drop = pick(rng);
        stubs[drop] = stubs.back();
        stubs.pop_back();
    }
    std::shuffle(stubs.begin(), stubs.end(), rng);
    g.edges.reserve(stubs.size() / 2);
    for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) g.edges.emplace_back(stubs[i], stubs[i + 1]);

    g.offsets.assign(static_cast<std::size_t>(g.n) + 1, 0);
    for (const auto& [u, v] : g.edges) {
        ++g.offsets[static_cast<std::size_t>(u) + 1];
        ++g.offsets[static_cast<std::size_t>(v) + 1];
    }
    std::partial_sum(g.offsets.begin(), g.offsets.end(), g.offsets.begin());
    g.incidence.resize(stubs.size());
    std::vector<int> fill(g.offsets.begin(), g.offsets.end() - 1);
    for (int e = 0; e < static_cast<int>(g.edges.size()); ++e) {
        const auto [u, v] = g.edges[static_cast<std::size_t>(e)];
        g.incidence[static_cast<std::size_t>(fill[static_cast<std::size_t>(u)]++)] = e;
        g.incidence[static_cast<std::size_t>(fill[static_cast<std::size_t>(v)]++)] = e;
    }
    return g;
}

std::vector<int> draw_degrees(const DegreeDistribution& dist, int n, std::mt19937_64& rng) {
    if (n < 1) throw std::invalid_argument("node count must be positive");
    std::discrete_distribution<int> law(dist.pmf().begin(), dist.pmf().end());
    std::vector<int> seq(static_cast<std::size_t>(n));
    for (int& d : seq) d = law(rng);
    return seq;
}

int find(std::vector<int>& parent, int v) {
    while (parent[static_cast<std::size_t>(v)] != v) {
        parent[static_cast<std::size_t>(v)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
        v = parent[static_cast<std::size_t>(v)];
    }
    return v;
}

}  // namespace

Graph build_mr(const std::vector<int>& degree_sequence, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return pair_stubs(degree_sequence, rng);
}

std::vector<int> sample_degrees(const DegreeDistribution& dist, int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return draw_degrees(dist, n, rng);
}

Graph build_nsw(const DegreeDistribution& dist, int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const auto seq = draw_degrees(dist, n, rng);
    return pair_stubs(seq, rng);
}

std::vector<int> component_labels(const Graph& g) {
    std::vector<int> parent(static_cast<std::size_t>(g.n));
    std::iota(parent.begin(), parent.end(), 0);
    for (const auto& [u, v] : g.edges) {
        const int a = find(parent, u);
        const int b = find(parent, v);
        if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    }
    std::vector<int> label(static_cast<std::size_t>(g.n), -1);
    std::vector<int> root_label(static_cast<std::size_t>(g.n), -1);
    int next = 0;
    for (int v = 0; v < g.n; ++v) {
        const int r = find(parent, v);
        if (root_label[static_cast<std::size_t>(r)] < 0) root_label[static_cast<std::size_t>(r)] = next++;
        label[static_cast<std::size_t>(v)] = root_label[static_cast<std::size_t>(r)];
    }
    return label;
}

int giant_component_size(const Graph& g) {
    if (g.n == 0) return 0;
    const auto label = component_labels(g);
    std::vector<int> size(static_cast<std::size_t>(*std::max_element(label.begin(), label.end())) + 1, 0);
    for (int l : label) ++size[static_cast<std::size_t>(l)];
    return *std::max_element(size.begin(), size.end());
}

void write_edge_list(const Graph& g, std::ostream& out) {
    for (const auto& [u, v] : g.edges) out << u << ' ' << v << '\n';
}

}  // namespace netsir
