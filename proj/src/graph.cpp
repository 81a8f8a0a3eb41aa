#include "aqcgap/graph.hpp"

#include <algorithm>
#include <bit>
#include <set>

namespace aqcgap {

std::vector<std::vector<std::pair<int, double>>> WeightedGraph::adjacency() const {
    std::vector<std::vector<std::pair<int, double>>> adj(n);
    for (const auto& e : edges) {
        double J = coupling(e);
        adj[e.u].emplace_back(e.v, J);
        adj[e.v].emplace_back(e.u, J);
    }
    return adj;
}

std::vector<int> WeightedGraph::degrees() const {
    std::vector<int> d(n, 0);
    for (const auto& e : edges) {
        ++d[e.u];
        ++d[e.v];
    }
    return d;
}

std::vector<std::uint32_t> WeightedGraph::adjacency_masks() const {
    if (n > 32) throw std::invalid_argument("adjacency_masks: n > 32");
    std::vector<std::uint32_t> m(n, 0);
    for (const auto& e : edges) {
        m[e.u] |= 1u << e.v;
        m[e.v] |= 1u << e.u;
    }
    return m;
}

void WeightedGraph::validate() const {
    if (n < 1) throw std::invalid_argument("graph: n must be >= 1");
    if (static_cast<int>(weight.size()) != n)
        throw std::invalid_argument("graph: weight count != n");
    for (double w : weight)
        if (!(w > 0.0)) throw std::invalid_argument("graph: vertex weights must be positive");
    if (!(default_J > 0.0)) throw std::invalid_argument("graph: default_J must be positive");
    std::set<std::pair<int, int>> seen;
    for (const auto& e : edges) {
        if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n)
            throw std::invalid_argument("graph: edge endpoint out of range");
        if (e.u == e.v) throw std::invalid_argument("graph: self-loop");
        auto key = std::minmax(e.u, e.v);
        if (!seen.insert(key).second) throw std::invalid_argument("graph: duplicate edge");
        if (!(coupling(e) > 0.0))
            throw std::invalid_argument("graph: couplings must be positive");
    }
    if (partition && partition->size() != n)
        throw std::invalid_argument("graph: partition size != n");
}

WeightedGraph make_graph(int n, std::vector<double> weights,
                         std::vector<std::pair<int, int>> edges, double default_J) {
    WeightedGraph g;
    g.n = n;
    g.weight = std::move(weights);
    g.default_J = default_J;
    g.edges.reserve(edges.size());
    for (auto [u, v] : edges) {
        if (u > v) std::swap(u, v);
        g.edges.push_back(Edge{u, v, std::nullopt});
    }
    g.validate();
    return g;
}

std::pair<WeightedGraph, VertexPartition> ck_generate(const CkParams& params) {
    if (params.r < 2 || params.g < 2)
        throw std::invalid_argument("ck_generate: r and g must be >= 2");
    if (!(params.w_A > 0.0) || !(params.w_B > 0.0))
        throw std::invalid_argument("ck_generate: weights must be positive");

    const int r = params.r, g = params.g;
    const int na = 2 * g;
    const int n = na + r * g;

    WeightedGraph graph;
    graph.n = n;
    graph.weight.assign(n, params.w_A);
    for (int v = na; v < n; ++v) graph.weight[v] = params.w_B;

    VertexPartition part;
    part.cls.assign(n, VertexClass::A);
    part.group.assign(n, 0);
    for (int v = 0; v < na; ++v) part.group[v] = v / 2;
    for (int v = na; v < n; ++v) {
        part.cls[v] = VertexClass::B;
        part.group[v] = (v - na) / r;
    }

    // intra-clique edges
    for (int c = 0; c < g; ++c) {
        int base = na + c * r;
        for (int i = 0; i < r; ++i)
            for (int j = i + 1; j < r; ++j)
                graph.edges.push_back(Edge{base + i, base + j, std::nullopt});
    }
    // each group is adjacent to every clique with a different label
    for (int grp = 0; grp < g; ++grp) {
        for (int a = 2 * grp; a < 2 * grp + 2; ++a) {
            for (int c = 0; c < g; ++c) {
                if (c == grp) continue;
                int base = na + c * r;
                for (int j = 0; j < r; ++j)
                    graph.edges.push_back(Edge{a, base + j, std::nullopt});
            }
        }
    }

    graph.ck = params;
    graph.partition = part;
    graph.validate();
    return {graph, part};
}

std::uint32_t selection_to_basis_index(std::uint32_t selection, int n) {
    return ~selection & ((n >= 32 ? ~0u : (1u << n) - 1u));
}

std::uint32_t basis_index_to_selection(std::uint32_t basis_index, int n) {
    return selection_to_basis_index(basis_index, n);
}

double pseudo_boolean_y(const WeightedGraph& g, std::uint32_t selection) {
    double y = 0.0;
    for (int i = 0; i < g.n; ++i)
        if (selection >> i & 1u) y += g.weight[i];
    for (const auto& e : g.edges)
        if ((selection >> e.u & 1u) && (selection >> e.v & 1u)) y -= g.coupling(e);
    return y;
}

double pseudo_boolean_y(const WeightedGraph& g, const std::vector<std::uint8_t>& x) {
    if (static_cast<int>(x.size()) != g.n)
        throw std::invalid_argument("pseudo_boolean_y: bit-vector length != n");
    std::uint32_t mask = 0;
    for (int i = 0; i < g.n; ++i)
        if (x[i]) mask |= 1u << i;
    return pseudo_boolean_y(g, mask);
}

namespace {

// lexicographic order on (x_0, ..., x_{n-1}): x_0 is most significant
std::uint32_t reversed_bits(std::uint32_t mask, int n) {
    std::uint32_t out = 0;
    for (int i = 0; i < n; ++i)
        if (mask >> i & 1u) out |= 1u << (n - 1 - i);
    return out;
}

} // namespace

MisResult brute_force_mis(const WeightedGraph& g) {
    if (g.n > 24) throw std::invalid_argument("brute_force_mis: n > 24");
    g.validate();
    const auto adj = g.adjacency_masks();
    const std::uint32_t total = 1u << g.n;

    double best_w = 0.0;
    std::uint32_t best_mask = 0;
    std::uint32_t best_key = 0; // reversed bits of best_mask
    for (std::uint32_t mask = 0; mask < total; ++mask) {
        bool independent = true;
        double w = 0.0;
        for (std::uint32_t rest = mask; rest;) {
            int i = std::countr_zero(rest);
            rest &= rest - 1;
            if (adj[i] & mask) { independent = false; break; }
            w += g.weight[i];
        }
        if (!independent) continue;
        std::uint32_t key = reversed_bits(mask, g.n);
        if (w > best_w || (w == best_w && key < best_key)) {
            best_w = w;
            best_mask = mask;
            best_key = key;
        }
    }

    MisResult res;
    res.weight = best_w;
    res.selection = best_mask;
    for (int i = 0; i < g.n; ++i)
        if (best_mask >> i & 1u) res.vertices.push_back(i);
    return res;
}

bool verify_theorem_5_1(const WeightedGraph& g) {
    if (g.n > 20) throw std::invalid_argument("verify_theorem_5_1: n > 20");
    g.validate();
    for (const auto& e : g.edges) {
        double need = std::min(g.weight[e.u], g.weight[e.v]);
        if (!(g.coupling(e) > need))
            throw coupling_condition_error(
                "verify_theorem_5_1: J(" + std::to_string(e.u) + "," + std::to_string(e.v) +
                ") = " + std::to_string(g.coupling(e)) + " does not exceed min{c_u, c_v} = " +
                std::to_string(need));
    }

    // maximize Y over all assignments, same tie-break as brute_force_mis
    const std::uint32_t total = 1u << g.n;
    double best_y = pseudo_boolean_y(g, 0u);
    std::uint32_t best_mask = 0, best_key = 0;
    for (std::uint32_t mask = 1; mask < total; ++mask) {
        double y = pseudo_boolean_y(g, mask);
        std::uint32_t key = reversed_bits(mask, g.n);
        if (y > best_y || (y == best_y && key < best_key)) {
            best_y = y;
            best_mask = mask;
            best_key = key;
        }
    }

    MisResult mis = brute_force_mis(g);
    return best_mask == mis.selection && best_y == mis.weight;
}

} // namespace aqcgap
