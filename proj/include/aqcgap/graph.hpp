#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace aqcgap {

// Thrown by verify_theorem_5_1 (and mis_to_ising preconditions) when a
// coupling J_ij does not dominate min{c_i, c_j}.
struct coupling_condition_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

enum class VertexClass : std::uint8_t { A, B };

// Class/group labels for the two vertex families of a CK graph:
// class A vertices form the planted independent set (2 per group),
// class B vertices form the cliques (group = clique index).
struct VertexPartition {
    std::vector<VertexClass> cls;
    std::vector<int> group;

    int size() const { return static_cast<int>(cls.size()); }
    int count(VertexClass c) const {
        int n = 0;
        for (auto x : cls) n += (x == c);
        return n;
    }
};

struct CkParams {
    int r = 3;          // clique size
    int g = 3;          // group count
    double w_A = 1.0;   // weight of independent-set vertices
    double w_B = 1.8;   // weight of clique vertices

    // w_B < 2 w_A is the regime where the planted set is the unique
    // global maximum.
    bool unique_global_optimum() const { return w_B < 2.0 * w_A; }
};

struct Edge {
    int u = 0;
    int v = 0;
    std::optional<double> J; // per-edge coupling; empty = use default_J
};

// Vertex-weighted undirected graph.  Vertices are 0..n-1; edges are
// stored once with u < v.
struct WeightedGraph {
    int n = 0;
    std::vector<double> weight;
    std::vector<Edge> edges;
    double default_J = 2.0;
    std::optional<CkParams> ck;
    std::optional<VertexPartition> partition;

    double coupling(const Edge& e) const { return e.J ? *e.J : default_J; }
    double coupling(std::size_t edge_index) const { return coupling(edges[edge_index]); }

    // neighbor list with resolved couplings
    std::vector<std::vector<std::pair<int, double>>> adjacency() const;
    std::vector<int> degrees() const;
    // bitmask of neighbors per vertex (requires n <= 32)
    std::vector<std::uint32_t> adjacency_masks() const;

    // throws std::invalid_argument on self-loops, duplicate edges,
    // non-positive weights or couplings, or out-of-range vertex ids
    void validate() const;
};

WeightedGraph make_graph(int n, std::vector<double> weights,
                         std::vector<std::pair<int, int>> edges,
                         double default_J = 2.0);

// Builds the CK graph: 2g independent vertices (group-major) followed by
// g r-cliques (clique-major).  Each group of two class-A vertices is
// adjacent to every vertex of every clique except the same-label one.
std::pair<WeightedGraph, VertexPartition> ck_generate(const CkParams& params);

// Selection masks use bit i = vertex i selected.  Basis indices of the
// spin system use the opposite convention (ket bit 0 = selected), so the
// two are related by complement.
std::uint32_t selection_to_basis_index(std::uint32_t selection, int n);
std::uint32_t basis_index_to_selection(std::uint32_t basis_index, int n);

// Y(x) = sum_i c_i x_i - sum_{ij in E} J_ij x_i x_j
double pseudo_boolean_y(const WeightedGraph& g, std::uint32_t selection);
double pseudo_boolean_y(const WeightedGraph& g, const std::vector<std::uint8_t>& x);

struct MisResult {
    double weight = 0.0;
    std::uint32_t selection = 0;
    std::vector<int> vertices;
};

// Exhaustive maximum-weight independent set, n <= 24.  Ties broken by the
// lexicographically smallest bit-vector (x_0 most significant).
MisResult brute_force_mis(const WeightedGraph& g);

// Checks that the maximizer of Y coincides with the brute-force MIS and
// that max Y equals the MIS weight.  Requires J_ij > min{c_i, c_j} on
// every edge (throws coupling_condition_error otherwise) and n <= 20.
bool verify_theorem_5_1(const WeightedGraph& g);

} // namespace aqcgap
