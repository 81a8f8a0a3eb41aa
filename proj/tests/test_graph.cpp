#include <doctest.h>

#include <algorithm>
#include <bit>
#include <set>

#include "aqcgap/graph.hpp"
#include "aqcgap/rng.hpp"

using namespace aqcgap;

namespace {

WeightedGraph random_graph(SplitMix64& rng, int n, double edge_p, double j_slack) {
    std::vector<double> w(n);
    for (auto& x : w) x = rng.next_double(0.5, 2.0);
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng.next_double() < edge_p) edges.push_back({i, j});
    WeightedGraph g = make_graph(n, w, edges, 1.0);
    for (auto& e : g.edges) e.J = std::min(w[e.u], w[e.v]) + j_slack;
    return g;
}

bool is_independent(const WeightedGraph& g, std::uint32_t sel) {
    for (const auto& e : g.edges)
        if ((sel >> e.u & 1u) && (sel >> e.v & 1u)) return false;
    return true;
}

} // namespace

TEST_CASE("ck graph has the documented layout") {
    auto [g, part] = ck_generate(CkParams{3, 3, 1.0, 1.8});
    CHECK(g.n == 15);
    CHECK(g.edges.size() == 45);

    // planted vertices first, then cliques {6,7,8},{9,10,11},{12,13,14}
    for (int v = 0; v < 6; ++v) CHECK(part.cls[v] == VertexClass::A);
    for (int v = 6; v < 15; ++v) CHECK(part.cls[v] == VertexClass::B);
    CHECK(part.group == std::vector<int>{0, 0, 1, 1, 2, 2, 0, 0, 0, 1, 1, 1, 2, 2, 2});

    auto deg = g.degrees();
    for (int v = 0; v < 15; ++v) CHECK(deg[v] == 6);

    std::set<std::pair<int, int>> edges;
    for (const auto& e : g.edges) edges.insert({e.u, e.v});
    // intra-clique edges present
    CHECK(edges.count({6, 7}));
    CHECK(edges.count({6, 8}));
    CHECK(edges.count({7, 8}));
    // group 0 avoids clique 0, reaches cliques 1 and 2
    CHECK(!edges.count({0, 6}));
    CHECK(edges.count({0, 9}));
    CHECK(edges.count({0, 12}));

    int intra = 0;
    for (const auto& e : g.edges)
        if (part.cls[e.u] == VertexClass::B && part.cls[e.v] == VertexClass::B) ++intra;
    CHECK(intra == 9);
    CHECK(g.edges.size() - intra == 36);

    CHECK(g.weight[0] == 1.0);
    CHECK(g.weight[6] == 1.8);
    CHECK(g.ck->unique_global_optimum());
}

TEST_CASE("ck counts and degrees for small parameter range") {
    for (int r = 2; r <= 5; ++r) {
        for (int gg = 2; gg <= 5; ++gg) {
            auto [g, part] = ck_generate(CkParams{r, gg, 1.0, 1.5});
            CHECK(g.n == 2 * gg + r * gg);
            CHECK(static_cast<int>(g.edges.size()) == gg * r * (r - 1) / 2 + 2 * r * gg * (gg - 1));
            auto deg = g.degrees();
            for (int v = 0; v < g.n; ++v) {
                if (part.cls[v] == VertexClass::A)
                    CHECK(deg[v] == r * (gg - 1));
                else
                    CHECK(deg[v] == (r - 1) + 2 * (gg - 1));
            }
        }
    }
}

TEST_CASE("ck rejects bad parameters") {
    CHECK_THROWS_AS(ck_generate(CkParams{1, 3, 1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(ck_generate(CkParams{3, 1, 1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(ck_generate(CkParams{3, 3, -1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("graph validation rejects malformed inputs") {
    CHECK_THROWS_AS(make_graph(2, {1.0, 1.0}, {{0, 0}}, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(make_graph(2, {1.0, 1.0}, {{0, 1}, {1, 0}}, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(make_graph(2, {1.0, -1.0}, {}, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(make_graph(2, {1.0, 1.0}, {{0, 2}}, 2.0), std::invalid_argument);
}

TEST_CASE("pseudo-boolean values on the 15-vertex instance") {
    auto [g, part] = ck_generate(CkParams{3, 3, 1.0, 1.8});
    CHECK(pseudo_boolean_y(g, 0u) == 0.0);

    std::uint32_t planted = 0b111111; // vertices 0..5
    CHECK(pseudo_boolean_y(g, planted) == doctest::Approx(6.0).epsilon(1e-12));

    std::uint32_t triple = (1u << 6) | (1u << 9) | (1u << 12);
    CHECK(pseudo_boolean_y(g, triple) == doctest::Approx(5.4).epsilon(1e-12));

    std::uint32_t pair_state = (1u << 6) | (1u << 9) | (1u << 12) | (1u << 13);
    CHECK(pseudo_boolean_y(g, pair_state) == doctest::Approx(5.2).epsilon(1e-12));

    CHECK_THROWS_AS(pseudo_boolean_y(g, std::vector<std::uint8_t>(14, 0)),
                    std::invalid_argument);
}

TEST_CASE("independent-set indicators evaluate to their weight") {
    SplitMix64 rng(101);
    for (int t = 0; t < 30; ++t) {
        WeightedGraph g = random_graph(rng, 6 + static_cast<int>(rng.next_below(7)), 0.35, 1.0);
        // grow a random maximal independent set
        std::uint32_t sel = 0;
        double weight = 0.0;
        auto adj = g.adjacency_masks();
        for (int i = 0; i < g.n; ++i) {
            int v = static_cast<int>(rng.next_below(g.n));
            if ((sel >> v & 1u) || (adj[v] & sel)) continue;
            sel |= 1u << v;
            weight += g.weight[v];
        }
        CHECK(pseudo_boolean_y(g, sel) == doctest::Approx(weight).epsilon(1e-12));
    }
}

TEST_CASE("brute-force search finds the planted optimum") {
    auto [g, part] = ck_generate(CkParams{3, 3, 1.0, 1.8});
    MisResult mis = brute_force_mis(g);
    CHECK(mis.weight == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(mis.vertices == std::vector<int>{0, 1, 2, 3, 4, 5});

    WeightedGraph single = make_graph(1, {3.0}, {}, 2.0);
    MisResult m1 = brute_force_mis(single);
    CHECK(m1.weight == 3.0);
    CHECK(m1.vertices == std::vector<int>{0});

    WeightedGraph tri = make_graph(3, {1.0, 2.0, 3.0}, {{0, 1}, {0, 2}, {1, 2}}, 4.0);
    MisResult mt = brute_force_mis(tri);
    CHECK(mt.weight == 3.0);
    CHECK(mt.vertices == std::vector<int>{2});

    WeightedGraph big;
    big.n = 25;
    big.weight.assign(25, 1.0);
    CHECK_THROWS_AS(brute_force_mis(big), std::invalid_argument);
}

TEST_CASE("planted set dominates and the one-per-clique family is counted") {
    // enumeration bound: n = 2g + rg <= 18 here
    for (auto [r, gg] : {std::pair{2, 2}, {3, 3}, {2, 4}, {4, 3}}) {
        CkParams p{r, gg, 1.0, 1.5};
        auto [g, part] = ck_generate(p);
        REQUIRE(p.unique_global_optimum());
        MisResult mis = brute_force_mis(g);
        CHECK(mis.weight == doctest::Approx(2.0 * gg * p.w_A).epsilon(1e-12));
        std::uint32_t planted = (1u << (2 * gg)) - 1;
        CHECK(mis.selection == planted);

        // every choice of one vertex per clique is a maximal independent set,
        // and no other all-clique maximal set exists
        long one_per_clique = 0, maximal_clique_only = 0;
        auto adj = g.adjacency_masks();
        std::uint32_t nmask = (1u << g.n) - 1;
        for (std::uint32_t sel = 1; sel <= nmask; ++sel) {
            if (sel & planted) continue;
            if (!is_independent(g, sel)) continue;
            bool maximal = true;
            for (int v = 0; v < g.n && maximal; ++v)
                if (!(sel >> v & 1u) && !(adj[v] & sel)) maximal = false;
            if (!maximal) continue;
            ++maximal_clique_only;
            if (std::popcount(sel) == gg) ++one_per_clique;
        }
        long expected = 1;
        for (int i = 0; i < gg; ++i) expected *= r;
        CHECK(one_per_clique == expected);
        CHECK(maximal_clique_only == expected);
    }
}

TEST_CASE("pseudo-boolean maximizer equals the MIS under dominating couplings") {
    auto [g, part] = ck_generate(CkParams{3, 3, 1.0, 1.8});
    CHECK(verify_theorem_5_1(g)); // J = 2 > w_B

    WeightedGraph p2 = make_graph(2, {1.0, 1.0}, {{0, 1}}, 1.5);
    CHECK(verify_theorem_5_1(p2));
    // all four assignments by hand: best is a single vertex
    double best = -1e9;
    for (std::uint32_t m = 0; m < 4; ++m) best = std::max(best, pseudo_boolean_y(p2, m));
    CHECK(best == doctest::Approx(1.0).epsilon(1e-15));

    WeightedGraph weak = make_graph(2, {1.0, 1.0}, {{0, 1}}, 0.5);
    CHECK_THROWS_AS(verify_theorem_5_1(weak), coupling_condition_error);
}

TEST_CASE("random graphs satisfy the reduction theorem") {
    SplitMix64 rng(7);
    for (int t = 0; t < 50; ++t) {
        int n = 4 + static_cast<int>(rng.next_below(11)); // up to 14
        WeightedGraph g = random_graph(rng, n, 0.4, 1.0);
        CHECK(verify_theorem_5_1(g));
    }
}

TEST_CASE("selection and basis index are complementary") {
    SplitMix64 rng(5);
    for (int t = 0; t < 20; ++t) {
        int n = 1 + static_cast<int>(rng.next_below(20));
        std::uint32_t sel = static_cast<std::uint32_t>(rng.next_below(1u << n));
        std::uint32_t idx = selection_to_basis_index(sel, n);
        CHECK((idx & sel) == 0u);
        CHECK((idx | sel) == (1u << n) - 1u);
        CHECK(basis_index_to_selection(idx, n) == sel);
    }
}
