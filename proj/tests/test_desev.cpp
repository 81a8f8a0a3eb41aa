#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "aqcgap/desev.hpp"
#include "aqcgap/rng.hpp"

using namespace aqcgap;

namespace {

std::uint32_t idx_of_selection(std::uint32_t sel, int n) {
    return selection_to_basis_index(sel, n);
}

} // namespace

TEST_CASE("levels of the 15-vertex instance, unscaled") {
    auto [g, part] = ck_generate(CkParams{3, 3, 1.0, 1.8});
    AnnealSystem sys(mis_to_ising(g, 1.0));
    EnergyLevels lv = group_levels(sys);

    const std::vector<double> top{6.0, 5.4, 5.2, 5.0, 4.8, 4.0, 3.8};
    // degeneracies by direct enumeration: the one-per-clique family is 3^3,
    // adding an in-clique partner triples per host clique, and the value-5
    // level merges five-vertex planted subsets with the 2+2+1 clique family
    const std::vector<long> deg{1, 27, 81, 87, 27, 15, 9};
    REQUIRE(lv.count() >= 7);
    for (int l = 0; l < 7; ++l) {
        CHECK(lv.value[l] == doctest::Approx(top[l]).epsilon(1e-9));
        CHECK(lv.degeneracy[l] == deg[l]);
    }
    long total = 0;
    for (long d : lv.degeneracy) total += d;
    CHECK(total == 32768);

    // every state's level matches its own label value
    SplitMix64 rng(3);
    for (int t = 0; t < 200; ++t) {
        std::uint32_t x = static_cast<std::uint32_t>(rng.next_below(sys.dimension()));
        CHECK(std::abs(sys.minus_energy_label(x) - lv.value[lv.level_of[x]]) <= 1e-9);
    }
}

TEST_CASE("levels of the scaled instance keep only independent sets on top") {
    auto [g, part] = ck_generate(CkParams{3, 3, 1.0, 1.8});
    AnnealSystem sys(mis_to_ising(g, 10.0));
    EnergyLevels lv = group_levels(sys);
    const std::vector<double> top{0.6, 0.54, 0.5, 0.4, 0.38, 0.36, 0.3};
    for (int l = 0; l < 7; ++l) CHECK(lv.value[l] == doctest::Approx(top[l]).epsilon(1e-9));
    CHECK(level_value_label(lv.value[0], 10.0) == "6/k");
    CHECK(level_value_label(lv.value[1], 10.0) == "5.4/k");
    CHECK(level_value_label(6.0, 1.0) == "6");
}

TEST_CASE("single vertex splits into two levels") {
    WeightedGraph g = make_graph(1, {1.0}, {}, 2.0);
    AnnealSystem sys(mis_to_ising(g, 1.0));
    EnergyLevels lv = group_levels(sys);
    REQUIRE(lv.count() == 2);
    CHECK(lv.value[0] == doctest::Approx(1.0));
    CHECK(lv.value[1] == doctest::Approx(0.0));
    CHECK(lv.degeneracy == std::vector<std::int64_t>{1, 1});
}

TEST_CASE("grouping is stable under tiny weight perturbations") {
    auto build = [](double eps) {
        auto [g, part] = ck_generate(CkParams{2, 2, 1.0, 1.5});
        for (auto& w : g.weight) w += eps;
        AnnealSystem sys(mis_to_ising(g, 1.0));
        return group_levels(sys).degeneracy;
    };
    CHECK(build(0.0) == build(1e-12));
    auto [g, part] = ck_generate(CkParams{2, 2, 1.0, 1.5});
    AnnealSystem sys(mis_to_ising(g, 1.0));
    CHECK_THROWS_AS(group_levels(sys, 0.0), std::invalid_argument);
}

TEST_CASE("gamma of analytic states") {
    auto [g, part] = ck_generate(CkParams{3, 3, 1.0, 1.8});
    AnnealSystem sys(mis_to_ising(g, 1.0));
    EnergyLevels lv = group_levels(sys);
    const std::size_t dim = sys.dimension();

    std::vector<double> uniform(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
    auto gu = gamma_decomposition(uniform, lv);
    for (int l = 0; l < lv.count(); ++l)
        CHECK(gu[l] == doctest::Approx(static_cast<double>(lv.degeneracy[l]) / dim).epsilon(1e-9));
    CHECK(gu[0] == doctest::Approx(1.0 / 32768).epsilon(1e-12));

    std::vector<double> basis(dim, 0.0);
    basis[idx_of_selection(0b111111u, 15)] = 1.0;
    auto gb = gamma_decomposition(basis, lv);
    CHECK(gb[0] == doctest::Approx(1.0));

    std::vector<double> bad(dim, 0.0);
    bad[0] = 0.7;
    CHECK_THROWS_AS(gamma_decomposition(bad, lv), std::invalid_argument);
}

TEST_CASE("zero-position labels") {
    auto [g, part] = ck_generate(CkParams{3, 3, 1.0, 1.8});
    const int n = 15;

    CHECK(format_state_label(idx_of_selection(0b111111u, n), part) ==
          "••••••");
    std::uint32_t triple = (1u << 6) | (1u << 9) | (1u << 12);
    CHECK(format_state_label(idx_of_selection(triple, n), part) == "△△△");
    std::uint32_t with_pair = (1u << 6) | (1u << 9) | (1u << 12) | (1u << 13);
    CHECK(format_state_label(idx_of_selection(with_pair, n), part) ==
          "△△△-△");
    CHECK(format_state_label((1u << n) - 1u, part) == "");
    std::uint32_t mixed = 0b11u | (1u << 6); // group 0 pair plus its clique vertex
    CHECK(format_state_label(idx_of_selection(mixed, n), part) == "••△");
}

TEST_CASE("level patterns collapse combinatorial families") {
    auto [g, part] = ck_generate(CkParams{3, 3, 1.0, 1.8});
    AnnealSystem sys(mis_to_ising(g, 1.0));
    EnergyLevels lv = group_levels(sys);
    CHECK(level_patterns(sys, lv, 0, part) ==
          std::vector<std::string>{"••••••"});
    CHECK(level_patterns(sys, lv, 1, part) == std::vector<std::string>{"△△△"});
    // value 5 mixes five planted vertices with the 1+2+2 clique family
    auto p5 = level_patterns(sys, lv, 3, part);
    REQUIRE(p5.size() == 2);
    CHECK(p5[0] == "△△-△ △-△");
    CHECK(p5[1] == "•••••");
}

TEST_CASE("trace endpoints and normalization on a small instance") {
    auto [g, part] = ck_generate(CkParams{2, 2, 1.0, 1.5});
    AnnealSystem sys(mis_to_ising(g, 1.0));
    EnergyLevels lv = group_levels(sys);

    TraceOptions opt;
    opt.jobs = 2;
    auto grid = uniform_grid(11);
    DesevSeries tr = desev_trace(sys, lv, grid, WhichState::Ground, 5, nullptr, opt);

    REQUIRE(tr.s_grid.size() == 11);
    for (double nc : tr.norm_check) CHECK(nc == doctest::Approx(1.0).epsilon(1e-9));
    for (int l = 0; l < tr.top_m; ++l)
        CHECK(tr.gamma[l][0] ==
              doctest::Approx(static_cast<double>(lv.degeneracy[l]) / sys.dimension())
                  .epsilon(1e-9));
    // unique optimum: everything collapses onto the top level at s = 1
    CHECK(tr.gamma[0].back() == doctest::Approx(1.0).epsilon(1e-9));
    for (int l = 1; l < tr.top_m; ++l) CHECK(tr.gamma[l].back() <= 1e-9);

    CHECK_THROWS_AS(desev_trace(sys, lv, grid, WhichState::Ground, 0, nullptr, opt),
                    std::invalid_argument);
}

TEST_CASE("first-excited trace averages the degenerate cluster at s = 1") {
    auto [g, part] = ck_generate(CkParams{2, 2, 1.0, 1.5});
    AnnealSystem sys(mis_to_ising(g, 1.0));
    EnergyLevels lv = group_levels(sys);
    // 3.5: a group pair plus the same-label clique vertex, 4-fold; the next
    // level merges three-vertex planted subsets, one-per-clique pairs, and
    // group pairs carrying their whole clique
    REQUIRE(lv.value[1] == doctest::Approx(3.5));
    REQUIRE(lv.degeneracy[1] == 4);
    REQUIRE(lv.value[2] == doctest::Approx(3.0));
    REQUIRE(lv.degeneracy[2] == 10);

    std::vector<double> grid{0.9, 1.0};
    DesevSeries tr = desev_trace(sys, lv, grid, WhichState::FirstExcited, 5);
    CHECK(tr.cluster_averaged.back() == 1);
    CHECK(tr.gamma[1].back() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(tr.norm_check.back() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("a refined scan adds a cluster of grid points around the minimum") {
    auto [g, part] = ck_generate(CkParams{2, 2, 1.0, 1.5});
    AnnealSystem sys(mis_to_ising(g, 1.0));
    EnergyLevels lv = group_levels(sys);
    ScanOptions so;
    so.with_matrix_element = false;
    GapScan scan = scan_gap(sys, uniform_grid(17), so);
    REQUIRE(scan.refined);

    auto grid = uniform_grid(11);
    DesevSeries plain = desev_trace(sys, lv, grid, WhichState::Ground, 3);
    DesevSeries dense = desev_trace(sys, lv, grid, WhichState::Ground, 3, &scan);
    CHECK(dense.s_grid.size() > plain.s_grid.size());
    bool has_star = false;
    for (double s : dense.s_grid) has_star = has_star || s == scan.s_star;
    CHECK(has_star);
}

TEST_CASE("ground and first-excited traces swap character across the crossing") {
    auto [g, part] = ck_generate(CkParams{3, 3, 1.0, 1.8});
    AnnealSystem sys(mis_to_ising(g, 1.0));
    EnergyLevels lv = group_levels(sys);
    const double s_star = 0.62763727; // refined minimum of this instance
    std::vector<double> grid{s_star - 0.01, s_star + 0.01};
    TraceOptions to;
    to.jobs = 2;
    DesevSeries ground = desev_trace(sys, lv, grid, WhichState::Ground, 7, nullptr, to);
    DesevSeries excited = desev_trace(sys, lv, grid, WhichState::FirstExcited, 7, nullptr, to);
    // planted-level weight crosses 0.5 inside the window, mirrored in the
    // first excited state
    CHECK(ground.gamma[0][0] < 0.5);
    CHECK(ground.gamma[0][1] > 0.5);
    CHECK(excited.gamma[0][0] > 0.5);
    CHECK(excited.gamma[0][1] < 0.5);
}
