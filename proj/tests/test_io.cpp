#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include "aqcgap/io.hpp"

using namespace aqcgap;
using nlohmann::json;

TEST_CASE("graph files round-trip to an identical model") {
    auto [g, part] = ck_generate(CkParams{3, 3, 1.0, 1.8});
    g.edges[7].J = 2.5; // one per-edge override survives the trip

    std::string path = (std::filesystem::temp_directory_path() / "aqcgap_rt.json").string();
    io::save_graph_json(g, path);
    WeightedGraph back = io::load_graph_json(path);
    std::filesystem::remove(path);

    CHECK(back.n == g.n);
    CHECK(back.weight == g.weight);
    CHECK(back.default_J == g.default_J);
    REQUIRE(back.edges.size() == g.edges.size());
    REQUIRE(back.ck.has_value());
    CHECK(back.ck->r == 3);
    CHECK(back.ck->w_B == 1.8);
    REQUIRE(back.partition.has_value());
    CHECK(back.partition->group == g.partition->group);

    IsingModel a = mis_to_ising(g, 3.0);
    IsingModel b = mis_to_ising(back, 3.0);
    for (int i = 0; i < a.n; ++i) CHECK(a.h[i] == b.h[i]); // bitwise equal fields
}

TEST_CASE("rational weights are accepted") {
    json j = {{"n", 2},
              {"vertices", json::array({{{"id", 0}, {"weight", "9/5"}},
                                        {{"id", 1}, {"weight", 1.0}}})},
              {"edges", json::array({{{"u", 0}, {"v", 1}}})},
              {"default_J", 2.0}};
    WeightedGraph g = io::graph_from_json(j);
    CHECK(g.weight[0] == doctest::Approx(1.8).epsilon(1e-15));

    CHECK(io::parse_weight(json("3/4")) == 0.75);
    CHECK_THROWS_AS(io::parse_weight(json("x/y")), std::invalid_argument);
    CHECK_THROWS_AS(io::parse_weight(json("1/0")), std::invalid_argument);
}

TEST_CASE("full-precision formatting survives a round trip") {
    for (double v : {0.1, 1.0 / 3.0, 1.04e-5, 225.6, 4.14e-8}) {
        std::string s = io::format_full(v);
        CHECK(std::stod(s) == v);
    }
    CHECK(io::format_sci3(12345.678) == "1.23e+04");
}

TEST_CASE("csv layouts") {
    GapScan scan;
    scan.samples.push_back({0.0, -15.0, -13.0, 2.0, 0.5, false, false});
    scan.samples.push_back({0.5, -40.0, -39.0, 1.0, 0.25, false, false});
    scan.s_star = 0.5;
    scan.g_min = 1.0;
    scan.refined = true;

    std::string csv = io::gap_scan_csv(scan);
    CHECK(csv.substr(0, 15) == "s,E0,E1,gap,M\n0");
    CHECK(csv.find("0.5,-40,-39,1,0.25\n") != std::string::npos);

    DesevSeries series;
    series.s_grid = {0.0, 1.0};
    series.top_m = 2;
    series.level_values = {6.0, 5.4};
    series.level_labels = {"6", "5.4"};
    series.gamma = {{0.25, 1.0}, {0.75, 0.0}};
    series.norm_check = {1.0, 1.0};
    std::string dcsv = io::desev_csv(series);
    CHECK(dcsv.substr(0, 8) == "s,6,5.4\n");
    CHECK(dcsv.find("1,1,0\n") != std::string::npos);

    SweepRow row;
    row.k = 2.0;
    row.w_B = 1.8;
    row.scan = scan;
    ArtReport art;
    art.k = 2.0;
    row.art = art;
    std::vector<SweepRow> rows{row};
    CHECK(io::art_main_csv(rows).rfind("k,s_star,g_min,M_sstar,max_M,max_normH,ART2,ART1\n", 0) ==
          0);
    CHECK(io::art_ratio_csv(rows).rfind("k,s_prime,g_sprime,M_sprime,ratio,max_normH,ART3\n", 0) ==
          0);
    CHECK(io::table1_csv(rows).rfind("w_B,s_star,g_min\n", 0) == 0);

    // identical inputs produce identical bytes
    CHECK(io::gap_scan_csv(scan) == csv);

    SweepRow failed;
    failed.k = 3.0;
    failed.error = "solver gave up";
    std::string with_error = io::art_main_csv(std::vector<SweepRow>{failed});
    CHECK(with_error.find("# row k=3 failed: solver gave up") != std::string::npos);
}
