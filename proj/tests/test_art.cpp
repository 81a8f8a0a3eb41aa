#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "aqcgap/art.hpp"
#include "aqcgap/rng.hpp"

using namespace aqcgap;

namespace {

// Dense-oracle matrix element built from an explicit matrix.  E1 may sit in
// a symmetry multiplet, so the oracle projects dH|E0> onto the whole cluster;
// the dense eigenbasis inside the cluster is unrelated to the Krylov one,
// which makes this a basis-independence check as well.
double dense_matrix_element(const AnnealSystem& sys, double s) {
    const std::size_t dim = sys.dimension();
    const int n = sys.num_qubits();
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::MatrixXd dH = Eigen::MatrixXd::Zero(dim, dim);
    for (std::size_t x = 0; x < dim; ++x) {
        H(x, x) = s * sys.diag()[x];
        dH(x, x) = sys.diag()[x];
        for (int b = 0; b < n; ++b) {
            std::size_t y = x ^ (std::size_t{1} << b);
            H(x, y) = -(1.0 - s);
            dH(x, y) = 1.0;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    Eigen::VectorXd w = dH * es.eigenvectors().col(0);
    const double dtol = degeneracy_tol(sys, s);
    double sum = 0.0;
    for (std::size_t j = 1; j < dim; ++j) {
        if (es.eigenvalues()(j) - es.eigenvalues()(1) > dtol) break;
        double c = es.eigenvectors().col(j).dot(w);
        sum += c * c;
    }
    return std::sqrt(sum);
}

} // namespace

TEST_CASE("matrix element against the dense oracle") {
    auto [g, part] = ck_generate(CkParams{2, 2, 1.0, 1.5});
    AnnealSystem sys(mis_to_ising(g, 1.0));
    for (double s : {0.2, 0.45, 0.8}) {
        double m = matrix_element(sys, s);
        double ref = dense_matrix_element(sys, s);
        CHECK(std::abs(m - ref) <= 1e-9);
    }
}

TEST_CASE("final-time element counts single bit flips") {
    // ground and first excited states one flip apart
    WeightedGraph two = make_graph(2, {3.0, 1.0}, {}, 2.0);
    AnnealSystem near_sys(mis_to_ising(two, 1.0));
    CHECK(matrix_element(near_sys, 1.0) == doctest::Approx(1.0).epsilon(1e-12));

    // two flips apart: the element vanishes
    WeightedGraph far = make_graph(2, {1.0, 2.0}, {{0, 1}}, 5.0);
    AnnealSystem far_sys(mis_to_ising(far, 1.0));
    CHECK(matrix_element(far_sys, 1.0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("degenerate ground state is rejected") {
    WeightedGraph tie = make_graph(2, {1.0, 1.0}, {{0, 1}}, 3.0);
    AnnealSystem sys(mis_to_ising(tie, 1.0));
    CHECK_THROWS_AS(matrix_element(sys, 1.0), std::runtime_error);
}

TEST_CASE("policies agree away from degeneracy") {
    // an asymmetric instance: no symmetry multiplets in the low spectrum
    SplitMix64 rng(91);
    std::vector<double> w(8);
    for (auto& x : w) x = rng.next_double(0.5, 2.0);
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < 8; ++i)
        for (int j = i + 1; j < 8; ++j)
            if (rng.next_double() < 0.4) edges.push_back({i, j});
    WeightedGraph g = make_graph(8, w, edges, 1.0);
    for (auto& e : g.edges) e.J = std::min(w[e.u], w[e.v]) + 1.0;

    AnnealSystem sys(mis_to_ising(g, 1.0));
    MatrixElementPolicy proj;
    MatrixElementPolicy maxb;
    maxb.degenerate_mode = MatrixElementPolicy::Mode::MaxOverBasis;
    for (double s : {0.3, 0.6, 0.9})
        CHECK(matrix_element(sys, s, proj) ==
              doctest::Approx(matrix_element(sys, s, maxb)).epsilon(1e-10));
}

TEST_CASE("bit-flip identity residual is at solver accuracy") {
    auto [g, part] = ck_generate(CkParams{2, 2, 1.0, 1.5});
    for (double k : {1.0, 10.0}) {
        AnnealSystem sys(mis_to_ising(g, k));
        SplitMix64 rng(77);
        for (int t = 0; t < 10; ++t) {
            double s = rng.next_double(0.05, 1.0);
            CHECK(verify_bitflip_identity(sys, s) <= 1e-9 * sys.norm_bound(s));
        }
    }
    AnnealSystem sys(mis_to_ising(g, 1.0));
    CHECK_THROWS_AS(verify_bitflip_identity(sys, 0.0), std::invalid_argument);
}

TEST_CASE("derivative along the path is constant") {
    auto [g, part] = ck_generate(CkParams{2, 2, 1.0, 1.5});
    AnnealSystem sys(mis_to_ising(g, 1.0));
    const std::size_t dim = sys.dimension();
    SplitMix64 rng(78);
    std::vector<double> u(dim), v(dim), h1(dim), h2(dim), dv(dim);
    for (auto& x : u) x = rng.next_double() - 0.5;
    for (auto& x : v) x = rng.next_double() - 0.5;
    sys.apply_ds(v, dv);
    double direct = 0.0;
    for (std::size_t x = 0; x < dim; ++x) direct += u[x] * dv[x];
    for (auto [s1, s2] : {std::pair{0.1, 0.9}, {0.25, 0.5}, {0.6, 0.61}}) {
        sys.apply(s1, v, h1);
        sys.apply(s2, v, h2);
        double finite = 0.0;
        for (std::size_t x = 0; x < dim; ++x) finite += u[x] * (h2[x] - h1[x]);
        finite /= (s2 - s1);
        CHECK(finite == doctest::Approx(direct).epsilon(1e-10));
    }
}

TEST_CASE("running-time report on a small instance") {
    auto [g, part] = ck_generate(CkParams{2, 2, 1.0, 1.5});
    AnnealSystem sys(mis_to_ising(g, 1.0));
    auto grid = uniform_grid(65);
    ScanOptions so;
    so.jobs = 2;
    GapScan scan = scan_gap(sys, grid, so);
    REQUIRE(scan.refined);

    ArtOptions ao;
    ao.jobs = 2;
    ArtReport rep = compute_art(sys, scan, grid, ao);

    CHECK(rep.g_min == scan.g_min);
    CHECK(rep.max_m >= rep.m_at_sstar);
    CHECK(rep.art2 <= rep.art1 * (1.0 + 1e-12));
    // the ratio maximum is bounded by pairing max M with the smallest gap
    CHECK(rep.art3 <= rep.art1 * (1.0 + 1e-9));
    CHECK(rep.art2 <= rep.art3 * (1.0 + 1e-9));
    CHECK(rep.s_prime >= 0.0);
    CHECK(rep.s_prime <= 1.0);
    CHECK(rep.g_at_sprime >= rep.g_min * (1.0 - 1e-9));
    CHECK(rep.ratio_max == doctest::Approx(rep.m_at_sprime /
                                           (rep.g_at_sprime * rep.g_at_sprime)));
    CHECK(rep.max_norm == doctest::Approx(sys.spectral_norm(1.0)).epsilon(1e-8));

    // unrefined scans are rejected
    GapScan raw;
    CHECK_THROWS_AS(compute_art(sys, raw, grid, ao), std::invalid_argument);
}

TEST_CASE("sweep rows preserve order and record failures") {
    auto [g, part] = ck_generate(CkParams{2, 2, 1.0, 1.5});
    SweepOptions opt;
    opt.with_art = false;
    opt.scan.with_matrix_element = false;
    auto grid = uniform_grid(33);

    auto empty = sweep_report(g, {}, {}, grid, opt);
    CHECK(empty.empty());

    std::vector<double> ks{1.0, 2.0};
    std::vector<double> wbs{1.2, 1.5};
    auto rows = sweep_report(g, ks, wbs, grid, opt);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].w_B == 1.2);
    CHECK(rows[0].k == 1.0);
    CHECK(rows[1].k == 2.0);
    CHECK(rows[3].w_B == 1.5);
    for (const auto& r : rows) {
        CHECK(r.error.empty());
        CHECK(r.scan.refined);
    }

    // a tied optimum degenerates at s = 1 and the row records the failure
    WeightedGraph tie = make_graph(2, {1.0, 1.0}, {{0, 1}}, 3.0);
    SweepOptions art_opt;
    art_opt.with_art = true;
    auto bad = sweep_report(tie, std::vector<double>{1.0}, {}, grid, art_opt);
    REQUIRE(bad.size() == 1);
    CHECK(!bad[0].error.empty());

    WeightedGraph no_part = make_graph(3, {1.0, 1.0, 1.0}, {{0, 1}}, 2.0);
    CHECK_THROWS_AS(sweep_report(no_part, ks, wbs, grid, opt), std::invalid_argument);
}
