#include "aqcgap/art.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "aqcgap/golden.hpp"
#include "aqcgap/parallel.hpp"

namespace aqcgap {

namespace {

// accumulate in extended precision: these matrix elements live many orders of
// magnitude below the operator norm
double dot_ld(std::span<const double> a, std::span<const double> b) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += static_cast<long double>(a[i]) * static_cast<long double>(b[i]);
    return static_cast<double>(s);
}

std::vector<int> e1_cluster(const AnnealSystem& system, const EigenSolution& sol) {
    const double dtol = degeneracy_tol(system, sol.s);
    if (sol.values.size() < 2)
        throw std::invalid_argument("matrix_element: need at least two eigenpairs");
    if (sol.values[1] - sol.values[0] <= dtol)
        throw std::runtime_error("matrix_element: E0 is degenerate, M undefined");
    std::vector<int> cluster{1};
    for (int j = 2; j < static_cast<int>(sol.values.size()); ++j) {
        if (sol.values[j] - sol.values[1] <= dtol) cluster.push_back(j);
        else break;
    }
    return cluster;
}

} // namespace

double matrix_element_from_solution(const AnnealSystem& system, const EigenSolution& sol,
                                    const MatrixElementPolicy& policy) {
    auto cluster = e1_cluster(system, sol);
    const std::size_t dim = system.dimension();
    std::vector<double> w(dim);
    system.apply_ds(sol.vectors[0], w);

    if (cluster.size() == 1) return std::abs(dot_ld(sol.vectors[1], w));
    if (policy.degenerate_mode == MatrixElementPolicy::Mode::MaxOverBasis) {
        double best = 0.0;
        for (int j : cluster) best = std::max(best, std::abs(dot_ld(sol.vectors[j], w)));
        return best;
    }
    double sum = 0.0;
    for (int j : cluster) {
        double c = dot_ld(sol.vectors[j], w);
        sum += c * c;
    }
    return std::sqrt(sum);
}

double matrix_element(const AnnealSystem& system, double s, const MatrixElementPolicy& policy,
                      double tol, const SolveOptions& base) {
    EigenSolution sol = solve_resolved_cluster(system, s, 1, 3, tol, base);
    return matrix_element_from_solution(system, sol, policy);
}

double verify_bitflip_identity(const AnnealSystem& system, double s, double tol,
                               const SolveOptions& base) {
    if (!(s > 0.0 && s <= 1.0))
        throw std::invalid_argument("verify_bitflip_identity: s must be in (0,1]");
    EigenSolution sol = solve_resolved_cluster(system, s, 1, 3, tol, base);
    auto cluster = e1_cluster(system, sol);
    const std::size_t dim = system.dimension();

    std::vector<double> w_ds(dim), w_init(dim);
    system.apply_ds(sol.vectors[0], w_ds);
    system.apply_initial(sol.vectors[0], w_init);

    double m_ds = 0.0, m_init = 0.0;
    if (cluster.size() == 1) {
        m_ds = std::abs(dot_ld(sol.vectors[1], w_ds));
        m_init = std::abs(dot_ld(sol.vectors[1], w_init));
    } else {
        for (int j : cluster) {
            double a = dot_ld(sol.vectors[j], w_ds);
            double b = dot_ld(sol.vectors[j], w_init);
            m_ds += a * a;
            m_init += b * b;
        }
        m_ds = std::sqrt(m_ds);
        m_init = std::sqrt(m_init);
    }
    return std::abs(m_ds - m_init / s);
}

namespace {

struct RatioPoint {
    double s = 0.0;
    double gap = 0.0;
    double m = 0.0;
    bool cluster = false; // M from a degenerate-cluster policy

    double ratio() const { return m / (gap * gap); }
};

RatioPoint evaluate_point(const AnnealSystem& system, double s, const ArtOptions& opt,
                          bool polish, long& matvecs) {
    SolveOptions so = opt.solve;
    so.polish = polish;
    double tol = polish ? std::min(opt.tol, 1e-13) : opt.tol;
    EigenSolution sol = solve_resolved_cluster(system, s, 1, 3, tol, so);
    matvecs += sol.stats.matvecs;
    RatioPoint p;
    p.s = s;
    p.gap = sol.values[1] - sol.values[0];
    const double dtol = degeneracy_tol(system, s);
    p.cluster = sol.values.size() > 2 && sol.values[2] - sol.values[1] <= dtol;
    p.m = matrix_element_from_solution(system, sol, opt.policy);
    return p;
}

} // namespace

ArtReport compute_art(const AnnealSystem& system, const GapScan& scan,
                      std::span<const double> grid, const ArtOptions& opt) {
    if (scan.degenerate)
        throw std::runtime_error("compute_art: gap scan reported a degenerate interval");
    if (!scan.refined)
        throw std::invalid_argument("compute_art: gap scan must be refined first");

    ArtReport rep;
    rep.k = system.scale_k();
    rep.policy_name = opt.policy.name();
    rep.s_star = scan.s_star;
    rep.g_min = scan.g_min;
    rep.max_norm = system.max_spectral_norm(grid);
    rep.total_matvecs = scan.total_matvecs;
    rep.total_solves = scan.total_solves;

    // Candidate set: scan samples + geometric cluster at s_star.  Samples
    // whose M came from a degenerate E1 cluster (the n-fold level at s = 0,
    // or s = 1 with degenerate problem levels) are reported in the CSV but do
    // not enter the maxima: the running-time formulas use M along the path
    // where E1(s) is simple.
    std::vector<RatioPoint> pts;
    for (const auto& smp : scan.samples)
        if (std::isfinite(smp.m_elem) && !smp.m_cluster)
            pts.push_back({smp.s, smp.gap, smp.m_elem, false});

    auto cluster = geometric_cluster(rep.s_star, opt.cluster_points);
    std::vector<RatioPoint> extra(cluster.size());
    std::vector<long> mv(cluster.size(), 0);
    parallel_for(cluster.size(), [&](std::size_t i) {
        extra[i] = evaluate_point(system, cluster[i], opt, false, mv[i]);
    }, opt.jobs);
    for (std::size_t i = 0; i < cluster.size(); ++i) {
        if (!extra[i].cluster) pts.push_back(extra[i]);
        rep.total_matvecs += mv[i];
        ++rep.total_solves;
    }

    // M at the refined minimum, solved to the rounding floor: for strongly
    // scaled systems this element is many orders below the energy scale
    long mv_star = 0;
    RatioPoint at_star = evaluate_point(system, rep.s_star, opt, true, mv_star);
    rep.total_matvecs += mv_star;
    ++rep.total_solves;
    rep.m_at_sstar = at_star.m;
    pts.push_back({at_star.s, rep.g_min, at_star.m, at_star.cluster});

    std::sort(pts.begin(), pts.end(),
              [](const RatioPoint& a, const RatioPoint& b) { return a.s < b.s; });
    if (pts.empty())
        throw std::runtime_error("compute_art: no sample with a resolvable E1 level");

    double max_m = 0.0;
    std::size_t arg_ratio = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        max_m = std::max(max_m, pts[i].m);
        if (pts[i].ratio() > pts[arg_ratio].ratio()) arg_ratio = i;
    }

    // golden-section on the ratio around the best candidate
    double s_lo = pts[arg_ratio > 0 ? arg_ratio - 1 : arg_ratio].s;
    double s_hi = pts[arg_ratio + 1 < pts.size() ? arg_ratio + 1 : arg_ratio].s;
    double s_md = pts[arg_ratio].s;
    double best_ratio_s = s_md;

    if (s_lo < s_md && s_md < s_hi) {
        auto f = [&](double s) {
            long m = 0;
            RatioPoint p = evaluate_point(system, s, opt, false, m);
            rep.total_matvecs += m;
            ++rep.total_solves;
            if (!p.cluster) max_m = std::max(max_m, p.m);
            return -p.ratio();
        };
        GoldenResult g = golden_minimize(
            f, s_lo, s_md, s_hi,
            -pts[arg_ratio > 0 ? arg_ratio - 1 : arg_ratio].ratio(), -pts[arg_ratio].ratio(),
            -pts[arg_ratio + 1 < pts.size() ? arg_ratio + 1 : arg_ratio].ratio(),
            opt.ratio_s_tol);
        best_ratio_s = g.x;
    }

    long mv_prime = 0;
    RatioPoint at_prime = evaluate_point(system, best_ratio_s, opt, true, mv_prime);
    rep.total_matvecs += mv_prime;
    ++rep.total_solves;
    rep.s_prime = best_ratio_s;
    rep.g_at_sprime = at_prime.gap;
    rep.m_at_sprime = at_prime.m;
    rep.ratio_max = at_prime.ratio();
    if (!at_prime.cluster) max_m = std::max(max_m, at_prime.m);

    rep.max_m = max_m;
    rep.art1 = rep.max_m * rep.max_norm / (rep.g_min * rep.g_min);
    rep.art2 = rep.m_at_sstar * rep.max_norm / (rep.g_min * rep.g_min);
    rep.art3 = rep.max_norm * rep.ratio_max;
    rep.ordering_ok = rep.art2 <= rep.art1 * (1.0 + 1e-12) && rep.art1 <= rep.art3 * (1.0 + 1e-9);
    return rep;
}

std::vector<SweepRow> sweep_report(const WeightedGraph& graph, std::span<const double> k_list,
                                   std::span<const double> w_B_list,
                                   std::span<const double> grid, const SweepOptions& opt) {
    if (!w_B_list.empty() && !graph.partition)
        throw std::invalid_argument("sweep_report: overriding w_B requires a vertex partition");
    for (double k : k_list)
        if (!(k >= 1.0)) throw std::invalid_argument("sweep_report: k must be >= 1");
    for (double w : w_B_list)
        if (!(w > 0.0)) throw std::invalid_argument("sweep_report: w_B must be positive");

    struct Combo {
        double w_B;
        bool override_w;
        double k;
    };
    std::vector<Combo> combos;
    if (w_B_list.empty()) {
        for (double k : k_list) combos.push_back({0.0, false, k});
    } else {
        for (double w : w_B_list)
            for (double k : k_list) combos.push_back({w, true, k});
    }

    std::vector<SweepRow> rows(combos.size());
    parallel_for(combos.size(), [&](std::size_t i) {
        const Combo& c = combos[i];
        SweepRow& row = rows[i];
        row.k = c.k;
        row.w_B = c.w_B;
        try {
            WeightedGraph g = graph;
            if (c.override_w) {
                for (int v = 0; v < g.n; ++v)
                    if (g.partition->cls[v] == VertexClass::B) g.weight[v] = c.w_B;
                if (g.ck) g.ck->w_B = c.w_B;
            }
            AnnealSystem system(mis_to_ising(g, c.k));
            ScanOptions so = opt.scan;
            so.jobs = 1; // rows already run in parallel
            row.scan = scan_gap(system, grid, so);
            if (opt.with_art) {
                ArtOptions ao = opt.art;
                ao.jobs = 1;
                row.art = compute_art(system, row.scan, grid, ao);
            }
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    }, opt.jobs);
    return rows;
}

} // namespace aqcgap
