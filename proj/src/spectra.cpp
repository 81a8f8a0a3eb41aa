#include "aqcgap/spectra.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include "aqcgap/art.hpp"
#include "aqcgap/golden.hpp"
#include "aqcgap/parallel.hpp"

namespace aqcgap {

namespace {

// H(0) = -sum sigma_x is diagonal in the Hadamard basis: the vector indexed
// by mask T has entries 2^{-n/2} (-1)^{popcount(x & T)} and eigenvalue
// -(n - 2 popcount(T)).
EigenSolution hadamard_solution(const AnnealSystem& sys, int m) {
    const int n = sys.num_qubits();
    const std::size_t dim = sys.dimension();
    EigenSolution sol;
    sol.s = 0.0;

    std::vector<std::uint32_t> masks;
    for (int p = 0; p <= n && static_cast<int>(masks.size()) < m; ++p)
        for (std::uint32_t t = 0; t < dim && static_cast<int>(masks.size()) < m; ++t)
            if (std::popcount(t) == p) masks.push_back(t);

    const double amp = std::pow(2.0, -0.5 * n);
    for (std::uint32_t t : masks) {
        std::vector<double> v(dim);
        for (std::size_t x = 0; x < dim; ++x)
            v[x] = (std::popcount(static_cast<std::uint32_t>(x) & t) & 1) ? -amp : amp;
        sol.values.push_back(static_cast<double>(-n + 2 * std::popcount(t)));
        sol.vectors.push_back(std::move(v));
        sol.residuals.push_back(0.0);
    }
    return sol;
}

// H(1) is diagonal: eigenvectors are basis states ordered by energy, ties by
// basis index.
EigenSolution diagonal_solution(const AnnealSystem& sys, int m) {
    const std::size_t dim = sys.dimension();
    const auto& d = sys.diag();
    std::vector<std::uint32_t> idx(dim);
    std::iota(idx.begin(), idx.end(), 0u);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return d[a] < d[b]; });

    EigenSolution sol;
    sol.s = 1.0;
    for (int i = 0; i < m; ++i) {
        std::vector<double> v(dim, 0.0);
        v[idx[i]] = 1.0;
        sol.values.push_back(d[idx[i]]);
        sol.vectors.push_back(std::move(v));
        sol.residuals.push_back(0.0);
    }
    return sol;
}

} // namespace

EigenSolution lowest_eigenpairs(const AnnealSystem& system, double s, int m, double tol,
                                const SolveOptions& base) {
    if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("lowest_eigenpairs: s outside [0,1]");
    if (m < 1 || m > 64) throw std::invalid_argument("lowest_eigenpairs: m must be in 1..64");
    if (static_cast<std::size_t>(m) > system.dimension())
        throw std::invalid_argument("lowest_eigenpairs: m exceeds dimension");

    if (s == 0.0) return hadamard_solution(system, m);
    if (s == 1.0) return diagonal_solution(system, m);

    SolveOptions opt = base;
    opt.want = m;
    opt.tol = tol;
    LinearOperator op{system.dimension(), [&system, s](const double* v, double* out) {
                          system.apply(s, std::span<const double>(v, system.dimension()),
                                       std::span<double>(out, system.dimension()));
                      }};
    Eigenpairs pairs = lowest_eigenpairs(op, system.norm_bound(s), opt);

    EigenSolution sol;
    sol.s = s;
    sol.values = std::move(pairs.values);
    sol.vectors = std::move(pairs.vectors);
    sol.residuals = std::move(pairs.residuals);
    sol.stats = pairs.stats;
    return sol;
}

double degeneracy_tol(const AnnealSystem& system, double s) {
    return 1e-10 * system.norm_bound(s);
}

double gap_degeneracy_tol(const AnnealSystem& system, double s) {
    return 1e-13 * system.norm_bound(s);
}

EigenSolution solve_resolved_cluster(const AnnealSystem& system, double s, int which, int m0,
                                     double tol, const SolveOptions& base) {
    const int cap = static_cast<int>(std::min<std::size_t>(64, system.dimension()));
    int m = std::min(std::max(m0, which + 2), cap);
    bool exhaustive = base.exhaustive_multiplicity;
    for (;;) {
        SolveOptions opt = base;
        opt.exhaustive_multiplicity = exhaustive;
        EigenSolution sol = lowest_eigenpairs(system, s, m, tol, opt);
        const double dtol = degeneracy_tol(system, s);
        int hi = which;
        while (hi + 1 < static_cast<int>(sol.values.size()) &&
               sol.values[hi + 1] - sol.values[which] <= dtol)
            ++hi;
        if (hi + 1 == static_cast<int>(sol.values.size()) && m < cap) {
            m = std::min(2 * m, cap);
            continue;
        }
        if (s == 0.0 || s == 1.0 || exhaustive) return sol; // multiplicities are exact here
        // Guard against symmetry multiplets hidden from a single Krylov
        // space: certify that nothing in the complement of the returned
        // vectors falls at or below the cluster edge.  dH applied to the
        // ground state seeds the probe with every direction that could
        // contribute to a matrix element.
        LinearOperator op{system.dimension(), [&system, s](const double* v, double* out) {
                              system.apply(s, std::span<const double>(v, system.dimension()),
                                           std::span<double>(out, system.dimension()));
                          }};
        std::vector<double> hint(system.dimension());
        system.apply_ds(sol.vectors[0], hint);
        long probe_mv = 0;
        ComplementProbe probe =
            probe_complement_min(op, system.norm_bound(s), sol.vectors,
                                 sol.values[which] + dtol, &hint,
                                 base.seed ^ 0xB0BE5EEDull, &probe_mv);
        sol.stats.matvecs += probe_mv;
        if (probe == ComplementProbe::Above) return sol;
        exhaustive = true; // rerun with deflated harvesting
    }
}

GapResult gap(const AnnealSystem& system, double s, double tol, const SolveOptions& base) {
    EigenSolution sol = lowest_eigenpairs(system, s, 2, tol, base);
    GapResult r;
    r.e0 = sol.values[0];
    r.e1 = sol.values[1];
    r.gap = r.e1 - r.e0;
    r.degenerate = r.gap < gap_degeneracy_tol(system, s);
    return r;
}

std::vector<double> uniform_grid(int count) {
    if (count < 2) throw std::invalid_argument("uniform_grid: count must be >= 2");
    std::vector<double> g(count);
    for (int i = 0; i < count; ++i) g[i] = static_cast<double>(i) / (count - 1);
    return g;
}

std::vector<double> geometric_cluster(double center, int points, double min_offset,
                                      double max_offset) {
    std::vector<double> out;
    out.reserve(points);
    out.push_back(center);
    int per_side = (points - 1) / 2;
    for (int i = 0; i < per_side; ++i) {
        double f = per_side == 1 ? 0.0 : static_cast<double>(i) / (per_side - 1);
        double off = min_offset * std::pow(max_offset / min_offset, f);
        out.push_back(center - off);
        out.push_back(center + off);
    }
    for (double& s : out) s = std::clamp(s, 0.0, 1.0);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

GapSample evaluate_sample(const AnnealSystem& system, double s, bool with_m, double tol,
                          const SolveOptions& base, const MatrixElementPolicy& policy,
                          long& matvecs) {
    GapSample smp;
    smp.s = s;
    smp.m_elem = std::numeric_limits<double>::quiet_NaN();
    if (with_m) {
        EigenSolution sol = solve_resolved_cluster(system, s, 1, 3, tol, base);
        matvecs += sol.stats.matvecs;
        smp.e0 = sol.values[0];
        smp.e1 = sol.values[1];
        smp.gap = smp.e1 - smp.e0;
        smp.degenerate = smp.gap < gap_degeneracy_tol(system, s);
        const double dtol = degeneracy_tol(system, s);
        if (smp.e1 - smp.e0 > dtol) {
            smp.m_cluster = sol.values.size() > 2 && sol.values[2] - sol.values[1] <= dtol;
            smp.m_elem = matrix_element_from_solution(system, sol, policy);
        }
    } else {
        EigenSolution sol = lowest_eigenpairs(system, s, 2, tol, base);
        matvecs += sol.stats.matvecs;
        smp.e0 = sol.values[0];
        smp.e1 = sol.values[1];
        smp.gap = smp.e1 - smp.e0;
        smp.degenerate = smp.gap < gap_degeneracy_tol(system, s);
    }
    return smp;
}

} // namespace

std::pair<double, double> refine_min_gap(const AnnealSystem& system, double s_lo, double s_mid,
                                         double s_hi, double s_tol, double tol,
                                         const SolveOptions& base) {
    if (!(s_lo < s_mid && s_mid < s_hi))
        throw std::invalid_argument("refine_min_gap: bracket not ordered");
    auto f = [&](double s) {
        GapResult r = gap(system, s, tol, base);
        if (r.degenerate)
            throw degenerate_gap_error(
                "refine_min_gap: degenerate gap inside bracket at s = " + std::to_string(s), s);
        return r.gap;
    };
    double fl = f(s_lo), fm = f(s_mid), fh = f(s_hi);
    if (!(fm <= fl && fm <= fh))
        throw std::invalid_argument("refine_min_gap: gap(s_mid) must not exceed the ends");
    GoldenResult g = golden_minimize(f, s_lo, s_mid, s_hi, fl, fm, fh, s_tol);
    return {g.x, g.f};
}

GapScan scan_gap(const AnnealSystem& system, std::span<const double> grid,
                 const ScanOptions& opt) {
    if (grid.size() < 3) throw std::invalid_argument("scan_gap: grid needs at least 3 points");
    std::vector<double> gs(grid.begin(), grid.end());
    std::sort(gs.begin(), gs.end());
    if (gs.front() < 0.0 || gs.back() > 1.0)
        throw std::invalid_argument("scan_gap: grid outside [0,1]");

    GapScan scan;
    std::vector<GapSample> samples(gs.size());
    std::vector<long> mv(gs.size(), 0);
    parallel_for(gs.size(), [&](std::size_t i) {
        samples[i] = evaluate_sample(system, gs[i], opt.with_matrix_element, opt.tol, opt.solve,
                                     opt.policy, mv[i]);
    }, opt.jobs);
    scan.total_solves += static_cast<long>(gs.size());
    for (long m : mv) scan.total_matvecs += m;

    // degenerate anywhere: report the interval, skip refinement
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].degenerate) {
            scan.samples = std::move(samples);
            scan.degenerate = true;
            scan.degenerate_interval = {gs[i > 0 ? i - 1 : 0],
                                        gs[std::min(i + 1, gs.size() - 1)]};
            return scan;
        }
    }

    double min_gap = samples[0].gap;
    for (const auto& s : samples) min_gap = std::min(min_gap, s.gap);

    // candidate brackets around every grid minimum (exact ties refine twice)
    std::vector<std::size_t> arg;
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (samples[i].gap == min_gap) arg.push_back(i);

    double best_s = 0.0, best_g = std::numeric_limits<double>::infinity();
    std::array<double, 2> best_bracket{0.0, 1.0};
    bool boundary = false;

    for (std::size_t a : arg) {
        std::size_t lo_i = a > 0 ? a - 1 : a;
        std::size_t hi_i = a + 1 < samples.size() ? a + 1 : a;
        double lo = gs[lo_i], hi = gs[hi_i];

        // one refinement round inside the bracket, then golden-section
        std::vector<double> fine;
        for (int j = 1; j <= opt.refine_points; ++j)
            fine.push_back(lo + (hi - lo) * j / (opt.refine_points + 1));
        std::vector<GapSample> fs(fine.size());
        std::vector<long> fmv(fine.size(), 0);
        parallel_for(fine.size(), [&](std::size_t i) {
            fs[i] = evaluate_sample(system, fine[i], opt.with_matrix_element, opt.tol, opt.solve,
                                    opt.policy, fmv[i]);
        }, opt.jobs);
        scan.total_solves += static_cast<long>(fine.size());
        for (long m : fmv) scan.total_matvecs += m;

        // merge the original bracket points with the refined ones
        std::vector<GapSample> local;
        for (std::size_t i = lo_i; i <= hi_i; ++i) local.push_back(samples[i]);
        local.insert(local.end(), fs.begin(), fs.end());
        std::sort(local.begin(), local.end(),
                  [](const GapSample& x, const GapSample& y) { return x.s < y.s; });
        for (const auto& smp : fs) samples.push_back(smp);

        std::size_t best_local = 0;
        for (std::size_t i = 1; i < local.size(); ++i)
            if (local[i].gap < local[best_local].gap) best_local = i;

        if (best_local == 0 || best_local + 1 == local.size()) {
            // minimum pinned at the scan boundary; nothing to refine
            double cs = local[best_local].s, cg = local[best_local].gap;
            if (cg < best_g) {
                best_g = cg;
                best_s = cs;
                best_bracket = {lo, hi};
                boundary = true;
            }
            continue;
        }

        double a0 = local[best_local - 1].s, a1 = local[best_local].s,
               a2 = local[best_local + 1].s;
        auto f = [&](double s) {
            long m = 0;
            GapSample smp = evaluate_sample(system, s, false, opt.tol, opt.solve, opt.policy, m);
            scan.total_matvecs += m;
            ++scan.total_solves;
            if (smp.degenerate)
                throw degenerate_gap_error(
                    "scan_gap: degenerate gap inside bracket at s = " + std::to_string(s), s);
            return smp.gap;
        };
        try {
            GoldenResult gmin = golden_minimize(f, a0, a1, a2, local[best_local - 1].gap,
                                                local[best_local].gap, local[best_local + 1].gap,
                                                opt.s_tol);
            if (gmin.f < best_g || (gmin.f == best_g && gmin.x < best_s)) {
                best_g = gmin.f;
                best_s = gmin.x;
                best_bracket = {a0, a2};
                boundary = false;
            }
        } catch (const degenerate_gap_error&) {
            std::sort(samples.begin(), samples.end(),
                      [](const GapSample& x, const GapSample& y) { return x.s < y.s; });
            scan.samples = std::move(samples);
            scan.degenerate = true;
            scan.degenerate_interval = {a0, a2};
            return scan;
        }
    }

    std::sort(samples.begin(), samples.end(),
              [](const GapSample& x, const GapSample& y) { return x.s < y.s; });
    scan.samples = std::move(samples);
    scan.s_star = best_s;
    scan.g_min = best_g;
    scan.bracket = best_bracket;
    scan.refined = true;
    scan.boundary_minimum = boundary;
    return scan;
}

std::vector<double> dense_oracle_spectrum(const AnnealSystem& system, double s) {
    const int n = system.num_qubits();
    if (n > 12) throw std::invalid_argument("dense_oracle_spectrum: n > 12");
    if (!(s >= 0.0 && s <= 1.0))
        throw std::invalid_argument("dense_oracle_spectrum: s outside [0,1]");
    const std::size_t dim = system.dimension();
    const IsingModel& ising = system.ising();

    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);
    for (std::size_t x = 0; x < dim; ++x) {
        // diagonal recomputed from the model, independent of the cached table
        double e = 0.0;
        for (int i = 0; i < n; ++i) {
            double spin = (x >> i & 1u) ? -1.0 : 1.0;
            e += ising.h[i] * spin;
        }
        for (const auto& c : ising.couplings) {
            double su = (x >> c.u & 1u) ? -1.0 : 1.0;
            double sv = (x >> c.v & 1u) ? -1.0 : 1.0;
            e += c.J * su * sv;
        }
        H(x, x) = s * e;
        for (int b = 0; b < n; ++b) {
            std::size_t y = x ^ (std::size_t{1} << b);
            H(x, y) = -(1.0 - s);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
    std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + dim);
    return out;
}

} // namespace aqcgap
