#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aqcgap/spectra.hpp"

namespace aqcgap {

// M(s) = |<E1(s)| dH/ds |E0(s)>| from an already-computed eigensolution.
// The solution must contain the full E1 cluster (see solve_resolved_cluster).
// Throws if E0 itself is degenerate.
double matrix_element_from_solution(const AnnealSystem& system, const EigenSolution& sol,
                                    const MatrixElementPolicy& policy = {});

// Solves at s and evaluates M(s), growing m until the E1 cluster is resolved.
double matrix_element(const AnnealSystem& system, double s,
                      const MatrixElementPolicy& policy = {}, double tol = 1e-12,
                      const SolveOptions& base = {});

// Residual of the single-bit-flip identity M(s) = |<E1|H_init|E0>| / s,
// valid for s in (0,1].
double verify_bitflip_identity(const AnnealSystem& system, double s, double tol = 1e-12,
                               const SolveOptions& base = {});

struct ArtOptions {
    MatrixElementPolicy policy;
    double tol = 1e-12;         // eigensolver tolerance for grid evaluations
    double ratio_s_tol = 1e-8;  // golden-section width for the ratio argmax
    int cluster_points = 33;    // geometric cluster evaluated around s_star
    int jobs = 0;
    SolveOptions solve;
};

struct ArtReport {
    double k = 1.0;
    double s_star = 0.0;
    double g_min = 0.0;
    double m_at_sstar = 0.0;
    double max_m = 0.0;
    double max_norm = 0.0;
    double art1 = 0.0; // max_M * max_norm / g_min^2
    double art2 = 0.0; // M(s*) * max_norm / g_min^2
    double art3 = 0.0; // max_norm * max_s M(s)/g(s)^2
    double s_prime = 0.0;
    double g_at_sprime = 0.0;
    double m_at_sprime = 0.0;
    double ratio_max = 0.0;
    bool ordering_ok = false; // art2 <= art1 <= art3 (1 + 1e-9), checked, not assumed
    std::string policy_name;
    long total_matvecs = 0;
    long total_solves = 0;
};

// Builds the three running-time measures from a refined gap scan.  The M grid
// reuses the scan samples plus a geometric cluster at s_star and the points
// visited while refining the ratio argmax, so max_M >= M(s_star) holds by
// construction.
ArtReport compute_art(const AnnealSystem& system, const GapScan& scan,
                      std::span<const double> grid, const ArtOptions& opt = {});

struct SweepRow {
    double w_B = 0.0;
    double k = 1.0;
    GapScan scan;
    std::optional<ArtReport> art;
    std::string error; // non-empty when this row failed
};

struct SweepOptions {
    ScanOptions scan;
    ArtOptions art;
    bool with_art = true;
    int jobs = 0; // rows in flight; each row runs single-threaded inside
};

// One row per (w_B, k) combination, in input order.  An empty w_B list means
// "use the graph's weights as they are"; overriding w_B requires a vertex
// partition.  Per-row failures are recorded and the sweep continues.
std::vector<SweepRow> sweep_report(const WeightedGraph& graph, std::span<const double> k_list,
                                   std::span<const double> w_B_list,
                                   std::span<const double> grid, const SweepOptions& opt = {});

} // namespace aqcgap
