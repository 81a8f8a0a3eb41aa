#pragma once

#include <array>
#include <string>
#include <cstdint>
#include <span>
#include <vector>

#include "aqcgap/hamiltonian.hpp"
#include "aqcgap/lanczos.hpp"

namespace aqcgap {

struct EigenSolution {
    double s = 0.0;
    std::vector<double> values;                // ascending, counting multiplicity
    std::vector<std::vector<double>> vectors;  // orthonormal
    std::vector<double> residuals;             // ||H v - lambda v||
    SolveStats stats;
};

// m lowest eigenpairs of H(s).  s = 0 and s = 1 have closed forms (Hadamard
// basis and computational basis) and are returned exactly with a
// deterministic ordering; interior s goes through the Krylov solver with its
// fixed-seed start vector.
EigenSolution lowest_eigenpairs(const AnnealSystem& system, double s, int m,
                                double tol = 1e-12, const SolveOptions& base = {});

// cluster tolerance for treating neighboring eigenstates as degenerate
double degeneracy_tol(const AnnealSystem& system, double s);
// tolerance below which a gap is reported as degenerate
double gap_degeneracy_tol(const AnnealSystem& system, double s);

// Re-solves with growing m until the degenerate cluster containing eigenstate
// `which` is fully resolved (the cluster may not touch the last returned
// level).  m grows up to 64.
EigenSolution solve_resolved_cluster(const AnnealSystem& system, double s, int which,
                                     int m0, double tol = 1e-12,
                                     const SolveOptions& base = {});

// Raised when refinement runs into a numerically degenerate gap.
struct degenerate_gap_error : std::runtime_error {
    explicit degenerate_gap_error(const std::string& msg, double s_at = 0.0)
        : std::runtime_error(msg), s(s_at) {}
    double s = 0.0;
};

struct GapResult {
    double e0 = 0.0;
    double e1 = 0.0;
    double gap = 0.0;
    bool degenerate = false;
};

GapResult gap(const AnnealSystem& system, double s, double tol = 1e-12,
              const SolveOptions& base = {});

struct GapSample {
    double s = 0.0;
    double e0 = 0.0;
    double e1 = 0.0;
    double gap = 0.0;
    double m_elem = 0.0;    // |<E1| dH/ds |E0>|, NaN when not computed
    bool degenerate = false;
    bool m_cluster = false; // M came from a degenerate-cluster policy, not a
                            // simple E1 (e.g. the n-fold level at s = 0)
};

// How M(s) is evaluated when E1 sits in a degenerate cluster: the projection
// norm ||P_1 dH |E0>|| (basis independent, default) or the largest element
// over the returned cluster basis.
struct MatrixElementPolicy {
    enum class Mode { ProjectionNorm, MaxOverBasis };
    Mode degenerate_mode = Mode::ProjectionNorm;

    std::string name() const {
        return degenerate_mode == Mode::ProjectionNorm ? "projection-norm" : "max-over-basis";
    }
};

struct ScanOptions {
    int refine_points = 33;   // local refinement round inside the minimum bracket
    double s_tol = 1e-9;      // golden-section width target
    bool with_matrix_element = true;
    MatrixElementPolicy policy;
    double tol = 1e-12;       // eigensolver residual tolerance
    int jobs = 0;             // 0 = resolve from AQCGAP_JOBS / hardware
    SolveOptions solve;       // advanced solver knobs (want managed internally)
};

struct GapScan {
    std::vector<GapSample> samples; // sorted by s
    double s_star = 0.0;
    double g_min = 0.0;
    std::array<double, 2> bracket{0.0, 0.0};
    bool refined = false;
    bool boundary_minimum = false;
    bool degenerate = false;
    std::array<double, 2> degenerate_interval{0.0, 0.0};
    long total_matvecs = 0;
    long total_solves = 0;
};

// Samples the gap over the grid, locally refines the minimum bracket, then
// golden-sections to s_tol.  Ties between equal grid minima are resolved by
// refining every bracket and keeping the smallest result.
GapScan scan_gap(const AnnealSystem& system, std::span<const double> grid,
                 const ScanOptions& opt = {});

// Golden-section minimization of gap(s) on a bracket with
// gap(s_mid) <= min(gap(s_lo), gap(s_hi)); returns (s_star, g_min).
std::pair<double, double> refine_min_gap(const AnnealSystem& system, double s_lo,
                                         double s_mid, double s_hi, double s_tol = 1e-9,
                                         double tol = 1e-12, const SolveOptions& base = {});

// All 2^n eigenvalues by dense diagonalization of the explicitly
// materialized matrix; n <= 12.  Independent of the Krylov path.
std::vector<double> dense_oracle_spectrum(const AnnealSystem& system, double s);

// i/(count-1) for i = 0..count-1; exact endpoints
std::vector<double> uniform_grid(int count = 257);

// center +- logarithmically spaced offsets, clipped to [0,1]; sorted, deduped
std::vector<double> geometric_cluster(double center, int points = 33,
                                      double min_offset = 1e-9, double max_offset = 1e-2);

} // namespace aqcgap
