#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace aqcgap {

// Raised on non-convergence; message carries the achieved residuals.
struct solver_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LinearOperator {
    std::size_t dim = 0;
    std::function<void(const double*, double*)> apply;
};

struct SolveOptions {
    int want = 2;              // converged eigenpairs required
    double tol = 1e-12;        // residual target, relative to norm_scale
    int max_basis = 96;        // Krylov basis cap before thick restart
    int keep = 24;             // Ritz vectors retained at restart
    long max_matvecs = 120000;
    int check_every = 8;       // iterations between convergence checks
    int max_runs = 16;         // deflated reruns for invariant subspaces
    bool polish = false;       // after tol is met, iterate to the rounding floor
    // Always chase repeated eigenvalues with deflated reruns until a rerun
    // finds nothing below the want-th value.  A single Krylov space holds one
    // vector per eigenspace, so symmetry multiplets stay hidden without this.
    bool exhaustive_multiplicity = false;
    std::uint64_t seed = 0xA5EED5EEDull;
};

struct SolveStats {
    long matvecs = 0;
    int restarts = 0;
    int runs = 0;
    double worst_residual = 0.0;
    bool converged = true;
};

struct Eigenpairs {
    std::vector<double> values;                // ascending
    std::vector<std::vector<double>> vectors;  // orthonormal
    std::vector<double> residuals;             // true ||Av - lambda v||
    SolveStats stats;
};

// Lowest eigenpairs of a symmetric operator by thick-restart Lanczos with
// full reorthogonalization and a deterministic start vector.  Degenerate
// eigenvalues are recovered by deflated reruns when a Krylov breakdown
// signals an invariant subspace (always, with exhaustive_multiplicity).
// norm_scale fixes the residual tolerance (use an upper bound on ||A||).
// Throws solver_error when the matvec budget is exhausted before opt.want
// pairs reach tolerance.
Eigenpairs lowest_eigenpairs(const LinearOperator& op, double norm_scale,
                             const SolveOptions& opt = {});

enum class ComplementProbe { Above, AtOrBelow, Undecided };

// Decides whether the operator restricted to the orthogonal complement of
// `locked` has an eigenvalue <= threshold.  AtOrBelow is certified by the
// residual bound |lambda - theta| <= r.  Above is reported once the lowest
// Ritz pair is tightly converged clear of the threshold; a start vector with
// a guaranteed component on the states of interest (start_hint) makes the
// verdict reliable, since a pure random start can under-weight a hidden
// eigenspace.  Undecided falls back to the caller's exhaustive path.
ComplementProbe probe_complement_min(const LinearOperator& op, double norm_scale,
                                     const std::vector<std::vector<double>>& locked,
                                     double threshold,
                                     const std::vector<double>* start_hint = nullptr,
                                     std::uint64_t seed = 0xB0BE5EEDull,
                                     long* matvecs = nullptr);

} // namespace aqcgap
