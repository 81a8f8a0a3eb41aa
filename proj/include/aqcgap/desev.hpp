#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "aqcgap/graph.hpp"
#include "aqcgap/spectra.hpp"

namespace aqcgap {

// Computational basis states bucketed by their (-)energy (the pseudo-boolean
// value Y with scaled weights), best value first.
struct EnergyLevels {
    std::vector<double> value;            // per level, descending
    std::vector<std::int32_t> level_of;   // per basis index
    std::vector<std::int64_t> degeneracy; // |D_k|
    double k = 1.0;

    int count() const { return static_cast<int>(value.size()); }
};

// Buckets whose representative values differ by <= tol are merged.
EnergyLevels group_levels(const AnnealSystem& system, double tol = 1e-9);

// Gamma_k = sum over the level's basis states of the squared amplitude.
// Throws if the state norm deviates from 1 by more than 1e-8.
std::vector<double> gamma_decomposition(std::span<const double> state,
                                        const EnergyLevels& levels);

// Zero-position state label: a bullet per selected planted vertex, a triangle
// per selected clique vertex, '-' joining selections inside one clique.
std::string format_state_label(std::uint32_t basis_index, const VertexPartition& partition);

// Up to max_patterns distinct label patterns occurring in a level.
std::vector<std::string> level_patterns(const AnnealSystem& system, const EnergyLevels& levels,
                                        int level, const VertexPartition& partition,
                                        int max_patterns = 3);

enum class WhichState { Ground, FirstExcited };

struct TraceOptions {
    double tol = 1e-12;     // eigensolver residual tolerance
    int jobs = 0;
    int cluster_points = 33; // geometric cluster inserted around s_star
    SolveOptions solve;
};

struct DesevSeries {
    std::vector<double> s_grid;
    WhichState which = WhichState::Ground;
    int top_m = 7;
    std::vector<double> level_values;        // displayed levels, descending
    std::vector<std::string> level_labels;   // value label ("5.4" or "5.4/k")
    std::vector<std::vector<double>> gamma;  // [displayed level][s]
    std::vector<double> norm_check;          // pre-truncation sum per s
    std::vector<std::uint8_t> cluster_averaged; // per s
};

// Traces Gamma over the grid for the requested eigenstate.  When a refined
// GapScan is supplied, a geometric cluster of points around s_star is added
// to the grid.  Near-degenerate eigenstates are reported as the cluster
// average so the output does not depend on the arbitrary basis inside a
// degenerate subspace.
DesevSeries desev_trace(const AnnealSystem& system, const EnergyLevels& levels,
                        std::span<const double> grid, WhichState which, int top_m = 7,
                        const GapScan* scan = nullptr, const TraceOptions& opt = {});

// "6" for k = 1, "6/k" for scaled systems
std::string level_value_label(double value, double k);

} // namespace aqcgap
