#include "aqcgap/desev.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <stdexcept>

#include "aqcgap/parallel.hpp"

namespace aqcgap {

EnergyLevels group_levels(const AnnealSystem& system, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("group_levels: tol must be positive");
    const std::size_t dim = system.dimension();

    std::vector<double> y(dim);
    for (std::size_t x = 0; x < dim; ++x)
        y[x] = system.minus_energy_label(static_cast<std::uint32_t>(x));

    std::vector<std::uint32_t> order(dim);
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return y[a] > y[b]; });

    EnergyLevels lv;
    lv.k = system.scale_k();
    lv.level_of.assign(dim, -1);
    double rep = 0.0;
    for (std::uint32_t x : order) {
        if (lv.value.empty() || rep - y[x] > tol) {
            rep = y[x];
            lv.value.push_back(rep);
            lv.degeneracy.push_back(0);
        }
        lv.level_of[x] = static_cast<std::int32_t>(lv.value.size()) - 1;
        ++lv.degeneracy.back();
    }
    return lv;
}

std::vector<double> gamma_decomposition(std::span<const double> state,
                                        const EnergyLevels& levels) {
    if (state.size() != levels.level_of.size())
        throw std::invalid_argument("gamma_decomposition: state dimension mismatch");
    double norm2 = 0.0;
    for (double a : state) norm2 += a * a;
    if (std::abs(std::sqrt(norm2) - 1.0) > 1e-8)
        throw std::invalid_argument("gamma_decomposition: state is not normalized");

    std::vector<double> gamma(levels.count(), 0.0);
    for (std::size_t x = 0; x < state.size(); ++x)
        gamma[levels.level_of[x]] += state[x] * state[x];
    return gamma;
}

std::string format_state_label(std::uint32_t basis_index, const VertexPartition& partition) {
    const int n = partition.size();
    // tokens: one bullet per planted zero, one joined run per clique
    std::vector<std::string> tokens;
    int i = 0;
    while (i < n) {
        if (basis_index >> i & 1u) { ++i; continue; }
        if (partition.cls[i] == VertexClass::A) {
            tokens.push_back("•");
            ++i;
        } else {
            int grp = partition.group[i];
            std::string tok = "△";
            int j = i + 1;
            for (; j < n; ++j) {
                if (basis_index >> j & 1u) continue;
                if (partition.cls[j] != VertexClass::B || partition.group[j] != grp) break;
                tok += "-△";
            }
            tokens.push_back(tok);
            i = j;
        }
    }
    std::string out;
    bool prev_joined = false;
    for (const auto& tok : tokens) {
        bool joined = tok.find('-') != std::string::npos;
        if (!out.empty() && prev_joined && joined) out += ' ';
        out += tok;
        prev_joined = joined;
    }
    return out;
}

namespace {

// Canonical form of a state pattern: bullets first, then clique runs by
// length, so combinatorially equivalent states collapse to one entry.
std::string canonical_pattern(std::uint32_t basis_index, const VertexPartition& partition) {
    const int n = partition.size();
    int bullets = 0;
    std::vector<int> runs; // selected vertices per clique
    std::vector<int> per_group(n, 0);
    for (int i = 0; i < n; ++i) {
        if (basis_index >> i & 1u) continue;
        if (partition.cls[i] == VertexClass::A) ++bullets;
        else ++per_group[partition.group[i]];
    }
    for (int c : per_group)
        if (c > 0) runs.push_back(c);
    std::sort(runs.begin(), runs.end());

    std::string out;
    for (int i = 0; i < bullets; ++i) out += "•";
    bool prev_joined = false;
    for (int r : runs) {
        std::string tok = "△";
        for (int i = 1; i < r; ++i) tok += "-△";
        bool joined = r > 1;
        if (!out.empty() && prev_joined && joined) out += ' ';
        out += tok;
        prev_joined = joined;
    }
    return out;
}

} // namespace

std::vector<std::string> level_patterns(const AnnealSystem& system, const EnergyLevels& levels,
                                        int level, const VertexPartition& partition,
                                        int max_patterns) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    const std::size_t dim = system.dimension();
    for (std::size_t x = 0; x < dim && static_cast<int>(out.size()) < max_patterns; ++x) {
        if (levels.level_of[x] != level) continue;
        std::string lbl = canonical_pattern(static_cast<std::uint32_t>(x), partition);
        if (seen.insert(lbl).second) out.push_back(lbl);
    }
    return out;
}

std::string level_value_label(double value, double k) {
    char buf[64];
    if (k == 1.0) {
        std::snprintf(buf, sizeof buf, "%.10g", value);
        return buf;
    }
    std::snprintf(buf, sizeof buf, "%.10g", value * k);
    return std::string(buf) + "/k";
}

namespace {

// Gamma of one grid point; cluster-averages when the requested eigenstate is
// numerically degenerate.
void trace_point(const AnnealSystem& system, const EnergyLevels& levels, double s, int which,
                 const TraceOptions& opt, std::vector<double>& gamma, bool& averaged) {
    const double dtol = degeneracy_tol(system, s);

    if (s == 1.0) {
        // H(1) is diagonal; read the cluster straight off the energy table
        const auto& d = system.diag();
        std::vector<std::uint32_t> idx(d.size());
        std::iota(idx.begin(), idx.end(), 0u);
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::uint32_t a, std::uint32_t b) { return d[a] < d[b]; });
        // partition into degenerate value clusters and pick the one holding
        // the requested state index
        std::size_t lo = 0, pos = 0;
        for (int step = 0;; ++step) {
            std::size_t hi = lo + 1;
            while (hi < idx.size() && d[idx[hi]] - d[idx[lo]] <= dtol) ++hi;
            if (pos + (hi - lo) > static_cast<std::size_t>(which)) {
                gamma.assign(levels.count(), 0.0);
                for (std::size_t i = lo; i < hi; ++i)
                    gamma[levels.level_of[idx[i]]] += 1.0 / static_cast<double>(hi - lo);
                averaged = (hi - lo) > 1;
                return;
            }
            pos += hi - lo;
            lo = hi;
        }
    }

    EigenSolution sol = solve_resolved_cluster(system, s, which, which + 2, opt.tol, opt.solve);
    int lo = which, hi = which;
    while (lo > 0 && sol.values[which] - sol.values[lo - 1] <= dtol) --lo;
    while (hi + 1 < static_cast<int>(sol.values.size()) &&
           sol.values[hi + 1] - sol.values[which] <= dtol)
        ++hi;
    if (lo == hi) {
        gamma = gamma_decomposition(sol.vectors[which], levels);
        averaged = false;
        return;
    }
    // orthogonal projector onto the cluster divided by its dimension
    gamma.assign(levels.count(), 0.0);
    for (int j = lo; j <= hi; ++j) {
        std::vector<double> g = gamma_decomposition(sol.vectors[j], levels);
        for (int l = 0; l < levels.count(); ++l) gamma[l] += g[l] / (hi - lo + 1);
    }
    averaged = true;
}

} // namespace

DesevSeries desev_trace(const AnnealSystem& system, const EnergyLevels& levels,
                        std::span<const double> grid, WhichState which, int top_m,
                        const GapScan* scan, const TraceOptions& opt) {
    if (top_m < 1) throw std::invalid_argument("desev_trace: top_m must be >= 1");
    std::vector<double> gs(grid.begin(), grid.end());
    if (scan && scan->refined) {
        auto cluster = geometric_cluster(scan->s_star, opt.cluster_points);
        gs.insert(gs.end(), cluster.begin(), cluster.end());
    }
    std::sort(gs.begin(), gs.end());
    gs.erase(std::unique(gs.begin(), gs.end()), gs.end());
    if (gs.empty() || gs.front() < 0.0 || gs.back() > 1.0)
        throw std::invalid_argument("desev_trace: grid outside [0,1]");

    const int state_index = which == WhichState::Ground ? 0 : 1;
    const int shown = std::min(top_m, levels.count());

    DesevSeries series;
    series.s_grid = gs;
    series.which = which;
    series.top_m = shown;
    series.level_values.assign(levels.value.begin(), levels.value.begin() + shown);
    for (double v : series.level_values)
        series.level_labels.push_back(level_value_label(v, levels.k));
    series.gamma.assign(shown, std::vector<double>(gs.size(), 0.0));
    series.norm_check.assign(gs.size(), 0.0);
    series.cluster_averaged.assign(gs.size(), 0);

    std::vector<std::vector<double>> full(gs.size());
    parallel_for(gs.size(), [&](std::size_t i) {
        bool averaged = false;
        trace_point(system, levels, gs[i], state_index, opt, full[i], averaged);
        series.cluster_averaged[i] = averaged ? 1 : 0;
    }, opt.jobs);

    for (std::size_t i = 0; i < gs.size(); ++i) {
        double sum = 0.0;
        for (double g : full[i]) sum += g;
        series.norm_check[i] = sum;
        for (int l = 0; l < shown; ++l) series.gamma[l][i] = full[i][l];
    }
    return series;
}

} // namespace aqcgap
