#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "aqcgap/graph.hpp"

namespace aqcgap {

struct ResolvedCoupling {
    int u = 0;
    int v = 0;
    double J = 0.0;
};

// Ising form of the weighted MIS instance: fields h_i = sum_j J_ij - 2 c_i / k
// over resolved couplings J_ij.  k is the weight-scaling factor; the original
// weights are retained for value labeling.
struct IsingModel {
    int n = 0;
    double k = 1.0;
    std::vector<double> h;
    std::vector<ResolvedCoupling> couplings;
    std::vector<double> weight;        // original c_i
    std::vector<double> scaled_weight; // c_i / k
    std::string warning;               // set when J_ij <= min{c_i,c_j}/k somewhere
};

// k >= 1.  A violated coupling premise J_ij > min{c_i,c_j}/k is recorded in
// IsingModel::warning rather than rejected.
IsingModel mis_to_ising(const WeightedGraph& g, double k = 1.0);

// Matrix-free H(s) = (1-s) H_init + s H_problem on 2^n basis states, with
// H_init = -sum_i sigma_x^i and H_problem the Ising diagonal.  Basis indices
// use ket bits: bit i of the index is qubit i's label, spin s_i = 1 - 2*bit,
// selected vertex = zero bit.  Immutable after construction and safe to share
// across threads.
class AnnealSystem {
public:
    explicit AnnealSystem(IsingModel model);

    int num_qubits() const { return n_; }
    std::size_t dimension() const { return dim_; }
    const IsingModel& ising() const { return ising_; }
    double scale_k() const { return ising_.k; }
    const std::vector<double>& diag() const { return diag_; }
    double max_abs_diag() const { return max_abs_diag_; }
    double min_diag() const { return min_diag_; }

    // upper bound (1-s) n + s max|diag| on ||H(s)||; used as residual scale
    double norm_bound(double s) const;

    // out = H(s) v
    void apply(double s, std::span<const double> v, std::span<double> out) const;
    // out = H_problem v (diagonal)
    void apply_problem(std::span<const double> v, std::span<double> out) const;
    // out = H_init v = -sum_b v[x xor 2^b]
    void apply_initial(std::span<const double> v, std::span<double> out) const;
    // out = dH/ds v = (H_problem - H_init) v; constant along the linear path
    void apply_ds(std::span<const double> v, std::span<double> out) const;

    // Y of the basis state with the scaled weights (higher = better MIS value)
    double minus_energy_label(std::uint32_t basis_index) const;
    // affine offset: Y = y_const() - E_Ising / 4 for every basis state
    double y_const() const { return y_const_; }

    // largest |eigenvalue| of H(s) by extremal eigenvalue iteration at both
    // spectrum ends, relative accuracy 1e-8
    double spectral_norm(double s) const;
    // max of ||H(s)|| over the grid.  Both ends of the spectrum are convex in
    // s, so the maximum over any grid containing the endpoints equals the
    // larger endpoint value; interior points are spot-checked in tests.
    double max_spectral_norm(std::span<const double> grid) const;

private:
    IsingModel ising_;
    int n_ = 0;
    std::size_t dim_ = 0;
    std::vector<double> diag_;
    double max_abs_diag_ = 0.0;
    double min_diag_ = 0.0;
    double y_const_ = 0.0;
};

} // namespace aqcgap
