#include "aqcgap/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aqcgap {

IsingModel mis_to_ising(const WeightedGraph& g, double k) {
    g.validate();
    if (!(k >= 1.0)) throw std::invalid_argument("mis_to_ising: k must be >= 1");

    IsingModel m;
    m.n = g.n;
    m.k = k;
    m.weight = g.weight;
    m.scaled_weight.resize(g.n);
    for (int i = 0; i < g.n; ++i) m.scaled_weight[i] = g.weight[i] / k;

    m.couplings.reserve(g.edges.size());
    for (const auto& e : g.edges)
        m.couplings.push_back({e.u, e.v, g.coupling(e)});

    m.h.assign(g.n, 0.0);
    for (const auto& c : m.couplings) {
        m.h[c.u] += c.J;
        m.h[c.v] += c.J;
    }
    for (int i = 0; i < g.n; ++i) m.h[i] -= 2.0 * m.scaled_weight[i];

    for (const auto& c : m.couplings) {
        double need = std::min(m.scaled_weight[c.u], m.scaled_weight[c.v]);
        if (!(c.J > need)) {
            m.warning = "coupling J(" + std::to_string(c.u) + "," + std::to_string(c.v) +
                        ") = " + std::to_string(c.J) +
                        " does not exceed min of scaled weights " + std::to_string(need);
            break;
        }
    }
    return m;
}

AnnealSystem::AnnealSystem(IsingModel model) : ising_(std::move(model)) {
    n_ = ising_.n;
    if (n_ < 1 || n_ > 26)
        throw std::invalid_argument("AnnealSystem: supported qubit counts are 1..26");
    dim_ = std::size_t{1} << n_;

    // spin s_i = +1 for ket bit 0 (vertex selected), -1 for ket bit 1
    diag_.assign(dim_, 0.0);
    std::vector<double> spin(n_);
    for (std::size_t x = 0; x < dim_; ++x) {
        double e = 0.0;
        for (int i = 0; i < n_; ++i) {
            spin[i] = (x >> i & 1u) ? -1.0 : 1.0;
            e += ising_.h[i] * spin[i];
        }
        for (const auto& c : ising_.couplings) e += c.J * spin[c.u] * spin[c.v];
        diag_[x] = e;
    }

    max_abs_diag_ = 0.0;
    min_diag_ = diag_[0];
    for (double d : diag_) {
        max_abs_diag_ = std::max(max_abs_diag_, std::abs(d));
        min_diag_ = std::min(min_diag_, d);
    }

    double sum_c = 0.0, sum_j = 0.0;
    for (double c : ising_.scaled_weight) sum_c += c;
    for (const auto& c : ising_.couplings) sum_j += c.J;
    y_const_ = 0.5 * sum_c - 0.25 * sum_j;
}

double AnnealSystem::norm_bound(double s) const {
    return (1.0 - s) * n_ + s * max_abs_diag_;
}

void AnnealSystem::apply(double s, std::span<const double> v, std::span<double> out) const {
    if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("apply: s outside [0,1]");
    if (v.size() != dim_ || out.size() != dim_)
        throw std::invalid_argument("apply: dimension mismatch");
    const double* pv = v.data();
    double* po = out.data();
    for (std::size_t x = 0; x < dim_; ++x) po[x] = s * diag_[x] * pv[x];
    const double a = s - 1.0; // -(1-s) per bit flip
    for (int b = 0; b < n_; ++b) {
        const std::size_t step = std::size_t{1} << b;
        for (std::size_t base = 0; base < dim_; base += 2 * step) {
            const double* vlo = pv + base;
            const double* vhi = pv + base + step;
            double* olo = po + base;
            double* ohi = po + base + step;
            for (std::size_t i = 0; i < step; ++i) {
                olo[i] += a * vhi[i];
                ohi[i] += a * vlo[i];
            }
        }
    }
}

void AnnealSystem::apply_problem(std::span<const double> v, std::span<double> out) const {
    if (v.size() != dim_ || out.size() != dim_)
        throw std::invalid_argument("apply_problem: dimension mismatch");
    for (std::size_t x = 0; x < dim_; ++x) out[x] = diag_[x] * v[x];
}

namespace {

void flip_sum(int n, std::size_t dim, double a, const double* v, double* out) {
    for (int b = 0; b < n; ++b) {
        const std::size_t step = std::size_t{1} << b;
        for (std::size_t base = 0; base < dim; base += 2 * step) {
            const double* vlo = v + base;
            const double* vhi = v + base + step;
            double* olo = out + base;
            double* ohi = out + base + step;
            for (std::size_t i = 0; i < step; ++i) {
                olo[i] += a * vhi[i];
                ohi[i] += a * vlo[i];
            }
        }
    }
}

} // namespace

void AnnealSystem::apply_initial(std::span<const double> v, std::span<double> out) const {
    if (v.size() != dim_ || out.size() != dim_)
        throw std::invalid_argument("apply_initial: dimension mismatch");
    std::fill(out.begin(), out.end(), 0.0);
    flip_sum(n_, dim_, -1.0, v.data(), out.data());
}

void AnnealSystem::apply_ds(std::span<const double> v, std::span<double> out) const {
    if (v.size() != dim_ || out.size() != dim_)
        throw std::invalid_argument("apply_ds: dimension mismatch");
    for (std::size_t x = 0; x < dim_; ++x) out[x] = diag_[x] * v[x];
    flip_sum(n_, dim_, 1.0, v.data(), out.data());
}

double AnnealSystem::minus_energy_label(std::uint32_t basis_index) const {
    if (basis_index >= dim_) throw std::invalid_argument("minus_energy_label: index out of range");
    double y = 0.0;
    for (int i = 0; i < n_; ++i)
        if (!(basis_index >> i & 1u)) y += ising_.scaled_weight[i];
    for (const auto& c : ising_.couplings)
        if (!(basis_index >> c.u & 1u) && !(basis_index >> c.v & 1u)) y -= c.J;
    return y;
}

} // namespace aqcgap
