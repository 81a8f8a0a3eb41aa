#include "aqcgap/lanczos.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "aqcgap/hamiltonian.hpp"
#include "aqcgap/rng.hpp"

namespace aqcgap {

namespace {

double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double nrm2(const double* a, std::size_t n) { return std::sqrt(dot(a, a, n)); }

void scale_vec(double a, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

// One thick-restart Lanczos run, orthogonalized against an external
// deflation set.  The basis lives in one contiguous buffer so restarts can
// use a dense GEMM.
class TrlmRun {
public:
    TrlmRun(const LinearOperator& op, double scale, const SolveOptions& opt,
            const std::vector<std::vector<double>>& locked, SolveStats& stats)
        : op_(op), scale_(opt_scale(scale)), opt_(opt), locked_(locked), stats_(stats) {
        dim_ = op.dim;
        max_basis_ = static_cast<int>(std::min<std::size_t>(opt.max_basis, dim_));
        if (max_basis_ < 2) max_basis_ = 2;
        buf_.assign(static_cast<std::size_t>(max_basis_ + 1) * dim_, 0.0);
        T_ = Eigen::MatrixXd::Zero(max_basis_, max_basis_);
        work_.assign(dim_, 0.0);
    }

    // Returns converged (value, vector) pairs, ascending.  `need` is how many
    // the caller still wants; more may be returned after a breakdown.
    struct Outcome {
        std::vector<double> values;
        std::vector<std::vector<double>> vectors;
        bool breakdown = false;
        bool converged = false;
    };

    Outcome run(std::uint64_t seed, int need) {
        need_ = need;
        init_start_vector(seed);
        m_ = 0;
        bool breakdown = false;

        int since_check = 0;
        int converged_prefix = 0;
        double best_resid = std::numeric_limits<double>::infinity();
        int stagnant_checks = 0;
        bool tol_met = false;

        while (true) {
            if (stats_.matvecs >= opt_.max_matvecs) break;
            breakdown = !expand();
            ++since_check;
            bool basis_full = (m_ == max_basis_);
            if (breakdown || basis_full || since_check >= opt_.check_every) {
                since_check = 0;
                decompose();
                converged_prefix = count_converged();
                if (breakdown) break;
                if (converged_prefix >= need_) {
                    tol_met = true;
                    if (!opt_.polish) break;
                    double w = worst_prefix_resid();
                    if (w <= polish_floor()) break;
                    if (w > 0.9 * best_resid) {
                        if (++stagnant_checks >= 2) break;
                    } else {
                        stagnant_checks = 0;
                    }
                    best_resid = std::min(best_resid, w);
                }
                if (basis_full) restart();
            }
        }

        Outcome out;
        out.breakdown = breakdown;
        out.converged = tol_met || breakdown;
        if (m_ == 0) return out;
        decompose();
        int take = breakdown ? count_converged() : std::min(count_converged(), need_);
        take = std::min(take, m_);
        extract(take, out);
        return out;
    }

private:
    static double opt_scale(double scale) { return scale > 0.0 ? scale : 1.0; }

    double* row(int i) { return buf_.data() + static_cast<std::size_t>(i) * dim_; }

    double resid_tol() const { return opt_.tol * scale_; }
    double polish_floor() const { return 5e-14 * scale_; }
    double breakdown_tol() const { return 1e-14 * scale_; }

    void init_start_vector(std::uint64_t seed) {
        SplitMix64 rng(seed);
        double* v = row(0);
        for (std::size_t i = 0; i < dim_; ++i) v[i] = rng.next_double() - 0.5;
        orthogonalize_external(v);
        double nrm = nrm2(v, dim_);
        if (nrm < 1e-12) {
            // deflation set nearly spans the space; perturb deterministically
            for (std::size_t i = 0; i < dim_; ++i) v[i] += rng.next_double() - 0.5;
            orthogonalize_external(v);
            nrm = nrm2(v, dim_);
        }
        scale_vec(1.0 / nrm, v, dim_);
        nvec_ = 1;
    }

    void orthogonalize_external(double* w) {
        for (const auto& u : locked_) {
            double c = dot(u.data(), w, dim_);
            axpy(-c, u.data(), w, dim_);
        }
    }

    // full reorthogonalization: one modified Gram-Schmidt pass over the
    // current basis and the deflation set, repeated if the norm collapsed
    double reorthogonalize(double* w, double norm_before) {
        for (int pass = 0; pass < 2; ++pass) {
            for (int i = 0; i < nvec_; ++i) {
                const double* u = row(i);
                double c = dot(u, w, dim_);
                axpy(-c, u, w, dim_);
            }
            orthogonalize_external(w);
            double nrm = nrm2(w, dim_);
            if (nrm > 0.5 * norm_before || nrm <= breakdown_tol()) return nrm;
            norm_before = nrm;
        }
        return nrm2(w, dim_);
    }

    // Process basis column m_ (vector row(m_)).  Returns false on breakdown.
    bool expand() {
        const int j = m_;
        double* vj = row(j);
        double* w = work_.data();
        op_.apply(vj, w);
        ++stats_.matvecs;
        // subtract the known couplings of column j (tridiagonal or arrow)
        for (int i = 0; i < j; ++i) {
            double c = T_(i, j);
            if (c != 0.0) axpy(-c, row(i), w, dim_);
        }
        double alpha = dot(w, vj, dim_);
        T_(j, j) = alpha;
        axpy(-alpha, vj, w, dim_);
        double beta = reorthogonalize(w, nrm2(w, dim_));
        m_ = j + 1;
        last_beta_ = beta;
        if (beta <= breakdown_tol()) return false;
        if (m_ < max_basis_) {
            T_(j, j + 1) = T_(j + 1, j) = beta;
            double* vnext = row(m_);
            for (std::size_t i = 0; i < dim_; ++i) vnext[i] = w[i] / beta;
            nvec_ = m_ + 1;
        } else {
            // keep the residual direction for the restart
            double* vnext = row(max_basis_);
            for (std::size_t i = 0; i < dim_; ++i) vnext[i] = w[i] / beta;
            nvec_ = m_; // row(max_basis_) handled separately at restart
        }
        return true;
    }

    void decompose() {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T_.topLeftCorner(m_, m_));
        theta_ = es.eigenvalues();
        Y_ = es.eigenvectors();
    }

    double resid_estimate(int i) const { return std::abs(last_beta_ * Y_(m_ - 1, i)); }

    int count_converged() const {
        int p = 0;
        while (p < m_ && resid_estimate(p) <= resid_tol()) ++p;
        return p;
    }

    double worst_prefix_resid() const {
        double worst = 0.0;
        for (int i = 0; i < std::min(need_, m_); ++i)
            worst = std::max(worst, resid_estimate(i));
        return worst;
    }

    void restart() {
        int keep = std::min(opt_.keep, m_ - 2);
        keep = std::max(keep, std::min(need_ + 2, m_ - 2));
        if (keep < 1) keep = 1;

        // rotate the basis onto the lowest `keep` Ritz vectors
        Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
            V(buf_.data(), m_, dim_);
        Eigen::MatrixXd rot = Y_.leftCols(keep).transpose() * V; // keep x dim
        std::vector<double> sigma(keep);
        for (int i = 0; i < keep; ++i) sigma[i] = last_beta_ * Y_(m_ - 1, i);

        double* vres = row(max_basis_);
        for (int i = 0; i < keep; ++i) {
            double* dst = row(i);
            Eigen::Map<Eigen::RowVectorXd>(dst, dim_) = rot.row(i);
            double nrm = nrm2(dst, dim_);
            if (nrm > 0.0) scale_vec(1.0 / nrm, dst, dim_);
        }
        std::copy(vres, vres + dim_, row(keep));

        T_.setZero();
        for (int i = 0; i < keep; ++i) {
            T_(i, i) = theta_(i);
            T_(i, keep) = T_(keep, i) = sigma[i];
        }
        m_ = keep;
        nvec_ = keep + 1;
        ++stats_.restarts;
    }

    void extract(int count, Outcome& out) {
        if (count <= 0) return;
        Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
            V(buf_.data(), m_, dim_);
        Eigen::MatrixXd ritz = Y_.leftCols(count).transpose() * V; // count x dim
        for (int i = 0; i < count; ++i) {
            std::vector<double> u(dim_);
            Eigen::Map<Eigen::RowVectorXd>(u.data(), dim_) = ritz.row(i);
            double nrm = nrm2(u.data(), dim_);
            if (nrm > 0.0) scale_vec(1.0 / nrm, u.data(), dim_);
            out.values.push_back(theta_(i));
            out.vectors.push_back(std::move(u));
        }
    }

    const LinearOperator& op_;
    double scale_;
    SolveOptions opt_;
    const std::vector<std::vector<double>>& locked_;
    SolveStats& stats_;

    std::size_t dim_ = 0;
    int max_basis_ = 0;
    int m_ = 0;     // processed columns of T
    int nvec_ = 0;  // basis vectors currently stored (excluding restart slot)
    int need_ = 1;
    double last_beta_ = 0.0;
    std::vector<double> buf_;
    std::vector<double> work_;
    Eigen::MatrixXd T_;
    Eigen::VectorXd theta_;
    Eigen::MatrixXd Y_;
};

} // namespace

Eigenpairs lowest_eigenpairs(const LinearOperator& op, double norm_scale,
                             const SolveOptions& opt) {
    if (op.dim < 1) throw std::invalid_argument("lowest_eigenpairs: empty operator");
    if (opt.want < 1 || static_cast<std::size_t>(opt.want) > op.dim)
        throw std::invalid_argument("lowest_eigenpairs: want out of range");

    Eigenpairs result;
    std::vector<double> values;
    std::vector<std::vector<double>> vectors;

    // Degenerate eigenvalues need one deflated rerun per copy: a single
    // Krylov space holds one vector per eigenspace.  After a breakdown we
    // rerun against everything found so far until a fresh run contributes
    // nothing at or below the current want-th lowest value.
    for (int run = 0; run < opt.max_runs; ++run) {
        TrlmRun trlm(op, norm_scale, opt, vectors, result.stats);
        ++result.stats.runs;
        std::uint64_t seed = opt.seed + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(run);
        auto out = trlm.run(seed, opt.want);
        double run_min = out.values.empty() ? std::numeric_limits<double>::infinity()
                                            : *std::min_element(out.values.begin(), out.values.end());
        for (std::size_t i = 0; i < out.values.size(); ++i) {
            values.push_back(out.values[i]);
            vectors.push_back(std::move(out.vectors[i]));
        }
        if (!out.breakdown) {
            // a normal run either met the tolerance or ran out of budget
            if (!out.converged || static_cast<int>(values.size()) < opt.want) {
                result.stats.converged = false;
                break;
            }
            if (!opt.exhaustive_multiplicity) break;
        }
        if (out.values.empty()) break; // complement of the deflation set is exhausted
        if (static_cast<int>(values.size()) >= opt.want) {
            std::vector<double> sorted = values;
            std::nth_element(sorted.begin(), sorted.begin() + (opt.want - 1), sorted.end());
            if (run_min > sorted[opt.want - 1]) break; // no copies left below the cut
        }
    }

    if (static_cast<int>(values.size()) < opt.want) result.stats.converged = false;

    // sort pairs ascending by value
    std::vector<int> order(values.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return values[a] < values[b]; });
    int take = std::min<int>(opt.want, static_cast<int>(values.size()));
    std::vector<double> wv(op.dim);
    for (int idx = 0; idx < take; ++idx) {
        int i = order[idx];
        result.values.push_back(values[i]);
        // true residual ||Av - lambda v||
        op.apply(vectors[i].data(), wv.data());
        ++result.stats.matvecs;
        axpy(-values[i], vectors[i].data(), wv.data(), op.dim);
        double r = nrm2(wv.data(), op.dim);
        result.residuals.push_back(r);
        result.stats.worst_residual = std::max(result.stats.worst_residual, r);
        result.vectors.push_back(std::move(vectors[i]));
    }

    if (!result.stats.converged) {
        std::ostringstream msg;
        msg << "lowest_eigenpairs: " << result.values.size() << "/" << opt.want
            << " pairs converged after " << result.stats.matvecs
            << " matvecs (residuals:";
        for (double r : result.residuals) msg << " " << r;
        msg << ", tol " << opt.tol * norm_scale << ")";
        throw solver_error(msg.str());
    }
    return result;
}

ComplementProbe probe_complement_min(const LinearOperator& op, double norm_scale,
                                     const std::vector<std::vector<double>>& locked,
                                     double threshold, const std::vector<double>* start_hint,
                                     std::uint64_t seed, long* matvecs) {
    const std::size_t dim = op.dim;
    if (locked.size() >= dim) return ComplementProbe::Above;
    const int cap = static_cast<int>(std::min<std::size_t>(256, dim));
    const double scale = norm_scale > 0.0 ? norm_scale : 1.0;
    const double breakdown_tol = 1e-14 * scale;

    std::vector<std::vector<double>> basis;
    basis.reserve(cap);
    std::vector<double> alpha, beta;
    std::vector<double> w(dim);

    // deterministic start vector, deflated; an equal share of the hint keeps
    // the directions the caller cares about well represented
    {
        SplitMix64 rng(seed);
        std::vector<double> v(dim);
        for (auto& x : v) x = rng.next_double() - 0.5;
        auto deflate = [&](std::vector<double>& y) {
            for (const auto& u : locked) {
                double c = dot(u.data(), y.data(), dim);
                axpy(-c, u.data(), y.data(), dim);
            }
        };
        deflate(v);
        double nrm = nrm2(v.data(), dim);
        if (nrm >= 1e-12) scale_vec(1.0 / nrm, v.data(), dim);
        if (start_hint && start_hint->size() == dim) {
            std::vector<double> h = *start_hint;
            deflate(h);
            double hn = nrm2(h.data(), dim);
            if (hn >= 1e-12 * scale) axpy(1.0 / hn, h.data(), v.data(), dim);
        }
        deflate(v);
        nrm = nrm2(v.data(), dim);
        if (nrm < 1e-12) return ComplementProbe::Undecided;
        scale_vec(1.0 / nrm, v.data(), dim);
        basis.push_back(std::move(v));
    }

    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(cap, cap);
    for (int j = 0; j < cap; ++j) {
        op.apply(basis[j].data(), w.data());
        if (matvecs) ++*matvecs;
        if (j > 0) axpy(-beta[j - 1], basis[j - 1].data(), w.data(), dim);
        double a = dot(w.data(), basis[j].data(), dim);
        axpy(-a, basis[j].data(), w.data(), dim);
        alpha.push_back(a);
        T(j, j) = a;
        // full reorthogonalization against the probe basis and the locked set
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& u : basis) {
                double c = dot(u.data(), w.data(), dim);
                axpy(-c, u.data(), w.data(), dim);
            }
            for (const auto& u : locked) {
                double c = dot(u.data(), w.data(), dim);
                axpy(-c, u.data(), w.data(), dim);
            }
        }
        double b = nrm2(w.data(), dim);
        bool broke = b <= breakdown_tol;

        if (broke || j + 1 == cap || (j + 1) % 8 == 0) {
            int m = j + 1;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T.topLeftCorner(m, m));
            double theta = es.eigenvalues()(0);
            double resid = broke ? 0.0 : std::abs(b * es.eigenvectors()(m - 1, 0));
            // a Ritz value bounds the complement minimum from above
            if (theta <= threshold) return ComplementProbe::AtOrBelow;
            // clearing the threshold counts only once the pair is converged
            // well inside its margin; otherwise a weakly-represented lower
            // eigenspace could still emerge
            if (theta - resid > threshold &&
                resid <= std::max(1e-5 * scale, 0.05 * (theta - threshold)))
                return ComplementProbe::Above;
            if (broke) return ComplementProbe::Above; // exact: theta > threshold
        }
        if (broke) break;
        beta.push_back(b);
        if (j + 1 < cap) {
            T(j, j + 1) = T(j + 1, j) = b;
            std::vector<double> v(dim);
            for (std::size_t i = 0; i < dim; ++i) v[i] = w[i] / b;
            basis.push_back(std::move(v));
        }
    }
    return ComplementProbe::Undecided;
}

// --- spectral norms (declared in hamiltonian.hpp) ---

double AnnealSystem::spectral_norm(double s) const {
    if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("spectral_norm: s outside [0,1]");
    const std::size_t d = dim_;
    LinearOperator lo{d, [this, s](const double* v, double* out) {
                          apply(s, std::span<const double>(v, dim_), std::span<double>(out, dim_));
                      }};
    LinearOperator hi{d, [this, s](const double* v, double* out) {
                          apply(s, std::span<const double>(v, dim_), std::span<double>(out, dim_));
                          for (std::size_t i = 0; i < dim_; ++i) out[i] = -out[i];
                      }};
    SolveOptions opt;
    opt.want = 1;
    opt.tol = 1e-10;
    double bound = norm_bound(s);
    double bottom = lowest_eigenpairs(lo, bound, opt).values[0];
    double top = -lowest_eigenpairs(hi, bound, opt).values[0];
    return std::max(std::abs(bottom), std::abs(top));
}

double AnnealSystem::max_spectral_norm(std::span<const double> grid) const {
    if (grid.empty()) throw std::invalid_argument("max_spectral_norm: empty grid");
    double lo = grid[0], hi = grid[0];
    for (double s : grid) {
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    if (lo != 0.0 || hi != 1.0)
        throw std::invalid_argument("max_spectral_norm: grid must cover [0,1] with endpoints");
    // both spectrum ends are convex in s, so the endpoints dominate the grid
    return std::max(spectral_norm(0.0), spectral_norm(1.0));
}

} // namespace aqcgap
