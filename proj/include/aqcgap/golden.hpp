#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>

namespace aqcgap {

struct GoldenResult {
    double x = 0.0;
    double f = 0.0;
    int evaluations = 0;
};

// Golden-section minimization of f on a bracket (a, m, b) with
// f(m) <= min(f(a), f(b)).  Shrinks the interval until |b - a| <= x_tol
// and returns the best evaluated point.  Purely comparison-based, so it
// stays robust near the floor of the function's evaluation accuracy.
inline GoldenResult golden_minimize(const std::function<double(double)>& f,
                                    double a, double m, double b,
                                    double fa, double fm, double fb,
                                    double x_tol, int max_iter = 200) {
    static constexpr double inv_phi = 0.6180339887498948482;
    if (!(a < m && m < b))
        throw std::invalid_argument("golden_minimize: bracket not ordered");
    if (!(fm <= fa && fm <= fb))
        throw std::invalid_argument("golden_minimize: midpoint is not a bracket minimum");

    GoldenResult best{m, fm, 0};
    double lo = a, hi = b, x1 = m;
    double f1 = fm;
    // choose the probe inside the larger sub-interval
    for (int it = 0; it < max_iter && (hi - lo) > x_tol; ++it) {
        double x2;
        bool right = (hi - x1) > (x1 - lo);
        if (right)
            x2 = hi - inv_phi * (hi - x1);
        else
            x2 = lo + inv_phi * (x1 - lo);
        if (x2 == x1) break; // interval exhausted at double precision
        double f2 = f(x2);
        ++best.evaluations;
        if (f2 < best.f) { best.x = x2; best.f = f2; }
        if (right) {
            if (f2 < f1) { lo = x1; x1 = x2; f1 = f2; }
            else hi = x2;
        } else {
            if (f2 < f1) { hi = x1; x1 = x2; f1 = f2; }
            else lo = x2;
        }
    }
    return best;
}

// Convenience overload that evaluates the bracket ends itself.
inline GoldenResult golden_minimize(const std::function<double(double)>& f,
                                    double a, double m, double b,
                                    double x_tol, int max_iter = 200) {
    double fa = f(a), fm = f(m), fb = f(b);
    GoldenResult r = golden_minimize(f, a, m, b, fa, fm, fb, x_tol, max_iter);
    r.evaluations += 3;
    return r;
}

} // namespace aqcgap
