// roots.hpp — bracketed scalar root finding

#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace cqed {

/// Bisection driven to the floor of double precision: iterates until the
/// midpoint can no longer be distinguished from the bracket endpoints.
/// f(a) and f(b) must have opposite signs (zero counts as a root).
template <class F>
double bisect_to_machine(F&& f, double a, double b) {
    double fa = f(a);
    if (fa == 0.0) return a;
    double fb = f(b);
    if (fb == 0.0) return b;
    if (std::signbit(fa) == std::signbit(fb))
        throw std::domain_error("bisect_to_machine: endpoints do not bracket a root");
    for (int i = 0; i < 200; ++i) {
        double m = 0.5 * (a + b);
        if (m == a || m == b) break;
        double fm = f(m);
        if (fm == 0.0) return m;
        if (std::signbit(fm) == std::signbit(fa)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

/// Scan [lo, hi] on a uniform grid of n_points and refine every sign change.
/// Returns the refined roots in ascending order.  Intervals where f jumps
/// across zero without crossing it converge to the jump point; callers filter
/// those by re-evaluating the residual.
template <class F>
std::vector<double> find_roots_on_grid(F&& f, double lo, double hi, int n_points) {
    if (n_points < 2) throw std::domain_error("find_roots_on_grid: need at least 2 grid points");
    if (!(hi > lo)) throw std::domain_error("find_roots_on_grid: empty window");
    std::vector<double> roots;
    double x_prev = lo;
    double f_prev = f(lo);
    if (f_prev == 0.0) roots.push_back(lo);
    for (int i = 1; i < n_points; ++i) {
        double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n_points - 1);
        double fx = f(x);
        if (fx == 0.0) {
            roots.push_back(x);
        } else if (f_prev != 0.0 && std::signbit(fx) != std::signbit(f_prev)) {
            roots.push_back(bisect_to_machine(f, x_prev, x));
        }
        x_prev = x;
        f_prev = fx;
    }
    return roots;
}

}  // namespace cqed
