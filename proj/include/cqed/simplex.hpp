// simplex.hpp — Nelder-Mead downhill simplex (derivative-free)

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace cqed {

struct SimplexResult {
    std::vector<double> x;
    double fmin = std::numeric_limits<double>::infinity();
    int n_evaluations = 0;
    bool converged = false;
};

struct SimplexOptions {
    int max_evaluations = 20000;
    double ftol_rel = 1e-10;  // relative spread of the simplex values
    double fatol = 0.0;       // absolute floor: f_best at or below it counts as converged
};

/// Minimize f starting from x0, with initial simplex displacements `steps`
/// (one per coordinate).  Standard reflection/expansion/contraction/shrink
/// coefficients.  The objective may return +inf to reject a candidate; the
/// search continues around it.
inline SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                 std::vector<double> x0, const std::vector<double>& steps,
                                 const SimplexOptions& opts = {}) {
    const std::size_t dim = x0.size();
    if (steps.size() != dim) throw std::invalid_argument("nelder_mead: steps size mismatch");

    SimplexResult res;
    int evals = 0;
    auto eval = [&](const std::vector<double>& x) {
        ++evals;
        double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };

    std::vector<std::vector<double>> pts(dim + 1, x0);
    std::vector<double> vals(dim + 1);
    for (std::size_t i = 0; i < dim; ++i) pts[i + 1][i] += (steps[i] != 0.0 ? steps[i] : 1e-8);
    for (std::size_t i = 0; i <= dim; ++i) vals[i] = eval(pts[i]);

    auto order = [&] {
        std::vector<std::size_t> idx(dim + 1);
        for (std::size_t i = 0; i <= dim; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        std::vector<std::vector<double>> p2(dim + 1);
        std::vector<double> v2(dim + 1);
        for (std::size_t i = 0; i <= dim; ++i) {
            p2[i] = pts[idx[i]];
            v2[i] = vals[idx[i]];
        }
        pts = std::move(p2);
        vals = std::move(v2);
    };

    while (evals < opts.max_evaluations) {
        order();
        if (std::isfinite(vals[0]) && vals[0] <= opts.fatol) {
            res.converged = true;
            break;
        }
        double spread = std::abs(vals[dim] - vals[0]) /
                        std::max({std::abs(vals[0]), std::abs(vals[dim]), 1e-300});
        if (std::isfinite(vals[dim]) && spread < opts.ftol_rel) {
            res.converged = true;
            break;
        }

        std::vector<double> centroid(dim, 0.0);
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j) centroid[j] += pts[i][j] / static_cast<double>(dim);

        auto blend = [&](double alpha) {
            std::vector<double> x(dim);
            for (std::size_t j = 0; j < dim; ++j)
                x[j] = centroid[j] + alpha * (pts[dim][j] - centroid[j]);
            return x;
        };

        std::vector<double> xr = blend(-1.0);
        double fr = eval(xr);
        if (fr < vals[0]) {
            std::vector<double> xe = blend(-2.0);
            double fe = eval(xe);
            if (fe < fr) {
                pts[dim] = std::move(xe);
                vals[dim] = fe;
            } else {
                pts[dim] = std::move(xr);
                vals[dim] = fr;
            }
        } else if (fr < vals[dim - 1]) {
            pts[dim] = std::move(xr);
            vals[dim] = fr;
        } else {
            std::vector<double> xc = blend(fr < vals[dim] ? -0.5 : 0.5);
            double fc = eval(xc);
            if (fc < std::min(fr, vals[dim])) {
                pts[dim] = std::move(xc);
                vals[dim] = fc;
            } else {
                // shrink toward the best vertex
                for (std::size_t i = 1; i <= dim; ++i) {
                    for (std::size_t j = 0; j < dim; ++j)
                        pts[i][j] = pts[0][j] + 0.5 * (pts[i][j] - pts[0][j]);
                    vals[i] = eval(pts[i]);
                }
            }
        }
    }
    order();
    res.x = pts[0];
    res.fmin = vals[0];
    res.n_evaluations = evals;
    return res;
}

}  // namespace cqed
