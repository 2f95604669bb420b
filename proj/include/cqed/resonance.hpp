// resonance.hpp — resonance positions of the coupled {ensemble + resonator} system
//
// Three solvers:
//   * cascaded model: roots of Re{phi(delta)} = 2*pi*q,
//   * single-mode JC/TC: the two dressed-state detunings (delta_ca +- sqrt(4g^2+delta_ca^2))/2,
//   * multimode TC: the 2(M+1) roots of the secular equation
//         1 = (g^2/w) sum_{j=-M..M} 1/(w - j*w_FSR - delta_a),
// plus beta*N-sweep maps with nearest-neighbor branch continuation and a
// dip-contrast estimator relative to the local off-resonant baseline.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "cqed/params.hpp"
#include "cqed/roots.hpp"
#include "cqed/spectrum.hpp"
#include "cqed/transfer.hpp"

namespace cqed {

enum class ResonanceModel { Cascaded, SingleModeTC, MultimodeTC };

inline std::string to_string(ResonanceModel m) {
    switch (m) {
        case ResonanceModel::Cascaded: return "cascaded";
        case ResonanceModel::SingleModeTC: return "single_mode_tc";
        default: return "multimode_tc";
    }
}

struct ResonanceRoot {
    int q = 0;        // roundtrip-phase branch index
    double delta = 0.0;  // rad/s, probe-atom detuning at resonance
};

struct CascadedRootOptions {
    int grid_points = 4001;        // per (window x q) scan pass
    double residual_tol = 1e-10;   // |Re{phi} - 2 pi q| acceptance for a root
    double merge_tol_gamma = 1e-6; // duplicates within merge_tol_gamma * gamma merged
};

namespace detail {

// Re{phi} as a function of the swept probe detuning (delta_a = delta,
// delta_c = delta + delta_ca).  Mirror coefficients do not enter.
inline double roundtrip_phase_scalar(double beta, double n_atoms, double gamma, double nu_fsr,
                                     double delta_ca, double delta,
                                     CouplingRegime regime = CouplingRegime::TimedDicke) {
    double atom_phase = (regime == CouplingRegime::Dicke)
                            ? std::arg(t_dicke(beta, n_atoms, gamma, delta))
                            : n_atoms * std::arg(t_single(beta, gamma, delta));
    return -(delta + delta_ca) / nu_fsr + atom_phase;
}

}  // namespace detail

/// Cascaded resonances: every delta in [delta_lo, delta_hi] with
/// Re{phi(delta)} = 2*pi*q for q in [q_lo, q_hi].  Sign-change scan plus
/// bisection; a window without sign changes yields an empty list.
inline std::vector<ResonanceRoot> find_resonances_cascaded_scalar(
    double beta, double n_atoms, double gamma, double nu_fsr, double delta_ca, int q_lo, int q_hi,
    double delta_lo, double delta_hi, const CascadedRootOptions& opts = {},
    CouplingRegime regime = CouplingRegime::TimedDicke) {
    if (q_hi < q_lo) throw std::domain_error("find_resonances_cascaded: empty q window");
    if (!(delta_hi > delta_lo)) throw std::domain_error("find_resonances_cascaded: empty delta window");
    if (opts.grid_points < 2) throw std::domain_error("find_resonances_cascaded: grid_points < 2");

    std::vector<ResonanceRoot> out;
    for (int q = q_lo; q <= q_hi; ++q) {
        auto f = [&](double d) {
            return detail::roundtrip_phase_scalar(beta, n_atoms, gamma, nu_fsr, delta_ca, d, regime) -
                   two_pi * static_cast<double>(q);
        };
        for (double root : find_roots_on_grid(f, delta_lo, delta_hi, opts.grid_points)) {
            if (std::abs(f(root)) <= opts.residual_tol) out.push_back({q, root});
        }
    }
    std::sort(out.begin(), out.end(),
              [](const ResonanceRoot& a, const ResonanceRoot& b) { return a.delta < b.delta; });
    // merge duplicates (window edges can surface the same root twice)
    std::vector<ResonanceRoot> merged;
    const double tol = opts.merge_tol_gamma * gamma;
    for (const auto& r : out) {
        if (!merged.empty() && std::abs(r.delta - merged.back().delta) < tol) continue;
        merged.push_back(r);
    }
    return merged;
}

inline std::vector<ResonanceRoot> find_resonances_cascaded(const EmitterEnsemble& ensemble,
                                                           const ResonatorConfig& resonator,
                                                           double delta_ca, int q_lo, int q_hi,
                                                           double delta_lo, double delta_hi,
                                                           const CascadedRootOptions& opts = {}) {
    ensemble.validate();
    if (!ensemble.beta_per_atom.empty()) {
        // heterogeneous ensembles: unwrapped phase from the exact product
        if (q_hi < q_lo) throw std::domain_error("find_resonances_cascaded: empty q window");
        std::vector<ResonanceRoot> out;
        for (int q = q_lo; q <= q_hi; ++q) {
            auto f = [&](double d) {
                ComplexTransmission t = t_ensemble_exact(ensemble.beta_per_atom, ensemble.gamma, d);
                return -(d + delta_ca) / resonator.nu_fsr + t.unwrapped_phase -
                       two_pi * static_cast<double>(q);
            };
            for (double root : find_roots_on_grid(f, delta_lo, delta_hi, opts.grid_points))
                if (std::abs(f(root)) <= opts.residual_tol) out.push_back({q, root});
        }
        std::sort(out.begin(), out.end(),
                  [](const ResonanceRoot& a, const ResonanceRoot& b) { return a.delta < b.delta; });
        std::vector<ResonanceRoot> merged;
        const double tol = opts.merge_tol_gamma * ensemble.gamma;
        for (const auto& r : out)
            if (merged.empty() || std::abs(r.delta - merged.back().delta) >= tol) merged.push_back(r);
        return merged;
    }
    return find_resonances_cascaded_scalar(ensemble.beta_mean, ensemble.n_atoms, ensemble.gamma,
                                           resonator.nu_fsr, delta_ca, q_lo, q_hi, delta_lo,
                                           delta_hi, opts, ensemble.regime);
}

/// Eigenfrequency offsets of the lossless JC/TC doublet from the bare cavity,
/// -(delta_ca -+ sqrt(4 g^2 + delta_ca^2))/2, returned descending.  For
/// delta_ca = 0 this is {+g, -g}; for g = 0 it is {0, -delta_ca} (bare cavity
/// and bare atom).  The splitting is the primary observable; the probe
/// detuning of a resonance is delta_a = -delta_ca - offset.
inline std::array<double, 2> jc_resonances(double g, double delta_ca) {
    if (g < 0.0) throw std::domain_error("jc_resonances: g must be >= 0");
    double s = std::sqrt(4.0 * g * g + delta_ca * delta_ca);
    return {(s - delta_ca) / 2.0, -(s + delta_ca) / 2.0};
}

/// All 2(M+1) real eigenfrequencies of the multimode TC secular equation,
/// in units of rad/s relative to the atomic frequency, ascending.  Roots are
/// isolated by the interlacing property (the secular function is strictly
/// increasing between consecutive poles) and bisected to machine precision.
inline std::vector<double> tc_multimode_eigenfrequencies(double g, double omega_fsr,
                                                         double delta_a_offset, int m_half) {
    if (m_half < 0) throw std::domain_error("tc_multimode_eigenfrequencies: M must be >= 0");
    if (omega_fsr <= 0.0) throw std::domain_error("tc_multimode_eigenfrequencies: omega_fsr must be > 0");
    if (g <= 0.0) throw std::domain_error("tc_multimode_eigenfrequencies: g must be > 0");

    const int n_modes = 2 * m_half + 1;
    std::vector<double> poles(n_modes);
    for (int j = -m_half; j <= m_half; ++j)
        poles[static_cast<std::size_t>(j + m_half)] = static_cast<double>(j) * omega_fsr + delta_a_offset;

    // F(w) = w - g^2 sum_j 1/(w - p_j); F' > 0 between poles
    auto secular = [&](double w) {
        double s = 0.0;
        for (double p : poles) s += 1.0 / (w - p);
        return w - g * g * s;
    };

    std::vector<double> roots;
    roots.reserve(static_cast<std::size_t>(n_modes) + 1);

    // one root in every open interval between consecutive poles
    for (int i = 0; i + 1 < n_modes; ++i) {
        double a = std::nextafter(poles[static_cast<std::size_t>(i)],
                                  std::numeric_limits<double>::infinity());
        double b = std::nextafter(poles[static_cast<std::size_t>(i) + 1],
                                  -std::numeric_limits<double>::infinity());
        if (!(a < b))
            throw std::runtime_error("tc_multimode_eigenfrequencies: degenerate pole interval at j = " +
                                     std::to_string(i - m_half));
        roots.push_back(bisect_to_machine(secular, a, b));
    }

    // two exterior roots; D is large enough that F(p_min - D) < 0 < F(p_max + D)
    double span = std::abs(poles.front()) + std::abs(poles.back()) + omega_fsr;
    double reach = g * std::sqrt(static_cast<double>(n_modes));
    double d = 2.0 * std::max(reach, span);
    {
        double b = std::nextafter(poles.front(), -std::numeric_limits<double>::infinity());
        double a = poles.front() - d;
        if (!(secular(a) < 0.0))
            throw std::runtime_error("tc_multimode_eigenfrequencies: lower exterior bracket failed");
        roots.push_back(bisect_to_machine(secular, a, b));
    }
    {
        double a = std::nextafter(poles.back(), std::numeric_limits<double>::infinity());
        double b = poles.back() + d;
        if (!(secular(b) > 0.0))
            throw std::runtime_error("tc_multimode_eigenfrequencies: upper exterior bracket failed");
        roots.push_back(bisect_to_machine(secular, a, b));
    }

    std::sort(roots.begin(), roots.end());
    return roots;
}

/// Maximum change of the interior roots when the truncation is doubled
/// (M vs 2M), restricted to roots within |w - delta_a| <= window.  The two
/// exterior roots scale as g*sqrt(2M+1) by construction and are excluded.
inline double tc_multimode_truncation_shift(double g, double omega_fsr, double delta_a_offset,
                                            int m_half, double window) {
    auto in_window = [&](double w) { return std::abs(w - delta_a_offset) <= window; };
    auto r1 = tc_multimode_eigenfrequencies(g, omega_fsr, delta_a_offset, m_half);
    auto r2 = tc_multimode_eigenfrequencies(g, omega_fsr, delta_a_offset, 2 * m_half);
    double worst = 0.0;
    for (double w : r1) {
        if (!in_window(w)) continue;
        double best = std::numeric_limits<double>::infinity();
        for (double v : r2) best = std::min(best, std::abs(v - w));
        worst = std::max(worst, best);
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Resonance maps (positions vs beta*N)
// ---------------------------------------------------------------------------

struct BranchPoint {
    double beta_n = 0.0;  // swept beta*N
    double delta = 0.0;   // rad/s
    double contrast = std::numeric_limits<double>::quiet_NaN();  // optional dip depth
};

struct ResonanceBranch {
    ResonanceModel model = ResonanceModel::Cascaded;
    int q_or_k = 0;
    std::vector<BranchPoint> points;
};

struct ResonanceMap {
    std::vector<ResonanceBranch> branches;
    std::vector<std::string> warnings;
};

struct ResonanceMapOptions {
    double beta_per_atom = 0.005;  // per-atom beta for the cascaded sweep
    int q_lo = -4, q_hi = 4;
    int m_half = 50;               // multimode truncation
    double delta_lo = 0.0, delta_hi = 0.0;  // cascaded window, rad/s (required)
    double continuity_fraction = 0.25;      // threshold in units of 2*pi*nu_fsr
    CascadedRootOptions root_opts{};
    bool with_contrast = false;    // cascaded only; needs mirror coefficients
};

namespace detail {

// Nearest-neighbor branch continuation: candidate (branch, root) pairs inside
// the continuity threshold are accepted globally in order of distance, each
// branch and root at most once.  A branch whose two nearest free candidates
// are nearly equidistant is a genuine fork; it is closed with a warning and
// both candidates start fresh branches.
inline void continue_branches(std::vector<ResonanceBranch>& branches,
                              std::vector<std::string>& warnings, ResonanceModel model,
                              double beta_n, const std::vector<std::pair<int, double>>& roots,
                              double threshold, int& next_index) {
    struct Candidate {
        double dist;
        std::size_t branch, root;
    };
    std::vector<std::size_t> active;
    for (std::size_t b = 0; b < branches.size(); ++b)
        if (!branches[b].points.empty() && branches[b].points.back().beta_n < beta_n)
            active.push_back(b);

    std::vector<Candidate> candidates;
    for (std::size_t b : active) {
        double last = branches[b].points.back().delta;
        for (std::size_t r = 0; r < roots.size(); ++r) {
            double d = std::abs(roots[r].second - last);
            if (d < threshold) candidates.push_back({d, b, r});
        }
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const Candidate& a, const Candidate& b) { return a.dist < b.dist; });

    std::vector<bool> branch_done(branches.size(), false);
    std::vector<bool> root_taken(roots.size(), false);
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const Candidate& c = candidates[i];
        if (branch_done[c.branch] || root_taken[c.root]) continue;
        // fork check: another free root nearly as close to this branch
        bool fork = false;
        for (std::size_t j = i + 1; j < candidates.size() && !fork; ++j) {
            const Candidate& other = candidates[j];
            if (other.branch != c.branch || root_taken[other.root] || other.root == c.root)
                continue;
            if (other.dist < 1.25 * c.dist) fork = true;
        }
        if (fork) {
            warnings.push_back("branch " + std::to_string(branches[c.branch].q_or_k) +
                               " at beta*N = " + std::to_string(beta_n) +
                               ": equidistant continuation candidates, branch split");
            branch_done[c.branch] = true;  // close; the roots start fresh branches
            continue;
        }
        branch_done[c.branch] = true;
        root_taken[c.root] = true;
        branches[c.branch].points.push_back(
            {beta_n, roots[c.root].second, std::numeric_limits<double>::quiet_NaN()});
    }

    for (std::size_t r = 0; r < roots.size(); ++r) {
        if (root_taken[r]) continue;
        ResonanceBranch br;
        br.model = model;
        br.q_or_k = next_index++;
        br.points.push_back({beta_n, roots[r].second, std::numeric_limits<double>::quiet_NaN()});
        branches.push_back(std::move(br));
    }
}

}  // namespace detail

double resonance_contrast_scalar(double beta, double n_atoms, double gamma,
                                 const ResonatorConfig& resonator, double delta_ca,
                                 double delta_res, double half_span, double window_lo,
                                 double window_hi, CouplingRegime regime);

/// Resonance positions swept over beta*N at fixed resonator, gamma and
/// delta_ca.  The default sweep convention is delta_ca = 0, where the map
/// axis is delta = delta_a = delta_c.
inline ResonanceMap resonance_map(ResonanceModel model, std::span<const double> beta_n_grid,
                                  double gamma, const ResonatorConfig& resonator, double delta_ca,
                                  const ResonanceMapOptions& opts) {
    for (std::size_t i = 1; i < beta_n_grid.size(); ++i)
        if (!(beta_n_grid[i] > beta_n_grid[i - 1]))
            throw std::invalid_argument("resonance_map: beta*N grid must be increasing");

    ResonanceMap map;
    int next_index = 0;
    const double threshold = opts.continuity_fraction * two_pi * resonator.nu_fsr;

    if (model == ResonanceModel::SingleModeTC) {
        ResonanceBranch plus{model, +1, {}}, minus{model, -1, {}};
        for (double bn : beta_n_grid) {
            double g_n = std::sqrt(2.0 * bn * gamma * resonator.nu_fsr);
            auto [hi, lo] = jc_resonances(g_n, delta_ca);
            // probe detuning of a resonance at offset d from the cavity line
            plus.points.push_back({bn, -delta_ca - lo, std::numeric_limits<double>::quiet_NaN()});
            minus.points.push_back({bn, -delta_ca - hi, std::numeric_limits<double>::quiet_NaN()});
        }
        map.branches = {plus, minus};
        return map;
    }

    if (model == ResonanceModel::MultimodeTC) {
        const double omega_fsr = two_pi * resonator.nu_fsr;
        for (double bn : beta_n_grid) {
            double g_n = std::sqrt(2.0 * bn * gamma * resonator.nu_fsr);
            auto eig = tc_multimode_eigenfrequencies(g_n, omega_fsr, delta_ca, opts.m_half);
            std::vector<std::pair<int, double>> roots;
            roots.reserve(eig.size());
            // resonance occurs at probe detuning delta = -eigenfrequency
            for (double w : eig) roots.push_back({0, -w});
            std::sort(roots.begin(), roots.end(),
                      [](auto& a, auto& b) { return a.second < b.second; });
            detail::continue_branches(map.branches, map.warnings, model, bn, roots, threshold,
                                      next_index);
        }
        return map;
    }

    if (!(opts.delta_hi > opts.delta_lo))
        throw std::domain_error("resonance_map: cascaded sweep needs a delta window");
    for (double bn : beta_n_grid) {
        double n_atoms = bn / opts.beta_per_atom;
        auto found = find_resonances_cascaded_scalar(opts.beta_per_atom, n_atoms, gamma,
                                                     resonator.nu_fsr, delta_ca, opts.q_lo,
                                                     opts.q_hi, opts.delta_lo, opts.delta_hi,
                                                     opts.root_opts);
        std::vector<std::pair<int, double>> roots;
        roots.reserve(found.size());
        for (const auto& r : found) roots.push_back({r.q, r.delta});
        detail::continue_branches(map.branches, map.warnings, model, bn, roots, threshold,
                                  next_index);
        if (opts.with_contrast) {
            // half the local root spacing on each side, clipped to the window
            for (auto& br : map.branches) {
                if (br.points.empty() || br.points.back().beta_n != bn) continue;
                double d = br.points.back().delta;
                double left = opts.delta_hi - opts.delta_lo, right = left;
                for (const auto& r : found) {
                    if (r.delta < d - 1e-9 * gamma) left = std::min(left, d - r.delta);
                    if (r.delta > d + 1e-9 * gamma) right = std::min(right, r.delta - d);
                }
                double half = 0.5 * std::min(left, right);
                if (d - half >= opts.delta_lo && d + half <= opts.delta_hi && half > 0.0)
                    br.points.back().contrast = resonance_contrast_scalar(
                        opts.beta_per_atom, n_atoms, gamma, resonator, delta_ca, d, half,
                        opts.delta_lo, opts.delta_hi, CouplingRegime::TimedDicke);
            }
        }
    }
    return map;
}

// ---------------------------------------------------------------------------
// Dip contrast
// ---------------------------------------------------------------------------

/// Contrast of a resonance dip relative to the local off-resonant baseline:
/// (R_baseline - R_min)/R_baseline with the baseline sampled at
/// delta_res +- half_span and the minimum taken over that interval.
inline double resonance_contrast_scalar(double beta, double n_atoms, double gamma,
                                        const ResonatorConfig& resonator, double delta_ca,
                                        double delta_res, double half_span, double window_lo,
                                        double window_hi,
                                        CouplingRegime regime = CouplingRegime::TimedDicke) {
    if (half_span <= 0.0) throw std::domain_error("resonance_contrast: half_span must be > 0");
    if (delta_res - half_span < window_lo || delta_res + half_span > window_hi)
        throw std::domain_error("resonance_contrast: baseline points outside the scan window");
    auto refl = [&](double d) {
        return reflection_cascaded_scalar(beta, n_atoms, gamma, resonator,
                                          DetuningPoint{d, delta_ca}, regime);
    };
    double base = 0.5 * (refl(delta_res - half_span) + refl(delta_res + half_span));
    if (base <= 0.0) throw std::runtime_error("resonance_contrast: vanishing baseline");
    double r_min = std::numeric_limits<double>::infinity();
    const int n = 801;
    for (int i = 0; i < n; ++i) {
        double d = delta_res - half_span + 2.0 * half_span * i / (n - 1.0);
        r_min = std::min(r_min, refl(d));
    }
    return (base - r_min) / base;
}

inline double resonance_contrast(const EmitterEnsemble& ensemble, const ResonatorConfig& resonator,
                                 double delta_ca, double delta_res, double half_span,
                                 double window_lo, double window_hi) {
    if (!ensemble.beta_per_atom.empty())
        throw std::domain_error("resonance_contrast: per-atom beta lists not supported here");
    return resonance_contrast_scalar(ensemble.beta_mean, ensemble.n_atoms, ensemble.gamma,
                                     resonator, delta_ca, delta_res, half_span, window_lo,
                                     window_hi, ensemble.regime);
}

/// Contrast of every root in a sorted root list, with the per-root half-span
/// set to half the gap to the nearest neighboring root.
inline std::vector<double> contrasts_for_roots(double beta, double n_atoms, double gamma,
                                               const ResonatorConfig& resonator, double delta_ca,
                                               const std::vector<ResonanceRoot>& roots,
                                               double window_lo, double window_hi) {
    std::vector<double> out(roots.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < roots.size(); ++i) {
        double d = roots[i].delta;
        double left = (i > 0) ? d - roots[i - 1].delta : d - window_lo;
        double right = (i + 1 < roots.size()) ? roots[i + 1].delta - d : window_hi - d;
        double half = 0.5 * std::min(left, right);
        if (half <= 0.0) continue;
        out[i] = resonance_contrast_scalar(beta, n_atoms, gamma, resonator, delta_ca, d, half,
                                           window_lo, window_hi, CouplingRegime::TimedDicke);
    }
    return out;
}

}  // namespace cqed
