// fit.hpp — least-squares fitting of measured resonator spectra
//
// The model is amplitude_scale * R_cascaded evaluated on the measured probe
// axis, with the frequency axis shifted by frequency_offset.  Increasing
// probe frequency means decreasing delta_a = omega_a - omega, so a sample at
// detuning d (Hz) maps to delta_a = -2*pi*(d - frequency_offset).
// Default free parameters: {beta*N, delta_ca, amplitude_scale,
// frequency_offset}; mirror coefficients stay fixed at their bare-cavity
// characterization values.  Optimization is Nelder-Mead with random restarts;
// parameter uncertainties come from the objective's curvature along each axis
// (statistical only).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cqed/params.hpp"
#include "cqed/simplex.hpp"
#include "cqed/spectrum.hpp"

namespace cqed {

enum class Normalization { Raw, Normalized };

struct MeasuredSpectrum {
    std::vector<double> detuning_hz;  // strictly increasing probe detunings, as scanned
    std::vector<double> signal;       // counts or normalized power, >= 0
    Normalization normalization = Normalization::Raw;
    std::string normalization_method;  // filled by normalize_spectrum

    void validate() const {
        if (detuning_hz.size() != signal.size())
            throw std::domain_error("MeasuredSpectrum: axis/signal size mismatch");
        for (std::size_t i = 1; i < detuning_hz.size(); ++i)
            if (!(detuning_hz[i] > detuning_hz[i - 1]))
                throw std::domain_error("MeasuredSpectrum: detunings must be strictly increasing");
        for (double s : signal)
            if (!(s >= 0.0)) throw std::domain_error("MeasuredSpectrum: signal must be >= 0");
    }
};

/// Divide by a baseline estimate; default method is the median of the top
/// decile of samples.  The method is recorded on the result.
inline MeasuredSpectrum normalize_spectrum(const MeasuredSpectrum& data) {
    data.validate();
    std::vector<double> sorted = data.signal;
    if (sorted.empty()) throw std::domain_error("normalize_spectrum: empty spectrum");
    std::sort(sorted.begin(), sorted.end());
    std::size_t n = sorted.size();
    std::size_t lo = n - std::max<std::size_t>(1, n / 10);  // top decile
    std::size_t m = n - lo;
    double baseline = (m % 2 == 1) ? sorted[lo + m / 2]
                                   : 0.5 * (sorted[lo + m / 2 - 1] + sorted[lo + m / 2]);
    if (baseline <= 0.0) throw std::domain_error("normalize_spectrum: zero baseline (all-zero signal?)");
    MeasuredSpectrum out = data;
    for (double& s : out.signal) s /= baseline;
    out.normalization = Normalization::Normalized;
    out.normalization_method = "top_decile_median";
    return out;
}

// fit parameter vector
struct FitParameters {
    double beta_n = 0.0;            // beta*N
    double delta_ca = 0.0;          // rad/s
    double amplitude_scale = 1.0;   // dimensionless
    double frequency_offset = 0.0;  // Hz, on the measured axis
    double t_rt = 1.0;
    double r = 1.0;
};

enum class FitParam : int { BetaN = 0, DeltaCa, Amplitude, FrequencyOffset, Trt, R, Count };

struct FitSetup {
    // fixed physics
    double gamma = 0.0;         // rad/s
    double beta_per_atom = 0.005;
    double nu_fsr = 0.0;        // Hz
    Geometry geometry = Geometry::Ring;

    FitParameters initial{};
    FitParameters lower{0.0, -1e9 * two_pi, 0.0, -1e9, 0.0, 0.0};
    FitParameters upper{1e4, 1e9 * two_pi, 1e6, 1e9, 1.0, 1.0};
    // default free set: {beta*N, delta_ca, amplitude, frequency offset}
    std::vector<FitParam> free_params{FitParam::BetaN, FitParam::DeltaCa, FitParam::Amplitude,
                                      FitParam::FrequencyOffset};

    int restarts = 3;
    int max_evaluations = 20000;  // per restart
    double restart_spread = 0.1;  // relative perturbation of the initial guess
    std::uint64_t seed = 0;
};

struct FitResult {
    FitParameters estimates{};
    FitParameters uncertainties{};  // curvature-based, statistical only; NaN for fixed params
    double residual_rms = std::numeric_limits<double>::infinity();
    int n_evaluations = 0;
    bool converged = false;
};

namespace detail {

inline double& param_ref(FitParameters& p, FitParam which) {
    switch (which) {
        case FitParam::BetaN: return p.beta_n;
        case FitParam::DeltaCa: return p.delta_ca;
        case FitParam::Amplitude: return p.amplitude_scale;
        case FitParam::FrequencyOffset: return p.frequency_offset;
        case FitParam::Trt: return p.t_rt;
        default: return p.r;
    }
}

inline double param_get(const FitParameters& p, FitParam which) {
    return param_ref(const_cast<FitParameters&>(p), which);
}

// natural step size per parameter, used for the initial simplex and restarts
inline double param_scale(const FitSetup& setup, FitParam which) {
    switch (which) {
        case FitParam::BetaN: return std::max(0.5, 0.1 * std::abs(setup.initial.beta_n));
        case FitParam::DeltaCa: return 0.1 * two_pi * setup.nu_fsr;
        case FitParam::Amplitude: return std::max(0.05, 0.1 * std::abs(setup.initial.amplitude_scale));
        case FitParam::FrequencyOffset: return 0.1 * setup.nu_fsr;
        case FitParam::Trt: return 0.02;
        default: return 0.02;
    }
}

}  // namespace detail

/// Model curve on the measured axis for a given parameter set.
inline std::vector<double> fit_model_curve(const MeasuredSpectrum& data, const FitSetup& setup,
                                           const FitParameters& p) {
    ResonatorConfig res = ResonatorConfig::make(setup.nu_fsr, p.t_rt, p.r, setup.geometry);
    double n_atoms = p.beta_n / setup.beta_per_atom;
    std::vector<double> out(data.detuning_hz.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        double delta_a = -two_pi * (data.detuning_hz[i] - p.frequency_offset);
        out[i] = p.amplitude_scale * reflection_cascaded_scalar(setup.beta_per_atom, n_atoms,
                                                                setup.gamma, res,
                                                                DetuningPoint{delta_a, p.delta_ca});
    }
    return out;
}

/// Least-squares fit of the cascaded model to a (normalized) measured
/// spectrum.  Non-finite candidates are rejected and the search continues;
/// an exhausted budget returns the best point with converged = false.
inline FitResult fit_spectrum(const MeasuredSpectrum& data, const FitSetup& setup) {
    data.validate();
    const std::size_t n_free = setup.free_params.size();
    if (data.signal.size() < n_free + 6)
        throw std::domain_error("fit_spectrum: need at least 6 more samples than free parameters");
    for (FitParam fp : setup.free_params) {
        if (!(detail::param_get(setup.lower, fp) <= detail::param_get(setup.upper, fp)))
            throw std::domain_error("fit_spectrum: bounds not well-ordered");
    }

    auto objective = [&](const std::vector<double>& x) {
        FitParameters p = setup.initial;
        for (std::size_t i = 0; i < n_free; ++i) {
            FitParam fp = setup.free_params[i];
            if (x[i] < detail::param_get(setup.lower, fp) ||
                x[i] > detail::param_get(setup.upper, fp))
                return std::numeric_limits<double>::infinity();
            detail::param_ref(p, fp) = x[i];
        }
        double ssq = 0.0;
        try {
            std::vector<double> model = fit_model_curve(data, setup, p);
            for (std::size_t i = 0; i < model.size(); ++i) {
                double r = model[i] - data.signal[i];
                ssq += r * r;
            }
        } catch (const std::exception&) {
            return std::numeric_limits<double>::infinity();
        }
        return std::isfinite(ssq) ? ssq : std::numeric_limits<double>::infinity();
    };

    std::vector<double> x0(n_free), steps(n_free);
    for (std::size_t i = 0; i < n_free; ++i) {
        x0[i] = detail::param_get(setup.initial, setup.free_params[i]);
        steps[i] = detail::param_scale(setup, setup.free_params[i]);
    }

    std::mt19937_64 rng(setup.seed);
    std::uniform_real_distribution<double> jitter(-1.0, 1.0);

    SimplexOptions sopts;
    sopts.max_evaluations = setup.max_evaluations;
    // a sum of squares this small is numerically zero residual per sample
    sopts.fatol = 1e-24 * static_cast<double>(data.signal.size());

    SimplexResult best;
    int total_evals = 0;
    for (int attempt = 0; attempt <= setup.restarts; ++attempt) {
        std::vector<double> start = x0;
        if (attempt > 0) {
            // steps are ~10% of each parameter's characteristic scale
            for (std::size_t i = 0; i < n_free; ++i)
                start[i] += setup.restart_spread * jitter(rng) * (10.0 * steps[i]);
        }
        SimplexResult r = nelder_mead(objective, start, steps, sopts);
        total_evals += r.n_evaluations;
        if (r.fmin < best.fmin) best = r;
    }

    FitResult res;
    res.estimates = setup.initial;
    for (std::size_t i = 0; i < n_free; ++i)
        detail::param_ref(res.estimates, setup.free_params[i]) = best.x[i];
    res.n_evaluations = total_evals;
    res.converged = best.converged && std::isfinite(best.fmin);
    res.residual_rms = std::sqrt(best.fmin / static_cast<double>(data.signal.size()));

    // curvature-based uncertainties along each free axis
    res.uncertainties = FitParameters{std::nan(""), std::nan(""), std::nan(""),
                                      std::nan(""), std::nan(""), std::nan("")};
    const double dof = std::max(1.0, static_cast<double>(data.signal.size()) -
                                         static_cast<double>(n_free));
    const double s2 = best.fmin / dof;
    for (std::size_t i = 0; i < n_free; ++i) {
        double h = std::max(std::abs(best.x[i]), steps[i]) * 1e-4;
        std::vector<double> xp = best.x, xm = best.x;
        xp[i] += h;
        xm[i] -= h;
        double c2 = (objective(xp) - 2.0 * best.fmin + objective(xm)) / (h * h);
        if (std::isfinite(c2) && c2 > 0.0)
            detail::param_ref(res.uncertainties, setup.free_params[i]) = std::sqrt(2.0 * s2 / c2);
    }
    return res;
}

}  // namespace cqed
