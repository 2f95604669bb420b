// transfer.hpp — single-pass complex transmission of one atom and of the ensemble
//
// The propagating mode picks up a factor t_n = 1 - 2*gamma*beta_n/(gamma + i*delta_a)
// per atom.  The ensemble transmission is the exact product of these factors,
// or the power-law form (1 - 2*gamma*beta/(gamma + i*delta_a))^N for a
// homogeneous ensemble.  The Dicke-superatom variant replaces gamma by the
// collectively enhanced rate gamma_N = N*gamma.
//
// Phases are tracked as the sum of per-factor principal arguments.  For a
// single Lorentzian factor the principal argument is bounded by pi; the
// homogeneous-ensemble unwrapped phase N*arg(t_1) is not, which is what makes
// extra roundtrip-phase resonances possible.

#pragma once

#include <complex>
#include <span>

#include "cqed/params.hpp"

namespace cqed {

using complexd = std::complex<double>;

/// Complex amplitude together with its unwrapped (per-factor summed) phase.
struct ComplexTransmission {
    complexd value{1.0, 0.0};
    double unwrapped_phase = 0.0;  // radians; equals arg(value) modulo 2*pi
};

/// Transmission past a single atom, t = 1 - 2*gamma*beta/(gamma + i*delta_a).
inline complexd t_single(double beta_n, double gamma, double delta_a) {
    if (beta_n < 0.0 || beta_n > 1.0) throw std::domain_error("t_single: beta_n must lie in [0,1]");
    if (gamma <= 0.0) throw std::domain_error("t_single: gamma must be > 0");
    return 1.0 - 2.0 * gamma * beta_n / complexd(gamma, delta_a);
}

/// Exact ensemble transmission t_N = prod_n t_n with per-factor phase summation.
inline ComplexTransmission t_ensemble_exact(std::span<const double> beta_list, double gamma,
                                            double delta_a) {
    ComplexTransmission out;
    for (double b : beta_list) {
        complexd t = t_single(b, gamma, delta_a);
        out.value *= t;
        out.unwrapped_phase += std::arg(t);
    }
    return out;
}

/// Homogeneous power-law form t_N = t_1^N.  N may be non-integral (continuous
/// beta*N sweeps); magnitude and phase are raised separately so the unwrapped
/// phase is exactly N*arg(t_1).
inline ComplexTransmission t_ensemble_homogeneous(double beta, double n_atoms, double gamma,
                                                  double delta_a) {
    if (n_atoms < 0.0) throw std::domain_error("t_ensemble_homogeneous: n_atoms must be >= 0");
    complexd t1 = t_single(beta, gamma, delta_a);
    ComplexTransmission out;
    out.unwrapped_phase = n_atoms * std::arg(t1);
    out.value = std::polar(std::pow(std::abs(t1), n_atoms), out.unwrapped_phase);
    return out;
}

/// Dicke-superatom transmission: one collective dipole with gamma_N = N*gamma,
/// t = 1 - 2*gamma_N*beta/(gamma_N + i*delta_a).
inline complexd t_dicke(double beta, double n_atoms, double gamma, double delta_a) {
    if (n_atoms < 0.0) throw std::domain_error("t_dicke: n_atoms must be >= 0");
    double gamma_n = n_atoms * gamma;
    if (gamma_n == 0.0) return complexd{1.0, 0.0};  // empty ensemble is transparent
    if (beta < 0.0 || beta > 1.0) throw std::domain_error("t_dicke: beta must lie in [0,1]");
    return 1.0 - 2.0 * gamma_n * beta / complexd(gamma_n, delta_a);
}

/// Ensemble transmission dispatched on the ensemble description: explicit
/// beta_n lists use the exact product, homogeneous ensembles the power law,
/// Dicke-regime ensembles the superatom form.
inline ComplexTransmission ensemble_transmission(const EmitterEnsemble& ensemble, double delta_a) {
    if (ensemble.regime == CouplingRegime::Dicke) {
        complexd t = t_dicke(ensemble.beta_mean, ensemble.n_atoms, ensemble.gamma, delta_a);
        return {t, std::arg(t)};
    }
    if (!ensemble.beta_per_atom.empty())
        return t_ensemble_exact(ensemble.beta_per_atom, ensemble.gamma, delta_a);
    return t_ensemble_homogeneous(ensemble.beta_mean, ensemble.n_atoms, ensemble.gamma, delta_a);
}

}  // namespace cqed
