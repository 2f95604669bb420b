// params.hpp — physical parameters, unit conventions and coupling conversions
//
// Unit convention used throughout the library:
//   * gamma, g, kappa_0, kappa_ext, delta_* are angular rates (rad/s),
//   * nu_fsr is the inverse roundtrip time (ordinary frequency, Hz).
// This mixed convention is what makes dimensionless figures of merit such as
// g_N/nu_FSR and g_N^2/(gamma_l*nu_FSR) come out right, and it matches the
// roundtrip phase factor exp(-i*delta_c/nu_FSR).  I/O layers accept
// "MHz, divided by 2pi where the quantity is a rate" via the helpers below.

#pragma once

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace cqed {

inline constexpr double two_pi = 6.28318530717958647692528676655900577;

// "gamma/2pi = x MHz" -> angular rate in rad/s
inline double rate_from_mhz(double mhz) { return two_pi * mhz * 1e6; }
inline double rate_to_mhz(double rad_per_s) { return rad_per_s / (two_pi * 1e6); }

// plain frequencies (nu_FSR and friends)
inline double freq_from_mhz(double mhz) { return mhz * 1e6; }
inline double freq_to_mhz(double hz) { return hz * 1e-6; }

enum class Geometry { Ring, FabryPerot };
enum class CouplingRegime { TimedDicke, Dicke };
enum class Verdict { Satisfied, Violated };

inline std::string to_string(Geometry g) { return g == Geometry::Ring ? "ring" : "fabry_perot"; }
inline std::string to_string(CouplingRegime r) { return r == CouplingRegime::TimedDicke ? "timed_dicke" : "dicke"; }
inline std::string to_string(Verdict v) { return v == Verdict::Satisfied ? "satisfied" : "violated"; }

/// An ensemble of two-level emitters coupled to one guided/cavity mode.
/// beta_per_atom may be empty, in which case the ensemble is homogeneous
/// with coupling beta_mean per atom.  gamma is the total (free-space
/// inclusive) decay rate of a single emitter.
struct EmitterEnsemble {
    int n_atoms = 0;
    std::vector<double> beta_per_atom;  // optional; empty = homogeneous
    double beta_mean = 0.0;             // dimensionless, in [0,1]
    double gamma = 0.0;                 // rad/s
    CouplingRegime regime = CouplingRegime::TimedDicke;

    static EmitterEnsemble homogeneous(int n, double beta, double gamma,
                                       CouplingRegime regime = CouplingRegime::TimedDicke) {
        EmitterEnsemble e;
        e.n_atoms = n;
        e.beta_mean = beta;
        e.gamma = gamma;
        e.regime = regime;
        e.validate();
        return e;
    }

    static EmitterEnsemble with_beta_list(std::vector<double> betas, double gamma,
                                          CouplingRegime regime = CouplingRegime::TimedDicke) {
        EmitterEnsemble e;
        e.n_atoms = static_cast<int>(betas.size());
        e.beta_per_atom = std::move(betas);
        e.beta_mean = e.beta_per_atom.empty()
                          ? 0.0
                          : std::accumulate(e.beta_per_atom.begin(), e.beta_per_atom.end(), 0.0) /
                                static_cast<double>(e.beta_per_atom.size());
        e.gamma = gamma;
        e.regime = regime;
        e.validate();
        return e;
    }

    // loss rate into non-guided modes, gamma_l = (1-beta)*gamma
    double gamma_loss() const { return (1.0 - beta_mean) * gamma; }

    double beta_n_product() const { return beta_mean * static_cast<double>(n_atoms); }

    void validate() const {
        if (n_atoms < 0) throw std::domain_error("EmitterEnsemble: n_atoms must be >= 0");
        if (gamma <= 0.0) throw std::domain_error("EmitterEnsemble: gamma must be > 0");
        if (beta_mean < 0.0 || beta_mean > 1.0)
            throw std::domain_error("EmitterEnsemble: beta_mean must lie in [0,1]");
        for (double b : beta_per_atom)
            if (b < 0.0 || b > 1.0)
                throw std::domain_error("EmitterEnsemble: every beta_n must lie in [0,1]");
        if (!beta_per_atom.empty()) {
            if (static_cast<int>(beta_per_atom.size()) != n_atoms)
                throw std::domain_error("EmitterEnsemble: beta_per_atom size != n_atoms");
            double mean = std::accumulate(beta_per_atom.begin(), beta_per_atom.end(), 0.0) /
                          static_cast<double>(beta_per_atom.size());
            double scale = std::max(std::abs(mean), 1e-300);
            if (std::abs(mean - beta_mean) > 1e-12 * scale)
                throw std::domain_error("EmitterEnsemble: beta_mean inconsistent with beta_per_atom");
        }
    }
};

/// Resonator described by its free spectral range and mirror coefficients.
/// t_rt is the roundtrip amplitude transmission (intrinsic loss), r the
/// amplitude reflection of the in/out coupling mirror.
struct ResonatorConfig {
    double nu_fsr = 0.0;  // Hz
    double t_rt = 1.0;
    double r = 1.0;
    Geometry geometry = Geometry::Ring;

    static ResonatorConfig make(double nu_fsr, double t_rt, double r,
                                Geometry geometry = Geometry::Ring) {
        ResonatorConfig c{nu_fsr, t_rt, r, geometry};
        c.validate();
        return c;
    }

    // kappa_0 = nu_FSR (1 - t_rt^2)/2,  kappa_ext = nu_FSR (1 - r^2)/2 (rad/s)
    double kappa_0() const { return nu_fsr * (1.0 - t_rt * t_rt) / 2.0; }
    double kappa_ext() const { return nu_fsr * (1.0 - r * r) / 2.0; }

    // mirror amplitude transmission, r^2 + t^2 = 1
    double mirror_t() const { return std::sqrt(std::max(0.0, 1.0 - r * r)); }

    static ResonatorConfig from_rates(double nu_fsr, double kappa_0, double kappa_ext,
                                      Geometry geometry = Geometry::Ring) {
        if (nu_fsr <= 0.0) throw std::domain_error("ResonatorConfig: nu_fsr must be > 0");
        double x0 = 2.0 * kappa_0 / nu_fsr;
        double xe = 2.0 * kappa_ext / nu_fsr;
        if (kappa_0 < 0.0 || kappa_ext < 0.0 || x0 > 1.0 || xe > 1.0)
            throw std::domain_error("ResonatorConfig: kappa out of range [0, nu_fsr/2]");
        return make(nu_fsr, std::sqrt(1.0 - x0), std::sqrt(1.0 - xe), geometry);
    }

    void validate() const {
        if (nu_fsr <= 0.0) throw std::domain_error("ResonatorConfig: nu_fsr must be > 0");
        if (t_rt < 0.0 || t_rt > 1.0) throw std::domain_error("ResonatorConfig: t_rt must lie in [0,1]");
        if (r < 0.0 || r > 1.0) throw std::domain_error("ResonatorConfig: r must lie in [0,1]");
    }
};

/// Probe detuning pair.  delta_a = omega_a - omega, delta_ca = omega_c - omega_a,
/// both angular.  delta_c = delta_a + delta_ca is derived, never stored.
struct DetuningPoint {
    double delta_a = 0.0;   // rad/s
    double delta_ca = 0.0;  // rad/s
    double delta_c() const { return delta_a + delta_ca; }
};

// ---------------------------------------------------------------------------
// Coupling-strength conversions
// ---------------------------------------------------------------------------

/// Emitter-resonator coupling from the beta-factor:
/// g^2 = 4*beta*gamma*nu_FSR (Fabry-Perot, anti-node), g^2 = 2*beta*gamma*nu_FSR (ring, chiral).
inline double g_from_beta(double beta, double gamma, double nu_fsr, Geometry geometry) {
    if (beta < 0.0 || beta > 1.0) throw std::domain_error("g_from_beta: beta must lie in [0,1]");
    if (gamma <= 0.0) throw std::domain_error("g_from_beta: gamma must be > 0");
    if (nu_fsr <= 0.0) throw std::domain_error("g_from_beta: nu_fsr must be > 0");
    double factor = (geometry == Geometry::FabryPerot) ? 4.0 : 2.0;
    return std::sqrt(factor * beta * gamma * nu_fsr);
}

inline double beta_from_g(double g, double gamma, double nu_fsr, Geometry geometry) {
    if (g < 0.0) throw std::domain_error("beta_from_g: g must be >= 0");
    if (gamma <= 0.0) throw std::domain_error("beta_from_g: gamma must be > 0");
    if (nu_fsr <= 0.0) throw std::domain_error("beta_from_g: nu_fsr must be > 0");
    double factor = (geometry == Geometry::FabryPerot) ? 4.0 : 2.0;
    double beta = g * g / (factor * gamma * nu_fsr);
    if (beta > 1.0 + 1e-12) throw std::domain_error("beta_from_g: g exceeds the geometric maximum");
    return std::min(beta, 1.0);
}

/// Largest possible single emitter-resonator coupling for given resonator length,
/// g_max = 2 sqrt(gamma*nu_FSR) (reached at beta = 1 in a Fabry-Perot anti-node).
inline double g_max(double gamma, double nu_fsr) {
    if (gamma <= 0.0 || nu_fsr <= 0.0) throw std::domain_error("g_max: gamma and nu_fsr must be > 0");
    return 2.0 * std::sqrt(gamma * nu_fsr);
}

/// Collective coupling g_N = (sum_n g_{1,n}^2)^(1/2), the root-sum-square of the
/// individual couplings.  Homogeneous ensembles reduce to sqrt(N)*g_1.
inline double collective_g(const EmitterEnsemble& ensemble, const ResonatorConfig& resonator) {
    ensemble.validate();
    resonator.validate();
    if (ensemble.n_atoms == 0) return 0.0;
    double sum_sq = 0.0;
    if (!ensemble.beta_per_atom.empty()) {
        for (double b : ensemble.beta_per_atom) {
            double g1 = g_from_beta(b, ensemble.gamma, resonator.nu_fsr, resonator.geometry);
            sum_sq += g1 * g1;
        }
    } else {
        double g1 = g_from_beta(ensemble.beta_mean, ensemble.gamma, resonator.nu_fsr, resonator.geometry);
        sum_sq = static_cast<double>(ensemble.n_atoms) * g1 * g1;
    }
    return std::sqrt(sum_sq);
}

/// Cooperativity C = g^2 / (2 kappa_0 gamma_l).
inline double cooperativity(double g, double kappa_0, double gamma_l) {
    if (kappa_0 <= 0.0 || gamma_l <= 0.0)
        throw std::domain_error("cooperativity: lossless limit (kappa_0 or gamma_l is zero), C diverges");
    return g * g / (2.0 * kappa_0 * gamma_l);
}

/// Single-pass optical depth, OD ~= 4*beta*N (valid for beta << 1).
inline double optical_depth(double beta, double n_atoms) {
    if (beta < 0.0 || beta > 1.0) throw std::domain_error("optical_depth: beta must lie in [0,1]");
    return 4.0 * beta * n_atoms;
}

// ---------------------------------------------------------------------------
// Validity diagnostics
// ---------------------------------------------------------------------------

/// Diagnostics for the single-mode (JC/TC) description.  The two conditions
///   nu_FSR >> g_N          and        nu_FSR >> g_N^2/gamma_l
/// are evaluated with "<<" operationalized as left < right/strictness_factor.
/// In beta-space the same conditions read beta*N << nu_FSR/(2 gamma) and
/// beta*N << (1-beta)/2 for a chiral ring (an extra 1/2 for Fabry-Perot).
struct ValidityReport {
    double ratio_g_fsr = 0.0;       // g_N / nu_FSR
    double ratio_loss_fsr = 0.0;    // g_N^2 / (gamma_l * nu_FSR)
    double beta_n_product = 0.0;    // beta*N
    double dicke_bound = 0.0;       // (1-beta)/2
    double optical_depth = 0.0;     // ~4 beta N
    Verdict cond_g_fsr = Verdict::Satisfied;     // nu_FSR >> g_N
    Verdict cond_loss_fsr = Verdict::Satisfied;  // nu_FSR >> g_N^2/gamma_l
    double strictness_factor = 10.0;
};

/// Report from raw rates.  beta is optional (NaN allowed); when absent the
/// beta-space fields are inferred assuming a chiral ring and beta << 1.
inline ValidityReport validity_report_from_rates(double g_n, double gamma, double gamma_l,
                                                 double nu_fsr, double beta = std::nan(""),
                                                 double strictness_factor = 10.0) {
    if (gamma <= 0.0 || nu_fsr <= 0.0)
        throw std::domain_error("validity_report: gamma and nu_fsr must be > 0");
    if (strictness_factor <= 0.0)
        throw std::domain_error("validity_report: strictness_factor must be > 0");
    ValidityReport rep;
    rep.strictness_factor = strictness_factor;
    rep.ratio_g_fsr = g_n / nu_fsr;
    rep.ratio_loss_fsr = (gamma_l > 0.0) ? g_n * g_n / (gamma_l * nu_fsr)
                                         : (g_n > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    double beta_eff = std::isnan(beta) ? 0.0 : beta;
    rep.beta_n_product = g_n * g_n / (2.0 * gamma * nu_fsr);  // inverts g_N^2 = 2 beta N gamma nu
    rep.dicke_bound = (1.0 - beta_eff) / 2.0;
    rep.optical_depth = 4.0 * rep.beta_n_product;
    rep.cond_g_fsr = (rep.ratio_g_fsr < 1.0 / strictness_factor) ? Verdict::Satisfied : Verdict::Violated;
    rep.cond_loss_fsr =
        (rep.ratio_loss_fsr < 1.0 / strictness_factor) ? Verdict::Satisfied : Verdict::Violated;
    return rep;
}

inline ValidityReport validity_report(const EmitterEnsemble& ensemble, const ResonatorConfig& resonator,
                                      double strictness_factor = 10.0) {
    double g_n = collective_g(ensemble, resonator);
    ValidityReport rep = validity_report_from_rates(g_n, ensemble.gamma, ensemble.gamma_loss(),
                                                    resonator.nu_fsr, ensemble.beta_mean,
                                                    strictness_factor);
    // exact beta-space fields, not the small-beta inversion
    rep.beta_n_product = ensemble.beta_n_product();
    rep.optical_depth = optical_depth(ensemble.beta_mean, ensemble.n_atoms);
    return rep;
}

}  // namespace cqed
