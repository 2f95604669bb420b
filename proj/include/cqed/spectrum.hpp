// spectrum.hpp — steady-state reflection of the probed resonator
//
// Three model routes are provided:
//   * the cascaded real-space solution, valid for any parameters,
//         R = |(e^{-i dc/nu} t_rt t_N - r) / (e^{-i dc/nu} t_rt t_N r - 1)|^2,
//   * its single-mode (driven JC/TC) reduction in terms of g, kappa, gamma_l,
//   * the waveguide limit r = 0, where R = t_rt^2 |t_N|^2.
// The roundtrip function phi collects the roundtrip phase (real part) and
// roundtrip loss (imaginary part); resonances satisfy Re{phi} = 2*pi*q.

#pragma once

#include <complex>
#include <limits>
#include <span>
#include <vector>

#include "cqed/params.hpp"
#include "cqed/transfer.hpp"

namespace cqed {

enum class SpectrumModel { Cascaded, SingleModeTC, WaveguideLimit };

inline std::string to_string(SpectrumModel m) {
    switch (m) {
        case SpectrumModel::Cascaded: return "cascaded";
        case SpectrumModel::SingleModeTC: return "single_mode_tc";
        default: return "waveguide_limit";
    }
}

/// Roundtrip function phi(delta_a, delta_c).  Re{phi} is the roundtrip phase
/// (with the atomic contribution unwrapped per factor, so it is continuous in
/// delta_a for beta < 1/2), Im{phi} >= 0 the roundtrip loss.  loop_gain is
/// e^{i phi} = e^{-i delta_c/nu_FSR} t_N t_rt r.
struct RoundtripState {
    complexd phi{0.0, 0.0};
    complexd loop_gain{1.0, 0.0};
};

inline RoundtripState roundtrip_phi_from_transmission(const ComplexTransmission& t_n,
                                                      const ResonatorConfig& resonator,
                                                      double delta_c) {
    double amp = std::abs(t_n.value) * resonator.t_rt * resonator.r;
    double re = -delta_c / resonator.nu_fsr + t_n.unwrapped_phase;
    RoundtripState s;
    if (amp <= 0.0) {
        s.phi = complexd(re, std::numeric_limits<double>::infinity());
        s.loop_gain = complexd(0.0, 0.0);
        return s;
    }
    s.phi = complexd(re, -std::log(amp));
    s.loop_gain = std::polar(amp, re);
    return s;
}

inline RoundtripState roundtrip_phi(const EmitterEnsemble& ensemble, const ResonatorConfig& resonator,
                                    DetuningPoint point) {
    return roundtrip_phi_from_transmission(ensemble_transmission(ensemble, point.delta_a), resonator,
                                           point.delta_c());
}

/// Small-beta approximation of phi (the closed Lorentzian form); kept separate
/// so tests can quantify the approximation instead of silently relying on it.
inline RoundtripState roundtrip_phi_approx(double beta_n_product, double gamma,
                                           const ResonatorConfig& resonator, DetuningPoint point) {
    complexd atomic = 2.0 * beta_n_product * gamma / complexd(point.delta_a, -gamma);
    double mirror_amp = resonator.t_rt * resonator.r;
    complexd phi = -point.delta_c() / resonator.nu_fsr + atomic;
    RoundtripState s;
    if (mirror_amp <= 0.0) {
        s.phi = complexd(phi.real(), std::numeric_limits<double>::infinity());
        s.loop_gain = complexd(0.0, 0.0);
        return s;
    }
    s.phi = phi + complexd(0.0, -std::log(mirror_amp));
    s.loop_gain = std::exp(complexd(0.0, 1.0) * s.phi);
    return s;
}

namespace detail {

inline double reflection_from_loop(complexd t_n_value, const ResonatorConfig& resonator,
                                   double delta_c) {
    complexd z = std::polar(1.0, -delta_c / resonator.nu_fsr) * resonator.t_rt * t_n_value;
    complexd den = z * resonator.r - 1.0;
    if (std::abs(den) < 1e-300)
        throw std::runtime_error("reflection_cascaded: lossless resonant loop (pole)");
    return std::norm((z - resonator.r) / den);
}

}  // namespace detail

/// Power reflection at the input mirror, cascaded model.
inline double reflection_cascaded(const EmitterEnsemble& ensemble, const ResonatorConfig& resonator,
                                  DetuningPoint point) {
    return detail::reflection_from_loop(ensemble_transmission(ensemble, point.delta_a).value,
                                        resonator, point.delta_c());
}

/// Same observable computed from phi (the simplified form); only valid for r > 0.
/// Agrees with reflection_cascaded to ~1e-12 relative, which tests exploit.
inline double reflection_from_phi(const RoundtripState& state, double r) {
    if (r <= 0.0) throw std::domain_error("reflection_from_phi: requires r > 0");
    complexd e = std::exp(complexd(0.0, 1.0) * state.phi);
    complexd den = e - 1.0;
    if (std::abs(den) < 1e-300) throw std::runtime_error("reflection_from_phi: pole at e^{i phi} = 1");
    return std::norm((e / r - r) / den);
}

/// Scalar cascaded reflection for continuous beta*N sweeps (homogeneous or
/// Dicke atomic response, real-valued N).
inline double reflection_cascaded_scalar(double beta, double n_atoms, double gamma,
                                         const ResonatorConfig& resonator, DetuningPoint point,
                                         CouplingRegime regime = CouplingRegime::TimedDicke) {
    complexd t_n = (regime == CouplingRegime::Dicke)
                       ? t_dicke(beta, n_atoms, gamma, point.delta_a)
                       : t_ensemble_homogeneous(beta, n_atoms, gamma, point.delta_a).value;
    return detail::reflection_from_loop(t_n, resonator, point.delta_c());
}

/// Driven JC/TC reflection,
/// R = |(g^2 + (gamma_l + i da)(k0 - kext + i dc)) / (g^2 + (gamma_l + i da)(k0 + kext + i dc))|^2.
inline double reflection_singlemode(double g, double gamma_l, double kappa_0, double kappa_ext,
                                    DetuningPoint point) {
    if (g < 0.0 || gamma_l < 0.0 || kappa_0 < 0.0 || kappa_ext < 0.0)
        throw std::domain_error("reflection_singlemode: rates must be non-negative");
    complexd emitter(gamma_l, point.delta_a);
    complexd num = g * g + emitter * complexd(kappa_0 - kappa_ext, point.delta_c());
    complexd den = g * g + emitter * complexd(kappa_0 + kappa_ext, point.delta_c());
    if (std::abs(den) < 1e-300) throw std::runtime_error("reflection_singlemode: pole (all rates zero)");
    return std::norm(num / den);
}

/// Steady-state amplitude ratios of the driven single-mode model (v_g = 1).
struct SteadyStateAmplitudes {
    complexd out_over_in{0.0, 0.0};
    complexd atom_over_in{0.0, 0.0};
    complexd cav_over_in{0.0, 0.0};
    complexd atom_over_cav{0.0, 0.0};
};

inline SteadyStateAmplitudes steady_state_amplitudes(double g, double gamma_l, double kappa_0,
                                                     double kappa_ext, DetuningPoint point) {
    if (g < 0.0 || gamma_l < 0.0 || kappa_0 < 0.0 || kappa_ext < 0.0)
        throw std::domain_error("steady_state_amplitudes: rates must be non-negative");
    if (gamma_l == 0.0 && point.delta_a == 0.0 && g > 0.0)
        throw std::domain_error("steady_state_amplitudes: pole in atom/cav at gamma_l = delta_a = 0");
    complexd emitter(gamma_l, point.delta_a);
    complexd den = g * g + emitter * complexd(kappa_0 + kappa_ext, point.delta_c());
    if (std::abs(den) < 1e-300) throw std::runtime_error("steady_state_amplitudes: pole (all rates zero)");
    double v_in = std::sqrt(2.0 * kappa_ext);
    SteadyStateAmplitudes s;
    s.out_over_in = (g * g + emitter * complexd(kappa_0 - kappa_ext, point.delta_c())) / den;
    s.atom_over_in = -g * v_in / den;
    s.cav_over_in = -complexd(0.0, 1.0) * v_in * emitter / den;
    s.atom_over_cav = -complexd(0.0, 1.0) * g / emitter;
    return s;
}

// ---------------------------------------------------------------------------
// Spectrum scans
// ---------------------------------------------------------------------------

/// Full parameter snapshot attached to every scan (and serialized next to it).
struct ModelParams {
    SpectrumModel model = SpectrumModel::Cascaded;
    double n_atoms = 0.0;  // real-valued to support continuous beta*N
    double beta = 0.0;
    std::vector<double> beta_list;  // empty = homogeneous
    double gamma = 0.0;             // rad/s
    double nu_fsr = 0.0;            // Hz
    double t_rt = 1.0;
    double r = 1.0;
    Geometry geometry = Geometry::Ring;
    CouplingRegime regime = CouplingRegime::TimedDicke;
    double delta_ca = 0.0;  // rad/s
};

struct SpectrumPoint {
    double delta_a = 0.0;  // rad/s
    double delta_c = 0.0;  // rad/s
    double reflection = 0.0;
};

struct Spectrum {
    std::vector<SpectrumPoint> points;
    SpectrumModel model = SpectrumModel::Cascaded;
    ModelParams params;
};

inline ModelParams snapshot_params(const EmitterEnsemble& ensemble, const ResonatorConfig& resonator,
                                   double delta_ca, SpectrumModel model) {
    ModelParams p;
    p.model = model;
    p.n_atoms = static_cast<double>(ensemble.n_atoms);
    p.beta = ensemble.beta_mean;
    p.beta_list = ensemble.beta_per_atom;
    p.gamma = ensemble.gamma;
    p.nu_fsr = resonator.nu_fsr;
    p.t_rt = resonator.t_rt;
    p.r = resonator.r;
    p.geometry = resonator.geometry;
    p.regime = ensemble.regime;
    p.delta_ca = delta_ca;
    return p;
}

/// Pointwise evaluation of the selected model on a strictly increasing
/// delta_a grid, at fixed cavity-atom detuning.  Points are independent; the
/// output order follows the grid regardless of evaluation order.
inline Spectrum spectrum_scan(const EmitterEnsemble& ensemble, const ResonatorConfig& resonator,
                              double delta_ca, std::span<const double> delta_a_grid,
                              SpectrumModel model) {
    for (std::size_t i = 1; i < delta_a_grid.size(); ++i)
        if (!(delta_a_grid[i] > delta_a_grid[i - 1]))
            throw std::invalid_argument("spectrum_scan: grid not strictly increasing at index " +
                                        std::to_string(i));
    Spectrum spec;
    spec.model = model;
    spec.params = snapshot_params(ensemble, resonator, delta_ca, model);
    spec.points.reserve(delta_a_grid.size());

    const double g_n = collective_g(ensemble, resonator);
    const double gamma_l = (ensemble.regime == CouplingRegime::Dicke)
                               ? (1.0 - ensemble.beta_mean) * ensemble.gamma * ensemble.n_atoms
                               : ensemble.gamma_loss();
    ResonatorConfig waveguide = resonator;
    waveguide.r = 0.0;

    for (std::size_t i = 0; i < delta_a_grid.size(); ++i) {
        DetuningPoint pt{delta_a_grid[i], delta_ca};
        double refl = 0.0;
        try {
            switch (model) {
                case SpectrumModel::Cascaded:
                    refl = reflection_cascaded(ensemble, resonator, pt);
                    break;
                case SpectrumModel::SingleModeTC:
                    refl = reflection_singlemode(g_n, gamma_l, resonator.kappa_0(),
                                                 resonator.kappa_ext(), pt);
                    break;
                case SpectrumModel::WaveguideLimit:
                    refl = reflection_cascaded(ensemble, waveguide, pt);
                    break;
            }
        } catch (const std::exception& e) {
            throw std::runtime_error("spectrum_scan: error at grid index " + std::to_string(i) +
                                     ": " + e.what());
        }
        spec.points.push_back({pt.delta_a, pt.delta_c(), refl});
    }
    return spec;
}

}  // namespace cqed
