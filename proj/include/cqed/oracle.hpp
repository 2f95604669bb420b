// oracle.hpp — brute-force steady state of the cascaded {mirror + N atoms} loop
//
// Independent reference for the closed-form reflection: the coupled
// steady-state equations for the mirror pair and, per atom, the field-jump
// and atomic-amplitude relations are assembled verbatim as a dense linear
// system in the 2N+2 unknowns {phi_d, phi_0..phi_N, phi_at,1..phi_at,N} and
// solved by LU.  Natural units v_g = v_c = 1; the resonator length enters
// only through k*L = delta_c/nu_FSR; the inbound amplitude is normalized to
// phi_c = 1.  Atom positions are stored as fractions of the roundtrip.

#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "cqed/linalg.hpp"
#include "cqed/params.hpp"
#include "cqed/spectrum.hpp"
#include "cqed/transfer.hpp"

namespace cqed {

struct FieldAmplitudes {
    complexd phi_d{0.0, 0.0};            // outgoing amplitude (phi_c = 1)
    std::vector<complexd> phi_segments;  // phi_0 .. phi_N, N+1 entries
    std::vector<complexd> phi_atoms;     // phi_at,1 .. phi_at,N
    std::vector<double> positions;       // l_n / L in [0, 1), strictly increasing

    double reflection() const { return std::norm(phi_d); }
};

namespace detail {

inline void check_positions(const std::vector<double>& pos, std::size_t n_atoms) {
    if (pos.size() != n_atoms)
        throw std::domain_error("oracle: positions count must equal atom count");
    for (std::size_t i = 0; i < pos.size(); ++i) {
        if (pos[i] < 0.0 || pos[i] >= 1.0)
            throw std::domain_error("oracle: positions must lie in [0, 1)");
        if (i > 0 && !(pos[i] > pos[i - 1]))
            throw std::domain_error("oracle: positions must be strictly increasing");
    }
}

}  // namespace detail

/// Assemble and solve the coupled equations.  Unknown layout:
/// x[0] = phi_d, x[1 + n] = phi_n (n = 0..N), x[2 + N + n] = phi_at,(n+1).
inline FieldAmplitudes solve_coupled_system(const std::vector<double>& beta_list, double gamma,
                                            const ResonatorConfig& resonator, DetuningPoint point,
                                            const std::vector<double>& positions) {
    resonator.validate();
    if (gamma <= 0.0) throw std::domain_error("oracle: gamma must be > 0");
    for (double b : beta_list)
        if (b < 0.0 || b > 1.0) throw std::domain_error("oracle: beta_n must lie in [0,1]");
    detail::check_positions(positions, beta_list.size());

    const int n_atoms = static_cast<int>(beta_list.size());
    const int dim = 2 * n_atoms + 2;
    const double t = resonator.mirror_t();
    const double kl_total = point.delta_c() / resonator.nu_fsr;  // k*L
    const complexd i_unit(0.0, 1.0);
    const complexd phase_rt = std::exp(-i_unit * kl_total);

    auto seg = [&](int n) { return 1 + n; };          // phi_n
    auto at = [&](int n) { return 2 + n_atoms + n; }; // phi_at,(n+1)

    ComplexMatrix m(dim);
    std::vector<complexd> rhs(static_cast<std::size_t>(dim), complexd{0.0, 0.0});

    // output mirror relation: -i phi_d - t_rt t e^{-ikL} phi_N + i r phi_c = 0
    m(0, 0) = -i_unit;
    m(0, seg(n_atoms)) = -resonator.t_rt * t * phase_rt;
    rhs[0] = -i_unit * resonator.r;

    // input mirror relation: i phi_0 - i t_rt r e^{-ikL} phi_N + t phi_c = 0
    m(1, seg(0)) = i_unit;
    m(1, seg(n_atoms)) = -i_unit * resonator.t_rt * resonator.r * phase_rt;
    rhs[1] = -t;

    for (int n = 0; n < n_atoms; ++n) {
        const double v_n = std::sqrt(2.0 * beta_list[static_cast<std::size_t>(n)] * gamma);
        const double gamma_ln = (1.0 - beta_list[static_cast<std::size_t>(n)]) * gamma;
        const complexd phase_n = std::exp(-i_unit * kl_total * positions[static_cast<std::size_t>(n)]);

        // field jump: -i (phi_n - phi_{n-1}) e^{-ik l_n} + V_n phi_at,n = 0
        int row = 2 + 2 * n;
        m(row, seg(n + 1)) = -i_unit * phase_n;
        m(row, seg(n)) = i_unit * phase_n;
        m(row, at(n)) = v_n;

        // atomic amplitude: (V_n/2)(phi_n + phi_{n-1}) e^{-ik l_n} + (da - i gamma_l,n) phi_at,n = 0
        row = 3 + 2 * n;
        m(row, seg(n + 1)) = 0.5 * v_n * phase_n;
        m(row, seg(n)) = 0.5 * v_n * phase_n;
        m(row, at(n)) = complexd(point.delta_a, -gamma_ln);
    }

    std::vector<complexd> x = lu_solve_refined(m, rhs);

    FieldAmplitudes out;
    out.phi_d = x[0];
    out.phi_segments.assign(x.begin() + 1, x.begin() + 2 + n_atoms);
    out.phi_atoms.assign(x.begin() + 2 + n_atoms, x.end());
    out.positions = positions;
    return out;
}

/// Convenience overload: atoms evenly spread over the roundtrip.
inline FieldAmplitudes solve_coupled_system(const std::vector<double>& beta_list, double gamma,
                                            const ResonatorConfig& resonator, DetuningPoint point) {
    std::vector<double> pos(beta_list.size());
    for (std::size_t i = 0; i < pos.size(); ++i)
        pos[i] = (static_cast<double>(i) + 0.5) / (static_cast<double>(pos.size()) + 1.0);
    return solve_coupled_system(beta_list, gamma, resonator, point, pos);
}

/// Per-atom excitation probabilities |phi_at,n|^2.
inline std::vector<double> atomic_excitation_profile(const FieldAmplitudes& amps) {
    std::vector<double> out(amps.phi_atoms.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::norm(amps.phi_atoms[i]);
    return out;
}

/// Largest per-equation backward residual at a given solution: each equation's
/// defect divided by the sum of its term magnitudes (the rows of the system
/// carry different physical scales, so a single global scale would be
/// meaningless).  An exact solution evaluates to a few ulps.
inline double oracle_residual(const std::vector<double>& beta_list, double gamma,
                              const ResonatorConfig& resonator, DetuningPoint point,
                              const FieldAmplitudes& amps) {
    const int n_atoms = static_cast<int>(beta_list.size());
    const double t = resonator.mirror_t();
    const double kl_total = point.delta_c() / resonator.nu_fsr;
    const complexd i_unit(0.0, 1.0);
    const complexd phase_rt = std::exp(-i_unit * kl_total);
    const complexd phi_c{1.0, 0.0};
    const complexd phi_n_last = amps.phi_segments.back();

    double worst = 0.0;
    auto row = [&worst](std::initializer_list<complexd> terms) {
        complexd defect{};
        double scale = 0.0;
        for (const complexd& term : terms) {
            defect += term;
            scale += std::abs(term);
        }
        if (scale > 0.0) worst = std::max(worst, std::abs(defect) / scale);
    };

    row({-i_unit * amps.phi_d, -resonator.t_rt * t * phase_rt * phi_n_last,
         i_unit * resonator.r * phi_c});
    row({i_unit * amps.phi_segments.front(),
         -i_unit * resonator.t_rt * resonator.r * phase_rt * phi_n_last, t * phi_c});
    for (int n = 0; n < n_atoms; ++n) {
        const double v_n = std::sqrt(2.0 * beta_list[static_cast<std::size_t>(n)] * gamma);
        const double gamma_ln = (1.0 - beta_list[static_cast<std::size_t>(n)]) * gamma;
        const complexd phase_n =
            std::exp(-i_unit * kl_total * amps.positions[static_cast<std::size_t>(n)]);
        const complexd seg_lo = amps.phi_segments[static_cast<std::size_t>(n)];
        const complexd seg_hi = amps.phi_segments[static_cast<std::size_t>(n) + 1];
        const complexd atom = amps.phi_atoms[static_cast<std::size_t>(n)];
        row({-i_unit * (seg_hi - seg_lo) * phase_n, v_n * atom});
        row({0.5 * v_n * (seg_hi + seg_lo) * phase_n, complexd(point.delta_a, -gamma_ln) * atom});
    }
    return worst;
}

/// One randomized oracle-vs-closed-form comparison batch.
struct OracleCheckReport {
    int instances = 0;
    double max_abs_error = 0.0;
    // parameters of the worst instance
    int worst_n_atoms = 0;
    double worst_r = 0.0, worst_t_rt = 0.0, worst_delta_a = 0.0, worst_delta_ca = 0.0;
    std::vector<double> worst_betas;
};

inline OracleCheckReport oracle_check(int instances, int max_atoms, std::uint64_t seed,
                                      double beta_max = 0.5) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double gamma = two_pi * 5e6;
    const double nu_fsr = 200e6;

    OracleCheckReport rep;
    rep.instances = instances;
    for (int i = 0; i < instances; ++i) {
        int n = 1 + static_cast<int>(unit(rng) * max_atoms);
        n = std::min(n, max_atoms);
        std::vector<double> betas(static_cast<std::size_t>(n));
        for (auto& b : betas) b = beta_max * unit(rng);
        std::vector<double> pos(static_cast<std::size_t>(n));
        for (auto& p : pos) p = unit(rng);
        std::sort(pos.begin(), pos.end());
        for (std::size_t j = 1; j < pos.size(); ++j)
            if (pos[j] <= pos[j - 1]) pos[j] = std::nextafter(pos[j - 1], 1.0);

        ResonatorConfig res = ResonatorConfig::make(nu_fsr, unit(rng), unit(rng));
        DetuningPoint pt{(unit(rng) * 40.0 - 20.0) * gamma, (unit(rng) * 2.0 - 1.0) * two_pi * nu_fsr};

        FieldAmplitudes amps = solve_coupled_system(betas, gamma, res, pt, pos);
        EmitterEnsemble ens = EmitterEnsemble::with_beta_list(betas, gamma);
        double closed = reflection_cascaded(ens, res, pt);
        double err = std::abs(amps.reflection() - closed);
        if (err > rep.max_abs_error) {
            rep.max_abs_error = err;
            rep.worst_n_atoms = n;
            rep.worst_r = res.r;
            rep.worst_t_rt = res.t_rt;
            rep.worst_delta_a = pt.delta_a;
            rep.worst_delta_ca = pt.delta_ca;
            rep.worst_betas = betas;
        }
    }
    return rep;
}

}  // namespace cqed
