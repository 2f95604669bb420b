#include <catch2/catch.hpp>

#include "cqed/resonance.hpp"

using namespace cqed;

TEST_CASE("cascaded resonance roots") {
    const double gamma = rate_from_mhz(5.0);
    const double nu = 200e6;

    SECTION("empty cavity comb at delta = -2 pi nu q") {
        auto ens = EmitterEnsemble::homogeneous(0, 0.0, gamma);
        auto res = ResonatorConfig::make(nu, 0.999, 0.999);
        double w = 2.5 * two_pi * nu;
        auto roots = find_resonances_cascaded(ens, res, 0.0, -2, 2, -w, w);
        REQUIRE(roots.size() == 5);
        for (const auto& r : roots)
            CHECK(r.delta == Approx(-two_pi * nu * r.q).margin(1e-3));
    }
    SECTION("two central roots split by 2 g_N within 5% at beta*N = 1") {
        const double beta = 1e-3;
        auto roots = find_resonances_cascaded_scalar(beta, 1.0 / beta, gamma, nu, 0.0, 0, 0,
                                                     -0.45 * two_pi * nu, 0.45 * two_pi * nu);
        // q = 0 family: {-sqrt(g^2-gamma^2), 0, +sqrt(g^2-gamma^2)}
        REQUIRE(roots.size() == 3);
        double g_n = std::sqrt(2.0 * gamma * nu);
        double splitting = roots[2].delta - roots[0].delta;
        CHECK(splitting == Approx(2.0 * g_n).epsilon(0.05));
        CHECK(roots[1].delta == Approx(0.0).margin(1e-3));
        // exact location of the split pair in the small-beta limit
        CHECK(roots[2].delta == Approx(std::sqrt(g_n * g_n - gamma * gamma)).epsilon(1e-3));
    }
    SECTION("additional roots appear near atomic resonance for large beta*N") {
        const double beta = 1e-3;
        auto count_inner = [&](double beta_n) {
            auto roots = find_resonances_cascaded_scalar(beta, beta_n / beta, gamma, nu, 0.0, -4,
                                                         4, -3.0 * gamma, 3.0 * gamma);
            return roots.size();
        };
        CHECK(count_inner(1.0) == 1);   // only the suppressed central line
        CHECK(count_inner(8.0) > 1);    // extra 2 pi windings create new solutions
    }
    SECTION("monotone emergence of inner roots over beta*N in {2, 6, 12}") {
        const double beta = 1e-3;
        std::size_t prev = 0;
        for (double bn : {2.0, 6.0, 12.0}) {
            auto roots = find_resonances_cascaded_scalar(beta, bn / beta, gamma, nu, 0.0, -4, 4,
                                                         -3.0 * gamma, 3.0 * gamma);
            CHECK(roots.size() >= prev);
            prev = roots.size();
        }
    }
    SECTION("returned roots satisfy the phase condition on re-evaluation") {
        const double beta = 0.005;
        const double dca = rate_from_mhz(1.12);
        auto roots = find_resonances_cascaded_scalar(beta, 2480, rate_from_mhz(2.61), 7.1e6, dca,
                                                     -3, 3, -6.0 * rate_from_mhz(2.61),
                                                     6.0 * rate_from_mhz(2.61));
        REQUIRE(roots.size() >= 7);
        for (const auto& r : roots) {
            double residual = detail::roundtrip_phase_scalar(beta, 2480, rate_from_mhz(2.61),
                                                             7.1e6, dca, r.delta) -
                              two_pi * r.q;
            CHECK(std::abs(residual) < 1e-9);
        }
    }
    SECTION("window without sign changes gives an empty list") {
        auto ens = EmitterEnsemble::homogeneous(0, 0.0, gamma);
        auto res = ResonatorConfig::make(nu, 0.999, 0.999);
        auto roots = find_resonances_cascaded(ens, res, 0.0, 3, 5, -0.1 * two_pi * nu,
                                              0.1 * two_pi * nu);
        CHECK(roots.empty());
    }
    SECTION("heterogeneous ensembles use the exact product phase") {
        std::vector<double> betas(40, 0.025);
        auto ens = EmitterEnsemble::with_beta_list(betas, gamma);
        auto res = ResonatorConfig::make(nu, 0.99, 0.99);
        auto hetero = find_resonances_cascaded(ens, res, 0.0, 0, 0, -0.45 * two_pi * nu,
                                               0.45 * two_pi * nu);
        auto homog = find_resonances_cascaded_scalar(0.025, 40, gamma, nu, 0.0, 0, 0,
                                                     -0.45 * two_pi * nu, 0.45 * two_pi * nu);
        REQUIRE(hetero.size() == homog.size());
        for (std::size_t i = 0; i < hetero.size(); ++i)
            CHECK(hetero[i].delta == Approx(homog[i].delta).margin(1e-3));
    }
}

TEST_CASE("jc resonances") {
    const double g = rate_from_mhz(5.0);

    SECTION("vacuum Rabi splitting at zero detuning") {
        auto [hi, lo] = jc_resonances(g, 0.0);
        CHECK(hi == Approx(g).epsilon(1e-14));
        CHECK(lo == Approx(-g).epsilon(1e-14));
    }
    SECTION("decoupled limit gives bare cavity and bare atom") {
        double dca = rate_from_mhz(3.0);
        auto [hi, lo] = jc_resonances(0.0, dca);
        CHECK(hi == Approx(0.0).margin(1e-9));
        CHECK(lo == Approx(-dca).epsilon(1e-14));
    }
    SECTION("detuned doublet matches a direct 2x2 eigen-decomposition") {
        double dca = rate_from_mhz(5.0);
        auto offsets = jc_resonances(g, dca);
        // single-excitation block in the {atom, cavity} basis, frequencies
        // relative to omega_c: diag(-dca, 0) + g sigma_x
        double tr = -dca;
        double det = -g * g;  // (-dca)(0) - g^2
        double disc = std::sqrt(tr * tr - 4.0 * det);
        double e_hi = (tr + disc) / 2.0;
        double e_lo = (tr - disc) / 2.0;
        CHECK(offsets[0] == Approx(e_hi).epsilon(1e-12));
        CHECK(offsets[1] == Approx(e_lo).epsilon(1e-12));
        CHECK(offsets[0] - offsets[1] ==
              Approx(std::sqrt(4.0 * g * g + dca * dca)).epsilon(1e-12));
    }
}

TEST_CASE("multimode TC secular equation") {
    const double w_fsr = two_pi * 10e6;

    SECTION("root count and interlacing") {
        const int m = 7;
        double g = 0.8 * w_fsr;
        auto roots = tc_multimode_eigenfrequencies(g, w_fsr, 0.3 * w_fsr, m);
        REQUIRE(roots.size() == 2 * (m + 1));
        for (std::size_t i = 1; i < roots.size(); ++i) CHECK(roots[i] > roots[i - 1]);
        // exactly one root strictly inside every pole interval
        for (int j = -m; j + 1 <= m; ++j) {
            double lo = j * w_fsr + 0.3 * w_fsr;
            double hi = (j + 1) * w_fsr + 0.3 * w_fsr;
            int inside = 0;
            for (double r : roots) inside += (r > lo && r < hi) ? 1 : 0;
            CHECK(inside == 1);
        }
    }
    SECTION("weak coupling collapses onto the bare comb plus the atom") {
        const int m = 5;
        double da = 0.23 * w_fsr;
        double g = 1e-5 * w_fsr;
        auto roots = tc_multimode_eigenfrequencies(g, w_fsr, da, m);
        for (int j = -m; j <= m; ++j) {
            double pole = j * w_fsr + da;
            double best = 1e300;
            for (double r : roots) best = std::min(best, std::abs(r - pole));
            CHECK(best < 1e-6 * w_fsr);
        }
        double best0 = 1e300;
        for (double r : roots) best0 = std::min(best0, std::abs(r));
        CHECK(best0 < 1e-6 * w_fsr);  // the uncoupled collective atom at omega = 0
    }
    SECTION("M = 0 reduces to the Jaynes-Cummings doublet") {
        double g = 0.37 * w_fsr;
        auto roots = tc_multimode_eigenfrequencies(g, w_fsr, 0.0, 0);
        REQUIRE(roots.size() == 2);
        CHECK(roots[0] == Approx(-g).epsilon(1e-12));
        CHECK(roots[1] == Approx(+g).epsilon(1e-12));
    }
    SECTION("secular residual below 1e-8 at every root") {
        for (double g_over : {0.5, 3.0, 100.0}) {
            double g = g_over * w_fsr;
            const int m = 50;
            auto roots = tc_multimode_eigenfrequencies(g, w_fsr, 0.0, m);
            for (double r : roots) {
                double sum = 0.0;
                for (int j = -m; j <= m; ++j) sum += 1.0 / (r - j * w_fsr);
                CHECK(std::abs(g * g / r * sum - 1.0) < 1e-8);
            }
        }
    }
    SECTION("superstrong-coupling roots approach the half-shifted comb") {
        // finite truncation leaves a bias ~ (2|k|+1)/((M+1/2) pi^2) on interior roots
        double g = 100.0 * w_fsr;
        auto roots50 = tc_multimode_eigenfrequencies(g, w_fsr, 0.0, 50);
        auto near = [&](const std::vector<double>& roots, double target) {
            double best = 1e300, val = 0.0;
            for (double r : roots)
                if (std::abs(r - target) < best) {
                    best = std::abs(r - target);
                    val = r;
                }
            return val;
        };
        double dev5 = std::abs(near(roots50, 5.5 * w_fsr) / w_fsr - 5.5);
        CHECK(dev5 == Approx(0.0222).margin(0.002));
        auto roots112 = tc_multimode_eigenfrequencies(g, w_fsr, 0.0, 112);
        for (int k = -5; k <= 5; ++k) {
            double target = (k + 0.5) * w_fsr;
            CHECK(std::abs(near(roots112, target) - target) < 0.01 * w_fsr);
        }
    }
    SECTION("truncation-doubling diagnostic is tight in the conventional regime") {
        double shift = tc_multimode_truncation_shift(0.1 * w_fsr, w_fsr, 0.0, 50, 3.0 * w_fsr);
        CHECK(shift < 1e-4 * w_fsr);
        // and genuinely loose in the superstrong regime
        double shift_ss = tc_multimode_truncation_shift(100.0 * w_fsr, w_fsr, 0.0, 50, 3.0 * w_fsr);
        CHECK(shift_ss > 1e-4 * w_fsr);
    }
}

TEST_CASE("resonance maps") {
    const double gamma = rate_from_mhz(5.0);

    SECTION("single-mode TC branches split by exactly 2 g_N") {
        ResonatorConfig res = ResonatorConfig::make(200e6, 1.0, 1.0);
        std::vector<double> grid = {0.25, 1.0, 4.0};
        auto map = resonance_map(ResonanceModel::SingleModeTC, grid, gamma, res, 0.0, {});
        REQUIRE(map.branches.size() == 2);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            double g_n = std::sqrt(2.0 * grid[i] * gamma * res.nu_fsr);
            double split = map.branches[0].points[i].delta - map.branches[1].points[i].delta;
            CHECK(split == Approx(2.0 * g_n).epsilon(1e-12));
        }
        // sqrt(beta N) scaling: quadrupling beta*N doubles the splitting
        double s1 = map.branches[0].points[1].delta - map.branches[1].points[1].delta;
        double s4 = map.branches[0].points[2].delta - map.branches[1].points[2].delta;
        CHECK(s4 == Approx(2.0 * s1).epsilon(1e-12));
    }
    SECTION("cascaded central pair follows sqrt(g^2 - gamma^2) in the small-beta limit") {
        ResonatorConfig res = ResonatorConfig::make(200e6, 0.99, 0.99);
        std::vector<double> grid = {0.5, 1.0, 2.0, 4.0};
        ResonanceMapOptions opts;
        opts.beta_per_atom = 1e-3;
        opts.q_lo = 0;
        opts.q_hi = 0;
        opts.delta_lo = -0.45 * two_pi * res.nu_fsr;
        opts.delta_hi = 0.45 * two_pi * res.nu_fsr;
        auto map = resonance_map(ResonanceModel::Cascaded, grid, gamma, res, 0.0, opts);
        for (double bn : grid) {
            double g_n = std::sqrt(2.0 * bn * gamma * res.nu_fsr);
            double expect = std::sqrt(g_n * g_n - gamma * gamma);
            double hi = -1e300, lo = 1e300;
            for (const auto& br : map.branches)
                for (const auto& pt : br.points)
                    if (pt.beta_n == bn) {
                        hi = std::max(hi, pt.delta);
                        lo = std::min(lo, pt.delta);
                    }
            CHECK(hi == Approx(expect).epsilon(2e-3));
            CHECK(lo == Approx(-expect).epsilon(2e-3));
        }
    }
    SECTION("cascaded q = 0 roots match the JC doublet in the good-cavity regime") {
        // nu/(gamma/2pi) = 4000 >= 40, beta*N <= 0.05.  The residual mismatch
        // is the loss-induced pull-in ~ gamma^2/(2 g_N^2), which grows toward
        // 2% at beta*N = 0.02 and would exceed the bound below that.
        const double nu = 20e9;
        const double beta = 1e-5;
        for (double bn : {0.03, 0.05}) {
            for (double dca : {0.0, 0.5 * gamma, gamma}) {
                double g_n = std::sqrt(2.0 * bn * gamma * nu);
                auto jc = jc_resonances(g_n, dca);
                // probe-detuning positions of the two dressed resonances
                double d_hi = -dca - jc[1], d_lo = -dca - jc[0];
                auto roots = find_resonances_cascaded_scalar(
                    beta, bn / beta, gamma, nu, dca, 0, 0, -5.0 * std::abs(d_hi) - 5.0 * gamma,
                    5.0 * std::abs(d_hi) + 5.0 * gamma);
                double best_hi = 1e300, best_lo = 1e300;
                for (const auto& r : roots) {
                    best_hi = std::min(best_hi, std::abs(r.delta - d_hi));
                    best_lo = std::min(best_lo, std::abs(r.delta - d_lo));
                }
                CHECK(best_hi <= 0.02 * g_n);
                CHECK(best_lo <= 0.02 * g_n);
            }
        }
    }
    SECTION("equidistant continuation candidates split the branch with a warning") {
        std::vector<ResonanceBranch> branches;
        branches.push_back({ResonanceModel::Cascaded, 0, {{1.0, 0.0, 0.0}}});
        std::vector<std::string> warnings;
        int next_index = 10;
        // two free roots at almost the same distance from the branch tip
        std::vector<std::pair<int, double>> roots = {{0, 1.0e6}, {0, -1.1e6}};
        detail::continue_branches(branches, warnings, ResonanceModel::Cascaded, 2.0, roots,
                                  1e8, next_index);
        REQUIRE(warnings.size() == 1);
        CHECK(branches.size() == 3);               // the fork closed the old branch
        CHECK(branches[0].points.size() == 1);     // no continuation recorded
        // an unambiguous step continues the branch without noise
        branches.clear();
        warnings.clear();
        branches.push_back({ResonanceModel::Cascaded, 0, {{1.0, 0.0, 0.0}}});
        std::vector<std::pair<int, double>> clean = {{0, 1.0e6}, {0, -4.0e6}};
        detail::continue_branches(branches, warnings, ResonanceModel::Cascaded, 2.0, clean,
                                  1e8, next_index);
        CHECK(warnings.empty());
        REQUIRE(branches.size() == 2);
        CHECK(branches[0].points.size() == 2);
    }
    SECTION("contrast column is populated on request") {
        ResonatorConfig res = ResonatorConfig::make(7.1e6, 0.86, 0.97);
        const double gamma_exp = rate_from_mhz(2.61);
        std::vector<double> grid = {12.4};
        ResonanceMapOptions opts;
        opts.beta_per_atom = 0.005;
        opts.q_lo = -3;
        opts.q_hi = 3;
        opts.delta_lo = -6.0 * gamma_exp;
        opts.delta_hi = 6.0 * gamma_exp;
        opts.with_contrast = true;
        auto map = resonance_map(ResonanceModel::Cascaded, grid, gamma_exp, res,
                                 rate_from_mhz(1.12), opts);
        int with_value = 0;
        for (const auto& br : map.branches)
            for (const auto& pt : br.points)
                if (std::isfinite(pt.contrast)) {
                    ++with_value;
                    CHECK(pt.contrast >= 0.0);
                    CHECK(pt.contrast <= 1.0);
                }
        CHECK(with_value >= 7);
    }
    SECTION("branches are continuous under the continuation threshold") {
        ResonatorConfig res = ResonatorConfig::make(10e6, 0.99, 0.99);
        std::vector<double> grid;
        for (int i = 0; i <= 20; ++i) grid.push_back(0.5 + i * 0.5);
        ResonanceMapOptions opts;
        auto map = resonance_map(ResonanceModel::MultimodeTC, grid, gamma, res, 0.0, opts);
        double threshold = 0.25 * two_pi * res.nu_fsr;
        for (const auto& br : map.branches) {
            for (std::size_t i = 1; i < br.points.size(); ++i)
                CHECK(std::abs(br.points[i].delta - br.points[i - 1].delta) < threshold);
        }
    }
}

TEST_CASE("resonance contrast") {
    const double gamma = rate_from_mhz(2.61);

    SECTION("critically coupled empty cavity has unit contrast") {
        ResonatorConfig res = ResonatorConfig::make(7.1e6, 0.9, 0.9);
        double w = two_pi * res.nu_fsr;
        double c = resonance_contrast_scalar(0.0, 0.0, gamma, res, 0.0, 0.0, 0.5 * w, -w, w);
        CHECK(c == Approx(1.0).epsilon(1e-6));
    }
    SECTION("baseline outside the scan window is an error") {
        ResonatorConfig res = ResonatorConfig::make(7.1e6, 0.9, 0.9);
        double w = two_pi * res.nu_fsr;
        CHECK_THROWS_AS(
            resonance_contrast_scalar(0.0, 0.0, gamma, res, 0.0, 0.0, 2.0 * w, -w, w),
            std::domain_error);
    }
    SECTION("main split resonances dominate the inner ones at experimental parameters") {
        ResonatorConfig res = ResonatorConfig::make(7.1e6, 0.86, 0.97);
        const double beta = 0.005, n_atoms = 2480;  // beta*N = 12.4
        const double dca = rate_from_mhz(1.12);
        double window = 6.0 * gamma;
        auto roots = find_resonances_cascaded_scalar(beta, n_atoms, gamma, 7.1e6, dca, -3, 3,
                                                     -window, window);
        REQUIRE(roots.size() == 9);
        auto contrasts = contrasts_for_roots(beta, n_atoms, gamma, res, dca, roots, -window, window);
        // main pair = outermost members of the q = 0 family
        double main_lo = 0.0, main_hi = 0.0;
        std::vector<double> inner;
        double lo_delta = 0.0, hi_delta = 0.0;
        for (std::size_t i = 0; i < roots.size(); ++i) {
            if (roots[i].q != 0) continue;
            if (roots[i].delta < lo_delta) {
                lo_delta = roots[i].delta;
                main_lo = contrasts[i];
            }
            if (roots[i].delta > hi_delta) {
                hi_delta = roots[i].delta;
                main_hi = contrasts[i];
            }
        }
        for (std::size_t i = 0; i < roots.size(); ++i)
            if (roots[i].delta > lo_delta && roots[i].delta < hi_delta)
                inner.push_back(contrasts[i]);
        REQUIRE(inner.size() == 5);
        // measured: main pair {2.80%, 1.58%}, strongest inner 0.34%
        double inner_max = *std::max_element(inner.begin(), inner.end());
        CHECK(std::min(main_lo, main_hi) > 4.0 * inner_max);
        CHECK(std::max(main_lo, main_hi) > 8.0 * inner_max);
    }
}
