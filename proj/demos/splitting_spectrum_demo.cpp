// Reflection spectrum of an optically dense ensemble in a low-finesse ring
// resonator, at the point where the central splitting exceeds two free
// spectral ranges.  Prints the dip positions and writes the full scan.

#include <cstdio>
#include <fstream>
#include <vector>

#include "cqed/cqed.hpp"
#include "cqed/io.hpp"

using namespace cqed;

int main() {
    const double gamma = rate_from_mhz(2.61);
    auto ens = EmitterEnsemble::homogeneous(2480, 0.005, gamma);  // beta*N = 12.4
    auto res = ResonatorConfig::make(7.1e6, 0.86, 0.97);
    const double delta_ca = rate_from_mhz(1.12);

    std::vector<double> grid;
    const int n = 6001;
    for (int i = 0; i < n; ++i)
        grid.push_back((-3.0 + 6.0 * i / (n - 1.0)) * two_pi * res.nu_fsr);

    auto spec = spectrum_scan(ens, res, delta_ca, grid, SpectrumModel::Cascaded);
    std::ofstream out("splitting_spectrum.csv");
    out << io::spectrum_csv(spec);

    std::printf("g_N/2pi = %.3f MHz, beta*N = %.2f, OD = %.1f\n",
                rate_to_mhz(collective_g(ens, res)), ens.beta_n_product(),
                optical_depth(ens.beta_mean, ens.n_atoms));

    auto roots = find_resonances_cascaded(ens, res, delta_ca, -3, 3, grid.front(), grid.back());
    auto contrasts = contrasts_for_roots(ens.beta_mean, ens.n_atoms, gamma, res, delta_ca, roots,
                                         grid.front(), grid.back());
    std::printf("%8s %14s %10s\n", "q", "delta/2pi MHz", "contrast");
    for (std::size_t i = 0; i < roots.size(); ++i)
        std::printf("%8d %14.4f %9.4f%%\n", roots[i].q, rate_to_mhz(roots[i].delta),
                    100.0 * contrasts[i]);
    return 0;
}
