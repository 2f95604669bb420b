// Resonance positions vs collective coupling for the three models, in the
// strong-coupling (nu_FSR = 200 MHz) and superstrong (nu_FSR = 10 MHz)
// regimes.  Writes one CSV per model/regime combination.

#include <cstdio>
#include <fstream>
#include <vector>

#include "cqed/cqed.hpp"
#include "cqed/io.hpp"

using namespace cqed;

int main() {
    const double gamma = rate_from_mhz(5.0);
    std::vector<double> beta_n_grid;
    for (int i = 1; i <= 48; ++i) beta_n_grid.push_back(0.25 * i);

    struct Case {
        const char* name;
        ResonanceModel model;
        double nu_fsr;
    };
    const Case cases[] = {
        {"map_tc_strong.csv", ResonanceModel::SingleModeTC, 200e6},
        {"map_tcmm_superstrong.csv", ResonanceModel::MultimodeTC, 10e6},
        {"map_cascaded_strong.csv", ResonanceModel::Cascaded, 200e6},
        {"map_cascaded_superstrong.csv", ResonanceModel::Cascaded, 10e6},
    };

    for (const Case& c : cases) {
        auto res = ResonatorConfig::make(c.nu_fsr, 0.99, 0.99);
        ResonanceMapOptions opts;
        opts.beta_per_atom = 0.005;
        opts.delta_lo = -2.0 * two_pi * c.nu_fsr;
        opts.delta_hi = 2.0 * two_pi * c.nu_fsr;
        if (c.nu_fsr > 100e6) {
            opts.delta_lo = -0.75 * two_pi * c.nu_fsr;
            opts.delta_hi = 0.75 * two_pi * c.nu_fsr;
        }
        auto map = resonance_map(c.model, beta_n_grid, gamma, res, 0.0, opts);
        std::ofstream out(c.name);
        out << io::resonance_map_csv(map);
        std::printf("%-28s %3zu branches, %2zu warnings\n", c.name, map.branches.size(),
                    map.warnings.size());
    }
    return 0;
}
