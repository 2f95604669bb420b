// cqed command-line tool: reproducible spectrum/resonance/validity/fit runs
// that emit CSV/JSON artifacts plus a run manifest per invocation.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cqed/cqed.hpp"
#include "cqed/io.hpp"

namespace fs = std::filesystem;
using cqed::io::json;

namespace {

struct CommonArgs {
    std::string out_dir = ".";
    std::string prefix;
    std::string config_path;
    std::string format = "csv";
    std::uint64_t seed = 0;
    std::vector<std::string> warnings;
};

struct PhysicsArgs {
    // frequency flags are MHz; rates are the /2pi values, nu_fsr is plain
    std::optional<double> gamma_mhz;
    std::optional<double> fsr_mhz;
    std::optional<double> delta_ca_mhz;
    std::optional<double> beta;
    std::optional<double> beta_n;
    std::optional<int> n_atoms;
    std::optional<double> t_rt;
    std::optional<double> r;
    std::optional<double> kappa0_mhz;
    std::optional<double> kappa_ext_mhz;
    std::optional<double> g_mhz;
    std::string geometry = "ring";
};

constexpr double kDefaultBeta = 0.005;
// bare-cavity characterization of the low-finesse ring platform; a lossless
// default (t_rt = r = 1) would make every cascaded reflection identically 1
constexpr double kDefaultTrt = 0.86;
constexpr double kDefaultR = 0.97;

void add_physics_flags(CLI::App* cmd, PhysicsArgs& p) {
    cmd->add_option("--gamma-mhz", p.gamma_mhz, "total atomic decay rate gamma/2pi in MHz");
    cmd->add_option("--fsr-mhz", p.fsr_mhz, "free spectral range nu_FSR in MHz");
    cmd->add_option("--delta-ca-mhz", p.delta_ca_mhz, "cavity-atom detuning Delta_ca/2pi in MHz");
    cmd->add_option("--beta", p.beta, "per-atom beta factor");
    cmd->add_option("--beta-n", p.beta_n, "collective beta*N product");
    cmd->add_option("--n", p.n_atoms, "atom count");
    cmd->add_option("--t-rt", p.t_rt, "roundtrip amplitude transmission (default 0.86)");
    cmd->add_option("--r", p.r, "mirror amplitude reflection (default 0.97)");
    cmd->add_option("--kappa0-mhz", p.kappa0_mhz, "intrinsic loss rate kappa_0/2pi in MHz");
    cmd->add_option("--kappa-ext-mhz", p.kappa_ext_mhz, "in-coupling rate kappa_ext/2pi in MHz");
    cmd->add_option("--g-mhz,--g", p.g_mhz, "coupling strength g/2pi in MHz (single-mode models)");
    cmd->add_option("--geometry", p.geometry, "ring | fabry_perot");
}

struct ResolvedPhysics {
    cqed::EmitterEnsemble ensemble;
    cqed::ResonatorConfig resonator;
    double delta_ca = 0.0;
};

// config file first, explicit flags win; every override leaves a warning
ResolvedPhysics resolve_physics(const CommonArgs& common, PhysicsArgs& p,
                                std::vector<std::string>& warnings,
                                cqed::CouplingRegime regime = cqed::CouplingRegime::TimedDicke) {
    double gamma = 0.0, nu_fsr = 0.0, delta_ca = 0.0;
    double t_rt = kDefaultTrt, r = kDefaultR;
    double beta = kDefaultBeta;
    double n_atoms_real = 0.0;
    cqed::Geometry geometry = cqed::Geometry::Ring;
    bool have_gamma = false, have_fsr = false;

    if (!common.config_path.empty()) {
        auto pf = cqed::io::load_parameter_file(common.config_path);
        gamma = pf.ensemble.gamma;
        nu_fsr = pf.resonator.nu_fsr;
        delta_ca = pf.delta_ca;
        t_rt = pf.resonator.t_rt;
        r = pf.resonator.r;
        beta = pf.ensemble.beta_mean > 0.0 ? pf.ensemble.beta_mean : kDefaultBeta;
        n_atoms_real = pf.ensemble.n_atoms;
        geometry = pf.resonator.geometry;
        regime = pf.ensemble.regime == cqed::CouplingRegime::Dicke ? pf.ensemble.regime : regime;
        have_gamma = have_fsr = true;
    }

    auto override_warn = [&](const char* flag) {
        if (!common.config_path.empty())
            warnings.push_back(std::string(flag) + " overrides the config file value");
    };

    if (p.gamma_mhz) {
        gamma = cqed::rate_from_mhz(*p.gamma_mhz);
        override_warn("--gamma-mhz");
        have_gamma = true;
    }
    if (p.fsr_mhz) {
        nu_fsr = cqed::freq_from_mhz(*p.fsr_mhz);
        override_warn("--fsr-mhz");
        have_fsr = true;
    }
    if (p.delta_ca_mhz) {
        delta_ca = cqed::rate_from_mhz(*p.delta_ca_mhz);
        override_warn("--delta-ca-mhz");
    }
    if (!have_gamma || !have_fsr)
        throw std::invalid_argument("gamma and nu_FSR are required (flags or --config)");
    if (p.geometry == "fabry_perot")
        geometry = cqed::Geometry::FabryPerot;
    else if (p.geometry != "ring")
        throw std::invalid_argument("unknown --geometry '" + p.geometry + "'");

    if (p.kappa0_mhz || p.kappa_ext_mhz) {
        if (p.t_rt || p.r)
            throw std::invalid_argument("give either (--t-rt, --r) or kappa rates, not both");
        auto res = cqed::ResonatorConfig::from_rates(
            nu_fsr, cqed::rate_from_mhz(p.kappa0_mhz.value_or(0.0)),
            cqed::rate_from_mhz(p.kappa_ext_mhz.value_or(0.0)), geometry);
        t_rt = res.t_rt;
        r = res.r;
        override_warn("--kappa0-mhz/--kappa-ext-mhz");
    } else {
        if (p.t_rt) {
            t_rt = *p.t_rt;
            override_warn("--t-rt");
        }
        if (p.r) {
            r = *p.r;
            override_warn("--r");
        }
    }

    if (p.beta) {
        beta = *p.beta;
        override_warn("--beta");
    }
    if (p.g_mhz) {
        // single-mode coupling specified directly; invert to beta*N
        double g = cqed::rate_from_mhz(*p.g_mhz);
        double bn = g * g / (2.0 * gamma * nu_fsr);
        p.beta_n = bn;
    }
    if (p.beta_n && p.n_atoms)
        throw std::invalid_argument("--beta-n and --n are mutually exclusive");
    if (p.beta_n) {
        if (*p.beta_n < 0.0) throw std::invalid_argument("--beta-n must be >= 0");
        if (*p.beta_n == 0.0) {
            n_atoms_real = 0.0;
            beta = 0.0;
        } else {
            n_atoms_real = std::max(1.0, std::round(*p.beta_n / beta));
            beta = *p.beta_n / n_atoms_real;  // preserve beta*N exactly
        }
    } else if (p.n_atoms) {
        n_atoms_real = *p.n_atoms;
        override_warn("--n");
    }

    ResolvedPhysics out;
    out.ensemble = cqed::EmitterEnsemble::homogeneous(static_cast<int>(n_atoms_real), beta, gamma,
                                                      regime);
    out.resonator = cqed::ResonatorConfig::make(nu_fsr, t_rt, r, geometry);
    out.delta_ca = delta_ca;
    return out;
}

std::string out_path(const CommonArgs& common, const std::string& name) {
    fs::create_directories(common.out_dir);
    return (fs::path(common.out_dir) / name).string();
}

void write_manifest(const CommonArgs& common, const std::string& subcommand, json parameters,
                    const std::vector<std::string>& inputs, const std::vector<std::string>& outputs,
                    const std::vector<std::string>& warnings, double wall_time_s) {
    cqed::io::RunManifest manifest;
    manifest.subcommand = subcommand;
    manifest.parameters = std::move(parameters);
    manifest.input_files = inputs;
    manifest.output_files = outputs;
    manifest.warnings = warnings;
    manifest.tool_version = cqed::version;
    manifest.wall_time_s = wall_time_s;
    std::string path = out_path(common, common.prefix + "_manifest.json");
    cqed::io::write_text_file(path, cqed::io::to_json(manifest).dump(2) + "\n");
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

class Stopwatch {
  public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// ---------------------------------------------------------------------------
// spectrum
// ---------------------------------------------------------------------------

int run_spectrum(const CommonArgs& common, PhysicsArgs& phys, const std::string& model,
                 double span_fsr, int points) {
    Stopwatch watch;
    std::vector<std::string> warnings;
    cqed::CouplingRegime regime = (model == "dicke") ? cqed::CouplingRegime::Dicke
                                                     : cqed::CouplingRegime::TimedDicke;
    auto resolved = resolve_physics(common, phys, warnings, regime);

    cqed::SpectrumModel tag = cqed::SpectrumModel::Cascaded;
    if (model == "tc")
        tag = cqed::SpectrumModel::SingleModeTC;
    else if (model == "waveguide")
        tag = cqed::SpectrumModel::WaveguideLimit;
    else if (model != "cascaded" && model != "dicke")
        throw std::invalid_argument("unknown --model '" + model +
                                    "' (expected cascaded|tc|waveguide|dicke)");

    if (points < 2) throw std::invalid_argument("--points must be at least 2");
    double half = span_fsr * cqed::two_pi * resolved.resonator.nu_fsr;
    std::vector<double> grid(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
        grid[static_cast<std::size_t>(i)] = -half + 2.0 * half * i / (points - 1.0);

    auto spec = cqed::spectrum_scan(resolved.ensemble, resolved.resonator, resolved.delta_ca, grid,
                                    tag);

    std::string csv_path = out_path(common, common.prefix + ".csv");
    std::string params_path = out_path(common, common.prefix + "_params.json");
    cqed::io::write_text_file(csv_path, cqed::io::spectrum_csv(spec));
    cqed::io::write_text_file(params_path, cqed::io::to_json(spec.params).dump(2) + "\n");

    json params = cqed::io::to_json(spec.params);
    params["span_fsr"] = span_fsr;
    params["points"] = points;
    params["cli_model"] = model;
    write_manifest(common, "spectrum", params,
                   common.config_path.empty() ? std::vector<std::string>{}
                                              : std::vector<std::string>{common.config_path},
                   {csv_path, params_path}, warnings, watch.seconds());
    return 0;
}

// ---------------------------------------------------------------------------
// resonances
// ---------------------------------------------------------------------------

int run_resonances(const CommonArgs& common, PhysicsArgs& phys, std::string model,
                   const std::string& preset, double bn_min, double bn_max, int bn_steps,
                   double window_fsr, int q_min, int q_max, int m_half, bool with_contrast) {
    Stopwatch watch;
    std::vector<std::string> warnings;

    if (!preset.empty()) {
        if (preset == "tc-strong") {
            model = "tc";
            phys.fsr_mhz = phys.fsr_mhz.value_or(200.0);
        } else if (preset == "tcmm-superstrong") {
            model = "tcmm";
            phys.fsr_mhz = phys.fsr_mhz.value_or(10.0);
        } else if (preset == "cascaded-strong") {
            model = "cascaded";
            phys.fsr_mhz = phys.fsr_mhz.value_or(200.0);
        } else if (preset == "cascaded-superstrong") {
            model = "cascaded";
            phys.fsr_mhz = phys.fsr_mhz.value_or(10.0);
        } else {
            throw std::invalid_argument("unknown --preset '" + preset + "'");
        }
        phys.gamma_mhz = phys.gamma_mhz.value_or(5.0);
    }

    cqed::ResonanceModel tag;
    if (model == "cascaded")
        tag = cqed::ResonanceModel::Cascaded;
    else if (model == "tc")
        tag = cqed::ResonanceModel::SingleModeTC;
    else if (model == "tcmm")
        tag = cqed::ResonanceModel::MultimodeTC;
    else
        throw std::invalid_argument("unknown --model '" + model + "' (expected cascaded|tc|tcmm)");

    auto resolved = resolve_physics(common, phys, warnings);

    std::vector<double> grid;
    if (bn_steps < 0) throw std::invalid_argument("--beta-n-steps must be >= 0");
    for (int i = 0; i < bn_steps; ++i)
        grid.push_back(bn_steps == 1 ? bn_min
                                     : bn_min + (bn_max - bn_min) * i / (bn_steps - 1.0));

    cqed::ResonanceMapOptions opts;
    opts.beta_per_atom = resolved.ensemble.beta_mean > 0.0 ? resolved.ensemble.beta_mean
                                                           : kDefaultBeta;
    opts.q_lo = q_min;
    opts.q_hi = q_max;
    opts.m_half = m_half;
    double w = window_fsr * cqed::two_pi * resolved.resonator.nu_fsr;
    opts.delta_lo = -w;
    opts.delta_hi = w;
    opts.with_contrast = with_contrast;

    auto map = cqed::resonance_map(tag, grid, resolved.ensemble.gamma, resolved.resonator,
                                   resolved.delta_ca, opts);
    for (const auto& warning : map.warnings) warnings.push_back(warning);

    std::string csv_path = out_path(common, common.prefix + ".csv");
    cqed::io::write_text_file(csv_path, cqed::io::resonance_map_csv(map));

    json params;
    params["model"] = model;
    params["preset"] = preset;
    params["gamma_hz_over_2pi"] = resolved.ensemble.gamma / cqed::two_pi;
    params["nu_fsr_hz"] = resolved.resonator.nu_fsr;
    params["delta_ca_hz_over_2pi"] = resolved.delta_ca / cqed::two_pi;
    params["beta_per_atom"] = opts.beta_per_atom;
    params["beta_n_grid"] = grid;
    params["window_fsr"] = window_fsr;
    params["q_min"] = q_min;
    params["q_max"] = q_max;
    params["m_half"] = m_half;
    params["t_rt"] = resolved.resonator.t_rt;
    params["r"] = resolved.resonator.r;
    params["contrast_baseline"] = "half the local root spacing on each side";
    write_manifest(common, "resonances", params,
                   common.config_path.empty() ? std::vector<std::string>{}
                                              : std::vector<std::string>{common.config_path},
                   {csv_path}, warnings, watch.seconds());
    return 0;
}

// ---------------------------------------------------------------------------
// validity
// ---------------------------------------------------------------------------

struct ValidityRow {
    std::string label;
    double g_mhz, gamma_mhz, fsr_mhz;
};

int run_validity(const CommonArgs& common, PhysicsArgs& phys, const std::string& preset,
                 double strictness) {
    Stopwatch watch;
    std::vector<std::string> warnings;
    std::vector<ValidityRow> rows;

    if (preset == "table1") {
        rows = {{"lee_2014", 44.9, 3.0, 1400.0},      {"johnson_2019", 9.2, 2.61, 7.1},
                {"brennecke_2007", 3500.0, 3.0, 850e3}, {"vaidya_2018", 464.9, 3.0, 15e3},
                {"jiang_2019", 313.0, 2.87, 5.3e3},   {"colombe_2007", 12e3, 3.0, 3.9e6}};
    } else if (!preset.empty()) {
        throw std::invalid_argument("unknown --preset '" + preset + "'");
    } else if (phys.g_mhz) {
        if (!phys.gamma_mhz || !phys.fsr_mhz)
            throw std::invalid_argument("custom validity rows need --g-mhz, --gamma-mhz, --fsr-mhz");
        rows = {{"custom", *phys.g_mhz, *phys.gamma_mhz, *phys.fsr_mhz}};
    }

    json out = json::array();
    std::ostringstream csv;
    csv << "label,g_n_mhz,gamma_mhz,nu_fsr_mhz,ratio_g_fsr,ratio_loss_fsr,beta_n,dicke_bound,"
           "optical_depth,cond_g_fsr,cond_loss_fsr\n";

    auto emit = [&](const std::string& label, const cqed::ValidityReport& rep, double g_mhz,
                    double gamma_mhz, double fsr_mhz) {
        json j;
        j["label"] = label;
        j["g_n_mhz"] = g_mhz;
        j["gamma_mhz"] = gamma_mhz;
        j["nu_fsr_mhz"] = fsr_mhz;
        j["ratio_g_fsr"] = rep.ratio_g_fsr;
        j["ratio_loss_fsr"] = rep.ratio_loss_fsr;
        j["beta_n"] = rep.beta_n_product;
        j["dicke_bound"] = rep.dicke_bound;
        j["optical_depth"] = rep.optical_depth;
        j["cond_g_fsr"] = cqed::to_string(rep.cond_g_fsr);
        j["cond_loss_fsr"] = cqed::to_string(rep.cond_loss_fsr);
        j["strictness_factor"] = rep.strictness_factor;
        out.push_back(j);
        csv << label << ',' << cqed::io::format_double(g_mhz) << ','
            << cqed::io::format_double(gamma_mhz) << ',' << cqed::io::format_double(fsr_mhz) << ','
            << cqed::io::format_double(rep.ratio_g_fsr) << ','
            << cqed::io::format_double(rep.ratio_loss_fsr) << ','
            << cqed::io::format_double(rep.beta_n_product) << ','
            << cqed::io::format_double(rep.dicke_bound) << ','
            << cqed::io::format_double(rep.optical_depth) << ','
            << cqed::to_string(rep.cond_g_fsr) << ',' << cqed::to_string(rep.cond_loss_fsr) << '\n';
    };

    if (!rows.empty()) {
        for (const auto& row : rows) {
            auto rep = cqed::validity_report_from_rates(
                cqed::rate_from_mhz(row.g_mhz), cqed::rate_from_mhz(row.gamma_mhz),
                cqed::rate_from_mhz(row.gamma_mhz), cqed::freq_from_mhz(row.fsr_mhz),
                std::nan(""), strictness);
            emit(row.label, rep, row.g_mhz, row.gamma_mhz, row.fsr_mhz);
        }
    } else {
        auto resolved = resolve_physics(common, phys, warnings);
        auto rep = cqed::validity_report(resolved.ensemble, resolved.resonator, strictness);
        double g_n = cqed::collective_g(resolved.ensemble, resolved.resonator);
        emit("ensemble", rep, cqed::rate_to_mhz(g_n),
             cqed::rate_to_mhz(resolved.ensemble.gamma),
             cqed::freq_to_mhz(resolved.resonator.nu_fsr));
    }

    std::vector<std::string> outputs;
    if (common.format == "json") {
        std::string path = out_path(common, common.prefix + ".json");
        cqed::io::write_text_file(path, out.dump(2) + "\n");
        outputs.push_back(path);
    } else {
        std::string path = out_path(common, common.prefix + ".csv");
        cqed::io::write_text_file(path, csv.str());
        outputs.push_back(path);
    }
    std::cout << csv.str();

    json params;
    params["preset"] = preset;
    params["strictness_factor"] = strictness;
    write_manifest(common, "validity", params, {}, outputs, warnings, watch.seconds());
    return 0;
}

// ---------------------------------------------------------------------------
// convert
// ---------------------------------------------------------------------------

int run_convert(const CommonArgs& common, PhysicsArgs& phys) {
    Stopwatch watch;
    std::vector<std::string> warnings;
    if (!phys.gamma_mhz || !phys.fsr_mhz)
        throw std::invalid_argument("convert needs --gamma-mhz and --fsr-mhz");
    double gamma = cqed::rate_from_mhz(*phys.gamma_mhz);
    double nu = cqed::freq_from_mhz(*phys.fsr_mhz);
    cqed::Geometry geometry =
        phys.geometry == "fabry_perot" ? cqed::Geometry::FabryPerot : cqed::Geometry::Ring;

    json j;
    j["gamma_hz_over_2pi"] = gamma / cqed::two_pi;
    j["nu_fsr_hz"] = nu;
    j["geometry"] = cqed::to_string(geometry);
    j["g_max_mhz"] = cqed::rate_to_mhz(cqed::g_max(gamma, nu));

    double beta = 0.0;
    if (phys.beta) {
        beta = *phys.beta;
        double g1 = cqed::g_from_beta(beta, gamma, nu, geometry);
        j["beta"] = beta;
        j["g1_mhz"] = cqed::rate_to_mhz(g1);
    } else if (phys.g_mhz) {
        double g1 = cqed::rate_from_mhz(*phys.g_mhz);
        beta = cqed::beta_from_g(g1, gamma, nu, geometry);
        j["beta"] = beta;
        j["g1_mhz"] = *phys.g_mhz;
    } else {
        throw std::invalid_argument("convert needs --beta or --g-mhz");
    }
    j["gamma_l_hz_over_2pi"] = (1.0 - beta) * gamma / cqed::two_pi;

    if (phys.n_atoms) {
        auto ens = cqed::EmitterEnsemble::homogeneous(*phys.n_atoms, beta, gamma);
        j["n_atoms"] = *phys.n_atoms;
        j["beta_n"] = ens.beta_n_product();
        j["optical_depth"] = cqed::optical_depth(beta, *phys.n_atoms);
        j["g_n_mhz"] = cqed::rate_to_mhz(
            std::sqrt(2.0 * ens.beta_n_product() * gamma * nu) *
            (geometry == cqed::Geometry::FabryPerot ? std::sqrt(2.0) : 1.0));
    }
    if (phys.t_rt || phys.r || phys.kappa0_mhz || phys.kappa_ext_mhz) {
        cqed::ResonatorConfig res =
            (phys.kappa0_mhz || phys.kappa_ext_mhz)
                ? cqed::ResonatorConfig::from_rates(
                      nu, cqed::rate_from_mhz(phys.kappa0_mhz.value_or(0.0)),
                      cqed::rate_from_mhz(phys.kappa_ext_mhz.value_or(0.0)), geometry)
                : cqed::ResonatorConfig::make(nu, phys.t_rt.value_or(1.0), phys.r.value_or(1.0),
                                              geometry);
        j["t_rt"] = res.t_rt;
        j["r"] = res.r;
        j["kappa0_hz_over_2pi"] = res.kappa_0() / cqed::two_pi;
        j["kappa_ext_hz_over_2pi"] = res.kappa_ext() / cqed::two_pi;
        double gamma_l = (1.0 - beta) * gamma;
        if (res.kappa_0() > 0.0 && gamma_l > 0.0) {
            double g1 = cqed::g_from_beta(beta, gamma, nu, geometry);
            j["cooperativity"] = cqed::cooperativity(g1, res.kappa_0(), gamma_l);
        }
    }

    std::string path = out_path(common, common.prefix + ".json");
    cqed::io::write_text_file(path, j.dump(2) + "\n");
    std::cout << j.dump(2) << "\n";
    write_manifest(common, "convert", j, {}, {path}, warnings, watch.seconds());
    return 0;
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

int run_fit(const CommonArgs& common, PhysicsArgs& phys, const std::string& data_path,
            std::vector<std::string> free_names, double init_beta_n, double init_delta_ca_mhz,
            double init_amplitude, double init_offset_hz, int restarts, int max_evals,
            bool no_normalize) {
    Stopwatch watch;
    std::vector<std::string> warnings;
    auto resolved = resolve_physics(common, phys, warnings);

    std::ifstream in(data_path);
    if (!in) throw std::invalid_argument("cannot open data file '" + data_path + "'");
    auto data = cqed::io::parse_measured_csv(in);
    if (!no_normalize) data = cqed::normalize_spectrum(data);

    cqed::FitSetup setup;
    setup.gamma = resolved.ensemble.gamma;
    setup.beta_per_atom = resolved.ensemble.beta_mean > 0.0 ? resolved.ensemble.beta_mean
                                                            : kDefaultBeta;
    setup.nu_fsr = resolved.resonator.nu_fsr;
    setup.geometry = resolved.resonator.geometry;
    setup.initial.beta_n = init_beta_n;
    setup.initial.delta_ca = cqed::rate_from_mhz(init_delta_ca_mhz);
    setup.initial.amplitude_scale = init_amplitude;
    setup.initial.frequency_offset = init_offset_hz;
    setup.initial.t_rt = resolved.resonator.t_rt;
    setup.initial.r = resolved.resonator.r;
    setup.restarts = restarts;
    setup.max_evaluations = max_evals;
    setup.seed = common.seed;

    if (!free_names.empty()) {
        setup.free_params.clear();
        for (const auto& name : free_names) {
            if (name == "beta_n")
                setup.free_params.push_back(cqed::FitParam::BetaN);
            else if (name == "delta_ca")
                setup.free_params.push_back(cqed::FitParam::DeltaCa);
            else if (name == "amplitude")
                setup.free_params.push_back(cqed::FitParam::Amplitude);
            else if (name == "offset")
                setup.free_params.push_back(cqed::FitParam::FrequencyOffset);
            else if (name == "t_rt")
                setup.free_params.push_back(cqed::FitParam::Trt);
            else if (name == "r")
                setup.free_params.push_back(cqed::FitParam::R);
            else
                throw std::invalid_argument(
                    "unknown --free parameter '" + name +
                    "' (expected beta_n|delta_ca|amplitude|offset|t_rt|r)");
        }
    }

    auto result = cqed::fit_spectrum(data, setup);

    std::string fit_path = out_path(common, common.prefix + "_fit.json");
    cqed::io::write_text_file(fit_path, cqed::io::fit_result_json(result).dump(2) + "\n");

    // model curve on the input grid
    auto curve = cqed::fit_model_curve(data, setup, result.estimates);
    std::ostringstream model_csv;
    model_csv << "probe_detuning_hz,model\n";
    for (std::size_t i = 0; i < curve.size(); ++i)
        model_csv << cqed::io::format_double(data.detuning_hz[i]) << ','
                  << cqed::io::format_double(curve[i]) << '\n';
    std::string model_path = out_path(common, common.prefix + "_model.csv");
    cqed::io::write_text_file(model_path, model_csv.str());

    json params;
    params["gamma_hz_over_2pi"] = setup.gamma / cqed::two_pi;
    params["nu_fsr_hz"] = setup.nu_fsr;
    params["beta_per_atom"] = setup.beta_per_atom;
    params["t_rt"] = setup.initial.t_rt;
    params["r"] = setup.initial.r;
    params["normalized"] = !no_normalize;
    params["normalization_method"] = data.normalization_method;
    params["restarts"] = restarts;
    params["max_evaluations"] = max_evals;
    params["seed"] = common.seed;
    write_manifest(common, "fit", params, {data_path}, {fit_path, model_path}, warnings,
                   watch.seconds());
    std::cout << cqed::io::fit_result_json(result).dump(2) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// oracle-check
// ---------------------------------------------------------------------------

int run_oracle_check(const CommonArgs& common, int instances, int n_max) {
    Stopwatch watch;
    auto rep = cqed::oracle_check(instances, n_max, common.seed);

    json j;
    j["instances"] = rep.instances;
    j["max_abs_error"] = rep.max_abs_error;
    j["worst_case_parameters"] = {{"n_atoms", rep.worst_n_atoms},
                                  {"r", rep.worst_r},
                                  {"t_rt", rep.worst_t_rt},
                                  {"delta_a_hz_over_2pi", rep.worst_delta_a / cqed::two_pi},
                                  {"delta_ca_hz_over_2pi", rep.worst_delta_ca / cqed::two_pi},
                                  {"beta_list", rep.worst_betas}};
    j["passed"] = rep.max_abs_error < 1e-9;
    j["seed"] = common.seed;

    std::string path = out_path(common, common.prefix + ".json");
    cqed::io::write_text_file(path, j.dump(2) + "\n");
    std::cout << j.dump(2) << "\n";

    json params;
    params["instances"] = instances;
    params["n_max"] = n_max;
    params["seed"] = common.seed;
    write_manifest(common, "oracle-check", params, {}, {path}, {}, watch.seconds());
    return rep.max_abs_error < 1e-9 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cqed: spectra and resonances of atomic ensembles coupled to optical resonators"};
    app.set_version_flag("--version", std::string(cqed::version));
    app.require_subcommand(1);

    CommonArgs common;
    app.add_option("--out-dir", common.out_dir, "output directory")->capture_default_str();
    app.add_option("--prefix", common.prefix, "output file prefix (default: subcommand name)");
    app.add_option("--seed", common.seed, "seed for randomized subcommands")->capture_default_str();
    app.add_option("--format", common.format, "csv | json (validity output)")
        ->capture_default_str();
    app.add_option("--config", common.config_path, "parameter file (JSON)");

    // spectrum
    auto* spectrum_cmd = app.add_subcommand("spectrum", "scan a reflection spectrum");
    PhysicsArgs spectrum_phys;
    add_physics_flags(spectrum_cmd, spectrum_phys);
    std::string spectrum_model = "cascaded";
    double span_fsr = 3.0;
    int points = 2001;
    spectrum_cmd->add_option("--model", spectrum_model, "cascaded | tc | waveguide | dicke")
        ->capture_default_str();
    spectrum_cmd->add_option("--span-fsr", span_fsr, "half-span of the scan in FSR units")
        ->capture_default_str();
    spectrum_cmd->add_option("--points", points, "grid points")->capture_default_str();

    // resonances
    auto* res_cmd = app.add_subcommand("resonances", "resonance positions vs beta*N");
    PhysicsArgs res_phys;
    add_physics_flags(res_cmd, res_phys);
    std::string res_model = "cascaded", res_preset;
    double bn_min = 0.1, bn_max = 12.0;
    int bn_steps = 60, q_min = -4, q_max = 4, m_half = 50;
    double window_fsr = 1.5;
    bool with_contrast = false;
    res_cmd->add_option("--model", res_model, "cascaded | tc | tcmm")->capture_default_str();
    res_cmd->add_option("--preset", res_preset,
                        "tc-strong | tcmm-superstrong | cascaded-strong | cascaded-superstrong");
    res_cmd->add_option("--beta-n-min", bn_min, "")->capture_default_str();
    res_cmd->add_option("--beta-n-max", bn_max, "")->capture_default_str();
    res_cmd->add_option("--beta-n-steps", bn_steps, "0 gives an empty sweep")
        ->capture_default_str();
    res_cmd->add_option("--window-fsr", window_fsr, "half-window of the root search in FSR units")
        ->capture_default_str();
    res_cmd->add_option("--q-min", q_min, "")->capture_default_str();
    res_cmd->add_option("--q-max", q_max, "")->capture_default_str();
    res_cmd->add_option("--m-half", m_half, "multimode truncation M")->capture_default_str();
    res_cmd->add_flag("--with-contrast", with_contrast, "compute dip contrasts (cascaded)");

    // validity
    auto* val_cmd = app.add_subcommand("validity", "single-mode validity diagnostics");
    PhysicsArgs val_phys;
    add_physics_flags(val_cmd, val_phys);
    std::string val_preset;
    double strictness = 10.0;
    val_cmd->add_option("--preset", val_preset, "table1");
    val_cmd->add_option("--strictness", strictness, "factor interpreting '<<'")
        ->capture_default_str();

    // convert
    auto* conv_cmd = app.add_subcommand("convert", "coupling-parameter conversions");
    PhysicsArgs conv_phys;
    add_physics_flags(conv_cmd, conv_phys);

    // fit
    auto* fit_cmd = app.add_subcommand("fit", "fit a measured spectrum with the cascaded model");
    PhysicsArgs fit_phys;
    add_physics_flags(fit_cmd, fit_phys);
    std::string data_path;
    std::vector<std::string> free_names;
    double init_beta_n = 1.0, init_delta_ca_mhz = 0.0, init_amplitude = 1.0, init_offset_hz = 0.0;
    int restarts = 3, max_evals = 20000;
    bool no_normalize = false;
    fit_cmd->add_option("--data", data_path, "CSV with probe_detuning_hz,signal")->required();
    fit_cmd->add_option("--free", free_names, "free parameters (comma list)")->delimiter(',');
    fit_cmd->add_option("--init-beta-n", init_beta_n, "")->capture_default_str();
    fit_cmd->add_option("--init-delta-ca-mhz", init_delta_ca_mhz, "")->capture_default_str();
    fit_cmd->add_option("--init-amplitude", init_amplitude, "")->capture_default_str();
    fit_cmd->add_option("--init-offset-hz", init_offset_hz, "")->capture_default_str();
    fit_cmd->add_option("--restarts", restarts, "")->capture_default_str();
    fit_cmd->add_option("--max-evals", max_evals, "per restart")->capture_default_str();
    fit_cmd->add_flag("--no-normalize", no_normalize, "data is already normalized");

    // oracle-check
    auto* oracle_cmd = app.add_subcommand("oracle-check",
                                          "randomized oracle vs closed-form comparison");
    int instances = 1000, n_max = 20;
    oracle_cmd->add_option("--instances", instances, "")->capture_default_str();
    oracle_cmd->add_option("--n-max", n_max, "largest atom count")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (spectrum_cmd->parsed()) {
            if (common.prefix.empty()) common.prefix = "spectrum";
            return run_spectrum(common, spectrum_phys, spectrum_model, span_fsr, points);
        }
        if (res_cmd->parsed()) {
            if (common.prefix.empty()) common.prefix = "resonances";
            return run_resonances(common, res_phys, res_model, res_preset, bn_min, bn_max,
                                  bn_steps, window_fsr, q_min, q_max, m_half, with_contrast);
        }
        if (val_cmd->parsed()) {
            if (common.prefix.empty()) common.prefix = "validity";
            return run_validity(common, val_phys, val_preset, strictness);
        }
        if (conv_cmd->parsed()) {
            if (common.prefix.empty()) common.prefix = "convert";
            return run_convert(common, conv_phys);
        }
        if (fit_cmd->parsed()) {
            if (common.prefix.empty()) common.prefix = "fit";
            return run_fit(common, fit_phys, data_path, free_names, init_beta_n,
                           init_delta_ca_mhz, init_amplitude, init_offset_hz, restarts, max_evals,
                           no_normalize);
        }
        if (oracle_cmd->parsed()) {
            if (common.prefix.empty()) common.prefix = "oracle_check";
            return run_oracle_check(common, instances, n_max);
        }
    } catch (const std::domain_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
