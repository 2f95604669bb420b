// io.hpp — CSV/JSON serialization, parameter files and run manifests
//
// Doubles are written in their shortest round-trip decimal form (to_chars),
// so re-reading a file reproduces the stored values bit-exactly and reruns
// with identical inputs produce bit-identical numeric outputs.

#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "cqed/fit.hpp"
#include "cqed/params.hpp"
#include "cqed/resonance.hpp"
#include "cqed/spectrum.hpp"

namespace cqed::io {

using nlohmann::json;

inline std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text) {
    double v = 0.0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw std::invalid_argument("parse_double: bad number '" + std::string(text) + "'");
    return v;
}

// ---------------------------------------------------------------------------
// parameter snapshots
// ---------------------------------------------------------------------------

inline Geometry geometry_from_string(const std::string& s) {
    if (s == "ring") return Geometry::Ring;
    if (s == "fabry_perot") return Geometry::FabryPerot;
    throw std::invalid_argument("unknown geometry '" + s + "' (expected ring|fabry_perot)");
}

inline CouplingRegime regime_from_string(const std::string& s) {
    if (s == "timed_dicke") return CouplingRegime::TimedDicke;
    if (s == "dicke") return CouplingRegime::Dicke;
    throw std::invalid_argument("unknown regime '" + s + "' (expected timed_dicke|dicke)");
}

inline SpectrumModel spectrum_model_from_string(const std::string& s) {
    if (s == "cascaded") return SpectrumModel::Cascaded;
    if (s == "single_mode_tc") return SpectrumModel::SingleModeTC;
    if (s == "waveguide_limit") return SpectrumModel::WaveguideLimit;
    throw std::invalid_argument("unknown spectrum model '" + s + "'");
}

inline json to_json(const ModelParams& p) {
    json j;
    j["model"] = to_string(p.model);
    j["n_atoms"] = p.n_atoms;
    j["beta"] = p.beta;
    if (!p.beta_list.empty()) j["beta_list"] = p.beta_list;
    j["gamma_hz_over_2pi"] = p.gamma / two_pi;
    j["nu_fsr_hz"] = p.nu_fsr;
    j["t_rt"] = p.t_rt;
    j["r"] = p.r;
    j["geometry"] = to_string(p.geometry);
    j["regime"] = to_string(p.regime);
    j["delta_ca_hz_over_2pi"] = p.delta_ca / two_pi;
    return j;
}

inline ModelParams model_params_from_json(const json& j) {
    ModelParams p;
    p.model = spectrum_model_from_string(j.at("model").get<std::string>());
    p.n_atoms = j.at("n_atoms").get<double>();
    p.beta = j.at("beta").get<double>();
    if (j.contains("beta_list")) p.beta_list = j.at("beta_list").get<std::vector<double>>();
    p.gamma = j.at("gamma_hz_over_2pi").get<double>() * two_pi;
    p.nu_fsr = j.at("nu_fsr_hz").get<double>();
    p.t_rt = j.at("t_rt").get<double>();
    p.r = j.at("r").get<double>();
    p.geometry = geometry_from_string(j.at("geometry").get<std::string>());
    p.regime = regime_from_string(j.at("regime").get<std::string>());
    p.delta_ca = j.at("delta_ca_hz_over_2pi").get<double>() * two_pi;
    return p;
}

// ---------------------------------------------------------------------------
// flat key-value parameter files (JSON-compatible)
// ---------------------------------------------------------------------------

/// Accepted keys of a parameter file; anything else is an error.
inline const std::vector<std::string>& parameter_file_keys() {
    static const std::vector<std::string> keys = {
        "n_atoms", "beta", "beta_list", "gamma_hz_over_2pi", "nu_fsr_hz",
        "t_rt", "r", "kappa0_hz_over_2pi", "kappa_ext_hz_over_2pi",
        "geometry", "regime", "delta_ca_hz_over_2pi"};
    return keys;
}

struct ParameterFile {
    EmitterEnsemble ensemble;
    ResonatorConfig resonator;
    double delta_ca = 0.0;  // rad/s
};

inline ParameterFile parse_parameter_json(const json& j) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        const auto& keys = parameter_file_keys();
        if (std::find(keys.begin(), keys.end(), it.key()) == keys.end()) {
            std::string accepted;
            for (const auto& k : keys) accepted += (accepted.empty() ? "" : ", ") + k;
            throw std::invalid_argument("unknown parameter key '" + it.key() +
                                        "'; accepted keys: " + accepted);
        }
    }
    double gamma = j.at("gamma_hz_over_2pi").get<double>() * two_pi;
    double nu_fsr = j.at("nu_fsr_hz").get<double>();
    Geometry geom = j.contains("geometry") ? geometry_from_string(j.at("geometry").get<std::string>())
                                           : Geometry::Ring;
    CouplingRegime regime = j.contains("regime")
                                ? regime_from_string(j.at("regime").get<std::string>())
                                : CouplingRegime::TimedDicke;

    ParameterFile out;
    if (j.contains("beta_list")) {
        out.ensemble = EmitterEnsemble::with_beta_list(j.at("beta_list").get<std::vector<double>>(),
                                                       gamma, regime);
        if (j.contains("n_atoms") &&
            j.at("n_atoms").get<int>() != out.ensemble.n_atoms)
            throw std::invalid_argument("n_atoms inconsistent with beta_list length");
    } else {
        int n = j.contains("n_atoms") ? j.at("n_atoms").get<int>() : 0;
        double beta = j.contains("beta") ? j.at("beta").get<double>() : 0.0;
        out.ensemble = EmitterEnsemble::homogeneous(n, beta, gamma, regime);
    }

    bool has_mirror = j.contains("t_rt") || j.contains("r");
    bool has_rates = j.contains("kappa0_hz_over_2pi") || j.contains("kappa_ext_hz_over_2pi");
    if (has_mirror && has_rates)
        throw std::invalid_argument("give either (t_rt, r) or kappa rates, not both");
    if (has_rates) {
        double k0 = j.value("kappa0_hz_over_2pi", 0.0) * two_pi;
        double ke = j.value("kappa_ext_hz_over_2pi", 0.0) * two_pi;
        out.resonator = ResonatorConfig::from_rates(nu_fsr, k0, ke, geom);
    } else {
        out.resonator = ResonatorConfig::make(nu_fsr, j.value("t_rt", 1.0), j.value("r", 1.0), geom);
    }
    out.delta_ca = j.value("delta_ca_hz_over_2pi", 0.0) * two_pi;
    return out;
}

inline ParameterFile load_parameter_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open parameter file '" + path + "'");
    json j = json::parse(in);
    return parse_parameter_json(j);
}

// ---------------------------------------------------------------------------
// spectra
// ---------------------------------------------------------------------------

inline std::string spectrum_csv(const Spectrum& spec) {
    std::ostringstream out;
    out << "delta_a_hz_over_2pi,delta_c_hz_over_2pi,reflection\n";
    for (const auto& p : spec.points)
        out << format_double(p.delta_a / two_pi) << ',' << format_double(p.delta_c / two_pi) << ','
            << format_double(p.reflection) << '\n';
    return out.str();
}

struct SpectrumCsvRow {
    double delta_a_hz = 0.0, delta_c_hz = 0.0, reflection = 0.0;
};

inline std::vector<SpectrumCsvRow> parse_spectrum_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "delta_a_hz_over_2pi,delta_c_hz_over_2pi,reflection")
        throw std::invalid_argument("spectrum CSV: bad header");
    std::vector<SpectrumCsvRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::size_t c1 = line.find(',');
        std::size_t c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw std::invalid_argument("spectrum CSV: bad row '" + line + "'");
        rows.push_back({parse_double(std::string_view(line).substr(0, c1)),
                        parse_double(std::string_view(line).substr(c1 + 1, c2 - c1 - 1)),
                        parse_double(std::string_view(line).substr(c2 + 1))});
    }
    return rows;
}

// ---------------------------------------------------------------------------
// resonance maps
// ---------------------------------------------------------------------------

inline std::string resonance_map_csv(const ResonanceMap& map) {
    std::ostringstream out;
    out << "model,branch_index,beta_n,delta_hz_over_2pi,contrast\n";
    for (const auto& br : map.branches)
        for (const auto& pt : br.points) {
            out << to_string(br.model) << ',' << br.q_or_k << ',' << format_double(pt.beta_n) << ','
                << format_double(pt.delta / two_pi) << ',';
            if (std::isfinite(pt.contrast)) out << format_double(pt.contrast);
            out << '\n';
        }
    return out.str();
}

// ---------------------------------------------------------------------------
// measured spectra (fit input)
// ---------------------------------------------------------------------------

/// CSV with columns probe_detuning_hz,signal; '#' lines are comments and an
/// optional literal header row is tolerated.
inline MeasuredSpectrum parse_measured_csv(std::istream& in) {
    MeasuredSpectrum data;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (line == "probe_detuning_hz,signal") continue;
        std::size_t c = line.find(',');
        if (c == std::string::npos)
            throw std::invalid_argument("measured CSV: bad row '" + line + "'");
        data.detuning_hz.push_back(parse_double(std::string_view(line).substr(0, c)));
        data.signal.push_back(parse_double(std::string_view(line).substr(c + 1)));
    }
    data.validate();
    return data;
}

inline std::string measured_csv(const MeasuredSpectrum& data) {
    std::ostringstream out;
    out << "probe_detuning_hz,signal\n";
    for (std::size_t i = 0; i < data.detuning_hz.size(); ++i)
        out << format_double(data.detuning_hz[i]) << ',' << format_double(data.signal[i]) << '\n';
    return out.str();
}

inline json fit_result_json(const FitResult& res) {
    json j;
    j["estimates"] = {{"beta_n", res.estimates.beta_n},
                      {"delta_ca_hz_over_2pi", res.estimates.delta_ca / two_pi},
                      {"amplitude_scale", res.estimates.amplitude_scale},
                      {"frequency_offset_hz", res.estimates.frequency_offset},
                      {"t_rt", res.estimates.t_rt},
                      {"r", res.estimates.r}};
    auto unc = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    j["uncertainties"] = {{"beta_n", unc(res.uncertainties.beta_n)},
                          {"delta_ca_hz_over_2pi", unc(res.uncertainties.delta_ca / two_pi)},
                          {"amplitude_scale", unc(res.uncertainties.amplitude_scale)},
                          {"frequency_offset_hz", unc(res.uncertainties.frequency_offset)},
                          {"t_rt", unc(res.uncertainties.t_rt)},
                          {"r", unc(res.uncertainties.r)}};
    j["uncertainty_method"] = "curvature-based, statistical only";
    j["residual_rms"] = res.residual_rms;
    j["n_evaluations"] = res.n_evaluations;
    j["converged"] = res.converged;
    return j;
}

// ---------------------------------------------------------------------------
// run manifests
// ---------------------------------------------------------------------------

struct RunManifest {
    std::string subcommand;
    json parameters;  // full resolved parameter set
    std::vector<std::string> input_files;
    std::vector<std::string> output_files;
    std::vector<std::string> warnings;
    std::string tool_version;
    double wall_time_s = 0.0;
};

inline json to_json(const RunManifest& m) {
    json j;
    j["subcommand"] = m.subcommand;
    j["parameters"] = m.parameters;
    j["input_files"] = m.input_files;
    j["output_files"] = m.output_files;
    j["warnings"] = m.warnings;
    j["tool_version"] = m.tool_version;
    j["wall_time_s"] = m.wall_time_s;
    return j;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
}

}  // namespace cqed::io
