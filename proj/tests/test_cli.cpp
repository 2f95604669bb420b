#include <catch2/catch.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "cqed/cqed.hpp"
#include "cqed/io.hpp"

namespace {

const std::string kCli = CQED_CLI_PATH;
const std::string kTmp = CQED_TEST_TMPDIR;

int run_cli(const std::string& args) {
    std::string cmd = kCli + " " + args + " > /dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string fresh_dir(const std::string& name) {
    std::string dir = kTmp + "/" + name;
    std::system(("rm -rf " + dir + " && mkdir -p " + dir).c_str());
    return dir;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("cli spectrum subcommand") {
    SECTION("experimental-scale scan produces the three artifacts") {
        auto dir = fresh_dir("spec1");
        REQUIRE(run_cli("--out-dir " + dir +
                        " spectrum --model cascaded --beta-n 12.4 --gamma-mhz 2.61 "
                        "--fsr-mhz 7.1 --delta-ca-mhz 1.12 --span-fsr 3") == 0);
        std::istringstream csv(slurp(dir + "/spectrum.csv"));
        auto rows = cqed::io::parse_spectrum_csv(csv);
        REQUIRE(rows.size() == 2001);
        for (const auto& r : rows) {
            CHECK(r.reflection >= 0.0);
            CHECK(r.reflection <= 1.0 + 1e-12);
            CHECK(r.delta_c_hz - r.delta_a_hz == Approx(1.12e6).margin(1.0));
        }
        auto params = cqed::io::json::parse(slurp(dir + "/spectrum_params.json"));
        CHECK(params["nu_fsr_hz"] == 7.1e6);
        CHECK(params["n_atoms"] == 2480.0);  // beta*N preserved with beta = 0.005
        auto manifest = cqed::io::json::parse(slurp(dir + "/spectrum_manifest.json"));
        CHECK(manifest["subcommand"] == "spectrum");
        CHECK(manifest["output_files"].size() == 2);
    }
    SECTION("reruns with identical inputs are bit-identical") {
        auto dir1 = fresh_dir("spec_det1");
        auto dir2 = fresh_dir("spec_det2");
        std::string args = " spectrum --model cascaded --beta-n 2 --gamma-mhz 5 --fsr-mhz 200"
                           " --span-fsr 1 --points 501";
        REQUIRE(run_cli("--out-dir " + dir1 + args) == 0);
        REQUIRE(run_cli("--out-dir " + dir2 + args) == 0);
        CHECK(slurp(dir1 + "/spectrum.csv") == slurp(dir2 + "/spectrum.csv"));
        CHECK(slurp(dir1 + "/spectrum_params.json") == slurp(dir2 + "/spectrum_params.json"));
    }
    SECTION("bare cavity: cascaded n=0 and tc g=0 agree where the reduction holds") {
        auto dir = fresh_dir("spec_bare");
        std::string mirrors = " --t-rt 0.999 --r 0.9995 --gamma-mhz 5 --fsr-mhz 200"
                              " --span-fsr 0.05 --points 801";
        REQUIRE(run_cli("--out-dir " + dir + " --prefix casc spectrum --model cascaded --n 0" +
                        mirrors) == 0);
        REQUIRE(run_cli("--out-dir " + dir + " --prefix tc spectrum --model tc --g 0" + mirrors) ==
                0);
        std::istringstream c1(slurp(dir + "/casc.csv")), c2(slurp(dir + "/tc.csv"));
        auto r1 = cqed::io::parse_spectrum_csv(c1);
        auto r2 = cqed::io::parse_spectrum_csv(c2);
        REQUIRE(r1.size() == r2.size());
        for (std::size_t i = 0; i < r1.size(); ++i) {
            CHECK(r1[i].delta_a_hz == r2[i].delta_a_hz);
            CHECK(std::abs(r1[i].reflection - r2[i].reflection) < 1e-3);
        }
    }
    SECTION("waveguide model output equals t_rt^2 |t_N|^2 recomputed here") {
        auto dir = fresh_dir("spec_wg");
        REQUIRE(run_cli("--out-dir " + dir +
                        " spectrum --model waveguide --beta 0.01 --n 40 --gamma-mhz 5 "
                        "--fsr-mhz 200 --t-rt 0.93 --span-fsr 0.5 --points 301") == 0);
        std::istringstream csv(slurp(dir + "/spectrum.csv"));
        auto rows = cqed::io::parse_spectrum_csv(csv);
        REQUIRE(rows.size() == 301);
        const double gamma = cqed::rate_from_mhz(5.0);
        for (const auto& r : rows) {
            double t_n = std::abs(cqed::t_ensemble_homogeneous(0.01, 40, gamma,
                                                               cqed::two_pi * r.delta_a_hz)
                                      .value);
            CHECK(r.reflection == Approx(0.93 * 0.93 * t_n * t_n).margin(1e-12));
        }
    }
    SECTION("bad model name exits with an input error") {
        auto dir = fresh_dir("spec_bad");
        CHECK(run_cli("--out-dir " + dir + " spectrum --model bogus --gamma-mhz 5 --fsr-mhz 200") ==
              2);
    }
}

TEST_CASE("cli resonances subcommand") {
    SECTION("empty sweep gives a header-only CSV") {
        auto dir = fresh_dir("res_empty");
        REQUIRE(run_cli("--out-dir " + dir +
                        " resonances --preset cascaded-strong --beta-n-steps 0") == 0);
        CHECK(slurp(dir + "/resonances.csv") ==
              "model,branch_index,beta_n,delta_hz_over_2pi,contrast\n");
    }
    SECTION("cascaded-superstrong preset produces non-saturating branch shifts") {
        auto dir = fresh_dir("res_d");
        REQUIRE(run_cli("--out-dir " + dir +
                        " resonances --preset cascaded-superstrong --beta-n-min 2 --beta-n-max 12 "
                        "--beta-n-steps 6 --window-fsr 2.5 --q-min -4 --q-max 4") == 0);
        // the +1st-order comb line must shift beyond half an FSR at large beta*N
        std::istringstream in(slurp(dir + "/resonances.csv"));
        std::string line;
        std::getline(in, line);  // header
        double best_shift = 0.0;
        while (std::getline(in, line)) {
            std::istringstream row(line);
            std::string model, index, bn, delta, contrast;
            std::getline(row, model, ',');
            std::getline(row, index, ',');
            std::getline(row, bn, ',');
            std::getline(row, delta, ',');
            std::getline(row, contrast);
            double d = cqed::io::parse_double(delta);
            // comb line near +1 FSR: shift relative to the bare position
            if (d > 0.75 * 10e6 && d < 2.4 * 10e6)
                best_shift = std::max(best_shift, d - 10e6);
        }
        CHECK(best_shift > 0.5 * 10e6);
    }
    SECTION("tc-strong preset emits exactly two branches") {
        auto dir = fresh_dir("res_a");
        REQUIRE(run_cli("--out-dir " + dir +
                        " resonances --preset tc-strong --beta-n-min 0.5 --beta-n-max 4 "
                        "--beta-n-steps 4") == 0);
        std::istringstream in(slurp(dir + "/resonances.csv"));
        std::string line;
        std::getline(in, line);
        int rows = 0;
        while (std::getline(in, line)) ++rows;
        CHECK(rows == 8);  // 2 branches x 4 sweep points
    }
}

TEST_CASE("cli validity subcommand") {
    auto dir = fresh_dir("validity");
    REQUIRE(run_cli("--out-dir " + dir + " validity --preset table1") == 0);
    std::istringstream in(slurp(dir + "/validity.csv"));
    std::string line;
    std::getline(in, line);
    CHECK(line ==
          "label,g_n_mhz,gamma_mhz,nu_fsr_mhz,ratio_g_fsr,ratio_loss_fsr,beta_n,dicke_bound,"
          "optical_depth,cond_g_fsr,cond_loss_fsr");
    int rows = 0;
    bool johnson_ok = false;
    while (std::getline(in, line)) {
        ++rows;
        if (line.rfind("johnson_2019,", 0) == 0) {
            std::istringstream row(line);
            std::string field;
            std::getline(row, field, ',');  // label
            std::getline(row, field, ',');  // g
            std::getline(row, field, ',');  // gamma
            std::getline(row, field, ',');  // fsr
            std::getline(row, field, ',');  // ratio_g_fsr
            double r1 = cqed::io::parse_double(field);
            std::getline(row, field, ',');  // ratio_loss_fsr
            double r2 = cqed::io::parse_double(field);
            johnson_ok = std::abs(r1 - 8.1) < 0.03 * 8.1 && std::abs(r2 - 29.0) < 0.03 * 29.0;
        }
    }
    CHECK(rows == 6);
    CHECK(johnson_ok);

    SECTION("custom row: hand arithmetic") {
        auto dir2 = fresh_dir("validity_custom");
        // g/2pi = 10 MHz, gamma/2pi = 2 MHz, nu = 100 MHz:
        //   g/nu = 2pi*10/100, g^2/(gamma nu) = (2pi*10)^2/(2pi*2*100) = pi
        REQUIRE(run_cli("--out-dir " + dir2 +
                        " validity --g-mhz 10 --gamma-mhz 2 --fsr-mhz 100") == 0);
        std::istringstream in2(slurp(dir2 + "/validity.csv"));
        std::string header, row;
        REQUIRE(std::getline(in2, header));
        REQUIRE(std::getline(in2, row));
        std::istringstream fields(row);
        std::string field;
        for (int i = 0; i < 5; ++i) std::getline(fields, field, ',');
        CHECK(cqed::io::parse_double(field) == Approx(cqed::two_pi * 10.0 / 100.0).epsilon(1e-12));
        std::getline(fields, field, ',');
        CHECK(cqed::io::parse_double(field) == Approx(cqed::two_pi / 2.0).epsilon(1e-12));
    }
}

TEST_CASE("cli convert subcommand") {
    auto dir = fresh_dir("convert");
    REQUIRE(run_cli("--out-dir " + dir +
                    " convert --beta 0.005 --gamma-mhz 2.61 --fsr-mhz 7.1 --n 2592 "
                    "--t-rt 0.86 --r 0.97") == 0);
    auto j = cqed::io::json::parse(slurp(dir + "/convert.json"));
    CHECK(j["beta_n"] == Approx(12.96).epsilon(1e-12));
    CHECK(j["g_n_mhz"].get<double>() == Approx(8.74).epsilon(0.005));
    CHECK(j["optical_depth"] == Approx(51.84).epsilon(1e-12));
    double g1 = j["g1_mhz"].get<double>();
    // round trip through the inverse direction
    auto dir2 = fresh_dir("convert2");
    REQUIRE(run_cli("--out-dir " + dir2 + " convert --g-mhz " + cqed::io::format_double(g1) +
                    " --gamma-mhz 2.61 --fsr-mhz 7.1") == 0);
    auto j2 = cqed::io::json::parse(slurp(dir2 + "/convert.json"));
    CHECK(j2["beta"].get<double>() == Approx(0.005).epsilon(1e-9));
}

TEST_CASE("cli oracle-check subcommand") {
    auto dir = fresh_dir("oracle1");
    REQUIRE(run_cli("--out-dir " + dir + " --seed 7 oracle-check --instances 60 --n-max 10") == 0);
    auto j = cqed::io::json::parse(slurp(dir + "/oracle_check.json"));
    CHECK(j["instances"] == 60);
    CHECK(j["passed"] == true);
    CHECK(j["max_abs_error"].get<double>() < 1e-9);

    auto dir2 = fresh_dir("oracle2");
    REQUIRE(run_cli("--out-dir " + dir2 + " --seed 7 oracle-check --instances 60 --n-max 10") == 0);
    CHECK(slurp(dir + "/oracle_check.json") == slurp(dir2 + "/oracle_check.json"));
}

TEST_CASE("cli fit subcommand") {
    auto dir = fresh_dir("fit");
    // synthesize a noise-free measured spectrum at known parameters
    cqed::FitSetup setup;
    setup.gamma = cqed::rate_from_mhz(2.61);
    setup.beta_per_atom = 0.005;
    setup.nu_fsr = 7.1e6;
    cqed::FitParameters truth;
    truth.beta_n = 12.4;
    truth.delta_ca = cqed::rate_from_mhz(1.12);
    truth.amplitude_scale = 1.0;
    truth.t_rt = 0.86;
    truth.r = 0.97;
    cqed::MeasuredSpectrum data;
    const int n = 701;
    for (int i = 0; i < n; ++i)
        data.detuning_hz.push_back(-2.5 * setup.nu_fsr + 5.0 * setup.nu_fsr * i / (n - 1.0));
    data.signal = cqed::fit_model_curve(data, setup, truth);
    cqed::io::write_text_file(dir + "/data.csv", cqed::io::measured_csv(data));

    REQUIRE(run_cli("--out-dir " + dir + " --seed 5 fit --data " + dir + "/data.csv" +
                    " --gamma-mhz 2.61 --fsr-mhz 7.1 --t-rt 0.86 --r 0.97 --no-normalize" +
                    " --init-beta-n 10 --init-delta-ca-mhz 0.5 --restarts 1 --max-evals 6000") ==
            0);
    auto j = cqed::io::json::parse(slurp(dir + "/fit_fit.json"));
    CHECK(j["converged"] == true);
    CHECK(j["estimates"]["beta_n"].get<double>() == Approx(12.4).epsilon(1e-3));
    CHECK(j["estimates"]["delta_ca_hz_over_2pi"].get<double>() == Approx(1.12e6).epsilon(1e-2));
    CHECK(slurp(dir + "/fit_model.csv").rfind("probe_detuning_hz,model\n", 0) == 0);
}

TEST_CASE("cli error contracts") {
    auto dir = fresh_dir("errors");
    // unknown key in a config file
    cqed::io::write_text_file(dir + "/bad.json",
                              R"({"gamma_hz_over_2pi": 1e6, "nu_fsr_hz": 1e6, "oops": 3})");
    CHECK(run_cli("--config " + dir + "/bad.json --out-dir " + dir +
                  " spectrum --model cascaded") == 2);
    // missing required physics
    CHECK(run_cli("--out-dir " + dir + " spectrum --model cascaded") == 2);
    // flag conflicts
    CHECK(run_cli("--out-dir " + dir +
                  " spectrum --gamma-mhz 5 --fsr-mhz 200 --t-rt 0.9 --kappa0-mhz 0.1") == 2);
    CHECK(run_cli("--out-dir " + dir +
                  " spectrum --gamma-mhz 5 --fsr-mhz 200 --beta-n 1 --n 10") == 2);
    // numerical failure: lossless empty loop has a pole on resonance
    CHECK(run_cli("--out-dir " + dir +
                  " spectrum --gamma-mhz 5 --fsr-mhz 200 --n 0 --t-rt 1 --r 1") == 3);
}
