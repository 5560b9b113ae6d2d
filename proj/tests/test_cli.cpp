#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "singosc/cli.hpp"

using namespace singosc;
using namespace singosc::cli;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args, const std::string& out_file) {
    const std::string cmd = std::string(SINGOSC_BIN_PATH) + " " + args + " >" +
                            out_file + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST_CASE("spectrum command lists the level energies") {
    RunConfig cfg;
    cfg.n_max = 2;
    const RunReport rep = cmd_spectrum(cfg);
    REQUIRE(rep.results.at("j").get<double>() == 0.75);
    const auto& levels = rep.results.at("levels");
    REQUIRE(levels.size() == 3);
    CHECK(levels[0].at("energy").get<double>() == 1.5);
    CHECK(levels[1].at("energy").get<double>() == 3.5);
    CHECK(levels[2].at("energy").get<double>() == 5.5);
    CHECK(rep.csv_lines.front() == "n,energy");
    CHECK(rep.csv_lines.at(1) == "0,1.5");

    RunConfig high;
    high.g = 3.0;
    high.omega = 2.0;
    high.n_max = 0;
    CHECK(cmd_spectrum(high).results.at("levels")[0].at("energy").get<double>() ==
          4.0);

    RunConfig bad;
    bad.g = -2.0;
    CHECK_THROWS_AS(cmd_spectrum(bad), validation_error);
    bad.g = 0.0;
    bad.n_max = -1;
    CHECK_THROWS_AS(cmd_spectrum(bad), validation_error);
}

TEST_CASE("rho source requires exactly one of override and profile") {
    RunConfig both;
    both.rho_override = 0.5;
    both.profile = "step";
    CHECK_THROWS_AS(cmd_transitions(both), validation_error);

    RunConfig neither;
    CHECK_THROWS_AS(cmd_transitions(neither), validation_error);

    RunConfig out_of_range;
    out_of_range.rho_override = 1.0;
    CHECK_THROWS_AS(cmd_transitions(out_of_range), validation_error);
    out_of_range.rho_override = -0.1;
    CHECK_THROWS_AS(cmd_transitions(out_of_range), validation_error);
}

TEST_CASE("rho command integrates the profile and reports diagnostics") {
    RunConfig cfg;
    cfg.profile = "constant";
    cfg.omega_minus = 2.0;
    const RunReport rep = cmd_rho(cfg);
    CHECK(rep.results.at("rho").get<double>() < 1e-12);
    CHECK(rep.checks.all_pass());
    CHECK(rep.diagnostics.contains("wronskian_drift"));
    CHECK(rep.diagnostics.contains("plateau_residual"));
    CHECK(rep.diagnostics.contains("rho_error_estimate"));

    RunConfig step;
    step.profile = "step";
    step.omega_minus = 1.0;
    step.omega_plus = 3.0;
    CHECK_THAT(cmd_rho(step).results.at("rho").get<double>(),
               WithinAbs(0.25, 1e-9));

    RunConfig override_given;
    override_given.profile = "constant";
    override_given.rho_override = 0.1;
    CHECK_THROWS_AS(cmd_rho(override_given), validation_error);

    RunConfig no_profile;
    CHECK_THROWS_AS(cmd_rho(no_profile), validation_error);

    RunConfig missing;
    missing.profile = "tabulated";
    missing.table_path = "does_not_exist_profile.csv";
    CHECK_THROWS_AS(cmd_rho(missing), io_error);

    RunConfig unknown;
    unknown.profile = "sawtooth";
    CHECK_THROWS_AS(cmd_rho(unknown), validation_error);
}

TEST_CASE("transitions command builds the tail-bounded table") {
    RunConfig cfg;
    cfg.rho_override = 0.5;
    cfg.m_max = 2;
    const RunReport rep = cmd_transitions(cfg);
    const auto& rows = rep.results.at("rows");
    REQUIRE(rows.size() == 3);
    CHECK_THAT(rows[0].at("w")[0].get<double>(),
               WithinRel(0.3535533905932737622, 1e-14));
    CHECK_THAT(rows[0].at("w")[1].get<double>(),
               WithinRel(0.26516504294495532165, 1e-14));
    CHECK(rep.checks.all_pass()); // row residuals under tail_eps
    CHECK(rep.diagnostics.at("row_residuals").size() == 3);

    RunConfig identity;
    identity.rho_override = 0.0;
    identity.m_max = 1;
    const RunReport id = cmd_transitions(identity);
    CHECK(id.results.at("rows")[0].at("w")[0].get<double>() == 1.0);
    CHECK(id.results.at("rows")[0].at("w")[1].get<double>() == 0.0);
    CHECK(id.results.at("rows")[1].at("w")[1].get<double>() == 1.0);
}

TEST_CASE("transitions command emits both routes on request") {
    RunConfig cfg;
    cfg.rho_override = 0.75;
    cfg.m_max = 4;
    cfg.n_max = 6;
    cfg.emit_both = true;
    const RunReport rep = cmd_transitions(cfg);
    const auto& rows = rep.results.at("rows");
    REQUIRE(rows.size() == 5);
    REQUIRE(rows[2].at("w_hypergeometric").size() == 7);
    REQUIRE(rows[2].at("w_jacobi").size() == 7);
    for (int n = 0; n <= 6; ++n) {
        const double a = rows[2].at("w_hypergeometric")[size_t(n)].get<double>();
        const double b = rows[2].at("w_jacobi")[size_t(n)].get<double>();
        const double d = rows[2].at("difference")[size_t(n)].get<double>();
        CHECK(d == a - b);
    }
    REQUIRE(rep.checks.checks.size() == 1);
    CHECK(rep.checks.checks[0].name == "dual_route_max_rel_diff");
    CHECK(rep.checks.all_pass());
    CHECK(rep.csv_lines.front() == "m,n,w_hypergeometric,w_jacobi,difference");
}

TEST_CASE("genfunc command reconstructs the series and the moment ratio") {
    RunConfig cfg;
    cfg.rho_override = 0.25;
    cfg.m_max = 2;
    cfg.u_grid = {0.0};
    cfg.v_grid = {0.0};
    const RunReport origin = cmd_genfunc(cfg);
    CHECK_THAT(origin.results.at("grid")[0].at("value").get<double>(),
               WithinRel(std::pow(0.75, 1.5), 1e-14));
    CHECK_THAT(origin.results.at("moment_ratio").get<double>(),
               WithinRel(5.0 / 3.0, 1e-8));
    CHECK(origin.checks.all_pass());

    cfg.rho_override = 0.5;
    cfg.u_grid = {0.3, -0.5};
    cfg.v_grid = {0.4, -0.7};
    const RunReport rep = cmd_genfunc(cfg);
    CHECK(rep.results.at("adiabatic_ratio").get<double>() == 3.0);
    REQUIRE(rep.results.at("grid").size() == 4);
    for (const auto& cell : rep.results.at("grid"))
        CHECK(cell.at("series_residual").get<double>() < 1e-9);
    CHECK_THAT(rep.results.at("grid")[0].at("value").get<double>(),
               WithinRel(0.60221928575380304644, 1e-13));

    RunConfig bad;
    bad.rho_override = 0.5;
    bad.u_grid = {1.0};
    CHECK_THROWS_AS(cmd_genfunc(bad), validation_error);
    bad.u_grid = {0.3};
    bad.v_grid = {};
    CHECK_THROWS_AS(cmd_genfunc(bad), validation_error);
}

TEST_CASE("json reports re-parse to the emitted values") {
    RunConfig cfg;
    cfg.rho_override = 0.5;
    cfg.m_max = 3;
    const RunReport rep = cmd_transitions(cfg);
    const std::string text = render_report(rep, "json");
    const auto parsed = nlohmann::json::parse(text);
    for (int m = 0; m <= 3; ++m) {
        const auto& row = parsed.at("results").at("rows")[size_t(m)].at("w");
        const auto& mem = rep.results.at("rows")[size_t(m)].at("w");
        REQUIRE(row.size() == mem.size());
        for (size_t n = 0; n < row.size(); ++n) {
            const double emitted = row[n].get<double>();
            const double in_memory = mem[n].get<double>();
            CHECK(std::abs(emitted - in_memory) <=
                  1e-12 * std::max(1.0, std::abs(in_memory)));
        }
    }
    CHECK(parsed.at("checks")[0].contains("name"));
    CHECK(parsed.at("checks")[0].contains("residual"));
    CHECK(parsed.at("checks")[0].contains("tolerance"));
    CHECK(parsed.at("checks")[0].contains("pass"));
}

TEST_CASE("csv values round-trip through 17 significant digits") {
    RunConfig cfg;
    cfg.rho_override = 0.5;
    cfg.m_max = 0;
    const RunReport rep = cmd_transitions(cfg);
    REQUIRE(rep.csv_lines.front() == "m,n,w");
    const double w00 = rep.results.at("rows")[0].at("w")[0].get<double>();
    const std::string& line = rep.csv_lines.at(1);
    const double parsed = std::strtod(line.c_str() + line.rfind(',') + 1, nullptr);
    CHECK(parsed == w00);

    const std::string csv = render_report(rep, "csv");
    CHECK(csv.find("check,name,residual,tolerance,pass") != std::string::npos);
    CHECK_THROWS_AS(render_report(rep, "yaml"), validation_error);
}

TEST_CASE("rendering is deterministic and emit honors the output path") {
    RunConfig cfg;
    cfg.n_max = 4;
    const RunReport rep = cmd_spectrum(cfg);
    CHECK(render_report(rep, "json") == render_report(rep, "json"));
    CHECK(render_report(rep, "csv") == render_report(rep, "csv"));

    cfg.out_path = "cli_emit_test.json";
    emit_report(rep, cfg);
    CHECK(slurp(cfg.out_path) == render_report(rep, "json"));
    std::remove(cfg.out_path.c_str());

    cfg.out_path = "no_such_dir/cli_emit_test.json";
    CHECK_THROWS_AS(emit_report(rep, cfg), io_error);
}

TEST_CASE("binary wires flags, config files, and exit codes") {
    const std::string tmp = "cli_probe_out.txt";

    REQUIRE(run_cli("spectrum --n-max 1 --format csv", tmp) == 0);
    CHECK(slurp(tmp) == "n,energy\n0,1.5\n1,3.5\n");

    {
        std::ofstream conf("cli_probe_conf.toml");
        conf << "[spectrum]\nomega = 2.0\nn-max = 1\n";
    }
    REQUIRE(run_cli("spectrum --config cli_probe_conf.toml --n-max 0 --format csv",
                    tmp) == 0);
    CHECK(slurp(tmp) == "n,energy\n0,3\n"); // flag beat the file, omega kept
    std::remove("cli_probe_conf.toml");

    CHECK(run_cli("spectrum --g -2", tmp) == 1);
    CHECK(run_cli("transitions --rho 0.5 --profile step", tmp) == 1);
    CHECK(run_cli("rho --profile tabulated --table no_such_table.csv", tmp) == 3);
    CHECK(run_cli("nonsense", tmp) == 1);
    CHECK(run_cli("--help", tmp) == 0);
    std::remove(tmp.c_str());
}
