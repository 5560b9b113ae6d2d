// singosc: transition probabilities of the singular oscillator with a
// time-dependent frequency. Subcommands cover the level spectrum, the
// classical reflection coefficient, transition tables, the generating
// function, and the cross-module verification suite.
//
// Each subcommand owns its RunConfig instance so config-file sections stay
// isolated; command-line flags win over file values.

#include <cstdio>

#include <CLI11.hpp>

#include "singosc/cli.hpp"

namespace {

using singosc::cli::RunConfig;

void add_output_options(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--out", cfg.out_path, "output file (default: stdout)");
    sub->add_option("--format", cfg.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
}

void add_profile_options(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--profile", cfg.profile,
                    "frequency profile: constant|step|tanh|linear|bump|tabulated");
    sub->add_option("--omega-minus", cfg.omega_minus,
                    "left plateau frequency (bump/constant: baseline)");
    sub->add_option("--omega-plus", cfg.omega_plus, "right plateau frequency");
    sub->add_option("--ramp-time", cfg.ramp_time, "ramp switching time scale");
    sub->add_option("--amplitude", cfg.amplitude, "bump height (signed)");
    sub->add_option("--width", cfg.width, "bump gaussian width");
    sub->add_option("--table", cfg.table_path,
                    "two-column (t, omega) profile file");
    sub->add_option("--t-span", cfg.t_span,
                    "integration window override: t0 t1")
        ->expected(2);
    sub->add_option("--tol", cfg.ode_tol,
                    "ODE relative tolerance (absolute = tol/10)");
}

void add_rho_source_options(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--rho", cfg.rho_override,
                    "explicit reflection coefficient in [0, 1)");
    add_profile_options(sub, cfg);
}

int run_and_emit(const singosc::cli::RunReport& rep, const RunConfig& cfg,
                 bool gate_on_checks) {
    singosc::cli::emit_report(rep, cfg);
    return gate_on_checks && !rep.checks.all_pass() ? 2 : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"singular-oscillator transition probabilities under a "
                 "time-dependent frequency"};
    app.require_subcommand(1);
    app.fallthrough(); // lets --config follow the subcommand name
    app.set_config("--config", "",
                   "read options from a config file; flags win over file "
                   "values, sections map to subcommands");

    RunConfig spectrum_cfg, rho_cfg, transitions_cfg, genfunc_cfg, verify_cfg;

    CLI::App* spectrum =
        app.add_subcommand("spectrum", "energy levels E_n = 2 omega (n + j)");
    spectrum->add_option("--g", spectrum_cfg.g, "coupling strength, > -1");
    spectrum->add_option("--omega", spectrum_cfg.omega, "oscillator frequency");
    spectrum->add_option("--n-max", spectrum_cfg.n_max, "highest level");
    add_output_options(spectrum, spectrum_cfg);

    CLI::App* rho = app.add_subcommand(
        "rho", "reflection coefficient of a frequency profile");
    add_rho_source_options(rho, rho_cfg);
    add_output_options(rho, rho_cfg);

    CLI::App* transitions =
        app.add_subcommand("transitions", "transition probability table w_mn");
    transitions->add_option("--g", transitions_cfg.g, "coupling strength, > -1");
    add_rho_source_options(transitions, transitions_cfg);
    transitions->add_option("--m-max", transitions_cfg.m_max, "table rows");
    transitions->add_option("--n-max", transitions_cfg.n_max,
                            "column extent (with --emit-both)");
    transitions->add_option("--tail-eps", transitions_cfg.tail_eps,
                            "uncollected row mass target");
    transitions->add_flag("--emit-both", transitions_cfg.emit_both,
                          "emit both closed-form routes and their difference");
    add_output_options(transitions, transitions_cfg);

    CLI::App* genfunc = app.add_subcommand(
        "genfunc", "transition generating function on a (u, v) grid");
    genfunc->add_option("--g", genfunc_cfg.g, "coupling strength, > -1");
    add_rho_source_options(genfunc, genfunc_cfg);
    genfunc->add_option("--u", genfunc_cfg.u_grid, "u grid values, |u| < 1");
    genfunc->add_option("--v", genfunc_cfg.v_grid, "v grid values, |v| < 1");
    genfunc->add_option("--m-max", genfunc_cfg.m_max,
                        "row for the moment-ratio check");
    add_output_options(genfunc, genfunc_cfg);

    CLI::App* verify =
        app.add_subcommand("verify", "run the full verification suite");
    verify->add_option("--tol", verify_cfg.verify_tol,
                       "override every suite tolerance (0 forces failures)");
    verify->add_option("--stress-rho", verify_cfg.stress_rho,
                       "extra unitarity stress rows near rho = 1");
    add_output_options(verify, verify_cfg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*spectrum)
            return run_and_emit(singosc::cli::cmd_spectrum(spectrum_cfg),
                                spectrum_cfg, false);
        if (*rho)
            return run_and_emit(singosc::cli::cmd_rho(rho_cfg), rho_cfg, false);
        if (*transitions)
            return run_and_emit(singosc::cli::cmd_transitions(transitions_cfg),
                                transitions_cfg, false);
        if (*genfunc)
            return run_and_emit(singosc::cli::cmd_genfunc(genfunc_cfg),
                                genfunc_cfg, false);
        return run_and_emit(singosc::cli::cmd_verify(verify_cfg), verify_cfg,
                            true);
    } catch (const singosc::validation_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const singosc::numerical_error& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 2;
    } catch (const singosc::io_error& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return 3;
    }
}
