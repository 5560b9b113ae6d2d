#pragma once

// Command-line orchestration: a RunConfig resolved from flags and config
// file, one cmd_* entry point per subcommand, and deterministic JSON/CSV
// rendering. Formatting rules keep output byte-stable across runs: JSON uses
// the library's shortest round-trip doubles with insertion-ordered keys, CSV
// prints 17 significant digits in the C locale.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "classical.hpp"
#include "genfunc.hpp"
#include "transitions.hpp"
#include "verify.hpp"

namespace singosc::cli {

using ordered_json = nlohmann::ordered_json;

struct RunConfig {
    double g = 0.0;
    int n_max = 10;   // spectrum levels / fixed-table column extent
    int m_max = 10;   // table rows / moment row
    double omega = 1.0;
    double tail_eps = 1e-10;
    bool emit_both = false;

    // exactly one of rho_override / profile feeds the table commands
    std::optional<double> rho_override;
    std::string profile; // constant|step|tanh|linear|bump|tabulated
    double omega_minus = 1.0;
    double omega_plus = 1.0;
    double ramp_time = 1.0;
    double amplitude = 0.0;
    double width = 1.0;
    std::string table_path;
    std::vector<double> t_span; // empty or {t0, t1}
    double ode_tol = 0.0;       // 0 = integrator defaults

    std::vector<double> u_grid{0.0};
    std::vector<double> v_grid{0.0};

    double verify_tol = -1.0; // < 0 = per-suite defaults
    std::vector<double> stress_rho;

    std::string out_path; // empty = stdout
    std::string format = "json";
};

struct RunReport {
    ordered_json config;
    ordered_json results;
    ordered_json diagnostics = ordered_json::object();
    CheckReport checks;
    std::vector<std::string> csv_lines; // results table, header included
};

namespace detail {

inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline FrequencyProfile resolve_profile(const RunConfig& cfg) {
    FrequencyProfile p;
    if (cfg.profile == "step")
        p = step_profile(cfg.omega_minus, cfg.omega_plus);
    else if (cfg.profile == "tanh")
        p = tanh_ramp_profile(cfg.omega_minus, cfg.omega_plus, cfg.ramp_time);
    else if (cfg.profile == "linear")
        p = linear_ramp_profile(cfg.omega_minus, cfg.omega_plus, cfg.ramp_time);
    else if (cfg.profile == "bump")
        p = gaussian_bump_profile(cfg.omega_minus, cfg.amplitude, cfg.width);
    else if (cfg.profile == "constant")
        p = gaussian_bump_profile(cfg.omega_minus, 0.0, 1.0);
    else if (cfg.profile == "tabulated") {
        if (cfg.table_path.empty())
            throw validation_error("tabulated profile requires --table PATH");
        p = load_profile_table(cfg.table_path);
    } else
        throw validation_error("unknown profile kind: " + cfg.profile);
    if (cfg.t_span.size() == 2)
        p = with_span(p, cfg.t_span[0], cfg.t_span[1]);
    else if (!cfg.t_span.empty())
        throw validation_error("--t-span takes exactly two values");
    return p;
}

inline ReflectionResult run_classical(const RunConfig& cfg,
                                      const FrequencyProfile& p) {
    if (cfg.ode_tol != 0.0) {
        if (!(cfg.ode_tol > 0.0))
            throw validation_error("ODE tolerance must be > 0");
        return compute_rho(p, cfg.ode_tol / 10.0, cfg.ode_tol);
    }
    return compute_rho(p);
}

// rho for the table commands: the override and the classical pipeline are
// mutually exclusive by the config contract.
inline std::pair<double, std::optional<ReflectionResult>>
resolve_rho(const RunConfig& cfg) {
    if (cfg.rho_override && !cfg.profile.empty())
        throw validation_error(
            "supply exactly one of --rho and --profile, not both");
    if (cfg.rho_override) {
        if (!(*cfg.rho_override >= 0.0 && *cfg.rho_override < 1.0))
            throw validation_error("rho override must lie in [0, 1)");
        return {*cfg.rho_override, std::nullopt};
    }
    if (cfg.profile.empty())
        throw validation_error("either --rho or --profile is required");
    const ReflectionResult rr = run_classical(cfg, resolve_profile(cfg));
    return {rr.rho, rr};
}

inline ordered_json profile_config_json(const RunConfig& cfg,
                                        const FrequencyProfile& p) {
    ordered_json o;
    o["kind"] = cfg.profile;
    if (cfg.profile == "bump" || cfg.profile == "constant")
        o["omega"] = cfg.omega_minus;
    else if (cfg.profile != "tabulated") {
        o["omega_minus"] = cfg.omega_minus;
        o["omega_plus"] = cfg.omega_plus;
    }
    if (cfg.profile == "tanh" || cfg.profile == "linear")
        o["ramp_time"] = cfg.ramp_time;
    if (cfg.profile == "bump") {
        o["amplitude"] = cfg.amplitude;
        o["width"] = cfg.width;
    }
    if (cfg.profile == "tabulated") o["table"] = cfg.table_path;
    o["window"] = {p.t0, p.t1};
    return o;
}

inline ordered_json classical_diagnostics_json(const ReflectionResult& rr) {
    ordered_json o;
    o["wronskian_drift"] = rr.wronskian_drift;
    o["plateau_residual"] = rr.plateau_residual;
    o["rho_error_estimate"] = rr.rho_error_estimate;
    o["steps"] = rr.steps;
    return o;
}

// rho-source part of the config echo, shared by transitions and genfunc.
inline ordered_json rho_source_json(const RunConfig& cfg) {
    if (cfg.rho_override) return ordered_json(*cfg.rho_override);
    return profile_config_json(cfg, resolve_profile(cfg));
}

inline int series_row_count(double max_abs_u) {
    if (max_abs_u == 0.0) return 0;
    // rows beyond M contribute less than 1e-11 of mass at |u| = max_abs_u
    return static_cast<int>(
        std::ceil(std::log(1e-11 * (1.0 - max_abs_u)) / std::log(max_abs_u)));
}

} // namespace detail

inline ordered_json checks_json(const CheckReport& r) {
    ordered_json arr = ordered_json::array();
    for (const Check& c : r.checks) {
        ordered_json o;
        o["name"] = c.name;
        o["residual"] = c.residual;
        o["tolerance"] = c.tolerance;
        o["pass"] = c.pass;
        arr.push_back(std::move(o));
    }
    return arr;
}

inline std::string render_report(const RunReport& rep, const std::string& format) {
    if (format == "json") {
        ordered_json root;
        root["config"] = rep.config;
        root["results"] = rep.results;
        root["diagnostics"] = rep.diagnostics;
        root["checks"] = checks_json(rep.checks);
        return root.dump(2) + "\n";
    }
    if (format != "csv")
        throw validation_error("format must be csv or json, got: " + format);
    std::string out;
    for (const std::string& line : rep.csv_lines) {
        out += line;
        out += '\n';
    }
    if (!rep.checks.checks.empty()) {
        out += "check,name,residual,tolerance,pass\n";
        for (const Check& c : rep.checks.checks) {
            out += "check," + c.name + ',' + detail::fmt17(c.residual) + ',' +
                   detail::fmt17(c.tolerance) + ',' + (c.pass ? "1" : "0");
            out += '\n';
        }
    }
    return out;
}

inline void emit_report(const RunReport& rep, const RunConfig& cfg) {
    const std::string text = render_report(rep, cfg.format);
    if (cfg.out_path.empty()) {
        std::fputs(text.c_str(), stdout);
        return;
    }
    std::ofstream out(cfg.out_path, std::ios::binary);
    if (!out) throw io_error("cannot open output file: " + cfg.out_path);
    out << text;
    if (!out) throw io_error("failed writing output file: " + cfg.out_path);
}

inline RunReport cmd_spectrum(const RunConfig& cfg) {
    if (cfg.n_max < 0) throw validation_error("n_max must be >= 0");
    const RepresentationWeight wt = weight_from_coupling(cfg.g);
    RunReport rep;
    rep.config = {{"command", "spectrum"},
                  {"g", cfg.g},
                  {"omega", cfg.omega},
                  {"n_max", cfg.n_max}};
    ordered_json levels = ordered_json::array();
    rep.csv_lines.push_back("n,energy");
    for (int n = 0; n <= cfg.n_max; ++n) {
        const double e = energy_level(n, cfg.omega, wt);
        levels.push_back({{"n", n}, {"energy", e}});
        rep.csv_lines.push_back(std::to_string(n) + ',' + detail::fmt17(e));
    }
    rep.results = {{"j", wt.j}, {"levels", std::move(levels)}};
    return rep;
}

inline RunReport cmd_rho(const RunConfig& cfg) {
    if (cfg.rho_override)
        throw validation_error(
            "the rho subcommand computes rho from a profile; --rho only "
            "applies to transitions and genfunc");
    if (cfg.profile.empty()) throw validation_error("--profile is required");
    const FrequencyProfile p = detail::resolve_profile(cfg);
    const ReflectionResult rr = detail::run_classical(cfg, p);

    RunReport rep;
    rep.config = {{"command", "rho"},
                  {"profile", detail::profile_config_json(cfg, p)}};
    rep.results = {{"rho", rr.rho},
                   {"c1", {{"re", rr.c1.real()}, {"im", rr.c1.imag()}}},
                   {"c2", {{"re", rr.c2.real()}, {"im", rr.c2.imag()}}}};
    rep.diagnostics = detail::classical_diagnostics_json(rr);
    const double flux = (std::norm(rr.c1) - std::norm(rr.c2)) *
                        (p.omega_plus / p.omega_minus);
    rep.checks.add("flux_conservation", std::abs(flux - 1.0), 1e-9);
    rep.checks.add("wronskian_drift", rr.wronskian_drift, 1e-9);

    rep.csv_lines = {"key,value",
                     "rho," + detail::fmt17(rr.rho),
                     "c1_re," + detail::fmt17(rr.c1.real()),
                     "c1_im," + detail::fmt17(rr.c1.imag()),
                     "c2_re," + detail::fmt17(rr.c2.real()),
                     "c2_im," + detail::fmt17(rr.c2.imag()),
                     "wronskian_drift," + detail::fmt17(rr.wronskian_drift),
                     "plateau_residual," + detail::fmt17(rr.plateau_residual),
                     "rho_error_estimate," + detail::fmt17(rr.rho_error_estimate),
                     "steps," + std::to_string(rr.steps)};
    return rep;
}

inline RunReport cmd_transitions(const RunConfig& cfg) {
    const RepresentationWeight wt = weight_from_coupling(cfg.g);
    const auto [rho, rr] = detail::resolve_rho(cfg);

    RunReport rep;
    rep.config = {{"command", "transitions"},
                  {"g", cfg.g},
                  {"rho_source", detail::rho_source_json(cfg)},
                  {"m_max", cfg.m_max},
                  {"tail_eps", cfg.tail_eps},
                  {"emit_both", cfg.emit_both}};
    if (rr) rep.diagnostics["classical"] = detail::classical_diagnostics_json(*rr);

    if (cfg.emit_both) {
        if (cfg.m_max < 0 || cfg.n_max < 0)
            throw validation_error("extents must be >= 0");
        rep.config["n_max"] = cfg.n_max;
        ordered_json rows = ordered_json::array();
        rep.csv_lines.push_back("m,n,w_hypergeometric,w_jacobi,difference");
        double worst = 0.0;
        for (int m = 0; m <= cfg.m_max; ++m) {
            ordered_json wh = ordered_json::array(), wj = ordered_json::array(),
                         dif = ordered_json::array();
            for (int n = 0; n <= cfg.n_max; ++n) {
                const TransitionQuery q{m, n, wt, rho};
                const double a =
                    transition_probability(q, ProbabilityMethod::hypergeometric);
                const double b =
                    transition_probability(q, ProbabilityMethod::jacobi);
                wh.push_back(a);
                wj.push_back(b);
                dif.push_back(a - b);
                const double mx = std::max(std::abs(a), std::abs(b));
                if (mx > 1e-250) worst = std::max(worst, std::abs(a - b) / mx);
                rep.csv_lines.push_back(std::to_string(m) + ',' +
                                        std::to_string(n) + ',' +
                                        detail::fmt17(a) + ',' +
                                        detail::fmt17(b) + ',' +
                                        detail::fmt17(a - b));
            }
            rows.push_back({{"m", m},
                            {"w_hypergeometric", std::move(wh)},
                            {"w_jacobi", std::move(wj)},
                            {"difference", std::move(dif)}});
        }
        rep.results = {{"j", wt.j}, {"rho", rho}, {"rows", std::move(rows)}};
        rep.checks.add("dual_route_max_rel_diff", worst, 1e-11);
        return rep;
    }

    const TransitionTable table =
        build_table(wt, rho, cfg.m_max, {cfg.tail_eps, 0});
    ordered_json rows = ordered_json::array();
    rep.csv_lines.push_back("m,n,w");
    for (int m = 0; m <= table.m_max; ++m) {
        const auto& row = table.w[static_cast<size_t>(m)];
        rows.push_back({{"m", m}, {"w", row}});
        for (size_t n = 0; n < row.size(); ++n)
            rep.csv_lines.push_back(std::to_string(m) + ',' +
                                    std::to_string(n) + ',' +
                                    detail::fmt17(row[n]));
    }
    rep.results = {{"j", wt.j}, {"rho", rho}, {"rows", std::move(rows)}};
    rep.diagnostics["row_sums"] = table.row_sums;
    rep.diagnostics["row_residuals"] = table.row_residuals;
    rep.diagnostics["tail_estimates"] = table.tail_estimates;
    rep.diagnostics["n_extent_max"] = table.n_extent_max;
    for (int m = 0; m <= table.m_max; ++m)
        rep.checks.add("row_residual_m" + std::to_string(m),
                       table.row_residuals[static_cast<size_t>(m)],
                       cfg.tail_eps);
    return rep;
}

inline RunReport cmd_genfunc(const RunConfig& cfg) {
    const RepresentationWeight wt = weight_from_coupling(cfg.g);
    const auto [rho, rr] = detail::resolve_rho(cfg);
    if (cfg.u_grid.empty() || cfg.v_grid.empty())
        throw validation_error("u and v grids must be non-empty");
    double max_u = 0.0;
    for (double u : cfg.u_grid) max_u = std::max(max_u, std::abs(u));
    for (double v : cfg.v_grid)
        if (!(std::abs(v) < 1.0))
            throw validation_error("grid magnitudes must be < 1");
    if (!(max_u < 1.0))
        throw validation_error("grid magnitudes must be < 1");

    RunReport rep;
    rep.config = {{"command", "genfunc"},
                  {"g", cfg.g},
                  {"rho_source", detail::rho_source_json(cfg)},
                  {"u_grid", cfg.u_grid},
                  {"v_grid", cfg.v_grid},
                  {"moment_m", cfg.m_max}};
    if (rr) rep.diagnostics["classical"] = detail::classical_diagnostics_json(*rr);

    const int m_rows = detail::series_row_count(max_u);
    const TransitionTable table = build_table(wt, rho, m_rows, {1e-12, 0});
    rep.diagnostics["series_rows"] = m_rows + 1;
    rep.diagnostics["n_extent_max"] = table.n_extent_max;

    ordered_json grid = ordered_json::array();
    rep.csv_lines.push_back("u,v,value,series_residual");
    double worst = 0.0;
    for (double u : cfg.u_grid)
        for (double v : cfg.v_grid) {
            double value = 0.0;
            try {
                value = generating_function({wt, rho, u, v});
            } catch (const numerical_error& e) {
                throw numerical_error(std::string(e.what()) +
                                      " (u=" + detail::fmt17(u) +
                                      ", v=" + detail::fmt17(v) +
                                      ", rho=" + detail::fmt17(rho) + ")");
            }
            double series = 0.0, upow = 1.0;
            for (int m = 0; m <= table.m_max; ++m) {
                double rowsum = 0.0, vpow = 1.0;
                for (double wmn : table.w[static_cast<size_t>(m)]) {
                    rowsum += vpow * wmn;
                    vpow *= v;
                }
                series += upow * rowsum;
                upow *= u;
            }
            const double residual = std::abs(value - series);
            worst = std::max(worst, residual);
            grid.push_back({{"u", u},
                            {"v", v},
                            {"value", value},
                            {"series_residual", residual}});
            rep.csv_lines.push_back(detail::fmt17(u) + ',' + detail::fmt17(v) +
                                    ',' + detail::fmt17(value) + ',' +
                                    detail::fmt17(residual));
        }

    const double ratio = adiabatic_ratio(rho);
    const double moment =
        first_moment(wt, rho, cfg.m_max) / (cfg.m_max + wt.j);
    rep.results = {{"j", wt.j},
                   {"rho", rho},
                   {"adiabatic_ratio", ratio},
                   {"moment_ratio", moment},
                   {"grid", std::move(grid)}};
    rep.checks.add("series_reconstruction_max", worst, 1e-9);
    rep.checks.add("adiabatic_vs_moment_m" + std::to_string(cfg.m_max),
                   std::abs(moment / ratio - 1.0), 1e-8);
    return rep;
}

inline RunReport cmd_verify(const RunConfig& cfg) {
    VerifyOptions opts;
    opts.tol_override = cfg.verify_tol;
    opts.stress_rho = cfg.stress_rho;
    for (double s : opts.stress_rho)
        if (!(s >= 0.0 && s < 1.0))
            throw validation_error("stress rho must lie in [0, 1)");

    RunReport rep;
    rep.config = {{"command", "verify"},
                  {"tol_override", cfg.verify_tol >= 0.0
                                       ? ordered_json(cfg.verify_tol)
                                       : ordered_json(nullptr)},
                  {"stress_rho", cfg.stress_rho}};
    rep.checks = run_verification_suite(opts);
    int failed = 0;
    for (const Check& c : rep.checks.checks)
        if (!c.pass) ++failed;
    rep.results = {{"all_pass", rep.checks.all_pass()},
                   {"checks_total", rep.checks.checks.size()},
                   {"checks_failed", failed},
                   {"max_residual", rep.checks.max_residual()}};
    return rep;
}

} // namespace singosc::cli
