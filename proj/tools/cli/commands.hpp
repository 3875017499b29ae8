#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli/csv.hpp"
#include "cli/manifest.hpp"
#include "stefan/stefan.hpp"

namespace stefan::cli {

/// Every knob any subcommand understands. Unused fields keep their defaults.
struct RunConfig {
    std::string subcommand;
    std::string fixture;
    std::string path_file;
    std::string out_dir;

    std::size_t nx = 80;        // direct: spatial intervals
    std::size_t n = 1000;       // inverse: time intervals
    std::size_t mx = 0;         // initial-data panels (0 = automatic)
    double safety = 0.8;
    std::optional<double> tm;   // report time for table metrics
    std::optional<double> b;
    std::size_t field_rows = 101;
    std::size_t front_rows = 2001;

    std::string rule = "gauss3";
    std::string prior = "zero";
    std::string singular = "substitution";
    double lambda = 1e-3;
    double noise = 0.0;
    std::string noise_model = "relative";
    std::size_t seeds = 1;
    std::uint64_t seed0 = 0;

    std::vector<double> lambdas;
    std::vector<double> noises;
    bool condition = false;

    std::string abel_mode = "roundtrip";
    std::size_t panels = 0;  // Abel quadrature panels (0 = 2n)

    [[nodiscard]] nlohmann::json to_json() const {
        nlohmann::json j;
        j["subcommand"] = subcommand;
        if (!fixture.empty()) j["fixture"] = fixture;
        if (!path_file.empty()) j["path"] = path_file;
        if (subcommand == "direct" || subcommand == "pipeline") {
            j["nx"] = nx;
            j["safety"] = safety;
            if (tm) j["tm"] = *tm;
        }
        if (subcommand != "direct") j["n"] = n;
        if (subcommand == "inverse" || subcommand == "pipeline" || subcommand == "sweep") {
            j["rule"] = rule;
            j["prior"] = prior;
            j["singular"] = singular;
            j["mx"] = mx;
        }
        if (subcommand == "inverse" || subcommand == "pipeline") j["lambda"] = lambda;
        if (subcommand == "inverse") {
            j["noise"] = noise;
            j["noise_model"] = noise_model;
            j["seeds"] = seeds;
            j["seed0"] = seed0;
        }
        if (subcommand == "sweep") {
            j["lambdas"] = lambdas;
            j["noises"] = noises;
            j["noise_model"] = noise_model;
            j["seeds"] = seeds;
            j["seed0"] = seed0;
            j["condition"] = condition;
        }
        if (subcommand == "abel") {
            j["mode"] = abel_mode;
            j["panels"] = panels;
        }
        if (b) j["b"] = *b;
        return j;
    }
};

namespace detail {

inline void require(bool ok, const std::string& tag, const std::string& message) {
    if (!ok) fail(ErrorKind::configuration, tag, message);
}

inline StefanCase fixture_case(const RunConfig& cfg) {
    FixtureOverrides o;
    o.b = cfg.b;
    return make_fixture(cfg.fixture, o);
}

inline nlohmann::json json_number(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

inline std::string influx_csv(const LinearSystem& sys, const TikhonovResult& res, const StefanCase& c) {
    CsvWriter w({"t", "h_exact", "h_recovered"});
    for (std::size_t j = 0; j < sys.size(); ++j) {
        const double t = sys.node_times[j];
        w.cell(t).cell(c.exact ? c.exact->influx(t) : std::nan("")).cell(res.h[j]);
        w.end_row();
    }
    return w.str();
}

inline std::string field_csv(const TemperatureField& field) {
    CsvWriter w({"t", "xi", "u"});
    for (std::size_t r = 0; r < field.rows(); ++r) {
        for (std::size_t i = 0; i < field.xi.size(); ++i) {
            w.cell(field.t[r]).cell(field.xi[i]).cell(field.U[r][i]);
            w.end_row();
        }
    }
    return w.str();
}

inline std::size_t front_stride(std::size_t samples, std::size_t rows) {
    const std::size_t slots = std::max<std::size_t>(rows, 2) - 1;
    return std::max<std::size_t>(1, (samples - 1 + slots - 1) / slots);
}

inline nlohmann::json direct_metrics(const DirectSolution& sol, const StefanCase& c, double tm) {
    nlohmann::json m;
    const auto& g = sol.grid;
    m["grid"] = {{"nx", g.N}, {"steps", g.steps}, {"k", g.k}, {"dxi", g.dxi}, {"r", g.r}};
    if (c.exact) {
        const auto t = table_error_metrics(sol.field, sol.path, c, tm);
        m["table"] = {{"t", t.t},       {"step", t.step}, {"e_u", t.e_u},  {"e_s", t.e_s},
                      {"e_sdot", t.e_sdot}, {"S", t.S},    {"Sdot", t.Sdot}};
    }
    m["energy_residual_T"] = energy_residual(c, sol.field, sol.path, sol.field.rows() - 1);
    double min_u = 0.0;
    for (const auto& row : sol.field.U) min_u = std::min(min_u, *std::min_element(row.begin(), row.end()));
    m["min_u"] = min_u;
    m["max_sdot"] = *std::max_element(sol.path.sdot.begin(), sol.path.sdot.end());
    m["bound_M"] = c.bound_M();
    return m;
}

inline DirectSolution run_direct_solver(const RunConfig& cfg, const StefanCase& c, double tm) {
    const auto grid = plan_grid(c, cfg.nx, cfg.safety);
    DirectOptions opts;
    opts.max_field_rows = cfg.field_rows;
    opts.keep_times = {tm};
    return solve_direct(c, grid, opts);
}

}  // namespace detail

inline void validate(const RunConfig& cfg) {
    using detail::require;
    require(cfg.lambda > 0.0, "config.lambda.nonpositive", "--lambda must be > 0");
    require(cfg.noise >= 0.0, "config.noise.negative", "--noise must be >= 0");
    require(cfg.safety > 0.0 && cfg.safety <= 1.0, "config.safety.range", "--safety must lie in (0, 1]");
    require(cfg.seeds >= 1, "config.seeds.zero", "--seeds must be >= 1");
    require(cfg.nx >= 4, "config.nx.too_small", "--nx must be >= 4");
    require(cfg.n >= 2, "config.n.too_small", "--n must be >= 2");
    require(!cfg.b || *cfg.b > 0.0, "config.b.nonpositive", "--b must be > 0");
    require(!cfg.tm || *cfg.tm >= 0.0, "config.tm.negative", "--tm must be >= 0");
    for (double l : cfg.lambdas) require(l > 0.0, "config.lambda.nonpositive", "every --lambdas entry must be > 0");
    for (double v : cfg.noises) require(v >= 0.0, "config.noise.negative", "every --noises entry must be >= 0");
    // parse enumerations early so typos fail before any work
    (void)parse_rule(cfg.rule);
    (void)parse_prior(cfg.prior);
    (void)parse_singular_panel(cfg.singular);
    (void)parse_noise_model(cfg.noise_model);
    require(cfg.abel_mode == "forward" || cfg.abel_mode == "inverse" || cfg.abel_mode == "roundtrip",
            "config.abel.mode", "--mode must be forward, inverse or roundtrip");
    require(parse_prior(cfg.prior) != PriorMode::custom, "config.prior.unknown", "--prior must be zero or exact");
    require(!cfg.out_dir.empty(), "config.out.missing", "--out is required");
}

inline int run_direct(const RunConfig& cfg) {
    const auto c = detail::fixture_case(cfg);
    const auto grid = plan_grid(c, cfg.nx, cfg.safety);
    const double tm = cfg.tm.value_or(grid.k);
    const auto sol = detail::run_direct_solver(cfg, c, tm);

    OutputDir out(cfg.out_dir);
    out.write("field.csv", detail::field_csv(sol.field));
    out.write("front.csv", front_csv(sol.path, detail::front_stride(sol.path.size(), cfg.front_rows)));
    auto& m = out.manifest();
    m["tool"] = "stefan";
    m["config"] = cfg.to_json();
    m["metrics"] = detail::direct_metrics(sol, c, tm);
    out.finish();
    return 0;
}

struct InverseRun {
    LinearSystem sys;
    TikhonovResult result;
    ExperimentReport report;
};

inline int run_inverse(const RunConfig& cfg) {
    StefanCase c;
    FreeBoundaryPath clean;
    std::vector<std::string> warnings;
    detail::require(!cfg.fixture.empty() || !cfg.path_file.empty(), "config.args", "inverse needs --fixture or --path");
    if (!cfg.path_file.empty()) {
        auto ingested = ingest_path(cfg.path_file);
        warnings = std::move(ingested.warnings);
        clean = std::move(ingested.path);
        // measured fronts come without initial data: start from a cold, zero-temperature layer
        c.id = "path";
        c.b = clean.s.front();
        c.T = clean.horizon();
        c.initial_state = Signal::constant(0.0);
        c.influx = Signal::constant(1.0);
        detail::require(parse_prior(cfg.prior) != PriorMode::exact, "config.prior.no_exact",
                        "--prior exact needs --fixture");
        detail::require(c.b > 0.0, "input.path.front", "front file must start at s > 0");
    } else {
        c = detail::fixture_case(cfg);
        clean = sample_path(c, cfg.n);
    }
    const PanelRule rule = rule_nodes(cfg.rule);
    AssemblyOptions assembly;
    assembly.initial_panels = cfg.mx;
    assembly.singular = parse_singular_panel(cfg.singular);
    const TikhonovConfig tik{cfg.lambda, parse_prior(cfg.prior), {}};
    const std::size_t runs = cfg.noise > 0.0 ? cfg.seeds : 1;

    OutputDir out(cfg.out_dir);
    CsvWriter report({"seed", "rel_l2", "rel_l2_window", "residual", "solution_norm", "h_origin"});
    nlohmann::json per_seed = nlohmann::json::array();
    double mean_rel = 0.0;
    for (std::size_t k = 0; k < runs; ++k) {
        const std::uint64_t seed = cfg.seed0 + k;
        const auto path = add_noise(clean, {cfg.noise, seed, parse_noise_model(cfg.noise_model)});
        const auto sys = assemble_system(path, c, rule, assembly);
        const auto res = tikhonov_solve(sys, tik, c);
        ExperimentReport r;
        stefan::detail::score(r, sys, res, c, 0.1);
        if (k == 0) out.write("influx.csv", detail::influx_csv(sys, res, c));
        report.cell(static_cast<std::size_t>(seed)).cell(r.rel_l2).cell(r.rel_l2_window).cell(r.residual)
            .cell(r.solution_norm).cell(r.h_origin);
        report.end_row();
        per_seed.push_back({{"seed", seed},
                            {"rel_l2", detail::json_number(r.rel_l2)},
                            {"rel_l2_window", detail::json_number(r.rel_l2_window)},
                            {"residual", r.residual},
                            {"h_origin_extrapolated", r.h_origin}});
        mean_rel += r.rel_l2;
    }
    out.write("report.csv", report.str());
    auto& m = out.manifest();
    m["tool"] = "stefan";
    m["config"] = cfg.to_json();
    m["metrics"] = {{"prior", cfg.prior},
                    {"runs", per_seed},
                    {"rel_l2", detail::json_number(mean_rel / static_cast<double>(runs))},
                    {"h_origin_note", "h(0) is a linear extrapolation from the first two recovered nodes"}};
    m["warnings"] = warnings;
    out.finish();
    return 0;
}

inline int run_pipeline(const RunConfig& cfg) {
    const auto c = detail::fixture_case(cfg);
    const auto grid = plan_grid(c, cfg.nx, cfg.safety);
    const double tm = cfg.tm.value_or(grid.k);
    const auto sol = detail::run_direct_solver(cfg, c, tm);
    const auto path = resample_path(sol.path, cfg.n);

    AssemblyOptions assembly;
    assembly.initial_panels = cfg.mx;
    assembly.singular = parse_singular_panel(cfg.singular);
    const auto sys = assemble_system(path, c, rule_nodes(cfg.rule), assembly);
    const auto res = tikhonov_solve(sys, {cfg.lambda, parse_prior(cfg.prior), {}}, c);
    ExperimentReport r;
    stefan::detail::score(r, sys, res, c, 0.1);

    OutputDir out(cfg.out_dir);
    out.write("field.csv", detail::field_csv(sol.field));
    out.write("front.csv", front_csv(sol.path, detail::front_stride(sol.path.size(), cfg.front_rows)));
    out.write("influx.csv", detail::influx_csv(sys, res, c));
    auto& m = out.manifest();
    m["tool"] = "stefan";
    m["config"] = cfg.to_json();
    m["metrics"] = {{"direct", detail::direct_metrics(sol, c, tm)},
                    {"rel_l2", detail::json_number(r.rel_l2)},
                    {"rel_l2_window", detail::json_number(r.rel_l2_window)},
                    {"window", {0.1 * c.T, c.T}},
                    {"residual", r.residual},
                    {"prior", cfg.prior}};
    out.finish();
    return 0;
}

inline int run_abel(const RunConfig& cfg) {
    const auto c = detail::fixture_case(cfg);
    const std::size_t n = cfg.n;
    const int panels = static_cast<int>(cfg.panels > 0 ? cfg.panels : 2 * n);
    const auto rule = rule_nodes(RuleName::gauss3);
    const auto t = uniform_nodes(0.0, c.T, n);
    std::vector<double> h(n + 1);
    for (std::size_t j = 0; j <= n; ++j) h[j] = c.influx(t[j]);

    OutputDir out(cfg.out_dir);
    nlohmann::json metrics;
    if (cfg.abel_mode == "forward") {
        CsvWriter w({"t", "h", "abel_h"});
        for (std::size_t j = 0; j <= n; ++j) {
            w.cell(t[j]).cell(h[j]).cell(j == 0 ? 0.0 : abel_forward(c.influx, t[j], panels, rule));
            w.end_row();
        }
        out.write("abel.csv", w.str());
    } else if (cfg.abel_mode == "inverse") {
        const auto F = Signal::sampled(t, h);
        CsvWriter w({"t", "F", "abel_inverse_F"});
        for (std::size_t j = 1; j <= n; ++j) {
            w.cell(t[j]).cell(h[j]).cell(abel_inverse(F, t[j], panels, rule));
            w.end_row();
        }
        out.write("abel.csv", w.str());
    } else {
        std::vector<double> F(n + 1, 0.0);
        for (std::size_t j = 1; j <= n; ++j) F[j] = abel_forward(c.influx, t[j], panels, rule);
        const auto Fs = Signal::sampled(t, F);
        CsvWriter w({"t", "h", "abel_h", "roundtrip_h", "rel_error"});
        double worst = 0.0;
        for (std::size_t j = 1; j <= n; ++j) {
            const double back = abel_inverse(Fs, t[j], panels, rule);
            const double rel = std::abs(back - h[j]) / std::abs(h[j]);
            if (t[j] >= 0.1 * c.T && t[j] <= 0.9 * c.T) worst = std::max(worst, rel);
            w.cell(t[j]).cell(h[j]).cell(F[j]).cell(back).cell(rel);
            w.end_row();
        }
        out.write("abel.csv", w.str());
        metrics["max_rel_error_interior"] = worst;
        metrics["interior"] = {0.1 * c.T, 0.9 * c.T};
    }
    auto& m = out.manifest();
    m["tool"] = "stefan";
    m["config"] = cfg.to_json();
    m["metrics"] = metrics;
    out.finish();
    return 0;
}

inline std::string report_csv(const std::vector<ExperimentReport>& reports) {
    CsvWriter w({"fixture", "N", "rule", "lambda", "prior", "noise", "noise_model", "seed", "ok", "error_tag",
                 "rel_l2", "rel_l2_window", "residual", "solution_norm", "condition", "h_origin", "origin_error",
                 "median_late_error", "config_hash"});
    for (const auto& r : reports) {
        w.cell(r.fixture).cell(r.N).cell(to_string(r.rule)).cell(r.lambda).cell(to_string(r.prior)).cell(r.noise)
            .cell(to_string(r.noise_model)).cell(static_cast<std::size_t>(r.seed)).cell(r.ok).cell(r.error_tag)
            .cell(r.rel_l2).cell(r.rel_l2_window).cell(r.residual).cell(r.solution_norm).cell(r.condition)
            .cell(r.h_origin).cell(r.origin_error).cell(r.median_late_error).cell(r.config_hash);
        w.end_row();
    }
    return w.str();
}

inline int run_sweep_command(const RunConfig& cfg) {
    detail::require(!cfg.lambdas.empty(), "config.lambdas.empty", "--lambdas needs at least one value");
    detail::require(!cfg.noises.empty(), "config.noises.empty", "--noises needs at least one value");
    const auto c = detail::fixture_case(cfg);
    SweepConfig sc;
    sc.N = cfg.n;
    sc.rule = parse_rule(cfg.rule);
    sc.lambdas = cfg.lambdas;
    sc.noises = cfg.noises;
    sc.seeds = cfg.seeds;
    sc.seed0 = cfg.seed0;
    sc.prior = parse_prior(cfg.prior);
    sc.noise_model = parse_noise_model(cfg.noise_model);
    sc.assembly.initial_panels = cfg.mx;
    sc.assembly.singular = parse_singular_panel(cfg.singular);
    sc.estimate_condition = cfg.condition;
    const auto reports = run_sweep(c, sc);

    OutputDir out(cfg.out_dir);
    out.write("report.csv", report_csv(reports));

    CsvWriter curves({"lambda", "noise", "t", "h_exact", "h_recovered"});
    for (const auto& r : reports) {
        if (!r.ok || r.seed != cfg.seed0) continue;
        for (std::size_t j = 0; j < r.h.size(); ++j) {
            curves.cell(r.lambda).cell(r.noise).cell(r.node_times[j])
                .cell(r.h_exact.empty() ? std::nan("") : r.h_exact[j]).cell(r.h[j]);
            curves.end_row();
        }
    }
    out.write("curves.csv", curves.str());

    CsvWriter errors({"lambda", "noise", "runs", "failed", "mean_rel_l2", "min_rel_l2", "max_rel_l2"});
    nlohmann::json summary = nlohmann::json::array();
    for (const auto& s : summarize(reports)) {
        errors.cell(s.lambda).cell(s.noise).cell(s.runs).cell(s.failed).cell(s.mean_rel_l2).cell(s.min_rel_l2)
            .cell(s.max_rel_l2);
        errors.end_row();
        summary.push_back({{"lambda", s.lambda},
                           {"noise", s.noise},
                           {"runs", s.runs},
                           {"failed", s.failed},
                           {"mean_rel_l2", detail::json_number(s.mean_rel_l2)}});
    }
    out.write("noise_error.csv", errors.str());

    auto& m = out.manifest();
    m["tool"] = "stefan";
    m["config"] = cfg.to_json();
    m["config_hash"] = reports.empty() ? "" : reports.front().config_hash;
    m["metrics"] = {{"summary", summary}};
    out.finish();
    return 0;
}

inline int dispatch(const RunConfig& cfg) {
    validate(cfg);
    if (cfg.subcommand == "direct") return run_direct(cfg);
    if (cfg.subcommand == "inverse") return run_inverse(cfg);
    if (cfg.subcommand == "pipeline") return run_pipeline(cfg);
    if (cfg.subcommand == "abel") return run_abel(cfg);
    if (cfg.subcommand == "sweep") return run_sweep_command(cfg);
    fail(ErrorKind::configuration, "config.subcommand.unknown", "unknown subcommand '" + cfg.subcommand + "'");
}

}  // namespace stefan::cli
