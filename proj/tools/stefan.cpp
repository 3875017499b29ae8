#include <CLI11.hpp>

#include <algorithm>
#include <exception>
#include <iostream>
#include <string>

#include "cli/commands.hpp"

namespace {

int report_error(const std::string& tag, const std::string& message, int code) {
    std::cerr << "error[" << tag << "] " << message << '\n';
    return code;
}

void add_output(CLI::App* sub, stefan::cli::RunConfig& cfg) {
    sub->add_option("--out", cfg.out_dir, "output directory (required)");
}

void add_fixture(CLI::App* sub, stefan::cli::RunConfig& cfg, bool required = true) {
    auto* opt = sub->add_option("--fixture", cfg.fixture, "direct-exp | example1 | example2 | example3");
    if (required) opt->required();
    sub->add_option("--b", cfg.b, "initial front position (direct-exp, example2)");
}

void add_direct_grid(CLI::App* sub, stefan::cli::RunConfig& cfg) {
    sub->add_option("--nx", cfg.nx, "spatial intervals on the fixed domain")->capture_default_str();
    sub->add_option("--safety", cfg.safety, "fraction of the stable time step")->capture_default_str();
    sub->add_option("--tm", cfg.tm, "report time for the table metrics (default: first step)");
    sub->add_option("--field-rows", cfg.field_rows, "maximum stored field rows")->capture_default_str();
    sub->add_option("--front-rows", cfg.front_rows, "maximum rows in front.csv")->capture_default_str();
}

void add_inverse_common(CLI::App* sub, stefan::cli::RunConfig& cfg) {
    sub->add_option("--n", cfg.n, "time intervals")->capture_default_str();
    sub->add_option("--rule", cfg.rule, "midpoint | gauss3")->capture_default_str();
    sub->add_option("--prior", cfg.prior, "zero | exact")->capture_default_str();
    sub->add_option("--mx", cfg.mx, "initial-data panels (0 = automatic)")->capture_default_str();
    sub->add_option("--singular", cfg.singular, "substitution | plain")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    stefan::cli::RunConfig cfg;
    CLI::App app{"stefan: direct and inverse solvers for the one-phase Stefan problem"};
    app.require_subcommand(1);

    auto* direct = app.add_subcommand("direct", "march the front-fixing scheme on a fixture");
    add_fixture(direct, cfg);
    add_direct_grid(direct, cfg);
    add_output(direct, cfg);

    auto* inverse = app.add_subcommand("inverse", "recover the influx from a front");
    add_fixture(inverse, cfg, false);
    inverse->add_option("--path", cfg.path_file, "front CSV with header t,s or t,s,sdot");
    inverse->get_option("--fixture")->excludes("--path");
    add_inverse_common(inverse, cfg);
    inverse->add_option("--lambda", cfg.lambda, "Tikhonov weight")->capture_default_str();
    inverse->add_option("--noise", cfg.noise, "noise level")->capture_default_str();
    inverse->add_option("--noise-model", cfg.noise_model, "relative | additive | additive-derived")
        ->capture_default_str();
    inverse->add_option("--seeds", cfg.seeds, "number of noise realizations")->capture_default_str();
    inverse->add_option("--seed0", cfg.seed0, "first seed")->capture_default_str();
    add_output(inverse, cfg);

    auto* pipeline = app.add_subcommand("pipeline", "direct solve, then invert the computed front");
    add_fixture(pipeline, cfg);
    add_direct_grid(pipeline, cfg);
    add_inverse_common(pipeline, cfg);
    pipeline->add_option("--lambda", cfg.lambda, "Tikhonov weight")->capture_default_str();
    add_output(pipeline, cfg);

    auto* abel = app.add_subcommand("abel", "Abel operator and its inverse on a fixture influx");
    add_fixture(abel, cfg);
    abel->add_option("--mode", cfg.abel_mode, "forward | inverse | roundtrip")->capture_default_str();
    abel->add_option("--n", cfg.n, "sample intervals")->capture_default_str();
    abel->add_option("--panels", cfg.panels, "quadrature panels (0 = 2n)")->capture_default_str();
    add_output(abel, cfg);

    auto* sweep = app.add_subcommand("sweep", "grid of lambda x noise x seed");
    add_fixture(sweep, cfg);
    add_inverse_common(sweep, cfg);
    sweep->get_option("--prior")->default_str("exact");
    sweep->add_option("--lambdas", cfg.lambdas, "comma-separated lambda grid")->delimiter(',')->required();
    sweep->add_option("--noises", cfg.noises, "comma-separated noise levels")->delimiter(',');
    sweep->add_option("--noise-model", cfg.noise_model, "relative | additive | additive-derived")
        ->capture_default_str();
    sweep->add_option("--seeds", cfg.seeds, "seeds per noise level")->capture_default_str();
    sweep->add_option("--seed0", cfg.seed0, "first seed")->capture_default_str();
    sweep->add_flag("--condition", cfg.condition, "estimate the condition number per cell");
    add_output(sweep, cfg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report_error("config.args", e.what(), 2);
    }

    cfg.subcommand = app.get_subcommands().front()->get_name();
    if (cfg.subcommand == "sweep") {
        if (sweep->count("--prior") == 0) cfg.prior = "exact";
        const auto& raw = sweep->get_option("--noises")->results();
        const bool blank = std::any_of(raw.begin(), raw.end(), [](const std::string& v) { return v.empty(); });
        if (blank) return report_error("config.noises.empty", "--noises needs at least one value", 2);
        if (sweep->count("--noises") == 0) cfg.noises = {0.0};
    }

    try {
        return stefan::cli::dispatch(cfg);
    } catch (const stefan::Error& e) {
        return report_error(e.tag(), e.what(), e.is_configuration_class() ? 2 : 3);
    } catch (const std::exception& e) {
        return report_error("internal", e.what(), 3);
    }
}
