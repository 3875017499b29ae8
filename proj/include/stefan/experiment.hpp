#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "stefan/direct.hpp"
#include "stefan/error.hpp"
#include "stefan/inverse.hpp"
#include "stefan/problem.hpp"
#include "stefan/quadrature.hpp"

namespace stefan {

// ---------------------------------------------------------------------------
// Random numbers

/// splitmix64 finalizer; turns consecutive seeds into decorrelated states.
[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Standard normal deviates from mt19937_64 via Box-Muller. Unlike
/// std::normal_distribution the sequence is fixed by the seed alone, on every
/// standard library.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    double operator()() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// ---------------------------------------------------------------------------
// Noise

enum class NoiseModel {
    relative,          // s_j (1 + p e_j), sdot_j (1 + p e'_j), independent draws
    additive,          // s_j + p ||s||_inf e_j, sdot untouched
    additive_derived,  // s_j + p ||s||_inf e_j, sdot by centered differences of noisy s
};

[[nodiscard]] inline std::string_view to_string(NoiseModel m) {
    switch (m) {
        case NoiseModel::relative: return "relative";
        case NoiseModel::additive: return "additive";
        case NoiseModel::additive_derived: return "additive-derived";
    }
    return "relative";
}

[[nodiscard]] inline NoiseModel parse_noise_model(std::string_view name) {
    if (name == "relative") return NoiseModel::relative;
    if (name == "additive") return NoiseModel::additive;
    if (name == "additive-derived") return NoiseModel::additive_derived;
    fail(ErrorKind::configuration, "config.noise_model.unknown", "unknown noise model '" + std::string(name) + "'");
}

struct NoiseSpec {
    double level = 0.0;
    std::uint64_t seed = 0;
    NoiseModel model = NoiseModel::relative;
};

/// Perturbs the front samples with Gaussian noise of the given level.
/// Deterministic in (seed, model); the normalized deviates do not depend on
/// the level, so sweeps over levels share one noise realization per seed.
[[nodiscard]] inline FreeBoundaryPath add_noise(const FreeBoundaryPath& path, const NoiseSpec& spec) {
    if (!(spec.level >= 0.0)) {
        fail(ErrorKind::configuration, "config.noise.negative", "noise level must be >= 0");
    }
    FreeBoundaryPath out = path;
    if (spec.level == 0.0) return out;
    GaussianStream gauss(spec.seed);
    const std::size_t n = path.size();
    switch (spec.model) {
        case NoiseModel::relative:
            for (std::size_t j = 0; j < n; ++j) out.s[j] = path.s[j] * (1.0 + spec.level * gauss());
            for (std::size_t j = 0; j < n; ++j) out.sdot[j] = path.sdot[j] * (1.0 + spec.level * gauss());
            break;
        case NoiseModel::additive:
        case NoiseModel::additive_derived: {
            double sup = 0.0;
            for (double v : path.s) sup = std::max(sup, std::abs(v));
            for (std::size_t j = 0; j < n; ++j) out.s[j] = path.s[j] + spec.level * sup * gauss();
            if (spec.model == NoiseModel::additive_derived) out.sdot = centered_differences(out.t, out.s);
            break;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Metrics

/// ||h_exact - h||_2 / ||h_exact||_2 over the recovery nodes.
[[nodiscard]] inline double rel_l2_error(std::span<const double> h, std::span<const double> h_exact) {
    if (h.size() != h_exact.size()) {
        fail(ErrorKind::domain, "domain.metric.length", "error metric needs equal-length samples");
    }
    double num = 0.0;
    double den = 0.0;
    for (std::size_t j = 0; j < h.size(); ++j) {
        num += (h_exact[j] - h[j]) * (h_exact[j] - h[j]);
        den += h_exact[j] * h_exact[j];
    }
    if (!(den > 0.0)) fail(ErrorKind::domain, "domain.metric.zero_reference", "reference influx has zero norm");
    return std::sqrt(num / den);
}

/// Same metric restricted to nodes with times in [lo, hi].
[[nodiscard]] inline double rel_l2_error(std::span<const double> h, std::span<const double> h_exact,
                                         std::span<const double> times, double lo, double hi) {
    std::vector<double> a;
    std::vector<double> b;
    for (std::size_t j = 0; j < times.size(); ++j) {
        if (times[j] >= lo && times[j] <= hi) {
            a.push_back(h[j]);
            b.push_back(h_exact[j]);
        }
    }
    return rel_l2_error(a, b);
}

struct TableMetrics {
    double e_u = 0.0;     // (1/N) sum_{i<N} |1 - U_i / u(xi_i S_m, t_m)|
    double e_s = 0.0;     // |1 - S_m / s(t_m)|
    double e_sdot = 0.0;  // |1 - Sdot_m / sdot(t_m)|
    std::size_t row = 0;
    std::size_t step = 0;
    double t = 0.0;
    double S = 0.0;
    double Sdot = 0.0;
};

/// Temperature and front errors at the recorded row nearest t_m. The field
/// points sit at x_i = xi_i S_m, the numerical front position.
[[nodiscard]] inline TableMetrics table_error_metrics(const TemperatureField& field, const FreeBoundaryPath& path,
                                                      const StefanCase& c, double t_m) {
    if (!c.exact) fail(ErrorKind::configuration, "config.exact.missing", "table metrics need an exact solution");
    TableMetrics out;
    out.row = field.nearest_row(t_m);
    out.step = field.steps[out.row];
    out.t = field.t[out.row];
    if (out.step >= path.size()) {
        fail(ErrorKind::validation, "validation.path.short", "front path does not reach the requested step");
    }
    out.S = path.s[out.step];
    out.Sdot = path.sdot[out.step];
    const auto& U = field.U[out.row];
    const std::size_t N = U.size() - 1;
    double sum = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double exact = c.exact->temperature(field.xi[i] * out.S, out.t);
        sum += std::abs(1.0 - U[i] / exact);
    }
    out.e_u = sum / static_cast<double>(N);
    out.e_s = std::abs(1.0 - out.S / c.exact->front(out.t));
    out.e_sdot = std::abs(1.0 - out.Sdot / c.exact->front_velocity(out.t));
    return out;
}

// ---------------------------------------------------------------------------
// Sweeps

/// 64-bit FNV-1a; a stable fingerprint for configuration strings.
[[nodiscard]] inline std::uint64_t fnv1a64(std::string_view text) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

struct SweepConfig {
    std::size_t N = 1000;
    RuleName rule = RuleName::gauss3;
    std::vector<double> lambdas{1e-3};
    std::vector<double> noises{0.0};
    std::size_t seeds = 1;
    std::uint64_t seed0 = 0;
    PriorMode prior = PriorMode::exact;
    NoiseModel noise_model = NoiseModel::relative;
    AssemblyOptions assembly{};
    bool estimate_condition = false;
    double window_start = 0.1;  // fraction of T where the windowed error starts

    [[nodiscard]] std::string canonical(std::string_view fixture) const {
        std::ostringstream os;
        os.precision(17);
        os << "fixture=" << fixture << ";N=" << N << ";rule=" << to_string(rule) << ";lambdas=";
        for (double l : lambdas) os << l << ',';
        os << ";noises=";
        for (double n : noises) os << n << ',';
        os << ";seeds=" << seeds << ";seed0=" << seed0 << ";prior=" << to_string(prior)
           << ";noise_model=" << to_string(noise_model) << ";mx=" << assembly.initial_panels
           << ";singular=" << to_string(assembly.singular) << ";window=" << window_start;
        return os.str();
    }
};

struct ExperimentReport {
    std::string fixture;
    std::size_t N = 0;
    RuleName rule = RuleName::gauss3;
    double lambda = 0.0;
    PriorMode prior = PriorMode::zero;
    double noise = 0.0;
    NoiseModel noise_model = NoiseModel::relative;
    std::uint64_t seed = 0;
    std::string config_hash;

    bool ok = true;
    std::string error_tag;

    double rel_l2 = std::numeric_limits<double>::quiet_NaN();
    double rel_l2_window = std::numeric_limits<double>::quiet_NaN();
    double residual = std::numeric_limits<double>::quiet_NaN();
    double solution_norm = std::numeric_limits<double>::quiet_NaN();
    double condition = std::numeric_limits<double>::quiet_NaN();
    double h_origin = std::numeric_limits<double>::quiet_NaN();
    double origin_error = std::numeric_limits<double>::quiet_NaN();       // |h - h_exact| at the first node
    double median_late_error = std::numeric_limits<double>::quiet_NaN();  // median |h - h_exact| on [0.2T, T]

    std::vector<double> node_times;
    std::vector<double> h;
    std::vector<double> h_exact;
    std::vector<double> pointwise_error;
};

namespace detail {

inline double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (v.size() % 2 == 1) return *mid;
    const double upper = *mid;
    const double lower = *std::max_element(v.begin(), mid);
    return 0.5 * (lower + upper);
}

/// Fills the error fields of `r` from a solved system.
inline void score(ExperimentReport& r, const LinearSystem& sys, const TikhonovResult& res, const StefanCase& c,
                  double window_start) {
    r.node_times = sys.node_times;
    r.h = res.h;
    r.h_origin = res.h_origin;
    r.residual = res.residual_norm;
    r.solution_norm = res.solution_norm;
    if (!c.exact) return;
    const double T = sys.collocation_times.back();
    r.h_exact.resize(sys.size());
    r.pointwise_error.resize(sys.size());
    std::vector<double> late;
    for (std::size_t j = 0; j < sys.size(); ++j) {
        r.h_exact[j] = c.exact->influx(sys.node_times[j]);
        r.pointwise_error[j] = std::abs(r.h[j] - r.h_exact[j]);
        if (sys.node_times[j] >= 0.2 * T) late.push_back(r.pointwise_error[j]);
    }
    r.rel_l2 = rel_l2_error(r.h, r.h_exact);
    r.rel_l2_window = rel_l2_error(r.h, r.h_exact, r.node_times, window_start * T, T);
    r.origin_error = r.pointwise_error.front();
    r.median_late_error = median(std::move(late));
}

}  // namespace detail

/// Runs the full grid lambda x noise x seed on `c`:
/// sample path -> add noise -> assemble -> Tikhonov solve -> metrics.
/// Each (noise, seed) cell is assembled once and solved for every lambda.
/// Cell faults are recorded in the report instead of aborting the sweep.
/// Reports come back sorted by (lambda, noise, seed).
[[nodiscard]] inline std::vector<ExperimentReport> run_sweep(const StefanCase& c, const SweepConfig& config) {
    if (config.lambdas.empty()) fail(ErrorKind::configuration, "config.lambdas.empty", "lambda grid is empty");
    if (config.noises.empty()) fail(ErrorKind::configuration, "config.noises.empty", "noise grid is empty");
    if (config.seeds == 0) fail(ErrorKind::configuration, "config.seeds.zero", "need at least one seed");
    for (double l : config.lambdas) {
        if (!(l > 0.0)) fail(ErrorKind::configuration, "config.lambda.nonpositive", "every lambda must be > 0");
    }
    for (double n : config.noises) {
        if (!(n >= 0.0)) fail(ErrorKind::configuration, "config.noise.negative", "noise levels must be >= 0");
    }
    const std::string hash = [&] {
        std::ostringstream os;
        os << std::hex << fnv1a64(config.canonical(c.id));
        return os.str();
    }();
    const PanelRule rule = rule_nodes(config.rule);
    const FreeBoundaryPath clean = sample_path(c, config.N);

    std::vector<ExperimentReport> reports;
    for (double noise : config.noises) {
        for (std::size_t k = 0; k < config.seeds; ++k) {
            const std::uint64_t seed = config.seed0 + k;
            ExperimentReport base;
            base.fixture = c.id;
            base.N = config.N;
            base.rule = config.rule;
            base.prior = config.prior;
            base.noise = noise;
            base.noise_model = config.noise_model;
            base.seed = seed;
            base.config_hash = hash;
            try {
                const auto path = add_noise(clean, {noise, seed, config.noise_model});
                const auto sys = assemble_system(path, c, rule, config.assembly);
                const TikhonovSolver solver(sys);
                const auto prior = resolve_prior({config.lambdas.front(), config.prior, {}}, sys, c);
                const double cond =
                    config.estimate_condition ? estimate_condition(sys).ratio : std::numeric_limits<double>::quiet_NaN();
                for (double lambda : config.lambdas) {
                    ExperimentReport r = base;
                    r.lambda = lambda;
                    r.condition = cond;
                    try {
                        detail::score(r, sys, solver.solve(lambda, prior), c, config.window_start);
                    } catch (const Error& e) {
                        r.ok = false;
                        r.error_tag = e.tag();
                    }
                    reports.push_back(std::move(r));
                }
            } catch (const Error& e) {
                for (double lambda : config.lambdas) {
                    ExperimentReport r = base;
                    r.lambda = lambda;
                    r.ok = false;
                    r.error_tag = e.tag();
                    reports.push_back(std::move(r));
                }
            }
        }
    }
    std::stable_sort(reports.begin(), reports.end(), [](const ExperimentReport& a, const ExperimentReport& b) {
        return std::tie(a.lambda, a.noise, a.seed) < std::tie(b.lambda, b.noise, b.seed);
    });
    return reports;
}

struct SweepSummary {
    double lambda = 0.0;
    double noise = 0.0;
    std::size_t runs = 0;
    std::size_t failed = 0;
    double mean_rel_l2 = 0.0;
    double min_rel_l2 = 0.0;
    double max_rel_l2 = 0.0;
};

/// Seed averages per (lambda, noise), in sorted order. Failed cells are
/// counted but excluded from the statistics.
[[nodiscard]] inline std::vector<SweepSummary> summarize(const std::vector<ExperimentReport>& reports) {
    std::map<std::pair<double, double>, SweepSummary> groups;
    for (const auto& r : reports) {
        auto& g = groups[{r.lambda, r.noise}];
        g.lambda = r.lambda;
        g.noise = r.noise;
        ++g.runs;
        if (!r.ok) {
            ++g.failed;
            continue;
        }
        const std::size_t good = g.runs - g.failed;
        if (good == 1) {
            g.min_rel_l2 = g.max_rel_l2 = r.rel_l2;
        } else {
            g.min_rel_l2 = std::min(g.min_rel_l2, r.rel_l2);
            g.max_rel_l2 = std::max(g.max_rel_l2, r.rel_l2);
        }
        g.mean_rel_l2 += r.rel_l2;
    }
    std::vector<SweepSummary> out;
    for (auto& [key, g] : groups) {
        const std::size_t good = g.runs - g.failed;
        g.mean_rel_l2 = good > 0 ? g.mean_rel_l2 / static_cast<double>(good) : std::numeric_limits<double>::quiet_NaN();
        out.push_back(g);
    }
    return out;
}

/// Resamples a (possibly fine, possibly nonuniform) path onto t_j = jT/N by
/// linear interpolation. Used to feed solver output to the inverse problem.
[[nodiscard]] inline FreeBoundaryPath resample_path(const FreeBoundaryPath& path, std::size_t N) {
    if (N < 1 || path.size() < 2) fail(ErrorKind::configuration, "config.n.too_small", "resampling needs N >= 1");
    const Signal s = Signal::sampled(path.t, path.s);
    const Signal sdot = Signal::sampled(path.t, path.sdot);
    FreeBoundaryPath out;
    out.t = uniform_nodes(path.t.front(), path.t.back(), N);
    out.s.resize(N + 1);
    out.sdot.resize(N + 1);
    for (std::size_t j = 0; j <= N; ++j) {
        out.s[j] = s(out.t[j]);
        out.sdot[j] = sdot(out.t[j]);
    }
    return out;
}

}  // namespace stefan
