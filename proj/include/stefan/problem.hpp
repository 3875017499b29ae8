#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "stefan/error.hpp"
#include "stefan/signal.hpp"

namespace stefan {

/// Closed-form solution of a fixture, used for validation and as the
/// reference in error metrics.
struct ExactSolution {
    std::function<double(double)> front;           // s(t)
    std::function<double(double)> front_velocity;   // ds/dt
    std::function<double(double, double)> temperature;  // u(x, t)
    std::function<double(double)> influx;          // h(t) = -u_x(0, t)
};

/// One-phase Stefan problem data on [0, T] with initial front b.
///
/// Assumptions checked by validate_case(): h > 0 on [0, T] and
/// 0 <= u0(x) <= H (b - x) on [0, b].
struct StefanCase {
    std::string id;
    double b = 0.0;
    double T = 0.0;
    Signal influx;
    Signal initial_state;
    double H = 0.0;
    std::optional<ExactSolution> exact;

    /// M = max(sup |h|, H), with the supremum taken over a 1001-point scan.
    [[nodiscard]] double bound_M() const {
        double sup = 0.0;
        constexpr int kScan = 1000;
        for (int i = 0; i <= kScan; ++i) {
            sup = std::max(sup, std::abs(influx(T * i / kScan)));
        }
        return std::max(sup, H);
    }
};

/// Front samples on a uniform time grid: the datum of the inverse problem.
struct FreeBoundaryPath {
    std::vector<double> t;
    std::vector<double> s;
    std::vector<double> sdot;

    [[nodiscard]] std::size_t size() const noexcept { return t.size(); }
    [[nodiscard]] std::size_t intervals() const noexcept { return t.empty() ? 0 : t.size() - 1; }
    [[nodiscard]] double horizon() const { return t.back(); }
    [[nodiscard]] double step() const { return (t.back() - t.front()) / static_cast<double>(intervals()); }

    /// True when t is ascending with spacing equal to the mean step up to a
    /// relative tolerance.
    [[nodiscard]] bool is_uniform(double rel_tol = 1e-9) const {
        if (t.size() < 2) return false;
        const double h = step();
        if (!(h > 0.0)) return false;
        for (std::size_t j = 1; j < t.size(); ++j) {
            if (std::abs((t[j] - t[j - 1]) - h) > rel_tol * h) return false;
        }
        return true;
    }

    [[nodiscard]] bool lengths_agree() const noexcept {
        return t.size() == s.size() && t.size() == sdot.size();
    }
};

enum class Fixture { direct_exp, example1, example2, example3 };

inline constexpr std::array<std::string_view, 4> kFixtureNames{"direct-exp", "example1", "example2",
                                                                "example3"};

[[nodiscard]] inline std::string_view to_string(Fixture f) {
    return kFixtureNames[static_cast<std::size_t>(f)];
}

[[nodiscard]] inline Fixture parse_fixture(std::string_view name) {
    for (std::size_t i = 0; i < kFixtureNames.size(); ++i) {
        if (kFixtureNames[i] == name) return static_cast<Fixture>(i);
    }
    fail(ErrorKind::configuration, "config.fixture.unknown",
         "unknown fixture '" + std::string(name) + "'");
}

struct FixtureOverrides {
    std::optional<double> b;
    std::optional<double> T;
};

namespace detail {

// u = exp(t + b - x) - 1, s = t + b, h = exp(t + b). Shared by direct-exp and
// example2, which are the same exponential family.
inline StefanCase exponential_family(std::string id, double b, double T) {
    StefanCase c;
    c.id = std::move(id);
    c.b = b;
    c.T = T;
    c.influx = Signal::closed_form("exp(t+b)", [b](double t) { return std::exp(t + b); });
    c.initial_state = Signal::closed_form("exp(b-x)-1", [b](double x) { return std::expm1(b - x); });
    c.H = std::exp(b);
    c.exact = ExactSolution{
        [b](double t) { return t + b; },
        [](double) { return 1.0; },
        [b](double x, double t) { return std::expm1(t + b - x); },
        [b](double t) { return std::exp(t + b); },
    };
    return c;
}

inline StefanCase example1(double T) {
    using std::numbers::sqrt2;
    const double b = sqrt2 - 1.0;
    const double c0 = 1.0 - 1.0 / sqrt2;
    StefanCase c;
    c.id = "example1";
    c.b = b;
    c.T = T;
    auto h = [c0](double t) { return std::exp(c0 + 0.5 * t) / sqrt2; };
    c.influx = Signal::closed_form("exp(1-1/sqrt2+t/2)/sqrt2", h);
    c.initial_state = Signal::closed_form("exp(1-1/sqrt2-x/sqrt2)-1",
                                          [c0](double x) { return std::expm1(c0 - x / sqrt2); });
    c.H = h(0.0);
    c.exact = ExactSolution{
        [b](double t) { return b + t / sqrt2; },
        [](double) { return 1.0 / sqrt2; },
        [c0](double x, double t) { return std::expm1(c0 + 0.5 * t - x / sqrt2); },
        h,
    };
    return c;
}

// Neumann similarity solution with s(t) = sqrt(t + 1/4), standard erf.
inline StefanCase example3(double T) {
    const double amp = std::exp(0.25) * std::sqrt(std::numbers::pi) / 2.0;
    const double erf_half = std::erf(0.5);
    StefanCase c;
    c.id = "example3";
    c.b = 0.5;
    c.T = T;
    auto h = [](double t) { return std::exp(0.25) / (2.0 * std::sqrt(t + 0.25)); };
    c.influx = Signal::closed_form("exp(1/4)/(2sqrt(t+1/4))", h);
    c.initial_state = Signal::closed_form("exp(1/4)sqrt(pi)/2 (erf(1/2)-erf(x))",
                                          [amp, erf_half](double x) { return amp * (erf_half - std::erf(x)); });
    c.H = std::exp(0.25);
    c.exact = ExactSolution{
        [](double t) { return std::sqrt(t + 0.25); },
        [](double t) { return 0.5 / std::sqrt(t + 0.25); },
        [amp, erf_half](double x, double t) {
            return amp * (erf_half - std::erf(x / (2.0 * std::sqrt(t + 0.25))));
        },
        h,
    };
    return c;
}

}  // namespace detail

/// Builds one of the reference cases with its closed-form solution.
///
/// `b` may only be overridden for the exponential family (direct-exp,
/// example2); `T` may be overridden for every fixture.
[[nodiscard]] inline StefanCase make_fixture(Fixture f, const FixtureOverrides& overrides = {}) {
    if (overrides.b && f != Fixture::direct_exp && f != Fixture::example2) {
        fail(ErrorKind::configuration, "config.fixture.override",
             "fixture '" + std::string(to_string(f)) + "' has a fixed initial front b");
    }
    if (overrides.b && !(*overrides.b > 0.0)) {
        fail(ErrorKind::validation, "validation.b.nonpositive", "initial front b must be > 0");
    }
    if (overrides.T && !(*overrides.T > 0.0)) {
        fail(ErrorKind::validation, "validation.T.nonpositive", "time horizon T must be > 0");
    }
    const double T = overrides.T.value_or(1.0);
    switch (f) {
        case Fixture::direct_exp:
            return detail::exponential_family("direct-exp", overrides.b.value_or(0.1), T);
        case Fixture::example1:
            return detail::example1(T);
        case Fixture::example2:
            return detail::exponential_family("example2", overrides.b.value_or(0.1), T);
        case Fixture::example3:
            return detail::example3(T);
    }
    fail(ErrorKind::configuration, "config.fixture.unknown", "unknown fixture");
}

[[nodiscard]] inline StefanCase make_fixture(std::string_view name, const FixtureOverrides& overrides = {}) {
    return make_fixture(parse_fixture(name), overrides);
}

struct Violation {
    std::string constraint;  // "influx.positive", "initial.nonnegative", "initial.slope_bound"
    double at = 0.0;         // t for influx, x for initial data
    double value = 0.0;
    std::string message;
};

/// Scans h on 1001 points of [0, T] and u0 on 1001 points of [0, b].
/// Returns one entry per failing point; empty means the case is admissible.
/// The u0 bounds allow 1e-12 absolute slack for round-off at x = b.
[[nodiscard]] inline std::vector<Violation> validate_case(const StefanCase& c) {
    constexpr int kScan = 1000;
    constexpr double kSlack = 1e-12;
    std::vector<Violation> out;
    auto describe = [](const char* what, const char* var, double at, double value) {
        std::ostringstream os;
        os << what << " at " << var << "=" << at << " (value " << value << ")";
        return os.str();
    };
    if (!(c.b > 0.0)) out.push_back({"case.b.positive", 0.0, c.b, "initial front b must be > 0"});
    if (!(c.T > 0.0)) out.push_back({"case.T.positive", 0.0, c.T, "horizon T must be > 0"});
    if (!out.empty()) return out;

    for (int i = 0; i <= kScan; ++i) {
        const double t = c.T * i / kScan;
        const double h = c.influx(t);
        if (!(h > 0.0)) out.push_back({"influx.positive", t, h, describe("h(t) <= 0", "t", t, h)});
    }
    for (int i = 0; i <= kScan; ++i) {
        const double x = c.b * i / kScan;
        const double u = c.initial_state(x);
        if (u < -kSlack) {
            out.push_back({"initial.nonnegative", x, u, describe("u0(x) < 0", "x", x, u)});
        } else if (u > c.H * (c.b - x) + kSlack) {
            out.push_back({"initial.slope_bound", x, u, describe("u0(x) > H(b-x)", "x", x, u)});
        }
    }
    return out;
}

/// Samples the exact front on t_j = jT/N, j = 0..N.
[[nodiscard]] inline FreeBoundaryPath sample_path(const StefanCase& c, std::size_t N) {
    if (!c.exact) {
        fail(ErrorKind::configuration, "config.exact.missing",
             "case '" + c.id + "' has no exact solution to sample");
    }
    if (N < 2) fail(ErrorKind::configuration, "config.n.too_small", "path needs N >= 2 intervals");
    FreeBoundaryPath p;
    p.t = uniform_nodes(0.0, c.T, N);
    p.s.resize(N + 1);
    p.sdot.resize(N + 1);
    for (std::size_t j = 0; j <= N; ++j) {
        p.s[j] = c.exact->front(p.t[j]);
        p.sdot[j] = c.exact->front_velocity(p.t[j]);
    }
    return p;
}

}  // namespace stefan
