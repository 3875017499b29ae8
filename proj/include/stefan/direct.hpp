#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <vector>

#include "stefan/error.hpp"
#include "stefan/problem.hpp"

namespace stefan {

/// Front-fixing grid: xi_i = i/N on [0, 1] and t_m = m k on [0, T].
struct BimGrid {
    std::size_t N = 0;       // spatial intervals; nodes 0..N
    std::size_t steps = 0;   // time steps M_t
    double T = 0.0;
    double k = 0.0;          // time step
    double dxi = 0.0;        // 1/N
    double r = 0.0;          // k / dxi^2

    [[nodiscard]] double time(std::size_t m) const {
        return m == steps ? T : static_cast<double>(m) * k;
    }
    [[nodiscard]] double xi(std::size_t i) const {
        return i == N ? 1.0 : static_cast<double>(i) * dxi;
    }
};

/// Largest stable step for Z = s^2: the explicit diffusion coefficient r/Z
/// must not exceed 1/2.
[[nodiscard]] inline double max_stable_step(double dxi, double Z) { return 0.5 * dxi * dxi * Z; }

/// Upper bound on the number of explicit steps plan_grid will schedule.
inline constexpr double kMaxSteps = 1e9;

/// Chooses the smallest M_t with k = T/M_t <= safety * dxi^2 * b^2 / 2.
/// b^2 bounds Z from below because the front never recedes.
[[nodiscard]] inline BimGrid plan_grid(const StefanCase& c, std::size_t N, double safety = 0.8) {
    if (N < 4) fail(ErrorKind::configuration, "config.nx.too_small", "front-fixing grid needs N >= 4");
    if (!(safety > 0.0 && safety <= 1.0)) {
        fail(ErrorKind::configuration, "config.safety.range", "safety factor must lie in (0, 1]");
    }
    BimGrid g;
    g.N = N;
    g.T = c.T;
    g.dxi = 1.0 / static_cast<double>(N);
    const double k_max = safety * max_stable_step(g.dxi, c.b * c.b);
    // the relative nudge keeps exact quotients (T/k_max integral) from rounding up
    const double steps = std::ceil(c.T / k_max * (1.0 - 1e-12));
    if (!(steps <= kMaxSteps)) {
        std::ostringstream os;
        os << "stable march needs " << steps << " steps (limit " << kMaxSteps << "); b=" << c.b << " is too small";
        fail(ErrorKind::stability, "stability.steps", os.str());
    }
    g.steps = static_cast<std::size_t>(steps);
    g.steps = std::max<std::size_t>(g.steps, 1);
    g.k = c.T / static_cast<double>(g.steps);
    g.r = g.k / (g.dxi * g.dxi);
    return g;
}

/// One row of the march: temperatures on the xi grid plus Z = s^2 and its
/// backward-difference rate.
struct BimState {
    std::vector<double> U;
    double Z = 0.0;
    double Zdot = 0.0;
};

/// Advances `in` from t_m to t_{m+1} into `out` (resized as needed).
///
/// Interior nodes use the centered scheme on the transformed equation, node 0
/// uses the ghost-eliminated flux condition u_xi(0) = -s h, node N is the
/// melting front (U = 0), and Z moves with the one-sided 3-point derivative at
/// xi = 1.
inline void bim_step(const BimState& in, BimState& out, double influx_at_tm, const BimGrid& g, std::size_t m) {
    const std::size_t N = g.N;
    const double Z = in.Z;
    if (!(Z > 0.0) || g.k > max_stable_step(g.dxi, Z) * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "explicit step unstable at m=" << m << ": k=" << g.k << " exceeds dxi^2 Z/2 with Z_m=" << Z;
        fail(ErrorKind::stability, "stability.cfl", os.str());
    }
    const auto& U = in.U;
    out.U.resize(N + 1);

    const double diffusion = g.r / Z;
    const double advection = g.r * g.dxi * in.Zdot / (4.0 * Z);
    out.U[0] = (1.0 - 2.0 * diffusion) * U[0] + 2.0 * diffusion * U[1] +
               2.0 * g.dxi * g.r / std::sqrt(Z) * influx_at_tm;
    for (std::size_t i = 1; i < N; ++i) {
        const double xi = static_cast<double>(i) * g.dxi;
        out.U[i] = U[i] + advection * xi * (U[i + 1] - U[i - 1]) +
                   diffusion * (U[i + 1] - 2.0 * U[i] + U[i - 1]);
    }
    out.U[N] = 0.0;
    out.Z = Z - (g.k / g.dxi) * (3.0 * U[N] - 4.0 * U[N - 1] + U[N - 2]);
    out.Zdot = (out.Z - Z) / g.k;
}

[[nodiscard]] inline BimState bim_step(const BimState& in, double influx_at_tm, const BimGrid& g, std::size_t m) {
    BimState out;
    bim_step(in, out, influx_at_tm, g, m);
    return out;
}

/// Temperature rows at recorded time steps, on the fixed xi grid.
struct TemperatureField {
    std::vector<double> xi;
    std::vector<std::size_t> steps;  // recorded step indices m, ascending
    std::vector<double> t;           // t_m per recorded row
    std::vector<std::vector<double>> U;
    std::vector<double> Z;
    std::vector<double> Zdot;

    [[nodiscard]] std::size_t rows() const noexcept { return steps.size(); }

    /// Row whose time is nearest to `time` (ties go to the earlier row).
    [[nodiscard]] std::size_t nearest_row(double time) const {
        std::size_t best = 0;
        for (std::size_t j = 1; j < t.size(); ++j) {
            if (std::abs(t[j] - time) < std::abs(t[best] - time)) best = j;
        }
        return best;
    }
};

struct DirectOptions {
    /// Upper bound on stored field rows (steps 0, 1 and M_t are always kept).
    std::size_t max_field_rows = 2001;
    /// Report times; the step nearest each one is also kept.
    std::vector<double> keep_times;
};

struct DirectSolution {
    BimGrid grid;
    TemperatureField field;
    FreeBoundaryPath path;  // every time step: s = sqrt(Z), sdot = Zdot / (2 sqrt(Z))
};

/// Initial state: U_i = u0(b xi_i), Z_0 = b^2, and Zdot_0 from the same
/// one-sided front derivative the march uses (so Zdot_0 = (Z_1 - Z_0)/k).
[[nodiscard]] inline BimState initial_state(const StefanCase& c, const BimGrid& g) {
    BimState s;
    s.U.resize(g.N + 1);
    for (std::size_t i = 0; i <= g.N; ++i) s.U[i] = c.initial_state(c.b * g.xi(i));
    s.U[g.N] = 0.0;
    s.Z = c.b * c.b;
    const std::size_t N = g.N;
    s.Zdot = -(3.0 * s.U[N] - 4.0 * s.U[N - 1] + s.U[N - 2]) / g.dxi;
    return s;
}

[[nodiscard]] inline DirectSolution solve_direct(const StefanCase& c, const BimGrid& g,
                                                 const DirectOptions& options = {}) {
    if (const auto violations = validate_case(c); !violations.empty()) {
        fail(ErrorKind::validation, "validation.case." + violations.front().constraint,
             "case '" + c.id + "' violates its assumptions: " + violations.front().message);
    }
    DirectSolution out;
    out.grid = g;
    auto& field = out.field;
    auto& path = out.path;

    field.xi.resize(g.N + 1);
    for (std::size_t i = 0; i <= g.N; ++i) field.xi[i] = g.xi(i);
    const std::size_t slots = std::max<std::size_t>(options.max_field_rows, 2) - 1;
    const std::size_t stride = std::max<std::size_t>(1, (g.steps + slots - 1) / slots);
    std::vector<std::size_t> keep;
    for (double t : options.keep_times) {
        const double pos = std::clamp(t / g.k, 0.0, static_cast<double>(g.steps));
        keep.push_back(static_cast<std::size_t>(std::llround(pos)));
    }

    path.t.resize(g.steps + 1);
    path.s.resize(g.steps + 1);
    path.sdot.resize(g.steps + 1);

    BimState cur = initial_state(c, g);
    BimState next;
    auto record = [&](std::size_t m, const BimState& st) {
        const double root = std::sqrt(st.Z);
        path.t[m] = g.time(m);
        path.s[m] = root;
        path.sdot[m] = st.Zdot / (2.0 * root);
        if (m == 0 || m == 1 || m == g.steps || m % stride == 0 ||
            std::find(keep.begin(), keep.end(), m) != keep.end()) {
            field.steps.push_back(m);
            field.t.push_back(g.time(m));
            field.U.push_back(st.U);
            field.Z.push_back(st.Z);
            field.Zdot.push_back(st.Zdot);
        }
    };
    record(0, cur);
    for (std::size_t m = 0; m < g.steps; ++m) {
        bim_step(cur, next, c.influx(g.time(m)), g, m);
        std::swap(cur, next);
        record(m + 1, cur);
    }
    return out;
}

/// Energy balance s(t) - b - int_0^t h - int_0^b u0 + int_0^{s(t)} u(., t)
/// at recorded field row `row`. All integrals are composite trapezoid on the
/// solver grids, so the value is exactly 0 at t = 0.
[[nodiscard]] inline double energy_residual(const StefanCase& c, const TemperatureField& field,
                                            const FreeBoundaryPath& path, std::size_t row) {
    auto trapezoid = [](const std::vector<double>& v) {
        double sum = 0.5 * (v.front() + v.back());
        for (std::size_t i = 1; i + 1 < v.size(); ++i) sum += v[i];
        return sum;
    };
    const std::size_t m = field.steps.at(row);
    const double s = std::sqrt(field.Z[row]);
    const double dxi = 1.0 / static_cast<double>(field.xi.size() - 1);

    double influx_integral = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        influx_integral += 0.5 * (path.t[j + 1] - path.t[j]) * (c.influx(path.t[j]) + c.influx(path.t[j + 1]));
    }
    std::vector<double> u0(field.xi.size());
    for (std::size_t i = 0; i < u0.size(); ++i) u0[i] = c.initial_state(c.b * field.xi[i]);
    u0.back() = 0.0;
    const double initial_heat = c.b * dxi * trapezoid(u0);
    const double heat = s * dxi * trapezoid(field.U[row]);
    return s - c.b - influx_integral - initial_heat + heat;
}

}  // namespace stefan
