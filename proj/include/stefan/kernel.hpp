#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "stefan/error.hpp"
#include "stefan/quadrature.hpp"
#include "stefan/signal.hpp"

namespace stefan {

namespace detail {

inline void require_causal(double t, double tau) {
    if (!(t > tau)) {
        fail(ErrorKind::domain, "domain.kernel.time_order",
             "heat kernel needs t > tau (t=" + std::to_string(t) + ", tau=" + std::to_string(tau) + ")");
    }
}

// Free-space kernel in terms of the elapsed time; no argument checks.
inline double gaussian(double dx, double elapsed) {
    return std::exp(-dx * dx / (4.0 * elapsed)) / (2.0 * std::sqrt(std::numbers::pi * elapsed));
}

// N(x, xi; elapsed) = K(x, xi) + K(-x, xi).
inline double neumann(double x, double xi, double elapsed) {
    return gaussian(x - xi, elapsed) + gaussian(x + xi, elapsed);
}

}  // namespace detail

/// Free-space heat kernel K(x, xi; t, tau). Large exponents underflow to 0.
[[nodiscard]] inline double heat_kernel(double x, double xi, double t, double tau) {
    detail::require_causal(t, tau);
    return detail::gaussian(x - xi, t - tau);
}

/// Half-line Neumann function built from the image source at -x; its
/// xi-derivative vanishes at xi = 0.
[[nodiscard]] inline double neumann_kernel(double x, double xi, double t, double tau) {
    detail::require_causal(t, tau);
    return detail::neumann(x, xi, t - tau);
}

/// Abel operator (1/sqrt(pi)) int_0^t h(tau) / sqrt(t - tau) dtau.
///
/// With tau = t - sigma^2 the integrand becomes 2 h(t - sigma^2) / sqrt(pi)
/// on [0, sqrt(t)], which the panel rule integrates without endpoint
/// treatment.
template <class F>
[[nodiscard]] double abel_forward(F&& h, double t, int panels, const PanelRule& rule) {
    if (!(t > 0.0)) fail(ErrorKind::domain, "domain.abel.time", "Abel operator needs t > 0");
    const double root = std::sqrt(t);
    const double integral =
        integrate(rule, [&](double sigma) { return h(t - sigma * sigma); }, 0.0, root, panels);
    return 2.0 * integral / std::sqrt(std::numbers::pi);
}

/// Inverse Abel operator for smooth F:
///   A0^{-1} F(t) = F(0) / sqrt(pi t) + A0 F'(t).
/// F' comes from centered differences on the knots of a sampled F (one-sided
/// at the ends). Closed-form F is differenced with a fixed step of 1e-5.
[[nodiscard]] inline double abel_inverse(const Signal& F, double t, int panels,
                                         const PanelRule& rule = rule_nodes(RuleName::gauss3)) {
    if (!(t > 0.0)) fail(ErrorKind::domain, "domain.abel.time", "inverse Abel operator needs t > 0");
    const double head = F(0.0) / std::sqrt(std::numbers::pi * t);
    if (F.is_sampled()) {
        const auto knots = F.knots();
        const Signal derivative =
            Signal::sampled({knots.begin(), knots.end()}, centered_differences(knots, F.values()));
        return head + abel_forward(derivative, t, panels, rule);
    }
    constexpr double step = 1e-5;
    auto derivative = [&F](double tau) {
        if (tau < step) return (-3.0 * F(tau) + 4.0 * F(tau + step) - F(tau + 2.0 * step)) / (2.0 * step);
        return (F(tau + step) - F(tau - step)) / (2.0 * step);
    };
    return head + abel_forward(derivative, t, panels, rule);
}

}  // namespace stefan
