#pragma once

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "stefan/error.hpp"

namespace stefan {

enum class RuleName { midpoint, gauss3 };

[[nodiscard]] inline std::string_view to_string(RuleName r) {
    return r == RuleName::midpoint ? "midpoint" : "gauss3";
}

[[nodiscard]] inline RuleName parse_rule(std::string_view name) {
    if (name == "midpoint") return RuleName::midpoint;
    if (name == "gauss3") return RuleName::gauss3;
    fail(ErrorKind::configuration, "config.rule.unknown", "unknown quadrature rule '" + std::string(name) + "'");
}

/// Per-panel rule on the reference panel [0, 1]. Nodes are strictly interior
/// and the weights sum to one; callers scale by the panel width.
struct PanelRule {
    RuleName name = RuleName::midpoint;
    std::vector<double> nodes;
    std::vector<double> weights;

    [[nodiscard]] std::size_t size() const noexcept { return nodes.size(); }
};

[[nodiscard]] inline PanelRule rule_nodes(RuleName name) {
    switch (name) {
        case RuleName::midpoint:
            return {name, {0.5}, {1.0}};
        case RuleName::gauss3: {
            // 3-point Gauss-Legendre mapped from [-1, 1]; exact through degree 5.
            const double d = 0.5 * std::sqrt(0.6);
            return {name, {0.5 - d, 0.5, 0.5 + d}, {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0}};
        }
    }
    fail(ErrorKind::configuration, "config.rule.unknown", "unknown quadrature rule");
}

[[nodiscard]] inline PanelRule rule_nodes(std::string_view name) { return rule_nodes(parse_rule(name)); }

/// Composite rule over `panels` uniform panels of [a, b].
template <class F>
[[nodiscard]] double integrate(const PanelRule& rule, F&& f, double a, double b, int panels) {
    if (panels < 1) fail(ErrorKind::configuration, "config.panels.too_small", "need at least one panel");
    const double width = (b - a) / panels;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double left = a + p * width;
        double panel = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) panel += rule.weights[q] * f(left + rule.nodes[q] * width);
        sum += panel;
    }
    return sum * width;
}

}  // namespace stefan
