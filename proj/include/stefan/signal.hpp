#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stefan/error.hpp"

namespace stefan {

/// A scalar function of one variable: either a named closed form or a set of
/// samples on strictly increasing knots, linearly interpolated between knots
/// and held constant beyond the first/last knot.
///
/// Signals are immutable and cheap to copy (shared storage).
class Signal {
public:
    using Function = std::function<double(double)>;

    Signal() : Signal(closed_form("zero", [](double) { return 0.0; })) {}

    static Signal closed_form(std::string name, Function f) {
        Signal s(Tag{});
        s.name_ = std::move(name);
        s.fn_ = std::make_shared<const Function>(std::move(f));
        return s;
    }

    static Signal sampled(std::vector<double> knots, std::vector<double> values) {
        if (knots.size() != values.size()) {
            fail(ErrorKind::validation, "signal.length_mismatch",
                 "signal knots and values differ in length");
        }
        if (knots.empty()) {
            fail(ErrorKind::validation, "signal.empty", "sampled signal needs at least one knot");
        }
        for (std::size_t i = 1; i < knots.size(); ++i) {
            if (!(knots[i] > knots[i - 1])) {
                fail(ErrorKind::validation, "signal.knots.not_increasing",
                     "signal knots must be strictly increasing (index " + std::to_string(i) + ")");
            }
        }
        Signal s(Tag{});
        s.name_ = "samples";
        s.samples_ = std::make_shared<const Samples>(Samples{std::move(knots), std::move(values)});
        return s;
    }

    static Signal constant(double c) {
        return closed_form("constant", [c](double) { return c; });
    }

    [[nodiscard]] double operator()(double x) const {
        if (fn_) return (*fn_)(x);
        const auto& t = samples_->knots;
        const auto& v = samples_->values;
        if (x <= t.front()) return v.front();
        if (x >= t.back()) return v.back();
        const auto hi = static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), x) - t.begin());
        const std::size_t lo = hi - 1;
        const double w = (x - t[lo]) / (t[hi] - t[lo]);
        return (1.0 - w) * v[lo] + w * v[hi];
    }

    [[nodiscard]] bool is_sampled() const noexcept { return samples_ != nullptr; }
    [[nodiscard]] const std::string& name() const noexcept { return name_; }

    [[nodiscard]] std::span<const double> knots() const {
        return samples_ ? std::span<const double>(samples_->knots) : std::span<const double>{};
    }
    [[nodiscard]] std::span<const double> values() const {
        return samples_ ? std::span<const double>(samples_->values) : std::span<const double>{};
    }

private:
    struct Tag {};
    struct Samples {
        std::vector<double> knots;
        std::vector<double> values;
    };

    explicit Signal(Tag) {}

    std::string name_;
    std::shared_ptr<const Function> fn_;
    std::shared_ptr<const Samples> samples_;
};

using TimeSignal = Signal;

/// Uniformly spaced nodes a + i(b-a)/n, i = 0..n. The last node is exactly b.
inline std::vector<double> uniform_nodes(double a, double b, std::size_t n) {
    std::vector<double> x(n + 1);
    const double h = (b - a) / static_cast<double>(n);
    for (std::size_t i = 0; i <= n; ++i) x[i] = a + static_cast<double>(i) * h;
    x[n] = b;
    return x;
}

/// Centered differences of samples v on knots t, one-sided (second-order) at
/// both ends. Needs at least two samples; with exactly two the result is the
/// constant slope.
inline std::vector<double> centered_differences(std::span<const double> t, std::span<const double> v) {
    const std::size_t n = v.size();
    std::vector<double> d(n, 0.0);
    if (n < 2) return d;
    if (n == 2) {
        d[0] = d[1] = (v[1] - v[0]) / (t[1] - t[0]);
        return d;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (v[i + 1] - v[i - 1]) / (t[i + 1] - t[i - 1]);
    // three-point one-sided formulas on (possibly) nonuniform ends
    auto one_sided = [](double x0, double x1, double x2, double f0, double f1, double f2) {
        const double h1 = x1 - x0;
        const double h2 = x2 - x0;
        return (f1 - f0) * h2 / (h1 * (h2 - h1)) - (f2 - f0) * h1 / (h2 * (h2 - h1));
    };
    d[0] = one_sided(t[0], t[1], t[2], v[0], v[1], v[2]);
    d[n - 1] = one_sided(t[n - 1], t[n - 2], t[n - 3], v[n - 1], v[n - 2], v[n - 3]);
    return d;
}

}  // namespace stefan
