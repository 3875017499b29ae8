#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "stefan/error.hpp"
#include "stefan/kernel.hpp"
#include "stefan/problem.hpp"
#include "stefan/quadrature.hpp"
#include "stefan/signal.hpp"

namespace stefan {

/// How the panel ending at the collocation time is integrated in the front
/// term N(s(t), s(tau); t, tau) sdot(tau), which grows like (t - tau)^{-1/2}.
enum class SingularPanel {
    plain,         // same interior nodes as every other panel
    substitution,  // tau = t - sigma^2 on that panel, rule applied in sigma
};

[[nodiscard]] inline std::string_view to_string(SingularPanel s) {
    return s == SingularPanel::plain ? "plain" : "substitution";
}

[[nodiscard]] inline SingularPanel parse_singular_panel(std::string_view name) {
    if (name == "plain") return SingularPanel::plain;
    if (name == "substitution") return SingularPanel::substitution;
    fail(ErrorKind::configuration, "config.singular.unknown", "unknown singular-panel mode '" + std::string(name) + "'");
}

struct AssemblyOptions {
    std::size_t initial_panels = 0;  // M_x; 0 selects max(32, ceil(N b / T))
    SingularPanel singular = SingularPanel::substitution;
    int singular_subpanels = 4;
};

/// Discretized first-kind Volterra equation A h = g.
///
/// Row i collocates at t_{i+1}; column j is the influx on panel
/// [t_j, t_{j+1}], taken constant there and reported at the panel midpoint.
struct LinearSystem {
    Eigen::MatrixXd A;
    Eigen::VectorXd g;
    std::vector<double> node_times;
    std::vector<double> collocation_times;
    std::size_t initial_panels = 0;

    [[nodiscard]] std::size_t size() const noexcept { return node_times.size(); }
};

namespace detail {

inline void require_uniform_path(const FreeBoundaryPath& path) {
    if (!path.lengths_agree()) {
        fail(ErrorKind::validation, "input.path.length_mismatch", "front path arrays differ in length");
    }
    if (path.size() < 2 || !path.is_uniform()) {
        fail(ErrorKind::validation, "input.grid.nonuniform", "front path must sit on a uniform ascending time grid");
    }
    if (std::abs(path.t.front()) > 1e-12 * path.horizon()) {
        fail(ErrorKind::validation, "input.grid.origin", "front path must start at t = 0");
    }
}

/// Linear interpolation of the path on its uniform grid.
struct PathInterpolant {
    const FreeBoundaryPath& path;
    double dt;

    struct Value {
        double s;
        double sdot;
    };

    [[nodiscard]] Value operator()(double tau) const {
        const std::size_t last = path.intervals();
        double pos = tau / dt;
        pos = std::clamp(pos, 0.0, static_cast<double>(last));
        auto j = static_cast<std::size_t>(pos);
        if (j >= last) j = last - 1;
        const double w = pos - static_cast<double>(j);
        return {(1.0 - w) * path.s[j] + w * path.s[j + 1], (1.0 - w) * path.sdot[j] + w * path.sdot[j + 1]};
    }
};

/// int_{start}^{t} f(tau, t - tau) dtau with tau = t - sigma^2, the rule
/// applied on `subpanels` uniform panels of [0, sqrt(t - start)].
template <class F>
double integrate_singular_tail(F&& f, double start, double t, const PanelRule& rule, int subpanels) {
    const double root = std::sqrt(t - start);
    return integrate(
        rule,
        [&](double sigma) {
            const double elapsed = sigma * sigma;
            return 2.0 * sigma * f(t - elapsed, elapsed);
        },
        0.0, root, subpanels);
}

inline std::size_t default_initial_panels(std::size_t N, double b, double T) {
    return std::max<std::size_t>(32, static_cast<std::size_t>(std::ceil(static_cast<double>(N) * b / T)));
}

}  // namespace detail

/// Builds A and g for the principal integral equation
///   int_0^t N(s(t),0;t,tau) h dtau = int_0^t N(s(t),s(tau);t,tau) sdot dtau
///                                   - int_0^b N(s(t),xi;t,0) u0(xi) dxi
/// collocated at t_1..t_N of the path grid. s and sdot at quadrature nodes
/// are interpolated linearly from the path.
[[nodiscard]] inline LinearSystem assemble_system(const FreeBoundaryPath& path, const StefanCase& c,
                                                  const PanelRule& rule, const AssemblyOptions& options = {}) {
    detail::require_uniform_path(path);
    const std::size_t N = path.intervals();
    const double dt = path.step();
    const double T = path.horizon();
    const detail::PathInterpolant at{path, dt};

    LinearSystem sys;
    sys.initial_panels =
        options.initial_panels > 0 ? options.initial_panels : detail::default_initial_panels(N, c.b, T);
    sys.A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
    sys.g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(N));
    sys.node_times.resize(N);
    sys.collocation_times.resize(N);
    for (std::size_t j = 0; j < N; ++j) {
        sys.node_times[j] = (static_cast<double>(j) + 0.5) * dt;
        sys.collocation_times[j] = path.t[j + 1];
    }

    // quadrature nodes per time panel
    const std::size_t nq = rule.size();
    std::vector<double> tau(N * nq), s_tau(N * nq), sdot_tau(N * nq);
    for (std::size_t j = 0; j < N; ++j) {
        for (std::size_t q = 0; q < nq; ++q) {
            const std::size_t k = j * nq + q;
            tau[k] = path.t[j] + rule.nodes[q] * dt;
            s_tau[k] = path.s[j] + rule.nodes[q] * (path.s[j + 1] - path.s[j]);
            sdot_tau[k] = path.sdot[j] + rule.nodes[q] * (path.sdot[j + 1] - path.sdot[j]);
        }
    }
    // initial-data quadrature on [0, b]
    const std::size_t Mx = sys.initial_panels;
    const double dx = c.b / static_cast<double>(Mx);
    std::vector<double> xq(Mx * nq), u0w(Mx * nq);
    for (std::size_t k = 0; k < Mx; ++k) {
        for (std::size_t q = 0; q < nq; ++q) {
            const double x = (static_cast<double>(k) + rule.nodes[q]) * dx;
            xq[k * nq + q] = x;
            u0w[k * nq + q] = rule.weights[q] * dx * c.initial_state(x);
        }
    }

    for (std::size_t i = 1; i <= N; ++i) {
        const double ti = path.t[i];
        const double si = path.s[i];
        const auto row = static_cast<Eigen::Index>(i - 1);
        double front_term = 0.0;
        for (std::size_t j = 0; j < i; ++j) {
            double a = 0.0;
            double f = 0.0;
            const bool tail = j + 1 == i && options.singular == SingularPanel::substitution;
            for (std::size_t q = 0; q < nq; ++q) {
                const std::size_t k = j * nq + q;
                const double elapsed = ti - tau[k];
                a += rule.weights[q] * detail::neumann(si, 0.0, elapsed);
                if (!tail) f += rule.weights[q] * detail::neumann(si, s_tau[k], elapsed) * sdot_tau[k];
            }
            sys.A(row, static_cast<Eigen::Index>(j)) = dt * a;
            front_term += dt * f;
        }
        if (options.singular == SingularPanel::substitution) {
            front_term += detail::integrate_singular_tail(
                [&](double t_node, double elapsed) {
                    const auto v = at(t_node);
                    return detail::neumann(si, v.s, elapsed) * v.sdot;
                },
                path.t[i - 1], ti, rule, options.singular_subpanels);
        }
        double initial_term = 0.0;
        for (std::size_t k = 0; k < xq.size(); ++k) initial_term += detail::neumann(si, xq[k], ti) * u0w[k];
        sys.g(row) = front_term - initial_term;
    }
    return sys;
}

enum class PriorMode { zero, exact, custom };

[[nodiscard]] inline std::string_view to_string(PriorMode p) {
    switch (p) {
        case PriorMode::zero: return "zero";
        case PriorMode::exact: return "exact";
        case PriorMode::custom: return "custom";
    }
    return "zero";
}

[[nodiscard]] inline PriorMode parse_prior(std::string_view name) {
    if (name == "zero") return PriorMode::zero;
    if (name == "exact") return PriorMode::exact;
    if (name == "custom") return PriorMode::custom;
    fail(ErrorKind::configuration, "config.prior.unknown", "unknown prior '" + std::string(name) + "'");
}

struct TikhonovConfig {
    double lambda = 1e-3;
    PriorMode prior = PriorMode::zero;
    Signal custom;  // used when prior == custom
};

/// Prior samples at the system's node times.
[[nodiscard]] inline std::vector<double> resolve_prior(const TikhonovConfig& config, const LinearSystem& sys,
                                                       const StefanCase& c) {
    std::vector<double> p(sys.size(), 0.0);
    if (config.prior == PriorMode::zero) return p;
    if (config.prior == PriorMode::exact && !c.exact) {
        fail(ErrorKind::configuration, "config.prior.no_exact", "prior 'exact' needs a case with a known influx");
    }
    for (std::size_t j = 0; j < p.size(); ++j) {
        const double t = sys.node_times[j];
        p[j] = config.prior == PriorMode::exact ? c.exact->influx(t) : config.custom(t);
    }
    return p;
}

struct TikhonovResult {
    std::vector<double> h;   // influx at node_times
    double h_origin = 0.0;   // linear extrapolation of the first two nodes to t = 0
    double lambda = 0.0;
    double residual_norm = 0.0;  // ||A h - g||_2
    double solution_norm = 0.0;  // ||h - prior||_2
    double min_pivot = 0.0;      // smallest squared Cholesky diagonal of A^T A + lambda I
};

/// Normal-equation solver that keeps A^T A and A^T g for repeated lambdas.
class TikhonovSolver {
public:
    explicit TikhonovSolver(const LinearSystem& sys)
        : sys_(&sys), gram_(sys.A.transpose() * sys.A), rhs_(sys.A.transpose() * sys.g) {}

    [[nodiscard]] const Eigen::MatrixXd& gram() const noexcept { return gram_; }

    [[nodiscard]] Eigen::MatrixXd normal_matrix(double lambda) const {
        Eigen::MatrixXd m = gram_;
        m.diagonal().array() += lambda;
        return m;
    }

    /// Solves (A^T A + lambda I) h = A^T g + lambda prior.
    [[nodiscard]] TikhonovResult solve(double lambda, std::span<const double> prior) const {
        if (!(lambda > 0.0)) {
            fail(ErrorKind::configuration, "config.lambda.nonpositive", "Tikhonov parameter lambda must be > 0");
        }
        const auto n = static_cast<Eigen::Index>(sys_->size());
        if (static_cast<Eigen::Index>(prior.size()) != n) {
            fail(ErrorKind::configuration, "config.prior.length", "prior length differs from system size");
        }
        const Eigen::Map<const Eigen::VectorXd> p(prior.data(), n);
        const Eigen::LLT<Eigen::MatrixXd> llt(normal_matrix(lambda));
        if (llt.info() != Eigen::Success) {
            fail(ErrorKind::numerical, "numerical.cholesky", "normal matrix is not positive definite");
        }
        const Eigen::VectorXd h = llt.solve(rhs_ + lambda * p);

        TikhonovResult out;
        out.lambda = lambda;
        out.h.assign(h.data(), h.data() + h.size());
        out.residual_norm = (sys_->A * h - sys_->g).norm();
        out.solution_norm = (h - p).norm();
        out.min_pivot = llt.matrixLLT().diagonal().array().square().minCoeff();
        if (n >= 2) {
            const double t0 = sys_->node_times[0];
            const double t1 = sys_->node_times[1];
            out.h_origin = out.h[0] - (out.h[1] - out.h[0]) * t0 / (t1 - t0);
        } else if (n == 1) {
            out.h_origin = out.h[0];
        }
        return out;
    }

    /// Smallest eigenvalue of A^T A + lambda I by inverse power iteration.
    [[nodiscard]] double smallest_normal_eigenvalue(double lambda, int iterations = 200) const {
        const Eigen::MatrixXd m = normal_matrix(lambda);
        const Eigen::LLT<Eigen::MatrixXd> llt(m);
        if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
        Eigen::VectorXd v = Eigen::VectorXd::Ones(m.rows()).normalized();
        double rayleigh = 0.0;
        for (int it = 0; it < iterations; ++it) {
            Eigen::VectorXd w = llt.solve(v);
            v = w.normalized();
            const double next = v.dot(m * v);
            if (it > 0 && std::abs(next - rayleigh) <= 1e-13 * std::abs(next)) {
                rayleigh = next;
                break;
            }
            rayleigh = next;
        }
        return rayleigh;
    }

private:
    const LinearSystem* sys_;
    Eigen::MatrixXd gram_;
    Eigen::VectorXd rhs_;
};

[[nodiscard]] inline TikhonovResult tikhonov_solve(const LinearSystem& sys, double lambda, std::span<const double> prior) {
    return TikhonovSolver(sys).solve(lambda, prior);
}

[[nodiscard]] inline TikhonovResult tikhonov_solve(const LinearSystem& sys, const TikhonovConfig& config,
                                                   const StefanCase& c) {
    const auto prior = resolve_prior(config, sys, c);
    return tikhonov_solve(sys, config.lambda, prior);
}

struct ConditionEstimate {
    double sigma_max = 0.0;
    double min_diagonal = 0.0;
    double ratio = 0.0;  // sigma_max / min |A_ii|, a lower bound on cond_2(A)
};

/// sigma_max by power iteration on A^T A. A is lower triangular, so its
/// eigenvalues are its diagonal entries and sigma_min <= min |A_ii|.
[[nodiscard]] inline ConditionEstimate estimate_condition(const LinearSystem& sys, int iterations = 500) {
    ConditionEstimate est;
    const auto& A = sys.A;
    Eigen::VectorXd v = Eigen::VectorXd::Ones(A.cols()).normalized();
    double sigma2 = 0.0;
    for (int it = 0; it < iterations; ++it) {
        Eigen::VectorXd w = A.transpose() * (A * v);
        const double norm = w.norm();
        if (norm == 0.0) break;
        v = w / norm;
        if (it > 0 && std::abs(norm - sigma2) <= 1e-12 * norm) {
            sigma2 = norm;
            break;
        }
        sigma2 = norm;
    }
    est.sigma_max = std::sqrt(sigma2);
    est.min_diagonal = A.diagonal().cwiseAbs().minCoeff();
    est.ratio = est.min_diagonal > 0.0 ? est.sigma_max / est.min_diagonal : std::numeric_limits<double>::infinity();
    return est;
}

/// Heat-potential representation
///   u(x,t) = int_0^t N(x,0;t,tau) h dtau - int_0^t N(x,s(tau);t,tau) sdot dtau
///          + int_0^b N(x,xi;t,0) u0 dxi
/// on the path's panels up to t. The last (possibly partial) panel is
/// integrated in sigma = sqrt(t - tau). Points beyond the front (x > s(t)) are
/// evaluated without complaint.
[[nodiscard]] inline double reconstruct_u(const Signal& h, const FreeBoundaryPath& path, const StefanCase& c,
                                          double x, double t, const PanelRule& rule,
                                          std::size_t initial_panels = 0, int tail_subpanels = 4) {
    detail::require_uniform_path(path);
    if (!(t > 0.0) || t > path.horizon() * (1.0 + 1e-12)) {
        fail(ErrorKind::domain, "domain.reconstruct.time", "reconstruction time must lie in (0, T]");
    }
    if (x < 0.0) fail(ErrorKind::domain, "domain.reconstruct.space", "reconstruction point must satisfy x >= 0");
    const double dt = path.step();
    const std::size_t N = path.intervals();
    const detail::PathInterpolant at{path, dt};

    // full panels [t_j, t_{j+1}] with t_{j+1} < t; the rest is the tail
    auto full = static_cast<std::size_t>(std::floor(t / dt * (1.0 - 1e-12)));
    full = std::min(full, N);
    if (static_cast<double>(full) * dt >= t) full = full == 0 ? 0 : full - 1;
    const double tail_start = static_cast<double>(full) * dt;

    auto integrand = [&](double tau, double elapsed) {
        const auto v = at(tau);
        return detail::neumann(x, 0.0, elapsed) * h(tau) - detail::neumann(x, v.s, elapsed) * v.sdot;
    };
    double sum = 0.0;
    for (std::size_t j = 0; j < full; ++j) {
        const double left = path.t[j];
        double panel = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double tau = left + rule.nodes[q] * dt;
            panel += rule.weights[q] * integrand(tau, t - tau);
        }
        sum += dt * panel;
    }
    sum += detail::integrate_singular_tail(integrand, tail_start, t, rule, tail_subpanels);

    const std::size_t Mx = initial_panels > 0 ? initial_panels : detail::default_initial_panels(N, c.b, path.horizon());
    sum += integrate(
        rule, [&](double xi) { return detail::neumann(x, xi, t) * c.initial_state(xi); }, 0.0, c.b,
        static_cast<int>(Mx));
    return sum;
}

/// Recovered influx as a signal through (node_times, h).
[[nodiscard]] inline Signal influx_signal(const LinearSystem& sys, const TikhonovResult& r) {
    return Signal::sampled(sys.node_times, r.h);
}

}  // namespace stefan
