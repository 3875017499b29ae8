#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "stefan/kernel.hpp"

using namespace stefan;

namespace {
const PanelRule kGauss = rule_nodes(RuleName::gauss3);
constexpr double kPi = std::numbers::pi;
}  // namespace

TEST(HeatKernel, PeakNormalization) {
    EXPECT_NEAR(heat_kernel(0.3, 0.3, 1.0 / (4.0 * kPi), 0.0), 1.0, 1e-15);
}

TEST(HeatKernel, ReferenceValue) {
    EXPECT_NEAR(heat_kernel(1.0, 0.0, 1.0, 0.0), std::exp(-0.25) / (2.0 * std::sqrt(kPi)), 1e-16);
    EXPECT_NEAR(heat_kernel(1.0, 0.0, 1.0, 0.0), 0.219695, 1e-6);
}

TEST(HeatKernel, NonCausalRejected) {
    try {
        (void)heat_kernel(0.0, 0.0, 1.0, 1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::domain);
        EXPECT_EQ(e.tag(), "domain.kernel.time_order");
    }
    EXPECT_THROW((void)neumann_kernel(0.0, 0.0, 0.5, 1.0), Error);
}

TEST(HeatKernel, SymmetryAndShiftInvariance) {
    for (double x : {0.0, 0.4, 1.3}) {
        for (double xi : {0.1, 0.9}) {
            EXPECT_DOUBLE_EQ(heat_kernel(x, xi, 0.7, 0.2), heat_kernel(xi, x, 0.7, 0.2));
            EXPECT_NEAR(heat_kernel(x, xi, 0.7, 0.2), heat_kernel(x, xi, 1.5, 1.0), 1e-15);
            EXPECT_NEAR(neumann_kernel(x, xi, 0.7, 0.2), neumann_kernel(x, xi, 1.5, 1.0), 1e-15);
        }
    }
}

TEST(HeatKernel, UnderflowIsZero) {
    EXPECT_EQ(heat_kernel(10.0, 0.0, 1e-6, 0.0), 0.0);
}

TEST(NeumannKernel, ImagesCoincideAtOrigin) {
    EXPECT_DOUBLE_EQ(neumann_kernel(0.7, 0.0, 0.4, 0.1), 2.0 * heat_kernel(0.7, 0.0, 0.4, 0.1));
}

TEST(NeumannKernel, SumOfImages) {
    EXPECT_NEAR(neumann_kernel(0.5, 0.25, 0.1, 0.0), heat_kernel(0.5, 0.25, 0.1, 0.0) + heat_kernel(-0.5, 0.25, 0.1, 0.0),
                1e-15);
}

TEST(NeumannKernel, ZeroFluxAtOrigin) {
    const double d = 1e-6;
    for (double x : {0.2, 0.8}) {
        const double slope = (neumann_kernel(x, d, 0.5, 0.0) - neumann_kernel(x, -d, 0.5, 0.0)) / (2 * d);
        EXPECT_NEAR(slope, 0.0, 1e-9);
    }
}

TEST(NeumannKernel, Positive) {
    for (double x : {0.0, 0.5, 2.0}) {
        for (double dt : {1e-3, 0.1, 5.0}) EXPECT_GT(neumann_kernel(x, 0.3, dt, 0.0), 0.0);
    }
}

TEST(AbelForward, Constant) {
    for (double t : {0.1, 0.5, 1.0}) {
        EXPECT_NEAR(abel_forward([](double) { return 1.0; }, t, 8, kGauss), 2.0 * std::sqrt(t / kPi), 1e-14);
    }
}

TEST(AbelForward, SquareRoot) {
    for (double t : {0.2, 1.0}) {
        const double v = abel_forward([](double tau) { return std::sqrt(std::max(tau, 0.0)); }, t, 200, kGauss);
        EXPECT_NEAR(v, std::sqrt(kPi) / 2.0 * t, 1e-5);
    }
}

TEST(AbelForward, ZeroAndLinearity) {
    EXPECT_EQ(abel_forward([](double) { return 0.0; }, 0.7, 10, kGauss), 0.0);
    auto h1 = [](double t) { return std::exp(t); };
    auto h2 = [](double t) { return std::cos(3 * t); };
    const double a = 2.5;
    const double b = -0.75;
    for (double t : {0.1, 0.6}) {
        const double lhs = abel_forward([&](double s) { return a * h1(s) + b * h2(s); }, t, 40, kGauss);
        const double rhs = a * abel_forward(h1, t, 40, kGauss) + b * abel_forward(h2, t, 40, kGauss);
        EXPECT_NEAR(lhs, rhs, 1e-10);
    }
}

TEST(AbelForward, MonotoneForNondecreasingData) {
    double prev = 0.0;
    for (int i = 1; i <= 50; ++i) {
        const double t = i / 50.0;
        const double v = abel_forward([](double s) { return 1.0 + s; }, t, 20, kGauss);
        EXPECT_GE(v, prev - 1e-10);
        prev = v;
    }
}

TEST(AbelForward, NonPositiveTime) {
    EXPECT_THROW((void)abel_forward([](double) { return 1.0; }, 0.0, 4, kGauss), Error);
}

TEST(AbelInverse, RecoversConstant) {
    const auto t = uniform_nodes(0.0, 1.0, 1000);
    std::vector<double> F(t.size());
    for (std::size_t j = 0; j < t.size(); ++j) F[j] = 2.0 * std::sqrt(t[j] / kPi);
    const auto sig = Signal::sampled(t, F);
    for (int i = 1; i <= 9; ++i) EXPECT_NEAR(abel_inverse(sig, i / 10.0, 2000), 1.0, 1e-2);
}

TEST(AbelInverse, ConstantSignal) {
    const auto sig = Signal::constant(3.0);
    for (double t : {0.1, 0.5}) EXPECT_NEAR(abel_inverse(sig, t, 20), 3.0 / std::sqrt(kPi * t), 1e-12);
}

TEST(AbelInverse, RoundTripExponential) {
    const auto t = uniform_nodes(0.0, 1.0, 1000);
    std::vector<double> F(t.size(), 0.0);
    auto h = [](double s) { return std::exp(s); };
    for (std::size_t j = 1; j < t.size(); ++j) F[j] = abel_forward(h, t[j], 64, kGauss);
    const auto sig = Signal::sampled(t, F);
    double worst = 0.0;
    for (std::size_t j = 100; j <= 900; ++j) {
        worst = std::max(worst, std::abs(abel_inverse(sig, t[j], 2000) / h(t[j]) - 1.0));
    }
    EXPECT_LE(worst, 1e-2);
}

TEST(AbelInverse, ClosedFormSignal) {
    const auto sig = Signal::closed_form("2sqrt(t/pi)", [](double s) { return 2.0 * std::sqrt(std::max(s, 0.0) / kPi); });
    EXPECT_NEAR(abel_inverse(sig, 0.5, 400), 1.0, 1e-2);
}
