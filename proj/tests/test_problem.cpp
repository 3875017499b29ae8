#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "stefan/problem.hpp"

using namespace stefan;

namespace {

std::string tag_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.tag();
    }
    return "";
}

class FixtureProperties : public ::testing::TestWithParam<std::string_view> {};

}  // namespace

TEST(Fixtures, Example1InfluxAtOrigin) {
    const auto c = make_fixture("example1");
    EXPECT_NEAR(c.exact->influx(0.0), std::exp(1.0 - 1.0 / std::sqrt(2.0)) / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(c.exact->influx(0.0), 0.947735, 1e-6);
}

TEST(Fixtures, Example1TemperatureVanishesOnFront) {
    const auto c = make_fixture(Fixture::example1);
    for (double t : {0.0, 0.5, 1.0}) EXPECT_NEAR(c.exact->temperature(c.exact->front(t), t), 0.0, 1e-15);
}

TEST(Fixtures, Example3InfluxAtOrigin) {
    const auto c = make_fixture("example3");
    EXPECT_NEAR(c.exact->influx(0.0), std::exp(0.25), 1e-14);
    EXPECT_NEAR(c.exact->influx(0.0), 1.28403, 1e-5);
}

TEST(Fixtures, DirectExpInitialValue) {
    const auto c = make_fixture("direct-exp");
    EXPECT_NEAR(c.initial_state(0.05), 0.051271, 5e-7);
    EXPECT_DOUBLE_EQ(c.b, 0.1);
    EXPECT_DOUBLE_EQ(c.exact->front(0.0), c.b);
}

TEST(Fixtures, InfluxSignalMatchesExact) {
    for (auto name : kFixtureNames) {
        const auto c = make_fixture(name);
        for (double t : {0.0, 0.3, 1.0}) EXPECT_DOUBLE_EQ(c.influx(t), c.exact->influx(t)) << name;
    }
}

TEST(Fixtures, UnknownNameIsConfigurationError) {
    EXPECT_EQ(tag_of([] { (void)make_fixture("example4"); }), "config.fixture.unknown");
    try {
        (void)make_fixture("nope");
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::configuration);
    }
}

TEST(Fixtures, OverrideRules) {
    FixtureOverrides neg;
    neg.b = -0.5;
    EXPECT_EQ(tag_of([&] { (void)make_fixture("example2", neg); }), "validation.b.nonpositive");
    FixtureOverrides ok;
    ok.b = 0.3;
    EXPECT_EQ(tag_of([&] { (void)make_fixture("example1", ok); }), "config.fixture.override");
    const auto c = make_fixture("example2", ok);
    EXPECT_DOUBLE_EQ(c.b, 0.3);
    EXPECT_DOUBLE_EQ(c.exact->front(0.5), 0.8);
}

TEST_P(FixtureProperties, HeatEquationResidual) {
    const auto c = make_fixture(GetParam());
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double d = 1e-4;
    const auto& u = c.exact->temperature;
    for (int k = 0; k < 100; ++k) {
        const double t = d + (c.T - 2 * d) * unit(rng);
        const double x = d + (c.exact->front(t) - 2 * d) * unit(rng);
        const double ut = (u(x, t + d) - u(x, t - d)) / (2 * d);
        const double uxx = (u(x + d, t) - 2 * u(x, t) + u(x - d, t)) / (d * d);
        EXPECT_LE(std::abs(ut - uxx), 1e-6 * std::max(1.0, std::abs(ut)) + 5e-6) << "x=" << x << " t=" << t;
    }
}

TEST_P(FixtureProperties, StefanCondition) {
    const auto c = make_fixture(GetParam());
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double d = 1e-5;
    for (int k = 0; k < 100; ++k) {
        const double t = c.T * unit(rng);
        const double s = c.exact->front(t);
        const double ux = (c.exact->temperature(s + d, t) - c.exact->temperature(s - d, t)) / (2 * d);
        EXPECT_NEAR(-ux, c.exact->front_velocity(t), 1e-6);
    }
}

TEST_P(FixtureProperties, InfluxIsMinusFluxAtOrigin) {
    const auto c = make_fixture(GetParam());
    const double d = 1e-5;
    for (double t : {0.1, 0.5, 0.9}) {
        const double ux = (c.exact->temperature(d, t) - c.exact->temperature(-d, t)) / (2 * d);
        EXPECT_NEAR(-ux, c.exact->influx(t), 1e-6);
    }
}

TEST_P(FixtureProperties, ValidatesCleanly) {
    const auto c = make_fixture(GetParam());
    EXPECT_TRUE(validate_case(c).empty());
}

INSTANTIATE_TEST_SUITE_P(AllFixtures, FixtureProperties, ::testing::ValuesIn(kFixtureNames),
                         [](const auto& info) {
                             std::string name(info.param);
                             std::erase(name, '-');
                             return name;
                         });

TEST(ValidateCase, InfluxVanishingAtOrigin) {
    auto c = make_fixture("example1");
    c.influx = Signal::closed_form("t", [](double t) { return t; });
    const auto v = validate_case(c);
    ASSERT_FALSE(v.empty());
    EXPECT_EQ(v.front().constraint, "influx.positive");
    EXPECT_DOUBLE_EQ(v.front().at, 0.0);
}

TEST(ValidateCase, SlopeBoundViolation) {
    auto c = make_fixture("example1");
    const double H = c.H;
    const double b = c.b;
    c.initial_state = Signal::closed_form("2H(b-x)", [H, b](double x) { return 2.0 * H * (b - x); });
    const auto v = validate_case(c);
    ASSERT_FALSE(v.empty());
    bool slope = false;
    for (const auto& e : v) slope |= e.constraint == "initial.slope_bound";
    EXPECT_TRUE(slope);
}

TEST(ValidateCase, NegativeInitialData) {
    auto c = make_fixture("example1");
    c.initial_state = Signal::constant(-0.1);
    const auto v = validate_case(c);
    ASSERT_FALSE(v.empty());
    EXPECT_EQ(v.front().constraint, "initial.nonnegative");
}

TEST(SamplePath, Example2LinearFront) {
    const auto p = sample_path(make_fixture("example2"), 10);
    ASSERT_EQ(p.size(), 11u);
    EXPECT_NEAR(p.t[5], 0.5, 1e-15);
    EXPECT_NEAR(p.s[5], 0.6, 1e-15);
    EXPECT_TRUE(p.is_uniform());
    EXPECT_TRUE(p.lengths_agree());
}

TEST(SamplePath, Example1EndPoint) {
    const auto p = sample_path(make_fixture("example1"), 2);
    EXPECT_NEAR(p.s[2], std::sqrt(2.0) - 1.0 + 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(p.s[2], 1.12132, 1e-5);
}

TEST(SamplePath, Example3Velocity) {
    const auto p = sample_path(make_fixture("example3"), 4);
    EXPECT_NEAR(p.sdot[4], 1.0 / (2.0 * std::sqrt(1.25)), 1e-15);
    EXPECT_NEAR(p.sdot[4], 0.44721, 1e-5);
}

TEST(SamplePath, Errors) {
    auto c = make_fixture("example1");
    EXPECT_EQ(tag_of([&] { (void)sample_path(c, 1); }), "config.n.too_small");
    c.exact.reset();
    EXPECT_EQ(tag_of([&] { (void)sample_path(c, 10); }), "config.exact.missing");
}

TEST(FreeBoundaryPath, UniformityDetection) {
    FreeBoundaryPath p;
    p.t = {0.0, 0.1, 0.3};
    p.s = {1, 1, 1};
    p.sdot = {0, 0, 0};
    EXPECT_FALSE(p.is_uniform());
    p.t = {0.0, 0.2, 0.1};
    EXPECT_FALSE(p.is_uniform());
    p.t = {0.0, 0.1, 0.2};
    EXPECT_TRUE(p.is_uniform());
}

TEST(Signal, SampledInterpolatesAndClamps) {
    const auto s = Signal::sampled({0.0, 1.0, 2.0}, {0.0, 2.0, 0.0});
    EXPECT_DOUBLE_EQ(s(0.5), 1.0);
    EXPECT_DOUBLE_EQ(s(1.5), 1.0);
    EXPECT_DOUBLE_EQ(s(-1.0), 0.0);
    EXPECT_DOUBLE_EQ(s(3.0), 0.0);
    EXPECT_EQ(tag_of([] { (void)Signal::sampled({0.0, 0.0}, {1.0, 1.0}); }), "signal.knots.not_increasing");
}

TEST(Signal, CenteredDifferencesExactOnQuadratics) {
    const auto t = uniform_nodes(0.0, 1.0, 10);
    std::vector<double> v(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) v[i] = t[i] * t[i];
    const auto d = centered_differences(t, v);
    for (std::size_t i = 0; i < t.size(); ++i) EXPECT_NEAR(d[i], 2.0 * t[i], 1e-12);
}

TEST(Case, BoundM) {
    const auto c = make_fixture("direct-exp");
    EXPECT_NEAR(c.bound_M(), std::exp(1.1), 1e-12);
}
