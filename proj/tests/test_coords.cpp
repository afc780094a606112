#include "cfc/coords.hpp"
#include "cfc/errors.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace cfc;

TEST(Coords, ComplexAngleRoundTrip) {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> mag(0.05, 3.0), ang(-kPi, kPi);
    for (int i = 0; i < 200; ++i) {
        const ComplexVoltage v{std::polar(mag(rng), ang(rng))};
        const ComplexVoltage back = from_complex_angle(to_complex_angle(v));
        EXPECT_LE(std::abs(back.value - v.value), 1e-12 * std::abs(v.value));
    }
}

TEST(Coords, UnitVoltageHasZeroAngle) {
    const ComplexAngle a = to_complex_angle(ComplexVoltage{1.0});
    EXPECT_EQ(a.u, 0.0);
    EXPECT_EQ(a.theta, 0.0);
}

TEST(Coords, BranchFollowsPreviousAngle) {
    const ComplexVoltage v{std::polar(1.0, 0.1)};
    const ComplexAngle a = to_complex_angle(v, 4.0 * kPi);
    EXPECT_NEAR(a.theta, 4.0 * kPi + 0.1, 1e-12);
}

TEST(Coords, ZeroVoltageIsRejected) {
    EXPECT_THROW(to_complex_angle(ComplexVoltage{0.0}), DomainError);
    EXPECT_THROW(normalized_power(1.0, 0.0, 0.0), DomainError);
    EXPECT_THROW(conj_normalized_power_from_current(ComplexVoltage{0.0}, 1.0), DomainError);
}

TEST(Coords, NormalizedPowerScalesWithSquaredMagnitude) {
    const NormalizedComplexPower s = normalized_power(0.8, 0.3, 2.0);
    EXPECT_DOUBLE_EQ(s.rho, 0.2);
    EXPECT_DOUBLE_EQ(s.sigma, 0.075);
}

TEST(Coords, ConjugatedPowerFromCurrent) {
    // i_o = conj(s) / conj(v) for s = p + jq: take v = 2 e^{j0.3}, p = 0.5, q = 0.2.
    const Complex v = std::polar(2.0, 0.3);
    const Complex s{0.5, 0.2};
    const Complex i_o = std::conj(s / v);
    const Complex sbar = conj_normalized_power_from_current(ComplexVoltage{v}, i_o);
    const NormalizedComplexPower n = normalized_power(0.5, 0.2, 2.0);
    EXPECT_NEAR(std::abs(sbar - n.conjugated()), 0.0, 1e-14);
}

TEST(Coords, EstimatorRecoversConstantComplexFrequency) {
    const Complex varpi{-0.7, 2.0 * kPi * 50.0};
    const double dt = 1e-5;
    std::vector<ComplexVoltage> v;
    for (int i = 0; i < 50; ++i) v.push_back({std::exp(varpi * (i * dt))});
    const auto w = complex_frequency_of_trajectory(v, dt);
    ASSERT_EQ(w.size(), v.size());
    for (const auto& f : w) {
        EXPECT_NEAR(f.eps, varpi.real(), 1e-3);
        EXPECT_NEAR(f.omega, varpi.imag(), 1e-2);
    }
}

TEST(Coords, EstimatorIsSecondOrder) {
    const Complex varpi{0.4, 3.0};
    auto error = [&](double dt) {
        std::vector<ComplexVoltage> v;
        for (int i = 0; i < 20; ++i) v.push_back({std::exp(varpi * (i * dt))});
        double e = 0.0;
        for (const auto& f : complex_frequency_of_trajectory(v, dt)) e = std::max(e, std::abs(f.as_complex() - varpi));
        return e;
    };
    const double ratio = error(1e-2) / error(5e-3);
    EXPECT_GT(ratio, 3.5);
    EXPECT_LT(ratio, 4.5);
}

TEST(Coords, EstimatorNeedsThreeSamples) {
    std::vector<ComplexVoltage> v(2);
    EXPECT_THROW(complex_frequency_of_trajectory(v, 1e-3), ArgumentError);
    std::vector<ComplexVoltage> ok(3);
    EXPECT_THROW(complex_frequency_of_trajectory(ok, 0.0), ArgumentError);
}

TEST(Coords, UnwrapIsContinuous) {
    std::vector<ComplexVoltage> v;
    for (int i = 0; i < 100; ++i) v.push_back({std::polar(1.0, 0.3 * i)});
    const auto a = unwrap_trajectory(v);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i].theta, 0.3 * static_cast<double>(i), 1e-12);
}
