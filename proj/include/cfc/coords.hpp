#pragma once

// Complex-voltage, complex-angle and complex-frequency coordinates.
//
//   v = e^theta,  theta = u + j*theta_angle,  u = ln|v|
//   varpi = d(theta)/dt = v'/v = eps + j*omega
//
// Voltages are per unit, angles in radians, frequencies in rad/s.

#include <complex>
#include <optional>
#include <span>
#include <vector>

namespace cfc {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDefaultOmega0 = 2.0 * kPi * 50.0;

/// Per-unit voltage phasor v*e^{j theta}.
struct ComplexVoltage {
    Complex value{1.0, 0.0};

    double magnitude() const { return std::abs(value); }
    double phase() const { return std::arg(value); }
};

/// Complex angle u + j*theta, with theta unwrapped.
struct ComplexAngle {
    double u = 0.0;
    double theta = 0.0;

    Complex as_complex() const { return {u, theta}; }
    static ComplexAngle from_complex(Complex c) { return {c.real(), c.imag()}; }
};

/// Complex frequency eps + j*omega. eps is the normalized rate of change of voltage.
struct ComplexFrequency {
    double eps = 0.0;
    double omega = 0.0;

    Complex as_complex() const { return {eps, omega}; }
    static ComplexFrequency from_complex(Complex c) { return {c.real(), c.imag()}; }
};

/// Normalized complex power rho + j*sigma = (p + jq)/v^2.
struct NormalizedComplexPower {
    double rho = 0.0;
    double sigma = 0.0;

    Complex as_complex() const { return {rho, sigma}; }
    /// rho - j*sigma, the form used by the droop laws.
    Complex conjugated() const { return {rho, -sigma}; }
};

/// Throws DomainError when |v| == 0. When `prev_theta` is given the returned
/// angle is the branch of arg(v) closest to it.
ComplexAngle to_complex_angle(const ComplexVoltage& v,
                              std::optional<double> prev_theta = std::nullopt);

ComplexVoltage from_complex_angle(const ComplexAngle& angle);

NormalizedComplexPower normalized_power(double p, double q, double v_mag);

/// i_o / v, i.e. rho - j*sigma computed from terminal voltage and output current.
Complex conj_normalized_power_from_current(const ComplexVoltage& v, Complex i_o);

/// Estimates v'/v along a uniformly sampled trajectory: central differences
/// inside, one-sided second-order differences at both ends. Output has the
/// same length as the input.
std::vector<ComplexFrequency> complex_frequency_of_trajectory(std::span<const ComplexVoltage> samples,
                                                              double dt);

/// Unwraps a sequence of phasors into continuous complex angles.
std::vector<ComplexAngle> unwrap_trajectory(std::span<const ComplexVoltage> samples);

}  // namespace cfc
