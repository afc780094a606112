#include "cfc/coords.hpp"

#include "cfc/errors.hpp"

#include <cmath>

namespace cfc {

namespace {

void require_nonzero(const ComplexVoltage& v, const char* where) {
    if (!(std::abs(v.value) > 0.0)) {
        throw DomainError(std::string(where) + ": voltage magnitude must be positive");
    }
}

}  // namespace

ComplexAngle to_complex_angle(const ComplexVoltage& v, std::optional<double> prev_theta) {
    require_nonzero(v, "to_complex_angle");
    double theta = std::arg(v.value);
    if (prev_theta) {
        const double turns = std::round((*prev_theta - theta) / (2.0 * kPi));
        theta += turns * 2.0 * kPi;
    }
    return {std::log(std::abs(v.value)), theta};
}

ComplexVoltage from_complex_angle(const ComplexAngle& angle) {
    return {std::exp(angle.u) * Complex(std::cos(angle.theta), std::sin(angle.theta))};
}

NormalizedComplexPower normalized_power(double p, double q, double v_mag) {
    if (!(v_mag > 0.0)) {
        throw DomainError("normalized_power: voltage magnitude must be positive");
    }
    const double v2 = v_mag * v_mag;
    return {p / v2, q / v2};
}

Complex conj_normalized_power_from_current(const ComplexVoltage& v, Complex i_o) {
    require_nonzero(v, "conj_normalized_power_from_current");
    return i_o / v.value;
}

std::vector<ComplexFrequency> complex_frequency_of_trajectory(std::span<const ComplexVoltage> samples,
                                                              double dt) {
    if (samples.size() < 3) {
        throw ArgumentError("complex_frequency_of_trajectory: at least 3 samples required");
    }
    if (!(dt > 0.0)) {
        throw ArgumentError("complex_frequency_of_trajectory: dt must be positive");
    }
    for (const auto& s : samples) {
        require_nonzero(s, "complex_frequency_of_trajectory");
    }

    const std::size_t n = samples.size();
    std::vector<ComplexFrequency> out(n);
    auto v = [&](std::size_t i) { return samples[i].value; };

    out.front() = ComplexFrequency::from_complex((-3.0 * v(0) + 4.0 * v(1) - v(2)) / (2.0 * dt) / v(0));
    for (std::size_t i = 1; i + 1 < n; ++i) {
        out[i] = ComplexFrequency::from_complex((v(i + 1) - v(i - 1)) / (2.0 * dt) / v(i));
    }
    out.back() = ComplexFrequency::from_complex((3.0 * v(n - 1) - 4.0 * v(n - 2) + v(n - 3)) / (2.0 * dt) /
                                                v(n - 1));
    return out;
}

std::vector<ComplexAngle> unwrap_trajectory(std::span<const ComplexVoltage> samples) {
    std::vector<ComplexAngle> out;
    out.reserve(samples.size());
    std::optional<double> prev;
    for (const auto& s : samples) {
        out.push_back(to_complex_angle(s, prev));
        prev = out.back().theta;
    }
    return out;
}

}  // namespace cfc
