#include "cfc/aggregation.hpp"

#include "cfc/errors.hpp"

#include <algorithm>
#include <cmath>

namespace cfc {

namespace {

ComplexRationalTF sum(const std::vector<ComplexRationalTF>& terms) {
    ComplexRationalTF acc = ComplexRationalTF::zero();
    for (const auto& t : terms) acc = acc + t;
    return acc;
}

double sum_residual(const std::vector<ComplexRationalTF>& terms) {
    if (terms.empty()) return 1.0;
    return coefficient_residual(sum(terms), ComplexRationalTF::identity());
}

double frequency_mismatch(const ComplexRationalTF& a, const ComplexRationalTF& b) {
    double worst = 0.0;
    for (double w : verification_frequencies()) {
        for (double sign : {1.0, -1.0}) {
            const Complex s{0.0, sign * w};
            try {
                const Complex vb = b.evaluate(s);
                const Complex va = a.evaluate(s);
                worst = std::max(worst, std::abs(va - vb) / std::max(std::abs(vb), 1e-12));
            } catch (const DomainError&) {
                // Shared pole on the imaginary axis; nothing to compare at this point.
            }
        }
    }
    return worst;
}

}  // namespace

ParticipationSet ParticipationSet::equal(std::size_t n) {
    ParticipationSet p;
    const auto share = ComplexRationalTF::constant(1.0 / static_cast<double>(n));
    p.m.assign(n, share);
    p.m_v.assign(n, share);
    return p;
}

double AggregationReport::max_residual() const {
    return std::max({coefficient_residual_t, coefficient_residual_t_v, frequency_residual_t, frequency_residual_t_v});
}

bool AggregationReport::pass(double tol) const {
    return max_residual() <= tol;
}

ParticipationCheck verify_participation(const ParticipationSet& parts, double tol) {
    ParticipationCheck check;
    check.residual_m = sum_residual(parts.m);
    check.residual_m_v = sum_residual(parts.m_v);
    check.pass = check.residual_m <= tol && check.residual_m_v <= tol;
    return check;
}

std::vector<DynamicControllerSpec> disaggregate(const DesiredBehavior& des, const ParticipationSet& parts,
                                                VoltageFeedback feedback) {
    if (des.t_des.is_zero()) throw ArgumentError("desired behaviour T_des must be nonzero");
    if (parts.m.empty() || parts.m.size() != parts.m_v.size()) {
        throw ArgumentError("participation factor lists must be nonempty and of equal length");
    }
    for (std::size_t k = 0; k < parts.m.size(); ++k) {
        if (parts.m[k].is_zero()) {
            throw DomainError("participation factor m_" + std::to_string(k + 1) + " is zero; its inverse is undefined");
        }
    }
    const ParticipationCheck check = verify_participation(parts);
    if (!check.pass) {
        throw ArgumentError("participation factors do not sum to one (residual " + std::to_string(check.residual()) +
                            ")");
    }

    std::vector<DynamicControllerSpec> specs;
    specs.reserve(parts.m.size());
    for (std::size_t k = 0; k < parts.m.size(); ++k) {
        DynamicControllerSpec s;
        s.t = des.t_des / parts.m[k];
        s.t_v = parts.m_v[k] * des.t_v_des;
        s.v_feedback = feedback;
        specs.push_back(std::move(s));
    }
    return specs;
}

AggregationReport verify_aggregation(const std::vector<DynamicControllerSpec>& specs, const DesiredBehavior& des) {
    if (specs.empty()) throw ArgumentError("verify_aggregation: no controllers given");
    std::vector<ComplexRationalTF> inverses;
    std::vector<ComplexRationalTF> voltage_paths;
    for (const auto& s : specs) {
        inverses.push_back(s.t.inverse());
        voltage_paths.push_back(s.t_v);
    }

    AggregationReport r;
    r.aggregate_t = sum(inverses).inverse();
    r.aggregate_t_v = sum(voltage_paths);
    r.coefficient_residual_t = coefficient_residual(r.aggregate_t, des.t_des);
    r.coefficient_residual_t_v = coefficient_residual(r.aggregate_t_v, des.t_v_des);
    r.frequency_residual_t = frequency_mismatch(r.aggregate_t, des.t_des);
    r.frequency_residual_t_v = frequency_mismatch(r.aggregate_t_v, des.t_v_des);
    return r;
}

UnitSummary summarize_unit(const ComplexRationalTF& t) {
    UnitSummary u;
    u.poles = t.poles();
    u.proper = t.is_proper();
    try {
        u.dc_gain = t.evaluate(0.0);
    } catch (const DomainError&) {
        u.dc_gain_finite = false;
        return u;
    }
    const double target = std::abs(u.dc_gain) / std::sqrt(2.0);
    if (!(target > 0.0)) return u;

    auto mag = [&](double w) { return std::abs(t.evaluate(Complex{0.0, w})); };
    constexpr int kPoints = 400;
    const double lo = -4.0;
    const double hi = 6.0;
    double prev = std::pow(10.0, lo);
    if (mag(prev) < target) return u;
    for (int i = 1; i < kPoints; ++i) {
        const double w = std::pow(10.0, lo + (hi - lo) * i / (kPoints - 1));
        if (mag(w) < target) {
            double a = std::log10(prev);
            double b = std::log10(w);
            for (int it = 0; it < 60; ++it) {
                const double m = 0.5 * (a + b);
                (mag(std::pow(10.0, m)) < target ? b : a) = m;
            }
            u.bandwidth = std::pow(10.0, 0.5 * (a + b));
            return u;
        }
        prev = w;
    }
    return u;
}

std::vector<double> verification_frequencies() {
    std::vector<double> w(30);
    for (int i = 0; i < 30; ++i) w[static_cast<std::size_t>(i)] = std::pow(10.0, -3.0 + 7.0 * i / 29.0);
    return w;
}

}  // namespace cfc
