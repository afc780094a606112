#pragma once

// Desired aggregate behaviour at the point of common coupling and its split
// into local controllers via dynamic participation factors m_k(s), m_v_k(s):
//
//   T_k = T_des / m_k,   T_v_k = m_v_k * T_v_des,   sum m_k = sum m_v_k = 1
//
// which makes (sum_k 1/T_k)^{-1} = T_des and sum_k T_v_k = T_v_des.

#include "cfc/controller.hpp"
#include "cfc/transfer_function.hpp"

#include <vector>

namespace cfc {

struct DesiredBehavior {
    ComplexRationalTF t_des;
    ComplexRationalTF t_v_des = ComplexRationalTF::zero();
};

struct ParticipationSet {
    std::vector<ComplexRationalTF> m;
    std::vector<ComplexRationalTF> m_v;

    static ParticipationSet equal(std::size_t n);
};

struct ParticipationCheck {
    bool pass = false;
    double residual_m = 0.0;
    double residual_m_v = 0.0;

    double residual() const { return residual_m > residual_m_v ? residual_m : residual_m_v; }
};

struct AggregationReport {
    /// Coefficient residuals of (sum 1/T_k)^{-1} vs T_des and sum T_v_k vs T_v_des.
    double coefficient_residual_t = 0.0;
    double coefficient_residual_t_v = 0.0;
    /// Worst relative frequency-response mismatch over a 30-point log grid.
    double frequency_residual_t = 0.0;
    double frequency_residual_t_v = 0.0;
    ComplexRationalTF aggregate_t;
    ComplexRationalTF aggregate_t_v;

    double max_residual() const;
    bool pass(double tol = kCoefficientTolerance) const;
};

/// Per-unit figures reported next to a designed controller.
struct UnitSummary {
    Complex dc_gain;
    bool dc_gain_finite = true;
    /// -3 dB frequency of |T_k(j w)| relative to its DC value, rad/s; negative when not found.
    double bandwidth = -1.0;
    std::vector<Complex> poles;
    bool proper = true;
};

ParticipationCheck verify_participation(const ParticipationSet& parts, double tol = kCoefficientTolerance);

/// Throws ArgumentError on mismatched lengths or a participation set that
/// fails verify_participation, DomainError on a zero m_k.
std::vector<DynamicControllerSpec> disaggregate(const DesiredBehavior& des, const ParticipationSet& parts,
                                                VoltageFeedback feedback = VoltageFeedback::Pcc);

AggregationReport verify_aggregation(const std::vector<DynamicControllerSpec>& specs, const DesiredBehavior& des);

UnitSummary summarize_unit(const ComplexRationalTF& t);

/// 30 log-spaced frequencies in [1e-3, 1e4] rad/s.
std::vector<double> verification_frequencies();

}  // namespace cfc
