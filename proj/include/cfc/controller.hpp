#pragma once

// Per-converter control laws.
//
// Static complex droop (dVOC) in complex-voltage coordinates:
//   v' = j*w0*v + eta*e^{j*phi}*(sbar_star*v - i_o) + eta*alpha*(v_star - |v|)/v_star * v
// and in small-signal complex-frequency form:
//   d_varpi = eta*e^{j*phi} * (-d_sbar - alpha*e^{-j*phi} * d_v/v_star)
//
// Dynamic complex-frequency control replaces both gains by transfer functions:
//   d_varpi = T(s) * (-d_sbar - T_v(s) * d_v)
//
// Voltage deviations d_v are not normalized by v_star in the dynamic law; a
// static controller maps to T_v = alpha*e^{-j*phi}/v_star.

#include "cfc/coords.hpp"
#include "cfc/transfer_function.hpp"

#include <Eigen/Dense>

#include <utility>

namespace cfc {

struct StaticDroopParams {
    double eta = 0.02;
    double alpha = 5.0;
    double phi = kPi / 4.0;
    double v_star = 1.0;
    double p_star = 0.0;
    double q_star = 0.0;
    double omega0 = kDefaultOmega0;

    /// Throws ArgumentError when a gain or setpoint is out of range.
    void validate() const;
    /// (p_star - j*q_star) / v_star^2
    Complex conj_setpoint() const;
};

enum class VoltageFeedback { Local, Pcc };

struct DynamicControllerSpec {
    ComplexRationalTF t = ComplexRationalTF::identity();
    ComplexRationalTF t_v = ComplexRationalTF::zero();
    VoltageFeedback v_feedback = VoltageFeedback::Local;
};

/// T = eta*e^{j*phi}, T_v = alpha*e^{-j*phi}/v_star.
DynamicControllerSpec equivalent_dynamic_spec(const StaticDroopParams& params);

ComplexFrequency static_droop_smallsignal(const StaticDroopParams& params, double d_rho, double d_sigma, double d_v);

/// Time derivative of the terminal voltage phasor. Throws DomainError for |v| == 0.
Complex static_droop_voltage_dynamics(const StaticDroopParams& params, const ComplexVoltage& v, Complex i_o);

/// Realized controller state plus the integrated log-voltage u and angle theta.
struct ControllerState {
    Eigen::VectorXd x;
    double u = 0.0;
    double theta = 0.0;
};

/// The T_v -> T cascade as one real linear system with inputs
/// [Re d_sbar, Im d_sbar, d_v] and outputs [d_eps, d_omega].
class RealizedController {
public:
    /// Throws ImproperTransferFunctionError when T or T_v is improper and
    /// ArgumentError when T is zero.
    explicit RealizedController(const DynamicControllerSpec& spec, double omega0 = kDefaultOmega0);

    ControllerState initial_state() const;
    Eigen::Index state_dim() const { return a_.rows(); }
    double omega0() const { return omega0_; }

    const Eigen::MatrixXd& a() const { return a_; }
    const Eigen::MatrixXd& b() const { return b_; }
    const Eigen::MatrixXd& c() const { return c_; }
    const Eigen::MatrixXd& d() const { return d_; }

    ComplexFrequency output(const ControllerState& state, Complex d_sbar, double d_v) const;

private:
    double omega0_;
    Eigen::MatrixXd a_, b_, c_, d_;
};

/// Advances the cascade one fixed RK4 step with inputs held over the step and
/// returns the state at t + dt together with the output there.
std::pair<ControllerState, ComplexFrequency> dynamic_controller_step(const RealizedController& controller,
                                                                     const ControllerState& state,
                                                                     Complex d_sbar, double d_v, double dt);

/// v0 * e^u * e^{j*theta}
ComplexVoltage reconstruct_voltage(const ControllerState& state, double v0);

}  // namespace cfc
