#pragma once

// Time-domain simulation.
//
// Linear mode integrates the reduced closed loop in forward form, so only
// proper blocks are realized:
//
//   d_varpi_k = T_k * (d_k - (Y_net theta)_k - T_v_k * d_v_fb,k),   theta' = d_varpi
//
// with d_k the normalized power disturbance flowing into converter k; the
// converter's own output deviation is d_sbar_k = (Y_net theta)_k - d_k.
// Nonlinear mode integrates the static droop voltage dynamics in a frame
// rotating at omega0 with exact power flow.

#include "cfc/controller.hpp"
#include "cfc/network.hpp"
#include "cfc/transfer_function.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cfc {

enum class DisturbanceShape { Step, Ramp };

struct Disturbance {
    DisturbanceShape shape = DisturbanceShape::Step;
    /// Converter position in the reduced network; nullopt targets the PCC.
    std::optional<int> converter;
    double t_start = 0.0;
    /// Ramp rise time; ignored for steps.
    double duration = 0.0;
    /// Final normalized power draw d_rho - j*d_sigma flowing into the converters.
    Complex value;

    /// Steps switch on at the first sample time >= t_start and are held
    /// through the step beginning at `step_start`; ramps follow `t` exactly.
    Complex at(double t, double step_start) const;
};

struct ConverterSetup {
    std::optional<StaticDroopParams> static_params;
    std::optional<DynamicControllerSpec> dynamic;
    /// Nominal voltage magnitude used to scale the linear voltage deviation.
    double v0 = 1.0;
    /// Initial phasor in the rotating frame (nonlinear mode).
    Complex initial_voltage{1.0, 0.0};

    /// Dynamic spec, or the equivalent of the static gains with local voltage feedback.
    DynamicControllerSpec linear_spec() const;
};

enum class SimMode { Linear, Nonlinear };

struct SimOptions {
    double t_end = 2.0;
    double dt = 1e-4;
    SimMode mode = SimMode::Linear;
    /// Overrides the per-controller feedback selection when set.
    std::optional<VoltageFeedback> voltage_feedback;
    /// Record every n-th sample; the final sample is always recorded.
    long output_every = 1;
};

struct Scenario {
    std::string name;
    ReducedNetwork network;
    std::vector<ConverterSetup> converters;
    double omega0 = kDefaultOmega0;
    double v_pcc0 = 1.0;
    /// Share of a PCC draw taken by each converter; equal split when empty.
    std::vector<Complex> pcc_distribution;
    std::vector<Disturbance> disturbances;
    SimOptions options;

    std::size_t size() const { return converters.size(); }
    /// Throws ArgumentError on inconsistent dimensions or options.
    void validate() const;
    std::vector<Complex> pcc_shares() const;
    /// Disturbance vector d(t) projected onto the converters.
    std::vector<Complex> disturbance_at(double t, double step_start) const;
};

struct ConverterTrace {
    std::vector<double> d_eps, d_omega, d_rho, d_sigma, d_v;
};

struct TimeSeries {
    std::vector<double> t;
    std::vector<ConverterTrace> converters;
    std::vector<Complex> pcc_d_varpi;
    /// Total disturbance drawn from the converters.
    std::vector<Complex> pcc_d_sbar;
    std::vector<double> pcc_d_v;
    /// Sum over converters of the network injection (Y_net theta in linear
    /// mode, exact flow in nonlinear mode).
    std::vector<Complex> network_flow_sum;

    std::size_t size() const { return t.size(); }
    Complex d_varpi(std::size_t k, std::size_t i) const;
};

TimeSeries simulate_linear(const Scenario& scenario);
TimeSeries simulate_nonlinear(const Scenario& scenario);
/// Dispatches on scenario.options.mode.
TimeSeries simulate(const Scenario& scenario);

/// Closed-form map (d_sbar_pcc, d_v_pcc) -> d_varpi_pcc of the synchronized set:
///   from_power = (sum 1/T_k)^{-1},   from_voltage = -(sum T_v_k) * from_power
struct SynchronizedResponse {
    ComplexRationalTF from_power;
    ComplexRationalTF from_voltage;
};

SynchronizedResponse synchronized_response(const std::vector<ComplexRationalTF>& t,
                                           const std::vector<ComplexRationalTF>& t_v);

/// Step of d_sbar_pcc at t = 0 from rest, sampled on 0, dt, ..., t_end by
/// matrix-exponential propagation. With `close_voltage_loop`, the PCC
/// voltage follows d_v' = v_pcc0 * Re(d_varpi); otherwise it stays at zero.
std::vector<Complex> synchronized_step(const SynchronizedResponse& sync, Complex d_sbar_pcc, double t_end, double dt,
                                       bool close_voltage_loop, double v_pcc0 = 1.0);

struct SteadyState {
    Complex d_varpi;
    /// Power taken by each converter, T_k(0)^{-1} * d_varpi.
    std::vector<Complex> node_share;
    /// Present when the voltage loop regulates the PCC voltage.
    std::optional<double> d_v;
    /// False when d_eps settles away from zero, i.e. the voltage drifts.
    bool voltage_bounded = true;
};

/// Final values for a constant PCC draw. Throws UnstableConfigurationError
/// when the synchronized loop has poles outside the open left half-plane.
SteadyState steady_state(const std::vector<DynamicControllerSpec>& specs, Complex d_sbar_pcc,
                         bool include_voltage_loop = true, double v_pcc0 = 1.0);

/// ||a - b||_rms / ||b||_rms over the common length.
double relative_rms_error(const std::vector<double>& a, const std::vector<double>& b);
double relative_rms_error(const std::vector<Complex>& a, const std::vector<Complex>& b);

/// max - min over the trailing `fraction` of the samples.
double tail_variation(const std::vector<double>& x, double fraction = 0.1);

}  // namespace cfc
