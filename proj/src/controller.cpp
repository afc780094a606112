#include "cfc/controller.hpp"

#include "cfc/errors.hpp"
#include "cfc/integrate.hpp"

#include <cmath>

namespace cfc {

void StaticDroopParams::validate() const {
    if (!(eta > 0.0)) throw ArgumentError("static droop: eta must be positive");
    if (!(alpha >= 0.0)) throw ArgumentError("static droop: alpha must be nonnegative");
    if (!(phi >= 0.0 && phi <= kPi / 2.0 + 1e-12)) throw ArgumentError("static droop: phi must lie in [0, pi/2]");
    if (!(v_star > 0.0)) throw ArgumentError("static droop: v_star must be positive");
    if (!std::isfinite(p_star) || !std::isfinite(q_star) || !std::isfinite(omega0)) {
        throw ArgumentError("static droop: setpoints must be finite");
    }
}

Complex StaticDroopParams::conj_setpoint() const {
    return Complex{p_star, -q_star} / (v_star * v_star);
}

DynamicControllerSpec equivalent_dynamic_spec(const StaticDroopParams& params) {
    DynamicControllerSpec spec;
    spec.t = ComplexRationalTF::constant(std::polar(params.eta, params.phi));
    spec.t_v = ComplexRationalTF::constant(std::polar(params.alpha / params.v_star, -params.phi));
    return spec;
}

ComplexFrequency static_droop_smallsignal(const StaticDroopParams& p, double d_rho, double d_sigma, double d_v) {
    const double c = std::cos(p.phi);
    const double s = std::sin(p.phi);
    const double in_eps = -d_rho - p.alpha * c * d_v / p.v_star;
    const double in_omega = d_sigma + p.alpha * s * d_v / p.v_star;
    return {p.eta * (c * in_eps - s * in_omega), p.eta * (s * in_eps + c * in_omega)};
}

Complex static_droop_voltage_dynamics(const StaticDroopParams& p, const ComplexVoltage& v, Complex i_o) {
    const double mag = std::abs(v.value);
    if (!(mag > 0.0)) throw DomainError("static_droop_voltage_dynamics: voltage magnitude must be positive");
    const Complex rot = std::polar(p.eta, p.phi);
    return Complex{0.0, p.omega0} * v.value + rot * (p.conj_setpoint() * v.value - i_o) +
           p.eta * p.alpha * ((p.v_star - mag) / p.v_star) * v.value;
}

RealizedController::RealizedController(const DynamicControllerSpec& spec, double omega0) : omega0_(omega0) {
    if (spec.t.is_zero()) throw ArgumentError("controller transfer function T must be nonzero");
    const StateSpace2x2 t = realize(spec.t);
    const StateSpace2x2 tv = realize(spec.t_v);

    const Eigen::Index nv = tv.state_dim();
    const Eigen::Index nt = t.state_dim();
    const Eigen::Index n = nv + nt;
    const Eigen::VectorXd bv = tv.B.col(0);
    const Eigen::Vector2d dv = tv.D.col(0);

    // w = Cv xv + dv*d_v,  e = -sbar - w,  y = Ct xt + Dt e
    a_ = Eigen::MatrixXd::Zero(n, n);
    b_ = Eigen::MatrixXd::Zero(n, 3);
    c_ = Eigen::MatrixXd::Zero(2, n);
    d_ = Eigen::MatrixXd::Zero(2, 3);

    if (nv > 0) {
        a_.topLeftCorner(nv, nv) = tv.A;
        b_.block(0, 2, nv, 1) = bv;
    }
    if (nt > 0) {
        a_.bottomRightCorner(nt, nt) = t.A;
        if (nv > 0) a_.block(nv, 0, nt, nv) = -t.B * tv.C;
        b_.block(nv, 0, nt, 2) = -t.B;
        b_.block(nv, 2, nt, 1) = -t.B * dv;
        c_.rightCols(nt) = t.C;
    }
    if (nv > 0) c_.leftCols(nv) = -t.D * tv.C;
    d_.leftCols(2) = -t.D;
    d_.col(2) = -t.D * dv;
}

ControllerState RealizedController::initial_state() const {
    return {Eigen::VectorXd::Zero(a_.rows()), 0.0, 0.0};
}

ComplexFrequency RealizedController::output(const ControllerState& state, Complex d_sbar, double d_v) const {
    const Eigen::Vector3d in(d_sbar.real(), d_sbar.imag(), d_v);
    Eigen::Vector2d y = d_ * in;
    if (state.x.size() > 0) y += c_ * state.x;
    return {y(0), y(1)};
}

std::pair<ControllerState, ComplexFrequency> dynamic_controller_step(const RealizedController& ctl,
                                                                     const ControllerState& state,
                                                                     Complex d_sbar, double d_v, double dt) {
    if (!(dt > 0.0)) throw ArgumentError("dynamic_controller_step: dt must be positive");
    const Eigen::Index n = ctl.state_dim();
    if (state.x.size() != n) throw ArgumentError("dynamic_controller_step: state dimension mismatch");

    const Eigen::Vector3d in(d_sbar.real(), d_sbar.imag(), d_v);
    const Eigen::VectorXd bu = ctl.b() * in;
    const Eigen::Vector2d du = ctl.d() * in;

    // Augmented state [x; u; theta].
    Eigen::VectorXd z(n + 2);
    z.head(n) = state.x;
    z(n) = state.u;
    z(n + 1) = state.theta;

    auto rhs = [&](double, const Eigen::VectorXd& s) -> Eigen::VectorXd {
        Eigen::VectorXd out(n + 2);
        Eigen::Vector2d y = du;
        if (n > 0) {
            out.head(n) = ctl.a() * s.head(n) + bu;
            y += ctl.c() * s.head(n);
        }
        out(n) = y(0);
        out(n + 1) = ctl.omega0() + y(1);
        return out;
    };
    const Eigen::VectorXd next = rk4_step(rhs, 0.0, z, dt);

    ControllerState out{next.head(n), next(n), next(n + 1)};
    return {out, ctl.output(out, d_sbar, d_v)};
}

ComplexVoltage reconstruct_voltage(const ControllerState& state, double v0) {
    return {v0 * std::exp(state.u) * Complex(std::cos(state.theta), std::sin(state.theta))};
}

}  // namespace cfc
