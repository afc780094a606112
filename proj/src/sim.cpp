#include "cfc/sim.hpp"

#include "cfc/errors.hpp"
#include "cfc/integrate.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

namespace cfc {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kStepTimeTolerance = 1e-9;
constexpr double kCollapseVoltage = 1e-6;
constexpr double kPoleStabilityMargin = 1e-12;

Eigen::Matrix2d real_block(Complex c) {
    Eigen::Matrix2d m;
    m << c.real(), -c.imag(), c.imag(), c.real();
    return m;
}

MatrixXd selector(Index rows, Index offset, Index total) {
    MatrixXd s = MatrixXd::Zero(rows, total);
    for (Index i = 0; i < rows; ++i) s(i, offset + i) = 1.0;
    return s;
}

struct RealLti {
    MatrixXd a, b, c, d;
};

// Aggregate synchronized loop with input [Re d, Im d] and output d_varpi.
RealLti synchronized_system(const SynchronizedResponse& sync, bool close_voltage_loop, double v_pcc0) {
    const StateSpace2x2 p = realize(sync.from_power);
    const StateSpace2x2 v = realize(sync.from_voltage);
    const Index np = p.state_dim();
    const Index nv = v.state_dim();
    const Index nd = close_voltage_loop ? 1 : 0;
    const Index n = np + nv + nd;

    RealLti s{MatrixXd::Zero(n, n), MatrixXd::Zero(n, 2), MatrixXd::Zero(2, n), p.D};
    s.a.topLeftCorner(np, np) = p.A;
    s.b.topRows(np) = p.B;
    s.c.leftCols(np) = p.C;
    if (nv > 0) {
        s.a.block(np, np, nv, nv) = v.A;
        s.c.block(0, np, 2, nv) = v.C;
    }
    if (close_voltage_loop) {
        const Index iv = np + nv;
        if (nv > 0) s.a.block(np, iv, nv, 1) = v.B.col(0);
        s.c.col(iv) = v.D.col(0);
        s.a.row(iv) = v_pcc0 * s.c.row(0);
        s.b.row(iv) = v_pcc0 * s.d.row(0);
    }
    return s;
}

bool all_stable(const MatrixXd& a) {
    if (a.rows() == 0) return true;
    Eigen::EigenSolver<MatrixXd> es(a, false);
    for (Index i = 0; i < es.eigenvalues().size(); ++i) {
        if (es.eigenvalues()(i).real() >= -kPoleStabilityMargin) return false;
    }
    return true;
}

bool poles_stable(const ComplexRationalTF& t) {
    for (const Complex& p : t.poles()) {
        if (p.real() >= -kPoleStabilityMargin) return false;
    }
    return true;
}

struct SampleGrid {
    long steps;
    long every;
    double dt;

    bool recorded(long i) const { return i % every == 0 || i == steps; }
    double time(long i) const { return static_cast<double>(i) * dt; }
};

SampleGrid make_grid(const SimOptions& o) {
    return {step_count(o.t_end, o.dt), o.output_every, o.dt};
}

void reserve(TimeSeries& ts, std::size_t n, const SampleGrid& g) {
    const auto rows = static_cast<std::size_t>(g.steps / g.every + 2);
    ts.converters.assign(n, {});
    ts.t.reserve(rows);
    for (auto& c : ts.converters) {
        c.d_eps.reserve(rows);
        c.d_omega.reserve(rows);
        c.d_rho.reserve(rows);
        c.d_sigma.reserve(rows);
        c.d_v.reserve(rows);
    }
}

void fill_input(const Scenario& sc, double t, double step_start, VectorXd& u) {
    const std::vector<Complex> d = sc.disturbance_at(t, step_start);
    for (std::size_t k = 0; k < d.size(); ++k) {
        u(static_cast<Index>(2 * k)) = d[k].real();
        u(static_cast<Index>(2 * k + 1)) = d[k].imag();
    }
}

// The whole linear interconnection as x' = A x + B u with u = [Re d_k, Im d_k]_k
// and per-converter output maps y = Cx x + Cu u.
struct LinearSystem {
    MatrixXd a, b;
    std::vector<MatrixXd> varpi_x, varpi_u;  // 2 x N, 2 x 2n
    std::vector<MatrixXd> flow_x;            // 2 x N
    std::vector<Index> theta_offset;
    std::vector<double> v0;
};

LinearSystem build_linear(const Scenario& sc) {
    const auto n = static_cast<Index>(sc.size());
    std::vector<DynamicControllerSpec> specs;
    std::vector<StateSpace2x2> tv, tt;
    std::vector<Index> off_v, off_t;
    LinearSystem sys;
    Index total = 0;
    for (const auto& c : sc.converters) {
        specs.push_back(c.linear_spec());
        tv.push_back(realize(specs.back().t_v));
        tt.push_back(realize(specs.back().t));
        off_v.push_back(total);
        total += tv.back().state_dim();
        off_t.push_back(total);
        total += tt.back().state_dim();
        sys.theta_offset.push_back(total);
        total += 2;
        sys.v0.push_back(c.v0);
    }
    const Index inputs = 2 * n;
    sys.a = MatrixXd::Zero(total, total);
    sys.b = MatrixXd::Zero(total, inputs);

    std::vector<MatrixXd> theta(sc.size());
    for (Index k = 0; k < n; ++k) theta[k] = selector(2, sys.theta_offset[k], total);

    Eigen::RowVectorXd mean_re = Eigen::RowVectorXd::Zero(total);
    for (Index k = 0; k < n; ++k) mean_re += theta[k].row(0) / static_cast<double>(n);

    for (Index k = 0; k < n; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        MatrixXd flow = MatrixXd::Zero(2, total);
        for (Index l = 0; l < n; ++l) {
            const Complex y = sc.network.y_net(k, l);
            if (y != 0.0) flow += real_block(y) * theta[l];
        }

        const VoltageFeedback fb = sc.options.voltage_feedback.value_or(specs[ku].v_feedback);
        const Eigen::RowVectorXd dv_fb =
            fb == VoltageFeedback::Local ? Eigen::RowVectorXd(sc.converters[ku].v0 * theta[k].row(0))
                                         : Eigen::RowVectorXd(sc.v_pcc0 * mean_re);

        const StateSpace2x2& v = tv[ku];
        const StateSpace2x2& t = tt[ku];
        const Index mv = v.state_dim();
        const Index mt = t.state_dim();
        const MatrixXd sel_v = selector(mv, off_v[ku], total);
        const MatrixXd sel_t = selector(mt, off_t[ku], total);
        const MatrixXd sel_u = selector(2, 2 * k, inputs);

        const MatrixXd w = v.C * sel_v + v.D.col(0) * dv_fb;
        const MatrixXd e_x = -flow - w;

        if (mv > 0) sys.a.middleRows(off_v[ku], mv) = v.A * sel_v + v.B.col(0) * dv_fb;
        if (mt > 0) {
            sys.a.middleRows(off_t[ku], mt) = t.A * sel_t + t.B * e_x;
            sys.b.middleRows(off_t[ku], mt) = t.B * sel_u;
        }
        MatrixXd varpi_x = t.D * e_x;
        if (mt > 0) varpi_x += t.C * sel_t;
        const MatrixXd varpi_u = t.D * sel_u;
        sys.a.middleRows(sys.theta_offset[ku], 2) = varpi_x;
        sys.b.middleRows(sys.theta_offset[ku], 2) = varpi_u;

        sys.varpi_x.push_back(varpi_x);
        sys.varpi_u.push_back(varpi_u);
        sys.flow_x.push_back(flow);
    }
    return sys;
}

}  // namespace

Complex Disturbance::at(double t, double step_start) const {
    switch (shape) {
        case DisturbanceShape::Step:
            return step_start + kStepTimeTolerance >= t_start ? value : Complex{};
        case DisturbanceShape::Ramp:
            if (t <= t_start) return {};
            if (duration <= 0.0 || t >= t_start + duration) return value;
            return value * ((t - t_start) / duration);
    }
    return {};
}

DynamicControllerSpec ConverterSetup::linear_spec() const {
    if (dynamic) return *dynamic;
    if (static_params) {
        DynamicControllerSpec s = equivalent_dynamic_spec(*static_params);
        s.v_feedback = VoltageFeedback::Local;
        return s;
    }
    throw ArgumentError("converter has no controller");
}

void Scenario::validate() const {
    const SimOptions& o = options;
    if (!(o.dt > 0.0) || !std::isfinite(o.dt)) throw ArgumentError("dt must be positive");
    if (!(o.t_end >= o.dt) || !std::isfinite(o.t_end)) throw ArgumentError("t_end must be at least dt");
    if (o.output_every < 1) throw ArgumentError("output_every must be at least 1");
    if (converters.empty()) throw ArgumentError("scenario has no converters");
    if (static_cast<Index>(converters.size()) != network.size() || network.y_net.cols() != network.size()) {
        throw ArgumentError("converter count does not match the reduced network");
    }
    if (!pcc_distribution.empty() && pcc_distribution.size() != converters.size()) {
        throw ArgumentError("pcc_distribution length does not match the converter count");
    }
    if (!(v_pcc0 > 0.0)) throw ArgumentError("v_pcc0 must be positive");
    for (const auto& c : converters) {
        if (c.static_params.has_value() == c.dynamic.has_value()) {
            throw ArgumentError("each converter needs exactly one of a static or dynamic controller");
        }
        if (c.static_params) c.static_params->validate();
        if (!(c.v0 > 0.0)) throw ArgumentError("converter v0 must be positive");
    }
    for (const auto& d : disturbances) {
        if (d.converter && (*d.converter < 0 || *d.converter >= static_cast<int>(converters.size()))) {
            throw ArgumentError("disturbance targets an unknown converter");
        }
        if (d.shape == DisturbanceShape::Ramp && !(d.duration >= 0.0)) {
            throw ArgumentError("ramp duration must be nonnegative");
        }
        if (!std::isfinite(d.value.real()) || !std::isfinite(d.value.imag()) || !std::isfinite(d.t_start)) {
            throw ArgumentError("disturbance values must be finite");
        }
    }
}

std::vector<Complex> Scenario::pcc_shares() const {
    if (!pcc_distribution.empty()) return pcc_distribution;
    return std::vector<Complex>(converters.size(), Complex{1.0 / static_cast<double>(converters.size()), 0.0});
}

std::vector<Complex> Scenario::disturbance_at(double t, double step_start) const {
    std::vector<Complex> d(converters.size());
    std::vector<Complex> shares;
    for (const auto& dist : disturbances) {
        const Complex v = dist.at(t, step_start);
        if (v == 0.0) continue;
        if (dist.converter) {
            d[static_cast<std::size_t>(*dist.converter)] += v;
        } else {
            if (shares.empty()) shares = pcc_shares();
            for (std::size_t k = 0; k < d.size(); ++k) d[k] += shares[k] * v;
        }
    }
    return d;
}

Complex TimeSeries::d_varpi(std::size_t k, std::size_t i) const {
    return {converters[k].d_eps[i], converters[k].d_omega[i]};
}

TimeSeries simulate_linear(const Scenario& sc) {
    sc.validate();
    const LinearSystem sys = build_linear(sc);
    const std::size_t n = sc.size();
    const Index dim = sys.a.rows();
    const SampleGrid grid = make_grid(sc.options);
    const double h = grid.dt;

    TimeSeries ts;
    reserve(ts, n, grid);

    VectorXd x = VectorXd::Zero(dim);
    VectorXd u = VectorXd::Zero(static_cast<Index>(2 * n));
    VectorXd k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);

    auto record = [&](double t) {
        ts.t.push_back(t);
        Complex varpi_sum, flow_sum, d_sum;
        for (std::size_t k = 0; k < n; ++k) {
            const Eigen::Vector2d w = sys.varpi_x[k] * x + sys.varpi_u[k] * u;
            const Eigen::Vector2d f = sys.flow_x[k] * x;
            const Complex d{u(static_cast<Index>(2 * k)), u(static_cast<Index>(2 * k + 1))};
            const Complex out = Complex{f(0), f(1)} - d;
            const double dv = sys.v0[k] * x(sys.theta_offset[k]);
            auto& c = ts.converters[k];
            c.d_eps.push_back(w(0));
            c.d_omega.push_back(w(1));
            c.d_rho.push_back(out.real());
            c.d_sigma.push_back(-out.imag());
            c.d_v.push_back(dv);
            varpi_sum += Complex{w(0), w(1)};
            flow_sum += Complex{f(0), f(1)};
            d_sum += d;
        }
        const double inv_n = 1.0 / static_cast<double>(n);
        ts.pcc_d_varpi.push_back(varpi_sum * inv_n);
        ts.pcc_d_sbar.push_back(d_sum);
        double re_theta = 0.0;
        for (std::size_t k = 0; k < n; ++k) re_theta += x(sys.theta_offset[k]);
        ts.pcc_d_v.push_back(sc.v_pcc0 * re_theta * inv_n);
        ts.network_flow_sum.push_back(flow_sum);
    };

    for (long i = 0;; ++i) {
        const double t = grid.time(i);
        if (grid.recorded(i)) {
            fill_input(sc, t, t, u);
            record(t);
        }
        if (i == grid.steps) break;

        fill_input(sc, t, t, u);
        k1.noalias() = sys.a * x + sys.b * u;
        fill_input(sc, t + 0.5 * h, t, u);
        tmp = x + 0.5 * h * k1;
        k2.noalias() = sys.a * tmp + sys.b * u;
        tmp = x + 0.5 * h * k2;
        k3.noalias() = sys.a * tmp + sys.b * u;
        fill_input(sc, t + h, t, u);
        tmp = x + h * k3;
        k4.noalias() = sys.a * tmp + sys.b * u;
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        if (!x.allFinite()) {
            throw SimulationAbort("linear simulation produced a non-finite state", t);
        }
    }
    return ts;
}

TimeSeries simulate_nonlinear(const Scenario& sc) {
    sc.validate();
    const std::size_t n = sc.size();
    for (const auto& c : sc.converters) {
        if (!c.static_params) throw ArgumentError("nonlinear simulation requires static droop parameters");
    }
    const ComplexMatrix& y = sc.network.y_net;
    const SampleGrid grid = make_grid(sc.options);
    const double h = grid.dt;

    std::vector<Complex> gain(n), detune(n);
    for (std::size_t k = 0; k < n; ++k) {
        const StaticDroopParams& p = *sc.converters[k].static_params;
        gain[k] = std::polar(p.eta, p.phi);
        detune[k] = Complex{0.0, p.omega0 - sc.omega0};
    }

    using State = Eigen::VectorXcd;
    State v(static_cast<Index>(n));
    for (std::size_t k = 0; k < n; ++k) v(static_cast<Index>(k)) = sc.converters[k].initial_voltage;

    auto flows = [&](const State& s) {
        const State yv = y * s;
        State out(s.size());
        for (Index k = 0; k < s.size(); ++k) out(k) = yv(k) / s(k);
        return out;
    };
    auto rhs = [&](const State& s, const std::vector<Complex>& d) {
        const State se = flows(s);
        State ds(s.size());
        for (std::size_t k = 0; k < n; ++k) {
            const auto kk = static_cast<Index>(k);
            const StaticDroopParams& p = *sc.converters[k].static_params;
            const Complex i_o = (se(kk) - d[k]) * s(kk);
            const double mag = std::abs(s(kk));
            ds(kk) = gain[k] * (p.conj_setpoint() * s(kk) - i_o) + p.eta * p.alpha * (p.v_star - mag) / p.v_star * s(kk) +
                     detune[k] * s(kk);
        }
        return ds;
    };
    auto check = [&](const State& s, double t) {
        for (Index k = 0; k < s.size(); ++k) {
            if (!std::isfinite(s(k).real()) || !std::isfinite(s(k).imag())) {
                throw SimulationAbort("nonlinear simulation produced a non-finite state", t);
            }
            if (std::abs(s(k)) < kCollapseVoltage) {
                throw SimulationAbort("voltage collapse at converter " + std::to_string(k + 1), t);
            }
        }
    };
    check(v, 0.0);

    const State se0 = flows(v);
    std::vector<double> mag0(n);
    for (std::size_t k = 0; k < n; ++k) mag0[k] = std::abs(v(static_cast<Index>(k)));

    TimeSeries ts;
    reserve(ts, n, grid);

    auto record = [&](double t) {
        const std::vector<Complex> d = sc.disturbance_at(t, t);
        const State se = flows(v);
        const State dv = rhs(v, d);
        ts.t.push_back(t);
        Complex varpi_sum, d_sum, flow_sum;
        double dv_sum = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const auto kk = static_cast<Index>(k);
            const Complex varpi = dv(kk) / v(kk);
            const Complex out = (se(kk) - d[k]) - se0(kk);
            const double dmag = std::abs(v(kk)) - mag0[k];
            auto& c = ts.converters[k];
            c.d_eps.push_back(varpi.real());
            c.d_omega.push_back(varpi.imag());
            c.d_rho.push_back(out.real());
            c.d_sigma.push_back(-out.imag());
            c.d_v.push_back(dmag);
            varpi_sum += varpi;
            d_sum += d[k];
            flow_sum += se(kk);
            dv_sum += dmag;
        }
        const double inv_n = 1.0 / static_cast<double>(n);
        ts.pcc_d_varpi.push_back(varpi_sum * inv_n);
        ts.pcc_d_sbar.push_back(d_sum);
        ts.pcc_d_v.push_back(dv_sum * inv_n);
        ts.network_flow_sum.push_back(flow_sum);
    };

    for (long i = 0;; ++i) {
        const double t = grid.time(i);
        if (grid.recorded(i)) record(t);
        if (i == grid.steps) break;

        const std::vector<Complex> d0 = sc.disturbance_at(t, t);
        const std::vector<Complex> dm = sc.disturbance_at(t + 0.5 * h, t);
        const std::vector<Complex> d1 = sc.disturbance_at(t + h, t);
        const State a1 = rhs(v, d0);
        const State a2 = rhs(v + 0.5 * h * a1, dm);
        const State a3 = rhs(v + 0.5 * h * a2, dm);
        const State a4 = rhs(v + h * a3, d1);
        State next = v + (h / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
        check(next, t);
        v = std::move(next);
    }
    return ts;
}

TimeSeries simulate(const Scenario& scenario) {
    return scenario.options.mode == SimMode::Nonlinear ? simulate_nonlinear(scenario) : simulate_linear(scenario);
}

SynchronizedResponse synchronized_response(const std::vector<ComplexRationalTF>& t,
                                           const std::vector<ComplexRationalTF>& t_v) {
    if (t.empty() || t.size() != t_v.size()) throw ArgumentError("synchronized_response: mismatched controller lists");
    ComplexRationalTF inv_sum = ComplexRationalTF::zero();
    ComplexRationalTF tv_sum = ComplexRationalTF::zero();
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k].is_zero()) throw DomainError("synchronized_response: T_k is zero");
        inv_sum = inv_sum + t[k].inverse();
        tv_sum = tv_sum + t_v[k];
    }
    if (inv_sum.is_zero()) throw DomainError("synchronized_response: sum of 1/T_k vanishes");
    SynchronizedResponse r;
    r.from_power = inv_sum.inverse();
    r.from_voltage = -(tv_sum * r.from_power);
    return r;
}

std::vector<Complex> synchronized_step(const SynchronizedResponse& sync, Complex d_sbar_pcc, double t_end, double dt,
                                       bool close_voltage_loop, double v_pcc0) {
    if (!(dt > 0.0) || !(t_end >= 0.0)) throw ArgumentError("synchronized_step: invalid time grid");
    const RealLti s = synchronized_system(sync, close_voltage_loop, v_pcc0);
    const Index n = s.a.rows();
    const Eigen::Vector2d u(d_sbar_pcc.real(), d_sbar_pcc.imag());

    MatrixXd m = MatrixXd::Zero(n + 2, n + 2);
    m.topLeftCorner(n, n) = s.a * dt;
    m.topRightCorner(n, 2) = s.b * dt;
    const MatrixXd phi = m.exp();

    VectorXd z = VectorXd::Zero(n + 2);
    z.tail(2) = u;
    const long steps = step_count(t_end, dt);
    std::vector<Complex> out;
    out.reserve(static_cast<std::size_t>(steps + 1));
    for (long i = 0; i <= steps; ++i) {
        const Eigen::Vector2d y = s.c * z.head(n) + s.d * u;
        out.emplace_back(y(0), y(1));
        z = phi * z;
    }
    return out;
}

SteadyState steady_state(const std::vector<DynamicControllerSpec>& specs, Complex d_sbar_pcc,
                         bool include_voltage_loop, double v_pcc0) {
    std::vector<ComplexRationalTF> t, tv;
    for (const auto& s : specs) {
        t.push_back(s.t);
        tv.push_back(s.t_v);
    }
    const SynchronizedResponse sync = synchronized_response(t, tv);
    const std::string advice = "; certify the configuration with the stability check before computing final values";
    if (!poles_stable(sync.from_power)) {
        throw UnstableConfigurationError("synchronized response has poles outside the open left half-plane" + advice);
    }

    SteadyState ss;
    const Complex gp = sync.from_power.evaluate(0.0);
    const bool voltage_loop = include_voltage_loop && !sync.from_voltage.is_zero();
    double dv = 0.0;
    if (voltage_loop) {
        if (!all_stable(synchronized_system(sync, true, v_pcc0).a)) {
            throw UnstableConfigurationError("closed voltage loop is not asymptotically stable" + advice);
        }
        const Complex gv = sync.from_voltage.evaluate(0.0);
        dv = -(gp * d_sbar_pcc).real() / gv.real();
        ss.d_v = dv;
        ss.d_varpi = Complex{0.0, (gp * d_sbar_pcc + gv * dv).imag()};
    } else {
        ss.d_varpi = gp * d_sbar_pcc;
        ss.voltage_bounded = std::abs(ss.d_varpi.real()) <= 1e-12 * std::max(1.0, std::abs(ss.d_varpi));
    }
    for (std::size_t k = 0; k < specs.size(); ++k) {
        Complex share = ss.d_varpi / specs[k].t.evaluate(0.0);
        if (voltage_loop) share += specs[k].t_v.evaluate(0.0) * dv;
        ss.node_share.push_back(share);
    }
    return ss;
}

double relative_rms_error(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = std::min(a.size(), b.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

double relative_rms_error(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    const std::size_t n = std::min(a.size(), b.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += std::norm(a[i] - b[i]);
        den += std::norm(b[i]);
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

double tail_variation(const std::vector<double>& x, double fraction) {
    if (x.empty()) return 0.0;
    const auto start = static_cast<std::size_t>(std::floor(static_cast<double>(x.size()) * (1.0 - fraction)));
    const auto [lo, hi] = std::minmax_element(x.begin() + static_cast<long>(std::min(start, x.size() - 1)), x.end());
    return *hi - *lo;
}

}  // namespace cfc
