// Acceptance suite: one PASS/FAIL line per criterion.

#include "cfc/aggregation.hpp"
#include "cfc/coords.hpp"
#include "cfc/errors.hpp"
#include "cfc/io.hpp"
#include "cfc/network.hpp"
#include "cfc/sim.hpp"
#include "cfc/stability.hpp"

#include "support.hpp"

#include <chrono>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <string>

using namespace cfc;
using namespace cfc::test;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::size_t index_at(const TimeSeries& ts, double t) {
    std::size_t best = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (std::abs(ts.t[i] - t) < std::abs(ts.t[best] - t)) best = i;
    }
    return best;
}

std::vector<Complex> converter_varpi(const TimeSeries& ts, std::size_t k) {
    std::vector<Complex> v;
    for (std::size_t i = 0; i < ts.size(); ++i) v.push_back(ts.d_varpi(k, i));
    return v;
}

SynchronizedResponse sync_of(const Scenario& sc) {
    std::vector<ComplexRationalTF> t, tv;
    for (const auto& c : sc.converters) {
        const DynamicControllerSpec s = c.linear_spec();
        t.push_back(s.t);
        tv.push_back(s.t_v);
    }
    return synchronized_response(t, tv);
}

Outcome criterion1() {
    const auto t0 = Clock::now();
    const DesiredBehavior des{t_des(), t_v_des()};
    const auto specs = disaggregate(des, ParticipationSet::equal(3));
    const AggregationReport r = verify_aggregation(specs, des);
    double unit = 0.0;
    for (const auto& s : specs) unit = std::max(unit, coefficient_residual(s.t, 3.0 * t_des()));
    const double secs = seconds_since(t0);
    const bool ok = r.max_residual() <= 1e-9 && unit <= 1e-9 && secs < 1.0;
    return {ok, "residual " + fmt("%.3g", r.max_residual()) + ", T_k-3T_des " + fmt("%.3g", unit) + ", " +
                    fmt("%.3g", secs) + " s"};
}

Outcome criterion2() {
    const double dt = 1e-4;
    const auto t0 = Clock::now();
    Scenario off = scenario_from_json(read_json_file(source_path("scenarios/case2_multi.json")));
    off.options.t_end = 2.0;
    off.options.dt = dt;
    off.options.output_every = 1;
    Scenario on = off;
    for (auto& c : off.converters) c.dynamic->t_v = ComplexRationalTF::zero();
    const TimeSeries ts_off = simulate(off);
    const TimeSeries ts_on = simulate(on);
    const double secs = seconds_since(t0);

    double spread = 0.0;
    for (const TimeSeries* ts : {&ts_off, &ts_on}) {
        for (std::size_t i = index_at(*ts, 0.5); i < ts->size(); ++i) {
            for (std::size_t k = 1; k < ts->converters.size(); ++k) {
                spread = std::max(spread, std::abs(ts->d_varpi(k, i) - ts->d_varpi(0, i)));
            }
        }
    }
    const std::size_t i0 = index_at(ts_off, 0.1);
    const auto ref_off = delayed(synchronized_step(sync_of(off), 0.25, 2.0, dt, false), i0, ts_off.size());
    const auto ref_on = delayed(synchronized_step(sync_of(on), 0.25, 2.0, dt, true, on.v_pcc0), i0, ts_on.size());
    const double e_off = relative_rms_error(ts_off.pcc_d_varpi, ref_off);
    const double e_on = relative_rms_error(ts_on.pcc_d_varpi, ref_on);
    const bool ok = spread < 1e-6 && e_off < 0.01 && e_on < 0.03 && secs < 10.0;
    return {ok, "sync spread " + fmt("%.3g", spread) + ", rms T_v=0 " + fmt("%.3g", e_off) + ", rms T_v " +
                    fmt("%.3g", e_on) + ", " + fmt("%.3g", secs) + " s"};
}

Outcome criterion3() {
    const double dt = 1e-4;
    auto load = [&](const char* name) {
        Scenario sc = scenario_from_json(read_json_file(source_path(std::string("scenarios/") + name)));
        sc.options.t_end = 0.6;
        sc.options.dt = dt;
        sc.options.output_every = 1;
        return sc;
    };
    const Scenario st_sc = load("case1_static.json");
    const Scenario dy_sc = load("case1_dynamic.json");
    const TimeSeries st = simulate(st_sc);
    const TimeSeries dy = simulate(dy_sc);
    const double t_step = st_sc.disturbances.at(0).t_start;
    const std::size_t i0 = index_at(st, t_step);
    const double eta = st_sc.converters[0].static_params->eta;
    const double jump = std::abs(st.converters[0].d_omega[i0]);
    const double jump_min = 0.9 * eta * std::sin(kPi4) * 0.25;
    const double ss = std::sin(kPi4) * 0.25 / 50.0;
    const double first = std::abs(dy.converters[0].d_omega[i0 + 1]);
    const double at05 = dy.converters[0].d_omega[index_at(dy, 0.5)];
    const double settle = std::abs(at05 - ss) / ss;
    const bool ok = jump >= jump_min && first <= 0.05 * ss && settle <= 0.005;
    return {ok, "static jump " + fmt("%.4g", jump) + " (>= " + fmt("%.4g", jump_min) + "), dynamic first step " +
                    fmt("%.3g", first / ss) + " of ss, error at t = 0.5 s " + fmt("%.3g", settle)};
}

Outcome criterion4() {
    const SweepGrid grid = SweepGrid::symmetric_log();
    const bool matched = spr_check(t_des(), kPi4, grid).verdict == Verdict::Pass;
    const CertificateReport mis = spr_check(t_des(), 0.0, grid);
    const bool mis_ok = mis.verdict == Verdict::Fail && mis.worst_frequency && std::isfinite(*mis.worst_frequency);
    const ComplexRationalTF integrator(Polynomial::from_real({1.0}), Polynomial::from_real({0.0, 1.0}));
    const CertificateReport integ = spr_check(integrator, 0.0, grid);
    const bool integ_ok = integ.verdict == Verdict::Fail && integ.witness_pole.has_value();

    int checked = 0;
    bool scenarios_ok = true;
    double worst_tail = 0.0;
    std::string bad;
    for (const char* name : {"case1_static.json", "case1_dynamic.json", "case2_multi.json", "case2_feeders.json",
                             "zero_disturbance.json", "nonlinear_two.json"}) {
        const Json j = read_json_file(source_path(std::string("scenarios/") + name));
        const Scenario sc = scenario_from_json(j);
        const LoadedNetwork net = load_network(j["network"]);
        std::vector<DynamicControllerSpec> specs;
        std::vector<double> v0;
        bool all_pcc = true;
        for (const auto& c : sc.converters) {
            specs.push_back(c.linear_spec());
            v0.push_back(c.v0);
            all_pcc &= c.dynamic && specs.back().v_feedback == VoltageFeedback::Pcc;
        }
        const auto mode = all_pcc ? FeedbackMode::PccVoltage : FeedbackMode::LocalVoltage;
        const CertificateReport cert = certify_closed_loop(specs, net.reduced, grid, mode, v0);
        const TimeSeries ts = simulate(sc);
        bool finite = true;
        double tail = 0.0;
        for (const auto& c : ts.converters) {
            for (const auto* v : {&c.d_eps, &c.d_omega, &c.d_rho, &c.d_sigma, &c.d_v}) {
                for (double x : *v) finite &= std::isfinite(x);
            }
            tail = std::max({tail, tail_variation(c.d_eps), tail_variation(c.d_omega)});
        }
        worst_tail = std::max(worst_tail, tail);
        const bool ok = cert.verdict == Verdict::Pass && finite && tail < 1e-6;
        if (!ok) bad += std::string(" ") + name;
        scenarios_ok &= ok;
        ++checked;
    }
    const double w = mis.worst_frequency ? *mis.worst_frequency : std::nan("");
    return {matched && mis_ok && integ_ok && scenarios_ok,
            std::string("matched ") + (matched ? "pass" : "FAIL") + ", mismatched witness w = " + fmt("%.4g", w) +
                ", 1/s " + (integ_ok ? "rejected" : "ACCEPTED") + ", " + std::to_string(checked) +
                " scenarios certified, worst tail variation " + fmt("%.3g", worst_tail) + bad};
}

Outcome criterion5() {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0, worst_sum = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const NetworkModel m = random_network(rng, 6, 2 + trial % 4);
        const ReducedNetwork r = reduce_network(m);
        Eigen::VectorXcd vc(static_cast<Eigen::Index>(m.converter_nodes.size()));
        for (Eigen::Index k = 0; k < vc.size(); ++k) vc(k) = Complex{1.0 + 0.1 * u(rng), 0.1 * u(rng)};
        const Eigen::VectorXcd full = full_network_currents(m, vc);
        const double scale = std::max(1.0, full.cwiseAbs().maxCoeff());
        worst = std::max(worst, (full - r.y_net * vc).cwiseAbs().maxCoeff() / scale);
        worst_sum = std::max(worst_sum, r.y_net.colwise().sum().cwiseAbs().maxCoeff());
    }
    const ReducedNetwork star = reduce_network(star_network());
    const std::vector<Complex> dir{{0.3, 0.5}, {-0.2, 0.1}, {0.05, -0.7}};
    auto dc_error = [&](double delta) {
        std::vector<ComplexAngle> th;
        for (const auto& d : dir) th.push_back(ComplexAngle::from_complex(delta * d));
        const auto e = exact_power_flow(th, star.y_net);
        const auto l = dc_power_flow(th, star.y_net);
        double m = 0.0;
        for (std::size_t k = 0; k < e.size(); ++k) m = std::max(m, std::abs(e[k] - l[k]));
        return m;
    };
    const double ratio = dc_error(1e-2) / dc_error(5e-3);
    const bool ok = worst <= 1e-8 && worst_sum <= 1e-10 && ratio >= 3.5 && ratio <= 4.5;
    return {ok, "Kron error " + fmt("%.3g", worst) + ", 1^T Y " + fmt("%.3g", worst_sum) + ", DC-flow error ratio " +
                    fmt("%.4g", ratio)};
}

Outcome criterion6() {
    const Scenario nl = scenario_from_json(read_json_file(source_path("scenarios/nonlinear_two.json")));
    Scenario lin = nl;
    lin.options.mode = SimMode::Linear;
    const TimeSeries a = simulate(nl);
    const TimeSeries b = simulate(lin);
    double spread = 0.0;
    for (std::size_t i = a.size() / 2; i < a.size(); ++i) {
        for (std::size_t k = 1; k < a.converters.size(); ++k) {
            spread = std::max(spread, std::abs(a.d_varpi(k, i) - a.d_varpi(0, i)));
        }
    }
    const double t_end = a.t.back();
    double flow_var = 0.0;
    for (const auto& c : a.converters) {
        for (const auto* f : {&c.d_rho, &c.d_sigma}) {
            double lo = 1e300, hi = -1e300;
            for (std::size_t i = 0; i < a.size(); ++i) {
                if (a.t[i] < t_end - 0.5) continue;
                lo = std::min(lo, (*f)[i]);
                hi = std::max(hi, (*f)[i]);
            }
            flow_var = std::max(flow_var, hi - lo);
        }
    }
    double rms = 0.0;
    for (std::size_t k = 0; k < a.converters.size(); ++k) {
        rms = std::max(rms, relative_rms_error(converter_varpi(a, k), converter_varpi(b, k)));
    }
    const bool ok = spread < 1e-6 && flow_var < 1e-8 && rms < 0.05;
    return {ok, "sync spread " + fmt("%.3g", spread) + ", flow variation (last 0.5 s) " + fmt("%.3g", flow_var) +
                    ", nonlinear vs linear rms " + fmt("%.3g", rms)};
}

Outcome criterion7() {
    const Scenario base = case2_scenario(true, 0.5);
    auto final_value = [&](double dt) {
        Scenario sc = base;
        sc.options.dt = dt;
        sc.disturbances[0].t_start = 0.0;
        const TimeSeries ts = simulate(sc);
        return ts.d_varpi(0, ts.size() - 1);
    };
    const Complex a = final_value(4e-3), b = final_value(2e-3), c = final_value(1e-3);
    const double ratio = std::abs(a - b) / std::abs(b - c);

    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0), mag(0.05, 3.0), ang(-kPi, kPi);
    double round_trip = 0.0;
    for (int i = 0; i < 200; ++i) {
        const ComplexVoltage v{std::polar(mag(rng), ang(rng))};
        const ComplexVoltage back = from_complex_angle(to_complex_angle(v));
        round_trip = std::max(round_trip, std::abs(back.value - v.value) / std::abs(v.value));
    }
    StaticDroopParams p;
    p.eta = 0.04;
    p.alpha = 3.0;
    p.phi = 0.9;
    const RealizedController ctl(equivalent_dynamic_spec(p));
    double consistency = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double dr = u(rng), ds = u(rng), dv = u(rng);
        const ComplexFrequency x = static_droop_smallsignal(p, dr, ds, dv);
        const ComplexFrequency y = ctl.output(ctl.initial_state(), Complex{dr, -ds}, dv);
        consistency = std::max({consistency, std::abs(x.eps - y.eps), std::abs(x.omega - y.omega)});
    }
    const bool ok = ratio >= 12.0 && ratio <= 20.0 && round_trip <= 1e-12 && consistency <= 1e-12;
    return {ok, "RK4 ratio " + fmt("%.4g", ratio) + ", round trip " + fmt("%.3g", round_trip) +
                    ", static/dynamic " + fmt("%.3g", consistency)};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"1 aggregation", criterion1},       {"2 synchronization", criterion2}, {"3 inertia contrast", criterion3},
        {"4 stability certificate", criterion4}, {"5 network reduction", criterion5},
        {"6 nonlinear consistency", criterion6}, {"7 numerics", criterion7},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
