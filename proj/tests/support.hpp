#pragma once

#include "cfc/aggregation.hpp"
#include "cfc/io.hpp"
#include "cfc/network.hpp"
#include "cfc/sim.hpp"

#include <random>
#include <string>

namespace cfc::test {

inline const double kPi4 = kPi / 4.0;

inline std::string source_path(const std::string& rel) {
    return std::string(CFC_SOURCE_DIR) + "/" + rel;
}

/// e^{j pi/4} / (2 s + 50)
inline ComplexRationalTF t_des() {
    return ComplexRationalTF::first_order(std::polar(1.0, kPi4), 2.0, 50.0);
}

/// 5 e^{-j pi/4}
inline ComplexRationalTF t_v_des() {
    return ComplexRationalTF::constant(std::polar(5.0, -kPi4));
}

inline std::vector<DynamicControllerSpec> case2_specs(bool with_voltage = true) {
    DesiredBehavior des{t_des(), with_voltage ? t_v_des() : ComplexRationalTF::zero()};
    return disaggregate(des, ParticipationSet::equal(3), VoltageFeedback::Pcc);
}

/// Three converters on a star around an interior PCC node, branch admittance |y| e^{-j pi/4}.
inline NetworkModel star_network(double y = 10.0, double angle = -kPi4) {
    NetworkModel m;
    m.node_count = 4;
    for (int k = 0; k < 3; ++k) m.branches.push_back({k, 3, std::polar(y, angle)});
    m.converter_nodes = {0, 1, 2};
    return m;
}

inline Scenario case2_scenario(bool with_voltage, double t_end = 2.0, double dt = 1e-4) {
    Scenario sc;
    sc.name = "case2";
    const NetworkModel model = star_network();
    sc.network = reduce_network(model);
    for (int k = 0; k < 3; ++k) sc.pcc_distribution.push_back(sc.network.distribution(k, 0));
    for (const auto& s : case2_specs(with_voltage)) {
        ConverterSetup c;
        c.dynamic = s;
        sc.converters.push_back(c);
    }
    Disturbance d;
    d.t_start = 0.1;
    d.value = 0.25;
    sc.disturbances.push_back(d);
    sc.options.t_end = t_end;
    sc.options.dt = dt;
    return sc;
}

inline Scenario single_scenario(const ConverterSetup& c, double t_end, double dt, double t_start = 0.1) {
    Scenario sc;
    sc.name = "single";
    sc.network = make_reduced(ComplexMatrix::Zero(1, 1));
    sc.network.phi_z = kPi4;
    sc.network.l_net = Eigen::MatrixXd::Zero(1, 1);
    sc.converters.push_back(c);
    Disturbance d;
    d.t_start = t_start;
    d.value = 0.25;
    sc.disturbances.push_back(d);
    sc.options.t_end = t_end;
    sc.options.dt = dt;
    return sc;
}

inline ConverterSetup static_converter() {
    ConverterSetup c;
    c.static_params = StaticDroopParams{};
    return c;
}

inline ConverterSetup dynamic_converter(const ComplexRationalTF& t, const ComplexRationalTF& t_v,
                                        VoltageFeedback fb = VoltageFeedback::Local) {
    ConverterSetup c;
    c.dynamic = DynamicControllerSpec{t, t_v, fb};
    return c;
}

/// Connected random network: spanning tree plus extra branches, positive conductances.
inline NetworkModel random_network(std::mt19937& rng, int nodes, int converters) {
    std::uniform_real_distribution<double> mag(0.5, 20.0);
    std::uniform_real_distribution<double> ang(-1.4, -0.1);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    NetworkModel m;
    m.node_count = nodes;
    for (int k = 1; k < nodes; ++k) {
        std::uniform_int_distribution<int> parent(0, k - 1);
        m.branches.push_back({parent(rng), k, std::polar(mag(rng), ang(rng))});
    }
    for (int a = 0; a < nodes; ++a) {
        for (int b = a + 1; b < nodes; ++b) {
            if (coin(rng) < 0.3) m.branches.push_back({a, b, std::polar(mag(rng), ang(rng))});
        }
    }
    std::vector<int> order(static_cast<std::size_t>(nodes));
    for (int k = 0; k < nodes; ++k) order[static_cast<std::size_t>(k)] = k;
    std::shuffle(order.begin(), order.end(), rng);
    m.converter_nodes.assign(order.begin(), order.begin() + converters);
    return m;
}

/// Converter currents of the full network with converter voltages `vc` and
/// current-free interior nodes, by a direct solve of the nodal equations.
inline Eigen::VectorXcd full_network_currents(const NetworkModel& m, const Eigen::VectorXcd& vc) {
    const ComplexMatrix y = build_admittance(m);
    const auto n = static_cast<Eigen::Index>(m.node_count);
    const auto nc = static_cast<Eigen::Index>(m.converter_nodes.size());
    const std::vector<int> interior = m.interior_nodes();
    const auto ni = static_cast<Eigen::Index>(interior.size());
    // Unknowns: interior voltages and converter currents.
    ComplexMatrix a = ComplexMatrix::Zero(n, n);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index i = 0; i < ni; ++i) a(r, i) = y(r, interior[static_cast<std::size_t>(i)]);
        for (Eigen::Index c = 0; c < nc; ++c) rhs(r) -= y(r, m.converter_nodes[static_cast<std::size_t>(c)]) * vc(c);
    }
    for (Eigen::Index c = 0; c < nc; ++c) a(m.converter_nodes[static_cast<std::size_t>(c)], ni + c) = -1.0;
    const Eigen::VectorXcd sol = a.fullPivLu().solve(rhs);
    return sol.tail(nc);
}

inline std::vector<double> omega_of(const std::vector<Complex>& v) {
    std::vector<double> o;
    o.reserve(v.size());
    for (const auto& c : v) o.push_back(c.imag());
    return o;
}

inline std::vector<double> eps_of(const std::vector<Complex>& v) {
    std::vector<double> o;
    o.reserve(v.size());
    for (const auto& c : v) o.push_back(c.real());
    return o;
}

/// Closed-form reference delayed to a step at index `i0`.
inline std::vector<Complex> delayed(const std::vector<Complex>& ref, std::size_t i0, std::size_t total) {
    std::vector<Complex> out(total);
    for (std::size_t i = i0; i < total && i - i0 < ref.size(); ++i) out[i] = ref[i - i0];
    return out;
}

}  // namespace cfc::test
