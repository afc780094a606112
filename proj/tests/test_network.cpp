#include "cfc/errors.hpp"
#include "cfc/network.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace cfc;
using namespace cfc::test;

TEST(Network, AdmittanceHasZeroRowSums) {
    const ComplexMatrix y = build_admittance(star_network());
    EXPECT_LT(y.rowwise().sum().cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_NEAR(std::abs(y(0, 3) + std::polar(10.0, -kPi4)), 0.0, 1e-14);
}

TEST(Network, ShuntEntersDiagonal) {
    NetworkModel m = star_network();
    m.shunts.push_back({3, Complex{0.5, 0.0}});
    const ComplexMatrix y = build_admittance(m);
    EXPECT_NEAR(std::abs(y.row(3).sum() - 0.5), 0.0, 1e-14);
}

TEST(Network, ChainSeriesCombination) {
    NetworkModel m;
    m.node_count = 3;
    const Complex y = std::polar(10.0, -kPi4);
    m.branches = {{0, 1, y}, {1, 2, y}};
    m.converter_nodes = {0, 2};
    const ReducedNetwork r = reduce_network(m);
    ASSERT_EQ(r.size(), 2);
    EXPECT_NEAR(std::abs(r.y_net(0, 1) + y / 2.0), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(r.y_net(0, 0) - y / 2.0), 0.0, 1e-12);
    ASSERT_TRUE(r.phi_z.has_value());
    EXPECT_NEAR(*r.phi_z, kPi4, 1e-12);
    EXPECT_NEAR((*r.l_net)(0, 1), -5.0, 1e-12);
}

TEST(Network, NoInteriorNodesLeavesMatrixUnchanged) {
    NetworkModel m;
    m.node_count = 2;
    m.branches = {{0, 1, Complex{1.0, -2.0}}};
    m.converter_nodes = {0, 1};
    const ReducedNetwork r = reduce_network(m);
    EXPECT_LT((r.y_net - build_admittance(m)).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_EQ(r.interior_condition, 1.0);
}

TEST(Network, RowsFollowConverterOrder) {
    NetworkModel m = star_network();
    m.branches[0].y = std::polar(4.0, -kPi4);
    m.converter_nodes = {2, 0, 1};
    const ReducedNetwork r = reduce_network(m);
    NetworkModel asc = m;
    asc.converter_nodes = {0, 1, 2};
    const ReducedNetwork a = reduce_network(asc);
    EXPECT_NEAR(std::abs(r.y_net(1, 1) - a.y_net(0, 0)), 0.0, 1e-13);
    EXPECT_NEAR(std::abs(r.y_net(0, 1) - a.y_net(2, 0)), 0.0, 1e-13);
    EXPECT_EQ(r.kept_nodes, (std::vector<int>{2, 0, 1}));
}

TEST(Network, KronMatchesFullNetworkSolve) {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const NetworkModel m = random_network(rng, 6, 2 + trial % 3);
        const ReducedNetwork r = reduce_network(m);
        Eigen::VectorXcd vc(static_cast<Eigen::Index>(m.converter_nodes.size()));
        for (Eigen::Index k = 0; k < vc.size(); ++k) vc(k) = Complex{1.0 + 0.1 * u(rng), 0.1 * u(rng)};
        const Eigen::VectorXcd i_full = full_network_currents(m, vc);
        const Eigen::VectorXcd i_red = r.y_net * vc;
        EXPECT_LT((i_full - i_red).cwiseAbs().maxCoeff(), 1e-8 * std::max(1.0, i_full.cwiseAbs().maxCoeff()));
        EXPECT_LT(r.y_net.colwise().sum().cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_LT(r.y_net.rowwise().sum().cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(Network, DistributionColumnsSumToOne) {
    std::mt19937 rng(5);
    const NetworkModel m = random_network(rng, 6, 3);
    const ReducedNetwork r = reduce_network(m);
    ASSERT_EQ(r.distribution.cols(), 3);
    for (Eigen::Index c = 0; c < r.distribution.cols(); ++c) {
        EXPECT_NEAR(std::abs(r.distribution.col(c).sum() - 1.0), 0.0, 1e-12);
    }
}

TEST(Network, DistributionMatchesInjectedCurrentSplit) {
    // Current drawn at the interior node with converter voltages held at zero.
    std::mt19937 rng(9);
    const NetworkModel m = random_network(rng, 5, 2);
    const ReducedNetwork r = reduce_network(m);
    const ComplexMatrix y = build_admittance(m);
    const auto interior = m.interior_nodes();
    const auto ni = static_cast<Eigen::Index>(interior.size());
    ComplexMatrix yii(ni, ni);
    for (Eigen::Index a = 0; a < ni; ++a) {
        for (Eigen::Index b = 0; b < ni; ++b) yii(a, b) = y(interior[a], interior[b]);
    }
    Eigen::VectorXcd i_int = Eigen::VectorXcd::Zero(ni);
    i_int(0) = -1.0;  // a unit load
    const Eigen::VectorXcd v_int = yii.fullPivLu().solve(i_int);
    for (Eigen::Index k = 0; k < r.size(); ++k) {
        Complex supplied{};
        for (Eigen::Index a = 0; a < ni; ++a) supplied -= y(m.converter_nodes[k], interior[a]) * v_int(a);
        // Each converter supplies its share of the unit load.
        EXPECT_NEAR(std::abs(-supplied - r.distribution(k, 0)), 0.0, 1e-12);
    }
}

TEST(Network, SingularInteriorIsRefused) {
    NetworkModel m;
    m.node_count = 3;
    const Complex y{1.0, -1.0};
    m.branches = {{0, 1, y}, {1, 2, -y}};
    m.converter_nodes = {0, 2};
    try {
        reduce_network(m);
        FAIL() << "expected SingularInteriorError";
    } catch (const SingularInteriorError& e) {
        EXPECT_GT(e.condition(), kMaxInteriorCondition);
    }
}

TEST(Network, DisconnectedIsRejected) {
    NetworkModel m;
    m.node_count = 4;
    m.branches = {{0, 1, 1.0}, {2, 3, 1.0}};
    m.converter_nodes = {0, 2};
    EXPECT_THROW(m.validate(), DisconnectedNetworkError);
    EXPECT_THROW(reduce_network(m), DisconnectedNetworkError);
}

TEST(Network, ValidationErrors) {
    NetworkModel m;
    m.node_count = 2;
    m.branches = {{0, 0, 1.0}};
    m.converter_nodes = {0, 1};
    EXPECT_THROW(m.validate(), ArgumentError);
    m.branches = {{0, 1, 0.0}};
    EXPECT_THROW(m.validate(), ArgumentError);
    m.branches = {{0, 5, 1.0}};
    EXPECT_THROW(m.validate(), ArgumentError);
    m.branches = {{0, 1, 1.0}};
    m.converter_nodes = {};
    EXPECT_THROW(m.validate(), ArgumentError);
    m.converter_nodes = {1, 1};
    EXPECT_THROW(m.validate(), ArgumentError);
}

TEST(Network, UniformAngleDetection) {
    const ReducedNetwork star = reduce_network(star_network());
    ASSERT_TRUE(star.phi_z.has_value());
    EXPECT_NEAR(*star.phi_z, kPi4, 1e-12);
    const Eigen::MatrixXd l = magnitude_laplacian(star.y_net, *star.phi_z);
    EXPECT_LT((std::polar(1.0, -kPi4) * l.cast<Complex>() - star.y_net).cwiseAbs().maxCoeff(), 1e-12);

    NetworkModel mixed = star_network();
    mixed.branches[1].y = std::polar(10.0, -1.2);
    EXPECT_FALSE(reduce_network(mixed).phi_z.has_value());
    EXPECT_FALSE(uniform_impedance_angle(ComplexMatrix::Zero(1, 1)).has_value());
}

TEST(Network, PowerFlowAgreesAtZeroAngles) {
    const ReducedNetwork r = reduce_network(star_network());
    std::vector<ComplexAngle> zero(3);
    for (const auto& s : exact_power_flow(zero, r.y_net)) EXPECT_NEAR(std::abs(s), 0.0, 1e-13);
    for (const auto& s : dc_power_flow(zero, r.y_net)) EXPECT_EQ(std::abs(s), 0.0);
}

TEST(Network, DcFlowErrorIsQuadratic) {
    const ReducedNetwork r = reduce_network(star_network());
    const std::vector<Complex> dir{{0.3, 0.5}, {-0.2, 0.1}, {0.05, -0.7}};
    auto error = [&](double delta) {
        std::vector<ComplexAngle> th;
        for (const auto& d : dir) th.push_back(ComplexAngle::from_complex(delta * d));
        const auto e = exact_power_flow(th, r.y_net);
        const auto l = dc_power_flow(th, r.y_net);
        double m = 0.0;
        for (std::size_t k = 0; k < e.size(); ++k) m = std::max(m, std::abs(e[k] - l[k]));
        return m;
    };
    for (double delta : {1e-2, 1e-3}) {
        const double ratio = error(delta) / error(delta / 2.0);
        EXPECT_GE(ratio, 3.5);
        EXPECT_LE(ratio, 4.5);
    }
}

TEST(Network, ExactFlowIsInvariantToCommonRotation) {
    const ReducedNetwork r = reduce_network(star_network());
    std::vector<ComplexAngle> a{{0.01, 0.2}, {-0.02, 0.1}, {0.0, -0.05}};
    std::vector<ComplexAngle> b = a;
    for (auto& x : b) {
        x.u += 0.3;
        x.theta += 1.1;
    }
    const auto fa = exact_power_flow(a, r.y_net);
    const auto fb = exact_power_flow(b, r.y_net);
    for (std::size_t k = 0; k < fa.size(); ++k) EXPECT_NEAR(std::abs(fa[k] - fb[k]), 0.0, 1e-12);
}
