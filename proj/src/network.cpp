#include "cfc/network.hpp"

#include "cfc/errors.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace cfc {

namespace {

double wrap_angle(double a) {
    a = std::remainder(a, 2.0 * kPi);
    if (a <= -kPi) a += 2.0 * kPi;
    return a;
}

double condition_number(const ComplexMatrix& m) {
    if (m.size() == 0) return 1.0;
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    const auto& sv = svd.singularValues();
    const double smax = sv(0);
    const double smin = sv(sv.size() - 1);
    if (!(smin > 0.0)) return std::numeric_limits<double>::infinity();
    return smax / smin;
}

void attach_angle(ReducedNetwork& net, double angle_tol) {
    net.phi_z = uniform_impedance_angle(net.y_net, angle_tol);
    if (net.phi_z) net.l_net = magnitude_laplacian(net.y_net, *net.phi_z);
}

}  // namespace

std::vector<int> NetworkModel::interior_nodes() const {
    std::vector<int> out;
    for (int k = 0; k < node_count; ++k) {
        if (std::find(converter_nodes.begin(), converter_nodes.end(), k) == converter_nodes.end()) {
            out.push_back(k);
        }
    }
    return out;
}

void NetworkModel::validate() const {
    if (node_count <= 0) throw ArgumentError("network has no nodes");
    auto check_node = [this](int k, const char* what) {
        if (k < 0 || k >= node_count) {
            std::ostringstream os;
            os << what << " refers to unknown node index " << k;
            throw ArgumentError(os.str());
        }
    };
    for (const auto& b : branches) {
        check_node(b.from, "branch");
        check_node(b.to, "branch");
        if (b.from == b.to) throw ArgumentError("branch connects a node to itself");
        if (b.y == Complex{}) throw ArgumentError("branch admittance must be nonzero");
    }
    for (const auto& s : shunts) check_node(s.node, "shunt");
    if (converter_nodes.empty()) throw ArgumentError("network has no converter nodes");
    std::vector<int> sorted = converter_nodes;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw ArgumentError("converter node listed twice");
    }
    for (int k : converter_nodes) check_node(k, "converter list");

    // Union-find over branches.
    std::vector<int> parent(static_cast<std::size_t>(node_count));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int k) {
        while (parent[static_cast<std::size_t>(k)] != k) {
            parent[static_cast<std::size_t>(k)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(k)])];
            k = parent[static_cast<std::size_t>(k)];
        }
        return k;
    };
    for (const auto& b : branches) parent[static_cast<std::size_t>(find(b.from))] = find(b.to);
    const int root = find(0);
    for (int k = 1; k < node_count; ++k) {
        if (find(k) != root) {
            std::ostringstream os;
            os << "network is disconnected: node " << k << " is not reachable from node 0";
            throw DisconnectedNetworkError(os.str());
        }
    }
}

ComplexMatrix build_admittance(const NetworkModel& model) {
    model.validate();
    const int n = model.node_count;
    ComplexMatrix y = ComplexMatrix::Zero(n, n);
    for (const auto& b : model.branches) {
        y(b.from, b.from) += b.y;
        y(b.to, b.to) += b.y;
        y(b.from, b.to) -= b.y;
        y(b.to, b.from) -= b.y;
    }
    for (const auto& s : model.shunts) y(s.node, s.node) += s.y;
    return y;
}

ReducedNetwork kron_reduce(const ComplexMatrix& y, const std::vector<int>& interior, double angle_tol) {
    if (y.rows() != y.cols()) throw ArgumentError("kron_reduce: admittance matrix must be square");
    const int n = static_cast<int>(y.rows());
    std::vector<char> is_interior(static_cast<std::size_t>(n), 0);
    for (int k : interior) {
        if (k < 0 || k >= n) throw ArgumentError("kron_reduce: interior node out of range");
        is_interior[static_cast<std::size_t>(k)] = 1;
    }

    ReducedNetwork net;
    for (int k = 0; k < n; ++k) {
        (is_interior[static_cast<std::size_t>(k)] ? net.interior_nodes : net.kept_nodes).push_back(k);
    }
    if (net.kept_nodes.empty()) throw ArgumentError("kron_reduce: every node is interior");

    const auto nc = static_cast<Eigen::Index>(net.kept_nodes.size());
    const auto ni = static_cast<Eigen::Index>(net.interior_nodes.size());
    ComplexMatrix ycc(nc, nc), yci(nc, ni), yic(ni, nc), yii(ni, ni);
    for (Eigen::Index a = 0; a < nc; ++a) {
        for (Eigen::Index b = 0; b < nc; ++b) ycc(a, b) = y(net.kept_nodes[a], net.kept_nodes[b]);
        for (Eigen::Index b = 0; b < ni; ++b) yci(a, b) = y(net.kept_nodes[a], net.interior_nodes[b]);
    }
    for (Eigen::Index a = 0; a < ni; ++a) {
        for (Eigen::Index b = 0; b < nc; ++b) yic(a, b) = y(net.interior_nodes[a], net.kept_nodes[b]);
        for (Eigen::Index b = 0; b < ni; ++b) yii(a, b) = y(net.interior_nodes[a], net.interior_nodes[b]);
    }

    if (ni == 0) {
        net.y_net = ycc;
        net.distribution = ComplexMatrix(nc, 0);
    } else {
        net.interior_condition = condition_number(yii);
        if (!(net.interior_condition <= kMaxInteriorCondition)) {
            std::ostringstream os;
            os << "interior admittance block is singular or ill-conditioned (condition number "
               << net.interior_condition << " > " << kMaxInteriorCondition << ")";
            throw SingularInteriorError(os.str(), net.interior_condition);
        }
        const auto lu = yii.fullPivLu();
        net.y_net = ycc - yci * lu.solve(yic);
        net.distribution = -(yci * lu.inverse());
    }
    attach_angle(net, angle_tol);
    return net;
}

ReducedNetwork reduce_network(const NetworkModel& model, double angle_tol) {
    const ComplexMatrix y = build_admittance(model);
    ReducedNetwork ascending = kron_reduce(y, model.interior_nodes(), angle_tol);

    // Reorder rows to follow model.converter_nodes.
    const auto n = static_cast<Eigen::Index>(model.converter_nodes.size());
    std::vector<Eigen::Index> pos(static_cast<std::size_t>(n));
    for (Eigen::Index a = 0; a < n; ++a) {
        auto it = std::find(ascending.kept_nodes.begin(), ascending.kept_nodes.end(), model.converter_nodes[a]);
        pos[static_cast<std::size_t>(a)] = it - ascending.kept_nodes.begin();
    }
    ReducedNetwork net = ascending;
    net.kept_nodes = model.converter_nodes;
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b < n; ++b) net.y_net(a, b) = ascending.y_net(pos[a], pos[b]);
        net.distribution.row(a) = ascending.distribution.row(pos[a]);
    }
    attach_angle(net, angle_tol);
    return net;
}

ReducedNetwork make_reduced(ComplexMatrix y_net, double angle_tol) {
    if (y_net.rows() != y_net.cols() || y_net.rows() == 0) {
        throw ArgumentError("reduced admittance matrix must be square and nonempty");
    }
    ReducedNetwork net;
    net.y_net = std::move(y_net);
    net.kept_nodes.resize(static_cast<std::size_t>(net.y_net.rows()));
    std::iota(net.kept_nodes.begin(), net.kept_nodes.end(), 0);
    net.distribution = ComplexMatrix(net.y_net.rows(), 0);
    attach_angle(net, angle_tol);
    return net;
}

std::optional<double> uniform_impedance_angle(const ComplexMatrix& y_net, double tol) {
    const Eigen::Index n = y_net.rows();
    const double ymax = y_net.cwiseAbs().maxCoeff();
    if (n < 2 || !(ymax > 0.0)) return std::nullopt;

    // Off-diagonal entries are -|y| * exp(-j*phi_z) for a uniform network.
    Complex direction{};
    std::vector<double> angles;
    for (Eigen::Index k = 0; k < n; ++k) {
        for (Eigen::Index l = 0; l < n; ++l) {
            if (k == l) continue;
            const Complex e = -y_net(k, l);
            if (std::abs(e) <= 1e-12 * ymax) continue;
            angles.push_back(std::arg(e));
            direction += e / std::abs(e);
        }
    }
    if (angles.empty()) return std::nullopt;
    const double mean = std::arg(direction);
    for (double a : angles) {
        if (std::abs(wrap_angle(a - mean)) > tol) return std::nullopt;
    }
    const double phi = wrap_angle(-mean);

    const Eigen::MatrixXd l = magnitude_laplacian(y_net, phi);
    const ComplexMatrix rebuilt = std::polar(1.0, -phi) * l.cast<Complex>();
    if ((y_net - rebuilt).cwiseAbs().maxCoeff() > tol * ymax) return std::nullopt;
    if ((l - l.transpose()).cwiseAbs().maxCoeff() > tol * ymax) return std::nullopt;
    return phi;
}

Eigen::MatrixXd magnitude_laplacian(const ComplexMatrix& y_net, double phi_z) {
    return (std::polar(1.0, phi_z) * y_net).real();
}

std::vector<Complex> exact_power_flow(std::span<const ComplexAngle> theta, const ComplexMatrix& y_net) {
    const auto n = static_cast<Eigen::Index>(theta.size());
    if (y_net.rows() != n || y_net.cols() != n) throw ArgumentError("exact_power_flow: dimension mismatch");
    std::vector<Complex> out(theta.size());
    for (Eigen::Index k = 0; k < n; ++k) {
        Complex acc{};
        for (Eigen::Index l = 0; l < n; ++l) {
            acc += y_net(k, l) * std::exp(theta[l].as_complex() - theta[k].as_complex());
        }
        out[static_cast<std::size_t>(k)] = acc;
    }
    return out;
}

std::vector<Complex> dc_power_flow(std::span<const ComplexAngle> theta, const ComplexMatrix& y_net) {
    const auto n = static_cast<Eigen::Index>(theta.size());
    if (y_net.rows() != n || y_net.cols() != n) throw ArgumentError("dc_power_flow: dimension mismatch");
    std::vector<Complex> out(theta.size());
    for (Eigen::Index k = 0; k < n; ++k) {
        Complex acc{};
        for (Eigen::Index l = 0; l < n; ++l) acc += y_net(k, l) * theta[l].as_complex();
        out[static_cast<std::size_t>(k)] = acc;
    }
    return out;
}

}  // namespace cfc
