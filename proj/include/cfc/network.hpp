#pragma once

// Nodal admittance construction, Kron reduction onto converter nodes and the
// normalized power flow of the reduced network.
//
// Sign convention: Y[k][l] = -y_kl for a branch k-l and Y[k][k] collects all
// incident branch and shunt admittances, so a shunt-free network has zero row
// sums. The flow equations use the matrix entries directly:
//
//   exact:  sbar_k = sum_l Y[k][l] * exp(theta_l - theta_k)
//   dc:     sbar   = Y * theta

#include "cfc/coords.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <vector>

namespace cfc {

using ComplexMatrix = Eigen::MatrixXcd;

inline constexpr double kDefaultAngleTolerance = 1e-6;
inline constexpr double kMaxInteriorCondition = 1e12;

struct Branch {
    int from = 0;
    int to = 0;
    Complex y;
};

struct Shunt {
    int node = 0;
    Complex y;
};

/// Node indices are 0-based. Every node not listed as a converter is interior.
struct NetworkModel {
    int node_count = 0;
    std::vector<Branch> branches;
    std::vector<Shunt> shunts;
    std::vector<int> converter_nodes;

    std::vector<int> interior_nodes() const;
    /// Throws ArgumentError / DisconnectedNetworkError.
    void validate() const;
};

struct ReducedNetwork {
    ComplexMatrix y_net;
    /// Uniform impedance angle, present when y_net = exp(-j*phi_z) * l_net.
    std::optional<double> phi_z;
    std::optional<Eigen::MatrixXd> l_net;
    /// Condition number of the eliminated interior block (1 when nothing was eliminated).
    double interior_condition = 1.0;
    /// Original node index of each reduced row.
    std::vector<int> kept_nodes;
    /// Original node indices of the eliminated nodes.
    std::vector<int> interior_nodes;
    /// -Y_ci * Y_ii^{-1}: share of a current drawn at an interior node that each
    /// kept node supplies. Columns sum to one for shunt-free networks.
    ComplexMatrix distribution;

    Eigen::Index size() const { return y_net.rows(); }
};

ComplexMatrix build_admittance(const NetworkModel& model);

/// Schur complement eliminating `interior` (node indices of y). Kept nodes
/// stay in ascending order. Throws SingularInteriorError when the interior
/// block has condition number above 1e12.
ReducedNetwork kron_reduce(const ComplexMatrix& y, const std::vector<int>& interior,
                           double angle_tol = kDefaultAngleTolerance);

/// Builds, validates and reduces a model; reduced rows follow the order of
/// model.converter_nodes.
ReducedNetwork reduce_network(const NetworkModel& model, double angle_tol = kDefaultAngleTolerance);

/// Wraps an already reduced matrix, detecting a uniform impedance angle.
ReducedNetwork make_reduced(ComplexMatrix y_net, double angle_tol = kDefaultAngleTolerance);

/// phi_z such that y_net = exp(-j*phi_z) * L with L real, symmetric, zero row
/// sums (when y_net has them) and nonpositive off-diagonals; nullopt when the
/// off-diagonal angles disagree by more than `tol` or no coupling exists.
std::optional<double> uniform_impedance_angle(const ComplexMatrix& y_net, double tol = kDefaultAngleTolerance);

/// Re(exp(j*phi_z) * y_net).
Eigen::MatrixXd magnitude_laplacian(const ComplexMatrix& y_net, double phi_z);

std::vector<Complex> exact_power_flow(std::span<const ComplexAngle> theta, const ComplexMatrix& y_net);
std::vector<Complex> dc_power_flow(std::span<const ComplexAngle> theta, const ComplexMatrix& y_net);

}  // namespace cfc
