#pragma once

// Frequency-sweep surrogates for the small-signal certificates:
//  - strict positive realness of the rotated controller e^{-j phi_z} T_k(s),
//  - asymptotic stability of the voltage paths T_v_k(s) (PCC-voltage feedback),
//  - passivity of diag(e^{j phi_z} T_v_k(s) v_k0 / s) + L_net / s (local-voltage feedback).
//
// Complex-coefficient systems are not conjugate symmetric, so every sweep
// covers negative and positive frequencies.

#include "cfc/controller.hpp"
#include "cfc/network.hpp"
#include "cfc/transfer_function.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cfc {

inline constexpr double kHermitianTolerance = 1e-10;

enum class Verdict { Pass, Fail, Inconclusive };

const char* to_string(Verdict v);

struct SweepGrid {
    std::vector<double> frequencies;
    double margin = 0.0;

    /// `per_sign` log-spaced points on each side over |w| in [lo, hi], plus w = 0, sorted.
    static SweepGrid symmetric_log(int per_sign = 200, double lo = 1e-4, double hi = 1e6, double margin = 0.0);
};

struct CertificateReport {
    std::string check;
    int converter = -1;
    Verdict verdict = Verdict::Inconclusive;
    /// Passed with a zero (within tolerance) minimum, i.e. passive but not strictly.
    bool marginal = false;
    std::optional<double> worst_frequency;
    std::optional<double> worst_value;
    std::optional<Complex> witness_pole;
    std::string note;
    std::vector<CertificateReport> details;
};

enum class FeedbackMode { PccVoltage, LocalVoltage };

CertificateReport spr_check(const ComplexRationalTF& t, double phi_z, const SweepGrid& grid);

CertificateReport voltage_path_check(const ComplexRationalTF& t_v);

CertificateReport local_voltage_feedback_check(const std::vector<ComplexRationalTF>& t_v, const std::vector<double>& v0,
                                               const Eigen::MatrixXd& l_net, double phi_z, const SweepGrid& grid);

/// Inconclusive when the network has no uniform impedance angle. `v0`
/// defaults to 1 per converter when empty.
CertificateReport certify_closed_loop(const std::vector<DynamicControllerSpec>& specs, const ReducedNetwork& net,
                                      const SweepGrid& grid, FeedbackMode mode, std::vector<double> v0 = {});

}  // namespace cfc
