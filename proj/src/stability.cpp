#include "cfc/stability.hpp"

#include "cfc/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace cfc {

namespace {

constexpr double kPoleStabilityMargin = 1e-12;

struct Worst {
    std::optional<double> frequency;
    std::optional<double> value;

    void offer(double w, double v) {
        if (!value || v < *value || (v == *value && std::abs(w) < std::abs(*frequency))) {
            frequency = w;
            value = v;
        }
    }
};

std::optional<Complex> rightmost_unstable_pole(const ComplexRationalTF& t) {
    std::optional<Complex> worst;
    for (const Complex& p : t.poles()) {
        if (p.real() >= -kPoleStabilityMargin && (!worst || p.real() > worst->real())) worst = p;
    }
    return worst;
}

void merge_worst(CertificateReport& into, const CertificateReport& from) {
    if (!from.worst_value) return;
    if (!into.worst_value || *from.worst_value < *into.worst_value ||
        (*from.worst_value == *into.worst_value && std::abs(*from.worst_frequency) < std::abs(*into.worst_frequency))) {
        into.worst_value = from.worst_value;
        into.worst_frequency = from.worst_frequency;
    }
}

}  // namespace

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

SweepGrid SweepGrid::symmetric_log(int per_sign, double lo, double hi, double margin) {
    if (per_sign < 1 || !(lo > 0.0) || !(hi >= lo)) throw ArgumentError("invalid sweep grid parameters");
    SweepGrid g;
    g.margin = margin;
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    std::vector<double> pos;
    for (int i = 0; i < per_sign; ++i) {
        pos.push_back(per_sign == 1 ? lo : std::pow(10.0, a + (b - a) * i / (per_sign - 1)));
    }
    for (auto it = pos.rbegin(); it != pos.rend(); ++it) g.frequencies.push_back(-*it);
    g.frequencies.push_back(0.0);
    g.frequencies.insert(g.frequencies.end(), pos.begin(), pos.end());
    return g;
}

CertificateReport spr_check(const ComplexRationalTF& t, double phi_z, const SweepGrid& grid) {
    CertificateReport r;
    r.check = "spr";
    if (t.is_zero()) {
        r.verdict = Verdict::Fail;
        r.note = "zero transfer function";
        return r;
    }
    const ComplexRationalTF rotated = std::polar(1.0, -phi_z) * t;

    Worst worst;
    bool sweep_ok = true;
    int skipped = 0;
    for (double w : grid.frequencies) {
        double re;
        try {
            re = rotated.evaluate(Complex{0.0, w}).real();
        } catch (const DomainError&) {
            ++skipped;
            sweep_ok = false;
            continue;
        }
        worst.offer(w, re);
        if (!(re > grid.margin)) sweep_ok = false;
    }
    r.worst_frequency = worst.frequency;
    r.worst_value = worst.value;

    const auto pole = rightmost_unstable_pole(rotated);
    if (pole) {
        r.verdict = Verdict::Fail;
        r.witness_pole = pole;
        r.note = "pole not in the open left half-plane";
    } else if (!sweep_ok) {
        r.verdict = Verdict::Fail;
        r.note = skipped > 0 ? "pole on the imaginary axis" : "real part of the rotated response is not positive";
    } else {
        r.verdict = Verdict::Pass;
    }
    return r;
}

CertificateReport voltage_path_check(const ComplexRationalTF& t_v) {
    CertificateReport r;
    r.check = "voltage_path";
    const auto pole = rightmost_unstable_pole(t_v);
    if (pole) {
        r.verdict = Verdict::Fail;
        r.witness_pole = pole;
        r.note = "voltage path is not asymptotically stable";
    } else {
        r.verdict = Verdict::Pass;
    }
    return r;
}

CertificateReport local_voltage_feedback_check(const std::vector<ComplexRationalTF>& t_v, const std::vector<double>& v0,
                                               const Eigen::MatrixXd& l_net, double phi_z, const SweepGrid& grid) {
    const auto n = static_cast<Eigen::Index>(t_v.size());
    if (v0.size() != t_v.size() || l_net.rows() != n || l_net.cols() != n) {
        throw ArgumentError("local_voltage_feedback_check: dimension mismatch");
    }

    CertificateReport r;
    r.check = "local_voltage_feedback";
    for (Eigen::Index k = 0; k < n; ++k) {
        if (auto pole = rightmost_unstable_pole(t_v[static_cast<std::size_t>(k)])) {
            r.verdict = Verdict::Fail;
            r.converter = static_cast<int>(k);
            r.witness_pole = pole;
            r.note = "voltage path is not asymptotically stable";
            return r;
        }
    }

    const Complex rot = std::polar(1.0, phi_z);
    Worst worst;
    for (double w : grid.frequencies) {
        if (w == 0.0) continue;
        const Complex s{0.0, w};
        Eigen::MatrixXcd h = l_net.cast<Complex>() / s;
        for (Eigen::Index k = 0; k < n; ++k) {
            const auto kk = static_cast<std::size_t>(k);
            h(k, k) += rot * t_v[kk].evaluate(s) * v0[kk] / s;
        }
        const Eigen::MatrixXcd herm = 0.5 * (h + h.adjoint());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
        worst.offer(w, solver.eigenvalues().minCoeff());
    }
    r.worst_frequency = worst.frequency;
    r.worst_value = worst.value;
    r.note = "w = 0 excluded (shared integrator pole)";
    if (!worst.value) {
        r.verdict = Verdict::Inconclusive;
        r.note = "no nonzero frequencies in the sweep grid";
    } else if (*worst.value < -kHermitianTolerance) {
        r.verdict = Verdict::Fail;
    } else {
        r.verdict = Verdict::Pass;
        r.marginal = *worst.value <= kHermitianTolerance;
    }
    return r;
}

CertificateReport certify_closed_loop(const std::vector<DynamicControllerSpec>& specs, const ReducedNetwork& net,
                                      const SweepGrid& grid, FeedbackMode mode, std::vector<double> v0) {
    CertificateReport r;
    r.check = "closed_loop";
    if (specs.empty() || static_cast<Eigen::Index>(specs.size()) != net.size()) {
        throw ArgumentError("certify_closed_loop: controller count does not match the network size");
    }
    if (!net.phi_z) {
        r.verdict = Verdict::Inconclusive;
        r.note = "network has no uniform impedance angle; the certificate assumes a uniform R/X ratio";
        return r;
    }
    if (v0.empty()) v0.assign(specs.size(), 1.0);
    if (v0.size() != specs.size()) throw ArgumentError("certify_closed_loop: v0 size mismatch");
    const double phi_z = *net.phi_z;

    for (std::size_t k = 0; k < specs.size(); ++k) {
        CertificateReport d = spr_check(specs[k].t, phi_z, grid);
        d.converter = static_cast<int>(k);
        r.details.push_back(std::move(d));
    }
    if (mode == FeedbackMode::PccVoltage) {
        for (std::size_t k = 0; k < specs.size(); ++k) {
            CertificateReport d = voltage_path_check(specs[k].t_v);
            d.converter = static_cast<int>(k);
            r.details.push_back(std::move(d));
        }
    } else {
        std::vector<ComplexRationalTF> tv;
        for (const auto& s : specs) tv.push_back(s.t_v);
        const Eigen::MatrixXd l = net.l_net ? *net.l_net : magnitude_laplacian(net.y_net, phi_z);
        r.details.push_back(local_voltage_feedback_check(tv, v0, l, phi_z, grid));
    }

    bool any_fail = false;
    bool any_inconclusive = false;
    for (const auto& d : r.details) {
        any_fail |= d.verdict == Verdict::Fail;
        any_inconclusive |= d.verdict == Verdict::Inconclusive;
        r.marginal |= d.marginal;
    }
    // The reported witness comes from the failing checks when any fail.
    for (const auto& d : r.details) {
        if (!any_fail || d.verdict == Verdict::Fail) {
            merge_worst(r, d);
            if (!r.witness_pole && d.witness_pole) r.witness_pole = d.witness_pole;
        }
    }
    r.verdict = any_fail ? Verdict::Fail : any_inconclusive ? Verdict::Inconclusive : Verdict::Pass;
    return r;
}

}  // namespace cfc
