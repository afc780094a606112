#include "cfc/transfer_function.hpp"

#include "cfc/errors.hpp"
#include "cfc/integrate.hpp"

#include <algorithm>
#include <cmath>

namespace cfc {

namespace {

constexpr double kCleanTol = 1e-15;
constexpr double kGcdAcceptTol = 1e-7;
constexpr double kPoleTol = 1e-13;

Polynomial clean_relative(const Polynomial& p, double rel) {
    return p.cleaned(rel * p.max_abs());
}

std::vector<double> trim_real(std::vector<double> c) {
    double scale = 0.0;
    for (double x : c) scale = std::max(scale, std::abs(x));
    while (!c.empty() && std::abs(c.back()) <= kCleanTol * scale) c.pop_back();
    return c;
}

void canonicalize(Polynomial& num, Polynomial& den) {
    den = clean_relative(den, kCleanTol);
    if (den.is_zero()) throw DomainError("transfer function with zero denominator");
    num = clean_relative(num, kCleanTol);
    if (num.is_zero()) {
        num = Polynomial{};
        den = Polynomial::constant(1.0);
        return;
    }

    if (den.degree() > 0 && num.degree() > 0) {
        const Polynomial g = gcd(num, den, kCoefficientTolerance);
        if (g.degree() > 0) {
            auto [qn, rn] = divmod(num, g);
            auto [qd, rd] = divmod(den, g);
            if (rn.max_abs() <= kGcdAcceptTol * num.max_abs() && rd.max_abs() <= kGcdAcceptTol * den.max_abs()) {
                num = std::move(qn);
                den = std::move(qd);
            }
        }
    }

    const Complex lead = den.leading();
    num = clean_relative((1.0 / lead) * num, kCleanTol);
    std::vector<Complex> dc = ((1.0 / lead) * den).coeffs();
    dc.back() = 1.0;
    den = clean_relative(Polynomial(std::move(dc)), kCleanTol);
}

ComplexRationalTF real_split(const Polynomial& num, const Polynomial& den, bool imag) {
    if (den.is_real()) {
        return {imag ? num.imag_coeffs() : num.real_coeffs(), den};
    }
    const Polynomial p = num * den.conj_coeffs();
    const Polynomial q = (den * den.conj_coeffs()).real_coeffs();
    return {imag ? p.imag_coeffs() : p.real_coeffs(), q};
}

RealRationalTF to_real(const ComplexRationalTF& t) {
    if (t.is_zero()) return RealRationalTF::constant(0.0);
    return {t.numerator().real_vector(), t.denominator().real_vector()};
}

}  // namespace

// ---------------------------------------------------------------------------
// RealRationalTF

RealRationalTF::RealRationalTF() : num_{1.0}, den_{1.0} {}

RealRationalTF::RealRationalTF(std::vector<double> num, std::vector<double> den)
    : num_(trim_real(std::move(num))), den_(trim_real(std::move(den))) {
    if (den_.empty()) throw DomainError("rational transfer function with zero denominator");
    const double lead = den_.back();
    for (auto& c : num_) c /= lead;
    for (auto& c : den_) c /= lead;
    den_.back() = 1.0;
}

RealRationalTF RealRationalTF::constant(double k) {
    return {{k}, {1.0}};
}

Complex RealRationalTF::evaluate(Complex s) const {
    return ComplexRationalTF(Polynomial::from_real(num_), Polynomial::from_real(den_)).evaluate(s);
}

// ---------------------------------------------------------------------------
// ComplexRationalTF

ComplexRationalTF::ComplexRationalTF() : num_(Polynomial::constant(1.0)), den_(Polynomial::constant(1.0)) {}

ComplexRationalTF::ComplexRationalTF(Polynomial num, Polynomial den) : num_(std::move(num)), den_(std::move(den)) {
    canonicalize(num_, den_);
}

ComplexRationalTF ComplexRationalTF::constant(Complex k) {
    return {Polynomial::constant(k), Polynomial::constant(1.0)};
}

ComplexRationalTF ComplexRationalTF::first_order(Complex k, double a, double b) {
    return {Polynomial::constant(k), Polynomial::from_real({b, a})};
}

RealRationalTF ComplexRationalTF::re_part() const {
    return to_real(real_split(num_, den_, false));
}

RealRationalTF ComplexRationalTF::im_part() const {
    return to_real(real_split(num_, den_, true));
}

Complex ComplexRationalTF::evaluate(Complex s) const {
    const Complex d = den_(s);
    if (std::abs(d) <= kPoleTol * den_.magnitude_bound(s)) {
        throw DomainError("transfer function evaluated at a pole");
    }
    return num_(s) / d;
}

std::vector<Complex> ComplexRationalTF::poles() const {
    return roots(den_);
}

ComplexRationalTF ComplexRationalTF::inverse() const {
    if (is_zero()) throw DomainError("cannot invert the zero transfer function");
    return {den_, num_};
}

ComplexRationalTF ComplexRationalTF::operator-() const {
    return {-num_, den_};
}

ComplexRationalTF operator+(const ComplexRationalTF& a, const ComplexRationalTF& b) {
    if (a.den_.degree() == 0 && b.den_.degree() == 0) {
        return {a.num_ + b.num_, Polynomial::constant(1.0)};
    }
    const Polynomial p1 = a.num_ * b.den_;
    const Polynomial p2 = b.num_ * a.den_;
    const double scale = std::max(p1.max_abs(), p2.max_abs());
    Polynomial num = (p1 + p2).cleaned(1e-13 * scale);
    return {std::move(num), a.den_ * b.den_};
}

ComplexRationalTF operator-(const ComplexRationalTF& a, const ComplexRationalTF& b) {
    return a + (-b);
}

ComplexRationalTF operator*(const ComplexRationalTF& a, const ComplexRationalTF& b) {
    return {a.num_ * b.num_, a.den_ * b.den_};
}

ComplexRationalTF operator/(const ComplexRationalTF& a, const ComplexRationalTF& b) {
    return a * b.inverse();
}

ComplexRationalTF operator*(Complex k, const ComplexRationalTF& t) {
    return {k * t.num_, t.den_};
}

ComplexRationalTF make_complex_tf(const RealRationalTF& re_part, const RealRationalTF& im_part) {
    const Polynomial nr = Polynomial::from_real(re_part.num());
    const Polynomial dr = Polynomial::from_real(re_part.den());
    const Polynomial ni = Polynomial::from_real(im_part.num());
    const Polynomial di = Polynomial::from_real(im_part.den());
    if (im_part.is_zero()) return {nr, dr};
    if (re_part.is_zero()) return {Complex{0.0, 1.0} * ni, di};
    const Polynomial g = gcd(dr, di);
    const Polynomial qr = divmod(dr, g).first;
    const Polynomial qi = divmod(di, g).first;
    return {nr * qi + Complex{0.0, 1.0} * (ni * qr), dr * qi};
}

Complex evaluate(const ComplexRationalTF& t, Complex s) {
    return t.evaluate(s);
}

ComplexRationalTF combine(const ComplexRationalTF& a, const ComplexRationalTF& b, CombineOp op) {
    return op == CombineOp::Add ? a + b : a * b;
}

ComplexRationalTF invert(const ComplexRationalTF& t) {
    return t.inverse();
}

std::vector<Complex> poles(const ComplexRationalTF& t) {
    return t.poles();
}

double coefficient_residual(const ComplexRationalTF& a, const ComplexRationalTF& b) {
    auto diff = [](const Polynomial& x, const Polynomial& y) {
        const int n = std::max(x.degree(), y.degree());
        double worst = 0.0;
        for (int i = 0; i <= n; ++i) worst = std::max(worst, std::abs(x.coeff(i) - y.coeff(i)));
        return worst;
    };
    return std::max(diff(a.numerator(), b.numerator()), diff(a.denominator(), b.denominator()));
}

// ---------------------------------------------------------------------------
// Realization

Eigen::Matrix2cd StateSpace2x2::frequency_response(Complex s) const {
    Eigen::Matrix2cd g = D.cast<Complex>();
    const Eigen::Index n = A.rows();
    if (n == 0) return g;
    Eigen::MatrixXcd m = s * Eigen::MatrixXcd::Identity(n, n) - A.cast<Complex>();
    Eigen::MatrixXcd x = m.partialPivLu().solve(B.cast<Complex>());
    g += C.cast<Complex>() * x;
    return g;
}

Complex StateSpace2x2::complex_response(Complex s) const {
    const Eigen::Matrix2cd g = frequency_response(s);
    return g(0, 0) + Complex{0.0, 1.0} * g(1, 0);
}

StateSpace2x2 realize(const ComplexRationalTF& t) {
    if (!t.is_proper()) {
        throw ImproperTransferFunctionError(
            "transfer function is improper and has no state-space realization; "
            "restructure the loop so that only proper blocks are integrated");
    }
    const Polynomial& num = t.numerator();
    const Polynomial& den = t.denominator();
    const int n = den.degree();
    const Complex d = num.coeff(n);
    const Polynomial rem = num - d * den;

    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
    Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(n, 1);
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(1, n);
    for (int i = 0; i + 1 < n; ++i) a(i, i + 1) = 1.0;
    for (int j = 0; j < n; ++j) {
        a(n - 1, j) = -den.coeff(j);
        c(0, j) = rem.coeff(j);
    }
    if (n > 0) b(n - 1, 0) = 1.0;

    auto lift = [](const Eigen::MatrixXcd& m) {
        const Eigen::Index r = m.rows();
        const Eigen::Index k = m.cols();
        Eigen::MatrixXd out(2 * r, 2 * k);
        out.topLeftCorner(r, k) = m.real();
        out.topRightCorner(r, k) = -m.imag();
        out.bottomLeftCorner(r, k) = m.imag();
        out.bottomRightCorner(r, k) = m.real();
        return out;
    };

    StateSpace2x2 ss;
    ss.A = lift(a);
    ss.B = lift(b);
    ss.C = lift(c);
    ss.D.resize(2, 2);
    ss.D << d.real(), -d.imag(), d.imag(), d.real();
    return ss;
}

std::vector<Complex> step_response(const ComplexRationalTF& t, Complex u, double t_end, double dt) {
    if (!(dt > 0.0)) throw ArgumentError("step_response: dt must be positive");
    if (t_end < 0.0) throw ArgumentError("step_response: t_end must be nonnegative");
    const StateSpace2x2 ss = realize(t);
    const Eigen::Vector2d uv(u.real(), u.imag());
    const Eigen::VectorXd bu = ss.B * uv;
    const Eigen::Vector2d du = ss.D * uv;

    const long steps = step_count(t_end, dt);
    std::vector<Complex> out;
    out.reserve(static_cast<std::size_t>(steps + 1));

    Eigen::VectorXd x = Eigen::VectorXd::Zero(ss.state_dim());
    auto output = [&](const Eigen::VectorXd& state) {
        Eigen::Vector2d y = du;
        if (state.size() > 0) y += ss.C * state;
        return Complex{y(0), y(1)};
    };
    auto rhs = [&](double, const Eigen::VectorXd& state) -> Eigen::VectorXd { return ss.A * state + bu; };

    out.push_back(output(x));
    for (long k = 0; k < steps; ++k) {
        if (x.size() > 0) x = rk4_step(rhs, static_cast<double>(k) * dt, x, dt);
        out.push_back(output(x));
    }
    return out;
}

}  // namespace cfc
