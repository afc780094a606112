#include "cfc/polynomial.hpp"

#include "cfc/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace cfc {

Polynomial::Polynomial(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {
    trim_exact_zeros();
}

Polynomial Polynomial::from_real(const std::vector<double>& coeffs) {
    std::vector<Complex> c(coeffs.begin(), coeffs.end());
    return Polynomial(std::move(c));
}

Polynomial Polynomial::constant(Complex c) {
    return Polynomial(std::vector<Complex>{c});
}

Polynomial Polynomial::s() {
    return Polynomial(std::vector<Complex>{0.0, 1.0});
}

void Polynomial::trim_exact_zeros() {
    while (!coeffs_.empty() && coeffs_.back() == Complex{}) {
        coeffs_.pop_back();
    }
}

Complex Polynomial::coeff(int power) const {
    if (power < 0 || power > degree()) return {};
    return coeffs_[static_cast<std::size_t>(power)];
}

double Polynomial::max_abs() const {
    double m = 0.0;
    for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
    return m;
}

bool Polynomial::is_real(double tol) const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [tol](Complex c) { return std::abs(c.imag()) <= tol; });
}

Complex Polynomial::operator()(Complex s) const {
    Complex acc{};
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
        acc = acc * s + *it;
    }
    return acc;
}

double Polynomial::magnitude_bound(Complex s) const {
    const double r = std::abs(s);
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
        acc = acc * r + std::abs(*it);
    }
    return acc;
}

Polynomial Polynomial::trimmed(double abs_tol) const {
    std::vector<Complex> c = coeffs_;
    while (!c.empty() && std::abs(c.back()) <= abs_tol) c.pop_back();
    return Polynomial(std::move(c));
}

Polynomial Polynomial::cleaned(double abs_tol) const {
    std::vector<Complex> c = coeffs_;
    for (auto& x : c) {
        double re = std::abs(x.real()) <= abs_tol ? 0.0 : x.real();
        double im = std::abs(x.imag()) <= abs_tol ? 0.0 : x.imag();
        x = {re, im};
    }
    return Polynomial(std::move(c));
}

Polynomial Polynomial::conj_coeffs() const {
    std::vector<Complex> c = coeffs_;
    for (auto& x : c) x = std::conj(x);
    return Polynomial(std::move(c));
}

Polynomial Polynomial::real_coeffs() const {
    std::vector<Complex> c = coeffs_;
    for (auto& x : c) x = x.real();
    return Polynomial(std::move(c));
}

Polynomial Polynomial::imag_coeffs() const {
    std::vector<Complex> c = coeffs_;
    for (auto& x : c) x = x.imag();
    return Polynomial(std::move(c));
}

std::vector<double> Polynomial::real_vector() const {
    std::vector<double> out;
    out.reserve(coeffs_.size());
    for (const auto& c : coeffs_) out.push_back(c.real());
    return out;
}

Polynomial Polynomial::operator-() const {
    return Complex{-1.0, 0.0} * *this;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<Complex> c(std::max(a.coeffs_.size(), b.coeffs_.size()));
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) c[i] += a.coeffs_[i];
    for (std::size_t i = 0; i < b.coeffs_.size(); ++i) c[i] += b.coeffs_[i];
    return Polynomial(std::move(c));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) {
    return a + (-b);
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<Complex> c(a.coeffs_.size() + b.coeffs_.size() - 1);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
        for (std::size_t j = 0; j < b.coeffs_.size(); ++j) {
            c[i + j] += a.coeffs_[i] * b.coeffs_[j];
        }
    }
    return Polynomial(std::move(c));
}

Polynomial operator*(Complex k, const Polynomial& p) {
    std::vector<Complex> c = p.coeffs_;
    for (auto& x : c) x *= k;
    return Polynomial(std::move(c));
}

std::pair<Polynomial, Polynomial> divmod(const Polynomial& num, const Polynomial& den) {
    if (den.is_zero()) throw DomainError("polynomial division by zero");
    const int dn = num.degree();
    const int dd = den.degree();
    if (dn < dd) return {Polynomial{}, num};

    std::vector<Complex> rem = num.coeffs();
    std::vector<Complex> quot(static_cast<std::size_t>(dn - dd + 1));
    const Complex lead = den.leading();
    for (int k = dn - dd; k >= 0; --k) {
        const Complex q = rem[static_cast<std::size_t>(k + dd)] / lead;
        quot[static_cast<std::size_t>(k)] = q;
        for (int j = 0; j <= dd; ++j) {
            rem[static_cast<std::size_t>(k + j)] -= q * den.coeffs()[static_cast<std::size_t>(j)];
        }
        rem[static_cast<std::size_t>(k + dd)] = 0.0;
    }
    rem.resize(static_cast<std::size_t>(dd));
    return {Polynomial(std::move(quot)), Polynomial(std::move(rem))};
}

Polynomial gcd(const Polynomial& a_in, const Polynomial& b_in, double rel_tol) {
    if (a_in.is_zero() && b_in.is_zero()) return Polynomial::constant(1.0);
    if (a_in.is_zero()) return (1.0 / b_in.leading()) * b_in;
    if (b_in.is_zero()) return (1.0 / a_in.leading()) * a_in;

    Polynomial a = (1.0 / a_in.max_abs()) * a_in;
    Polynomial b = (1.0 / b_in.max_abs()) * b_in;
    if (a.degree() < b.degree()) std::swap(a, b);

    while (b.degree() > 0) {
        Polynomial r = divmod(a, b).second;
        const double scale = std::max(a.max_abs(), b.max_abs());
        r = r.trimmed(rel_tol * scale);
        if (r.is_zero()) {
            return (1.0 / b.leading()) * b;
        }
        a = std::move(b);
        b = (1.0 / r.max_abs()) * r;
    }
    return Polynomial::constant(1.0);
}

std::vector<Complex> roots(const Polynomial& p) {
    const int n = p.degree();
    if (n <= 0) return {};
    if (n == 1) return {-p.coeff(0) / p.coeff(1)};

    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(n, n);
    const Complex lead = p.leading();
    for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) companion(i, n - 1) = -p.coeff(i) / lead;

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
    std::vector<Complex> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.push_back(solver.eigenvalues()(i));
    std::sort(out.begin(), out.end(), [](Complex x, Complex y) {
        if (x.real() != y.real()) return x.real() < y.real();
        return x.imag() < y.imag();
    });
    return out;
}

}  // namespace cfc
