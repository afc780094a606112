#pragma once

#include "cfc/coords.hpp"

#include <utility>
#include <vector>

namespace cfc {

/// Polynomial in s with complex coefficients, stored in ascending powers.
/// The zero polynomial has no coefficients and degree -1.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<Complex> coeffs);
    static Polynomial from_real(const std::vector<double>& coeffs);
    static Polynomial constant(Complex c);
    /// s (the monomial of degree one)
    static Polynomial s();

    const std::vector<Complex>& coeffs() const { return coeffs_; }
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const { return coeffs_.empty(); }
    Complex leading() const { return coeffs_.empty() ? Complex{} : coeffs_.back(); }
    Complex coeff(int power) const;
    double max_abs() const;
    bool is_real(double tol = 0.0) const;

    Complex operator()(Complex s) const;
    /// Sum of |c_k||s|^k, the scale against which a value at s is judged small.
    double magnitude_bound(Complex s) const;

    /// Drops leading coefficients with magnitude <= abs_tol.
    Polynomial trimmed(double abs_tol) const;
    /// Zeroes real and imaginary components with magnitude <= abs_tol, then trims.
    Polynomial cleaned(double abs_tol) const;

    Polynomial conj_coeffs() const;
    Polynomial real_coeffs() const;
    Polynomial imag_coeffs() const;
    std::vector<double> real_vector() const;

    Polynomial operator-() const;
    friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(Complex k, const Polynomial& p);

private:
    void trim_exact_zeros();

    std::vector<Complex> coeffs_;
};

/// Quotient and remainder of long division. Throws DomainError on a zero divisor.
std::pair<Polynomial, Polynomial> divmod(const Polynomial& num, const Polynomial& den);

/// Monic greatest common divisor by the Euclidean algorithm. A remainder is
/// treated as zero once its coefficients fall below rel_tol relative to the
/// operands. Returns the constant 1 when the inputs are coprime.
Polynomial gcd(const Polynomial& a, const Polynomial& b, double rel_tol = 1e-9);

/// Roots via eigenvalues of the companion matrix.
std::vector<Complex> roots(const Polynomial& p);

}  // namespace cfc
