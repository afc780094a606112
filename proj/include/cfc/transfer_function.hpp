#pragma once

// Complex-coefficient rational transfer functions T(s) = T_re(s) + j*T_im(s).
//
// Internally a ComplexRationalTF is one numerator and one monic denominator
// with complex coefficients and common factors cancelled. T_re and T_im are
// the conjugate-symmetric split
//
//   T_re(s) = (T(s) + conj(T(conj s))) / 2,   T_im(s) = (T(s) - conj(T(conj s))) / 2j
//
// so both have real coefficients and the real 2x2 block
// [[T_re, -T_im], [T_im, T_re]] acts on [Re u; Im u] the way T acts on u.

#include "cfc/polynomial.hpp"

#include <Eigen/Dense>

#include <vector>

namespace cfc {

inline constexpr double kCoefficientTolerance = 1e-9;

/// Real-coefficient rational function in ascending powers of s.
/// Canonical: trailing zeros trimmed, denominator monic.
class RealRationalTF {
public:
    RealRationalTF();  // the constant 1
    RealRationalTF(std::vector<double> num, std::vector<double> den);
    static RealRationalTF constant(double k);

    const std::vector<double>& num() const { return num_; }
    const std::vector<double>& den() const { return den_; }
    bool is_zero() const { return num_.empty(); }
    Complex evaluate(Complex s) const;

private:
    std::vector<double> num_;
    std::vector<double> den_;
};

class ComplexRationalTF {
public:
    ComplexRationalTF();  // the constant 1
    ComplexRationalTF(Polynomial num, Polynomial den);

    static ComplexRationalTF constant(Complex k);
    static ComplexRationalTF identity() { return constant(1.0); }
    static ComplexRationalTF zero() { return constant(0.0); }
    /// k / (a*s + b)
    static ComplexRationalTF first_order(Complex k, double a, double b);

    const Polynomial& numerator() const { return num_; }
    const Polynomial& denominator() const { return den_; }

    RealRationalTF re_part() const;
    RealRationalTF im_part() const;

    bool is_zero() const { return num_.is_zero(); }
    bool is_constant() const { return den_.degree() == 0 && num_.degree() <= 0; }
    bool is_proper() const { return num_.degree() <= den_.degree(); }
    bool is_strictly_proper() const { return num_.degree() < den_.degree(); }

    /// Throws DomainError at a pole.
    Complex evaluate(Complex s) const;
    Complex operator()(Complex s) const { return evaluate(s); }
    std::vector<Complex> poles() const;

    ComplexRationalTF inverse() const;
    ComplexRationalTF operator-() const;
    friend ComplexRationalTF operator+(const ComplexRationalTF& a, const ComplexRationalTF& b);
    friend ComplexRationalTF operator-(const ComplexRationalTF& a, const ComplexRationalTF& b);
    friend ComplexRationalTF operator*(const ComplexRationalTF& a, const ComplexRationalTF& b);
    friend ComplexRationalTF operator/(const ComplexRationalTF& a, const ComplexRationalTF& b);
    friend ComplexRationalTF operator*(Complex k, const ComplexRationalTF& t);

private:
    Polynomial num_;
    Polynomial den_;
};

enum class CombineOp { Add, Mul };

ComplexRationalTF make_complex_tf(const RealRationalTF& re_part, const RealRationalTF& im_part);
Complex evaluate(const ComplexRationalTF& t, Complex s);
ComplexRationalTF combine(const ComplexRationalTF& a, const ComplexRationalTF& b, CombineOp op);
/// Throws DomainError for the zero transfer function. The result may be improper.
ComplexRationalTF invert(const ComplexRationalTF& t);
std::vector<Complex> poles(const ComplexRationalTF& t);

/// Largest coefficient difference between two canonical transfer functions,
/// zero-padded to equal lengths.
double coefficient_residual(const ComplexRationalTF& a, const ComplexRationalTF& b);

/// Real state-space block with the 2x2 rotational transfer structure.
/// Inputs [Re u; Im u], outputs [Re y; Im y].
struct StateSpace2x2 {
    Eigen::MatrixXd A;  // n x n
    Eigen::MatrixXd B;  // n x 2
    Eigen::MatrixXd C;  // 2 x n
    Eigen::MatrixXd D;  // 2 x 2

    Eigen::Index state_dim() const { return A.rows(); }
    /// C (sI - A)^{-1} B + D
    Eigen::Matrix2cd frequency_response(Complex s) const;
    /// The complex transfer value G00(s) + j*G10(s) recovered from the block.
    Complex complex_response(Complex s) const;
};

/// Controllable-canonical realization of the complex system, lifted to real
/// coordinates [Re x; Im x]. A complex denominator of degree n gives 2n real
/// states. Throws ImproperTransferFunctionError for improper t.
StateSpace2x2 realize(const ComplexRationalTF& t);

/// Output of realize(t) for a constant input u applied at t = 0 from rest,
/// sampled at 0, dt, ..., t_end with fixed-step RK4.
std::vector<Complex> step_response(const ComplexRationalTF& t, Complex u, double t_end, double dt);

}  // namespace cfc
