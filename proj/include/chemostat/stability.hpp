#pragma once

#include <array>
#include <complex>

#include "chemostat/equilibria.hpp"

namespace chemostat {

using Complex = std::complex<double>;

// Coefficients of p(x) = p0 + p1 x + p2 x^2 - x^3 (leading -1, the sign
// convention of the factorization analysis). The classical Routh-Hurwitz
// symbols of x^3 + a1 x^2 + a2 x + a3 relate by p_i = -a_{3-i}.
struct CubicCoeffs {
    double p0, p1, p2;

    double a1() const { return -p2; }
    double a2() const { return -p1; }
    double a3() const { return -p0; }
};

enum class Stability { Stable, Unstable, Marginal };
const char* to_string(Stability s);

// Splitting p(x) = (alpha - x)(x^2 - gamma x + beta) * (-1)... equivalently
// roots = {alpha} + roots of x^2 - gamma x + beta. Reconstruction:
// p0 = alpha*beta, p1 = -alpha*gamma - beta, p2 = alpha + gamma.
struct SpectrumFactorization {
    CubicCoeffs coeffs;
    double alpha;         // selected real root
    double beta, gamma;   // quadratic factor x^2 - gamma x + beta
    double discriminant;  // gamma^2 - 4 beta; pair complex iff < 0
    std::array<Complex, 3> eigenvalues;  // [0] = alpha, [1..2] = the pair
};

// Equal-removal-rate quantities: char. polynomial = (-D - x)(x^2 - Ax - BC),
// so the pair's real part is A/2. Aprime = dA/dmu via the implicit
// derivatives of N*(mu), Z*(mu).
struct ABCReport {
    double A, B, C;
    double Aprime;
};

// Jacobian of the vector field at an arbitrary nonnegative point.
Mat3 jacobian(const Parameters& p, const State& at);

// Characteristic coefficients -(x^3 - tr x^2 + m2 x - det) from a matrix:
// generic route, used for E0/E1 classification and as a cross-check.
CubicCoeffs characteristic_cubic(const Mat3& J);

// Closed coefficient formulas at the coexistence equilibrium.
CubicCoeffs char_coeffs_E2(const Parameters& p);

// Stable iff a1 > 0 and a1 a2 > a3 (a3 > 0 required: throws otherwise).
Stability routh_hurwitz(const CubicCoeffs& c);

// All three roots of p, closed form plus one Newton polish per root.
// Residual <= 1e-9 relative; sum of roots reproduces p2 to 1e-9.
std::array<Complex, 3> eigenvalues(const CubicCoeffs& c);

SpectrumFactorization factorize(const CubicCoeffs& c);

// Requires D1 = D2 = D; evaluates at p.with_mu(mu). Throws ExistenceError
// below mu_c1.
ABCReport abc_equal_removal(const Parameters& p, double mu);

}  // namespace chemostat
