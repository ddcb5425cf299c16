#include "chemostat/stability.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace chemostat {

const char* to_string(Stability s) {
    switch (s) {
        case Stability::Stable: return "Stable";
        case Stability::Unstable: return "Unstable";
        default: return "Marginal";
    }
}

Mat3 jacobian(const Parameters& p, const State& at) {
    if (at.N < 0.0 || at.P < 0.0 || at.Z < 0.0)
        throw DomainError("jacobian: point must be componentwise nonnegative");
    const double f1 = p.f1(at.N), f1p = p.f1.eval(at.N, 1);
    const double f2 = p.f2(at.P), f2p = p.f2.eval(at.P, 1);
    return Mat3{{
        {-p.D - at.P * f1p, -f1, 0.0},
        {p.gamma1 * at.P * f1p, p.gamma1 * f1 - p.D1 - at.Z * f2p, -f2},
        {0.0, p.gamma2 * at.Z * f2p, p.gamma2 * f2 - p.D2},
    }};
}

CubicCoeffs characteristic_cubic(const Mat3& J) {
    // det(J - xI) = -x^3 + tr x^2 - m2 x + det, with m2 the sum of the
    // principal 2x2 minors; already in the p(x) sign convention.
    const double tr = J[0][0] + J[1][1] + J[2][2];
    const double m2 = (J[0][0] * J[1][1] - J[0][1] * J[1][0]) +
                      (J[0][0] * J[2][2] - J[0][2] * J[2][0]) +
                      (J[1][1] * J[2][2] - J[1][2] * J[2][1]);
    const double det = J[0][0] * (J[1][1] * J[2][2] - J[1][2] * J[2][1]) -
                       J[0][1] * (J[1][0] * J[2][2] - J[1][2] * J[2][0]) +
                       J[0][2] * (J[1][0] * J[2][1] - J[1][1] * J[2][0]);
    return CubicCoeffs{det, -m2, tr};
}

CubicCoeffs char_coeffs_E2(const Parameters& p) {
    const auto e2 = coexistence(p);
    if (!e2)
        throw ExistenceError("char_coeffs_E2: coexistence equilibrium absent "
                             "at mu=" + std::to_string(p.mu));
    const double N = e2->N, lz = e2->P, Z = e2->Z;
    const double f1 = p.f1(N), f1p = p.f1.eval(N, 1);
    const double f2p = p.f2.eval(lz, 1);

    const double a1 = Z * f2p + lz * f1p - p.gamma1 * f1 + p.D1 + p.D;
    const double a2 = lz * Z * f1p * f2p + p.D2 * Z * f2p + p.D * Z * f2p +
                      p.D1 * lz * f1p - p.D * p.gamma1 * f1 + p.D * p.D1;
    const double a3 = p.D2 * Z * f2p * (p.D + lz * f1p);
    return CubicCoeffs{-a3, -a2, -a1};
}

Stability routh_hurwitz(const CubicCoeffs& c) {
    const double a1 = c.a1(), a2 = c.a2(), a3 = c.a3();
    if (!(a3 > 0.0))
        throw ContractViolationError(
            "routh_hurwitz: a3 <= 0 (criterion stated for a3 > 0 only)");
    // tolerance in units of a1*a2: below the root-polish noise floor, so the
    // Marginal band is a genuine Hopf-boundary detector, not slop.
    const double tol = 1e-9 * std::max({1.0, std::abs(a1 * a2), a3});
    const double h = a1 * a2 - a3;
    if (std::abs(h) <= tol && a1 > 0.0) return Stability::Marginal;
    if (a1 > tol && h > tol) return Stability::Stable;
    return Stability::Unstable;
}

namespace {

// One Newton step on the monic form q(x) = x^3 + b x^2 + c x + d, in
// complex arithmetic so polishing works on either side of the real axis.
Complex polish(Complex x, double b, double c, double d) {
    for (int it = 0; it < 2; ++it) {
        const Complex q = ((x + b) * x + c) * x + d;
        const Complex dq = (3.0 * x + 2.0 * b) * x + c;
        if (std::abs(dq) == 0.0) break;
        const Complex step = q / dq;
        x -= step;
        if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(x))) break;
    }
    return x;
}

}  // namespace

std::array<Complex, 3> eigenvalues(const CubicCoeffs& cc) {
    // p(x) = -(x^3 + b x^2 + c x + d) with b = -p2, c = -p1, d = -p0.
    const double b = -cc.p2, c = -cc.p1, d = -cc.p0;

    // Classical treatment (e.g. Numerical Recipes 5.6): with
    //   Q = (b^2 - 3c)/9,  R = (2b^3 - 9bc + 27d)/54,
    // R^2 < Q^3 gives three real roots through the trigonometric form,
    // otherwise one real root via the cube-root branch that avoids
    // subtracting nearly equal quantities.
    const double Q = (b * b - 3.0 * c) / 9.0;
    const double R = (2.0 * b * b * b - 9.0 * b * c + 27.0 * d) / 54.0;

    std::array<Complex, 3> roots;
    if (R * R < Q * Q * Q) {
        const double theta = std::acos(R / std::sqrt(Q * Q * Q));
        const double s = -2.0 * std::sqrt(Q);
        roots[0] = s * std::cos(theta / 3.0) - b / 3.0;
        roots[1] = s * std::cos((theta + 2.0 * M_PI) / 3.0) - b / 3.0;
        roots[2] = s * std::cos((theta - 2.0 * M_PI) / 3.0) - b / 3.0;
    } else {
        const double A = -std::copysign(
            std::cbrt(std::abs(R) + std::sqrt(std::max(R * R - Q * Q * Q, 0.0))),
            R);
        const double B = (A != 0.0) ? Q / A : 0.0;
        roots[0] = (A + B) - b / 3.0;
        const double re = -0.5 * (A + B) - b / 3.0;
        const double im = 0.5 * std::sqrt(3.0) * (A - B);
        roots[1] = Complex(re, im);
        roots[2] = Complex(re, -im);
    }

    for (auto& r : roots) r = polish(r, b, c, d);
    // Polishing can leave a conjugate pair asymmetric in the last ulp;
    // re-symmetrize so downstream gamma/beta extraction stays exact.
    if (std::abs(roots[1].imag()) > 0.0 || std::abs(roots[2].imag()) > 0.0) {
        const Complex mean = 0.5 * (roots[1] + std::conj(roots[2]));
        roots[1] = mean;
        roots[2] = std::conj(mean);
    }
    return roots;
}

SpectrumFactorization factorize(const CubicCoeffs& cc) {
    const auto roots = eigenvalues(cc);
    double scale = 1.0;
    for (const auto& r : roots) scale = std::max(scale, std::abs(r));

    // Candidate real roots: negligible imaginary part relative to the root
    // magnitudes. The selected alpha is the most negative; a tie means the
    // split into (real) x (quadratic) is not well defined.
    int best = -1, second = -1;
    for (int i = 0; i < 3; ++i) {
        if (std::abs(roots[i].imag()) >= 1e-8 * scale) continue;
        if (best < 0 || roots[i].real() < roots[best].real()) {
            second = best;
            best = i;
        } else if (second < 0 || roots[i].real() < roots[second].real()) {
            second = i;
        }
    }
    if (best < 0)
        throw FactorizationDomainError(
            "factorize: no real root found (conjugate symmetry lost)");
    if (second >= 0 &&
        std::abs(roots[best].real() - roots[second].real()) <= 1e-8 * scale)
        throw FactorizationDomainError(
            "factorize: ambiguous real-root selection (two candidates within "
            "tolerance); the split needs a complex pair");
    if (!(roots[best].real() < 0.0))
        throw FactorizationDomainError(
            "factorize: selected real root is nonnegative (negative linear "
            "factor required)");

    SpectrumFactorization f;
    f.coeffs = cc;
    f.alpha = roots[best].real();
    const Complex r1 = roots[(best + 1) % 3];
    const Complex r2 = roots[(best + 2) % 3];
    f.gamma = (r1 + r2).real();
    f.beta = (r1 * r2).real();
    f.discriminant = f.gamma * f.gamma - 4.0 * f.beta;
    f.eigenvalues = {roots[best], r1, r2};
    return f;
}

ABCReport abc_equal_removal(const Parameters& p, double mu) {
    if (!p.equal_removal_rates())
        throw DomainError("abc_equal_removal: requires D1 = D2 = D");
    const Parameters q = p.with_mu(mu);
    const auto e2 = coexistence(q);
    if (!e2)
        throw ExistenceError("abc_equal_removal: coexistence absent at mu=" +
                             std::to_string(mu));
    const double N = e2->N, lz = e2->P, Z = e2->Z;
    const double f1p = q.f1.eval(N, 1), f1pp = q.f1.eval(N, 2);
    const double f2p = q.f2.eval(lz, 1);

    // A in the rewritten form that substitutes the predator balance
    // gamma1 f1(N) - D = D Z/(gamma2 lambda_Z); makes the sign analysis of
    // the crossing explicit in Z and N only.
    const double secant_gap = q.D / (q.gamma2 * lz) - f2p;
    const double A = Z * secant_gap - lz * f1p;
    const double B = -(lz * f1p + q.D) / q.gamma2;
    const double C = q.gamma2 * Z * f2p;

    // Implicit derivatives of the interior branch:
    //   N' (D + lambda_Z f1'(N)) = D,  Z' = (gamma1 gamma2 / D2) lambda_Z f1'(N) N'.
    const double Nprime = q.D / (q.D + f1p * lz);
    const double Zprime = (q.gamma1 * q.gamma2 / q.D2) * f1p * lz * Nprime;
    const double Aprime = Zprime * secant_gap - lz * f1pp * Nprime;

    return ABCReport{A, B, C, Aprime};
}

}  // namespace chemostat
