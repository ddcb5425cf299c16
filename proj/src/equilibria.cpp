#include "chemostat/equilibria.hpp"

#include <cmath>
#include <functional>
#include <string>

namespace chemostat {

namespace {

// Safeguarded Newton on a bracket [lo, hi] with g(lo) > 0 > g(hi). Falls
// back to bisection whenever the Newton step leaves the bracket or fails to
// shrink it fast enough (Numerical Recipes rtsafe scheme). The bracket is
// maintained at every iterate, so convergence is guaranteed; Newton merely
// accelerates the endgame.
double newton_bisect(const std::function<double(double)>& g,
                     const std::function<double(double)>& dg, double lo,
                     double hi, double xtol) {
    double flo = g(lo);
    double fhi = g(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    // orient so that g(xl) > 0 > g(xh)
    double xl = flo > 0.0 ? lo : hi;
    double xh = flo > 0.0 ? hi : lo;

    double x = 0.5 * (lo + hi);
    double dxold = std::abs(hi - lo);
    double dx = dxold;
    double f = g(x);
    double df = dg(x);
    for (int it = 0; it < 200; ++it) {
        const bool newton_escapes =
            ((x - xh) * df - f) * ((x - xl) * df - f) > 0.0;
        const bool too_slow = std::abs(2.0 * f) > std::abs(dxold * df);
        if (newton_escapes || too_slow) {
            dxold = dx;
            dx = 0.5 * (xh - xl);
            x = xl + dx;
            if (x == xl) return x;
        } else {
            dxold = dx;
            dx = f / df;
            const double tmp = x;
            x -= dx;
            if (tmp == x) return x;
        }
        if (std::abs(dx) < xtol) return x;
        f = g(x);
        df = dg(x);
        if (f > 0.0)
            xl = x;
        else
            xh = x;
    }
    return x;
}

}  // namespace

double break_even(const Response& r, double gamma, double Di) {
    if (!(Di > 0.0)) throw DomainError("break_even: removal rate must be > 0");
    if (!(Di < gamma * r.supremum()))
        throw NoBreakEvenError("break_even: Di >= gamma*sup(f), consumption "
                               "never reaches the removal rate");

    // g(x) = Di - gamma*f(x) is positive at 0 and, since gamma*sup(f) > Di,
    // eventually negative; double until the sign flips.
    auto g = [&](double x) { return Di - gamma * r.eval(x, 0); };
    auto dg = [&](double x) { return -gamma * r.eval(x, 1); };
    double hi = 1.0;
    for (int k = 0; k < 200 && g(hi) > 0.0; ++k) hi *= 2.0;
    if (g(hi) > 0.0)
        throw NoBreakEvenError("break_even: no sign change found (supremum "
                               "approached too slowly)");

    double lam = newton_bisect(g, dg, 0.0, hi, 1e-15 * std::max(1.0, hi));
    // residual contract: |gamma*f(lambda) - Di| <= 1e-12*Di; one extra
    // Newton step cleans up whatever the bracket loop left behind.
    for (int k = 0; k < 4 && std::abs(g(lam)) > 1e-13 * Di; ++k)
        lam -= g(lam) / dg(lam);
    return lam;
}

double lambda_prime(const Response& r, double gamma, double lambda) {
    const double slope = r.eval(lambda, 1);
    if (!(slope > 0.0))
        throw DomainError("lambda_prime: f'(lambda) must be positive");
    return 1.0 / (gamma * slope);
}

double mu_c1_value(double lambda_P, double lambda_Z, double D, double D1,
                   double gamma1) {
    return lambda_P + D1 * lambda_Z / (D * gamma1);
}

double mu_c1(const Parameters& p) {
    const double lp = break_even(p.f1, p.gamma1, p.D1);
    const double lz = break_even(p.f2, p.gamma2, p.D2);
    return mu_c1_value(lp, lz, p.D, p.D1, p.gamma1);
}

std::optional<State> single_species(const Parameters& p,
                                    bool include_boundary) {
    const double lp = break_even(p.f1, p.gamma1, p.D1);
    const bool present = include_boundary ? p.mu >= lp : p.mu > lp;
    if (!present) return std::nullopt;
    const double prey = (p.mu - lp) * p.D * p.gamma1 / p.D1;
    return State{lp, prey, 0.0};
}

std::optional<State> coexistence(const Parameters& p, bool include_boundary) {
    const double threshold = mu_c1(p);
    const bool present =
        include_boundary ? p.mu >= threshold : p.mu > threshold;
    if (!present) return std::nullopt;

    const double lz = break_even(p.f2, p.gamma2, p.D2);

    // Nutrient balance g(N) = (mu - N) D - lambda_Z f1(N). Strictly
    // decreasing (g' = -D - lambda_Z f1' < 0), g(0) = mu D > 0 and
    // g(mu) = -lambda_Z f1(mu) < 0, so the root is unique in (0, mu).
    // Assert the pattern rather than trusting it.
    auto g = [&](double N) { return (p.mu - N) * p.D - lz * p.f1(N); };
    auto dg = [&](double N) { return -p.D - lz * p.f1.eval(N, 1); };
    if (!(g(0.0) > 0.0) || !(g(p.mu) < 0.0))
        throw ContractViolationError(
            "coexistence: nutrient balance lost its guaranteed sign pattern "
            "on [0, mu]");

    double N = newton_bisect(g, dg, 0.0, p.mu, 1e-12);
    for (int k = 0; k < 4 && std::abs(g(N)) > 1e-14 * std::max(1.0, p.mu * p.D);
         ++k)
        N -= g(N) / dg(N);

    const double Z = (p.gamma2 / p.D2) * lz * (p.gamma1 * p.f1(N) - p.D1);
    return State{N, lz, std::max(Z, 0.0)};
}

EquilibriumSet equilibrium_set(const Parameters& p) {
    EquilibriumSet set;
    set.mu = p.mu;
    set.e0 = State{p.mu, 0.0, 0.0};
    set.lambda_P = break_even(p.f1, p.gamma1, p.D1);
    set.lambda_Z = break_even(p.f2, p.gamma2, p.D2);
    set.mu_c1 = mu_c1_value(set.lambda_P, set.lambda_Z, p.D, p.D1, p.gamma1);
    set.e1 = single_species(p);
    set.e2 = coexistence(p);
    return set;
}

}  // namespace chemostat
