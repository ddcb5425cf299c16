#pragma once

#include <optional>

#include "chemostat/parameters.hpp"
#include "chemostat/state.hpp"

namespace chemostat {

// The three rest points at a given feed concentration. e1/e2 are engaged
// only when their existence thresholds are strictly exceeded.
struct EquilibriumSet {
    double mu;
    State e0;                 // washout: (mu, 0, 0)
    std::optional<State> e1;  // prey only: (lambda_P, P*, 0), needs mu > lambda_P
    std::optional<State> e2;  // coexistence: (N*, lambda_Z, Z*), needs mu > mu_c1
    double lambda_P;
    double lambda_Z;
    double mu_c1;
};

// Unique lambda with gamma*f(lambda) = Di. Throws NoBreakEvenError when
// Di >= gamma*sup(f). Residual |gamma*f(lambda) - Di| <= 1e-12*Di.
double break_even(const Response& r, double gamma, double Di);

// d(lambda)/d(Di) = 1/(gamma*f'(lambda)): the break-even map is the inverse
// of gamma*f, so its derivative is the reciprocal slope.
double lambda_prime(const Response& r, double gamma, double lambda);

// Coexistence threshold lambda_P(D1) + D1*lambda_Z(D2)/(D*gamma1).
double mu_c1(const Parameters& p);
// Same expression on raw inputs; kept separate so degenerate combinations
// (lambda_Z = 0) remain expressible in tests.
double mu_c1_value(double lambda_P, double lambda_Z, double D, double D1,
                   double gamma1);

// Prey-only equilibrium (lambda_P(D1), (mu - lambda_P)*D*gamma1/D1, 0).
// Present iff mu > lambda_P(D1); `include_boundary` admits equality, where
// the point coincides with e0's boundary (P = 0).
std::optional<State> single_species(const Parameters& p,
                                    bool include_boundary = false);

// Interior equilibrium (N*, lambda_Z(D2), Z*). N* solves
// (mu - N) D = lambda_Z f1(N) on (0, mu); Z* from the prey balance.
// Present iff mu > mu_c1; `include_boundary` admits equality, where the
// point degenerates to e1 (Z* = 0).
std::optional<State> coexistence(const Parameters& p,
                                 bool include_boundary = false);

EquilibriumSet equilibrium_set(const Parameters& p);

}  // namespace chemostat
