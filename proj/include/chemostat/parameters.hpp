#pragma once

#include "chemostat/response.hpp"

namespace chemostat {

// Full parameterization of the nutrient-prey-predator chemostat:
//
//   N' = (mu - N) D - P f1(N)
//   P' = gamma1 P f1(N) - D1 P - Z f2(P)
//   Z' = gamma2 Z f2(P) - D2 Z
//
// The constructor rejects any set where a consumer could never break even
// (gamma1 sup f1 <= D1 or gamma2 sup f2 <= D2): every downstream threshold
// computation divides by quantities that exist only under these conditions.
struct Parameters {
    double mu;              // feed concentration (>= 0)
    double D;               // dilution / washout rate (> 0)
    double D1, D2;          // prey / predator removal rates (> 0)
    double gamma1, gamma2;  // yield coefficients (> 0)
    Response f1, f2;        // nutrient uptake by prey, prey uptake by predator

    Parameters(double mu, double D, double D1, double D2, double gamma1,
               double gamma2, Response f1, Response f2);

    Parameters with_mu(double new_mu) const;
    Parameters with_removal_rates(double new_D1, double new_D2) const;

    bool equal_removal_rates() const { return D1 == D && D2 == D; }
};

}  // namespace chemostat
