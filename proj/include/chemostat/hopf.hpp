#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "chemostat/stability.hpp"

namespace chemostat {

// Spectrum of the coexistence equilibrium swept over mu, with the real
// eigenvalue and the pair tracked by continuity between grid points.
struct RealPartCurve {
    std::vector<double> mu_grid;
    std::vector<double> re_pair;        // gamma(mu)/2
    std::vector<double> alpha_track;    // real eigenvalue
    std::vector<double> discriminants;  // gamma^2 - 4 beta
};

struct HypothesisFlags {
    // secant-vs-tangent at the predator break-even: D/(gamma2 lambda_Z(D))
    // exceeds f2'(lambda_Z(D)). Automatic for concave f2, must be checked
    // for sigmoidal ones.
    bool concavity_condition = false;
    // f1''(N(mu_c2)) < 0; only meaningful once a crossing is known.
    std::optional<bool> f1_second_negative_at_crossing;
    // f1'' < 0 on a sampled grid: the uniqueness hint for the crossing.
    bool f1_concave_global = false;
};

struct HopfCertificate {
    double mu_c2 = 0.0;
    std::pair<double, double> bracket{0.0, 0.0};
    double re_slope = 0.0;            // d(Re pair)/dmu at mu_c2, > 0
    double imag_at_crossing = 0.0;    // omega > 0
    double alpha_at_crossing = 0.0;   // < 0
    double discriminant_at_crossing = 0.0;  // < 0
    HypothesisFlags hypothesis_flags;
};

// Per-sample row of the appendix ratio check, kept for CSV emission.
struct AppendixSample {
    double radius, D1, D2, mu;
    double gamma_prime, A_prime, abs_diff, ratio;
};

struct AppendixReport {
    struct PerRadius {
        double radius;
        double max_abs_diff;
        double max_ratio;  // max |gamma' - A'| / dist over the circle
    };
    std::vector<PerRadius> per_radius;
    std::vector<AppendixSample> samples;
    // bounded constant: max over radii of max_ratio stays within a factor
    // of 2 of the min (checked by callers; the report just carries data)
};

RealPartCurve real_part_curve(const Parameters& p, double mu_lo, double mu_hi,
                              int n);

// Heuristic default search interval [mu_c1*1.05, mu_c1 + 10*(mu_c1 - lambda_P)].
std::pair<double, double> default_bracket(const Parameters& p);

// All sign-change subintervals of Re(pair) on an n-point grid; the crossing
// need not be unique, so callers pick which one to refine.
std::vector<std::pair<double, double>> scan_sign_changes(const Parameters& p,
                                                         double lo, double hi,
                                                         int n);

// Bisection + secant polish of Re(pair)(mu) = 0 inside the bracket, with
// the full certificate checks (slope, omega, alpha, discriminant, and the
// equal-removal crossing consistency against the zero of A).
HopfCertificate find_hopf(const Parameters& p,
                          std::pair<double, double> bracket);

// Convenience: default bracket, grid refinement, then find_hopf on the
// first sign change.
HopfCertificate locate_hopf(const Parameters& p);

HypothesisFlags hypothesis_predicates(const Parameters& p,
                                      std::optional<double> mu_crossing = {});

// |gamma'(D1,D2)(mu) - A'(mu)| over circles of the given radii around
// (D,D), ratio to the circle distance per radius. gamma' by central finite
// difference with h = 1e-5 * max(1, mu).
AppendixReport appendix_bound_check(const Parameters& p,
                                    const std::vector<double>& radii,
                                    int samples_per_circle,
                                    std::pair<double, double> mu_interval,
                                    int mu_samples = 11);

}  // namespace chemostat
