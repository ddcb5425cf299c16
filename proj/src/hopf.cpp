#include "chemostat/hopf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chemostat/parallel.hpp"

namespace chemostat {

namespace {

SpectrumFactorization spectrum_at(const Parameters& p, double mu) {
    return factorize(char_coeffs_E2(p.with_mu(mu)));
}

// Real part of the pair with the discriminant guard used inside brackets.
double re_pair_guarded(const Parameters& p, double mu) {
    const auto f = spectrum_at(p, mu);
    if (!(f.discriminant < 0.0))
        throw PairCollisionError(
            "complex pair degenerated to real roots at mu=" +
            std::to_string(mu));
    return 0.5 * f.gamma;
}

}  // namespace

RealPartCurve real_part_curve(const Parameters& p, double mu_lo, double mu_hi,
                              int n) {
    if (n < 2) throw DomainError("real_part_curve: n must be >= 2");
    if (!(mu_lo < mu_hi))
        throw DomainError("real_part_curve: mu_lo must be < mu_hi");
    const double threshold = mu_c1(p);
    if (!(mu_lo > threshold))
        throw ExistenceError(
            "real_part_curve: grid starts at or below mu_c1=" +
            std::to_string(threshold));

    RealPartCurve curve;
    curve.mu_grid.resize(n);
    curve.re_pair.resize(n);
    curve.alpha_track.resize(n);
    curve.discriminants.resize(n);
    for (int i = 0; i < n; ++i)
        curve.mu_grid[i] = mu_lo + (mu_hi - mu_lo) * i / (n - 1);

    // Eigenvalues per grid point are independent; the assignment pass below
    // is sequential but trivial.
    std::vector<std::array<Complex, 3>> spectra(n);
    parallel_for(n, [&](std::size_t i) {
        try {
            spectra[i] = eigenvalues(char_coeffs_E2(p.with_mu(curve.mu_grid[i])));
        } catch (const Error& e) {
            throw FactorizationDomainError(std::string(e.what()) + " (at mu=" +
                                           std::to_string(curve.mu_grid[i]) +
                                           ")");
        }
    });

    // Assignment: at the first point use the factorization rule (most
    // negative real root is alpha); afterwards keep alpha on the real root
    // closest to its previous value, which minimizes total displacement of
    // the (alpha, pair) assignment between neighbors.
    double alpha_prev = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto& roots = spectra[i];
        double scale = 1.0;
        for (const auto& r : roots) scale = std::max(scale, std::abs(r));

        int pick = -1;
        for (int j = 0; j < 3; ++j) {
            if (std::abs(roots[j].imag()) >= 1e-8 * scale) continue;
            if (pick < 0) {
                pick = j;
                continue;
            }
            const bool better =
                i == 0 ? roots[j].real() < roots[pick].real()
                       : std::abs(roots[j].real() - alpha_prev) <
                             std::abs(roots[pick].real() - alpha_prev);
            if (better) pick = j;
        }
        if (pick < 0)
            throw FactorizationDomainError(
                "real_part_curve: no real root at mu=" +
                std::to_string(curve.mu_grid[i]));

        const Complex r1 = roots[(pick + 1) % 3];
        const Complex r2 = roots[(pick + 2) % 3];
        const double gamma = (r1 + r2).real();
        const double beta = (r1 * r2).real();
        alpha_prev = roots[pick].real();
        curve.alpha_track[i] = alpha_prev;
        curve.re_pair[i] = 0.5 * gamma;
        curve.discriminants[i] = gamma * gamma - 4.0 * beta;
    }
    return curve;
}

std::pair<double, double> default_bracket(const Parameters& p) {
    const double lp = break_even(p.f1, p.gamma1, p.D1);
    const double lz = break_even(p.f2, p.gamma2, p.D2);
    const double mc1 = mu_c1_value(lp, lz, p.D, p.D1, p.gamma1);
    return {mc1 * 1.05, mc1 + 10.0 * (mc1 - lp)};
}

std::vector<std::pair<double, double>> scan_sign_changes(const Parameters& p,
                                                         double lo, double hi,
                                                         int n) {
    const auto curve = real_part_curve(p, lo, hi, n);
    std::vector<std::pair<double, double>> brackets;
    for (int i = 0; i + 1 < n; ++i) {
        if (curve.re_pair[i] == 0.0) continue;  // grid hit the root exactly
        if (curve.re_pair[i] * curve.re_pair[i + 1] <= 0.0)
            brackets.emplace_back(curve.mu_grid[i], curve.mu_grid[i + 1]);
    }
    return brackets;
}

HopfCertificate find_hopf(const Parameters& p,
                          std::pair<double, double> bracket) {
    double lo = bracket.first, hi = bracket.second;
    if (!(lo < hi)) throw DomainError("find_hopf: empty bracket");

    // The pair must stay complex across the bracket; probe a modest grid in
    // addition to every point the solver itself visits.
    for (int i = 0; i <= 32; ++i)
        re_pair_guarded(p, lo + (hi - lo) * i / 32.0);

    double flo = re_pair_guarded(p, lo);
    double fhi = re_pair_guarded(p, hi);
    if (flo == 0.0) {
        hi = lo;
        fhi = flo;
    } else if (flo * fhi > 0.0) {
        throw BracketError("find_hopf: Re(pair) has the same sign at both "
                           "bracket endpoints");
    }

    double a = lo, b = hi, fa = flo;
    for (int it = 0; it < 200 && b - a > 1e-13 * std::max(1.0, b); ++it) {
        const double mid = 0.5 * (a + b);
        const double fm = re_pair_guarded(p, mid);
        if (fa * fm <= 0.0) {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    double mu_c2 = 0.5 * (a + b);

    // Secant polish from the bisection endpoints; keeps iterates inside
    // [a, b] where the discriminant guard has already passed.
    {
        double x0 = a, x1 = b;
        double f0 = re_pair_guarded(p, x0), f1v = re_pair_guarded(p, x1);
        for (int it = 0; it < 8 && std::abs(f1v) > 0.0; ++it) {
            const double denom = f1v - f0;
            if (denom == 0.0) break;
            double x2 = x1 - f1v * (x1 - x0) / denom;
            if (!(x2 >= a && x2 <= b)) break;
            x0 = x1;
            f0 = f1v;
            x1 = x2;
            f1v = re_pair_guarded(p, x1);
        }
        if (std::abs(f1v) <= std::abs(re_pair_guarded(p, mu_c2))) mu_c2 = x1;
    }
    if (std::abs(re_pair_guarded(p, mu_c2)) > 1e-10)
        throw TransversalityError(
            "find_hopf: could not drive |Re(pair)| below 1e-10 (crossing too "
            "shallow for the bracket)");

    HopfCertificate cert;
    cert.mu_c2 = mu_c2;
    cert.bracket = bracket;

    const double h = 1e-6 * (bracket.second - bracket.first);
    cert.re_slope =
        (re_pair_guarded(p, mu_c2 + h) - re_pair_guarded(p, mu_c2 - h)) /
        (2.0 * h);
    if (!(cert.re_slope > 0.0))
        throw TransversalityError("find_hopf: crossing slope is not positive");

    const auto f = spectrum_at(p, mu_c2);
    cert.alpha_at_crossing = f.alpha;
    cert.discriminant_at_crossing = f.discriminant;
    if (!(f.discriminant < 0.0))
        throw PairCollisionError("find_hopf: discriminant not negative at the "
                                 "located crossing");
    cert.imag_at_crossing = 0.5 * std::sqrt(-f.discriminant);
    if (!(cert.imag_at_crossing > 0.0))
        throw PairCollisionError("find_hopf: crossing frequency is zero");
    if (!(cert.alpha_at_crossing < 0.0))
        throw FactorizationDomainError(
            "find_hopf: real eigenvalue nonnegative at the crossing");

    // Equal removal rates admit an independent route to the same crossing:
    // the zero of A. The two must agree; disagreement means the
    // factorization chain and the closed formulas have diverged.
    if (p.equal_removal_rates()) {
        double aa = bracket.first, bb = bracket.second;
        double fA = abc_equal_removal(p, aa).A;
        const double fB = abc_equal_removal(p, bb).A;
        if (fA == 0.0) {
            bb = aa;
        } else if (fA * fB > 0.0) {
            throw ContractViolationError(
                "find_hopf: A(mu) does not change sign over the bracket "
                "although Re(pair) does");
        }
        for (int it = 0; it < 200 && bb - aa > 1e-14 * std::max(1.0, bb);
             ++it) {
            const double mid = 0.5 * (aa + bb);
            const double fm = abc_equal_removal(p, mid).A;
            if (fA * fm <= 0.0) {
                bb = mid;
            } else {
                aa = mid;
                fA = fm;
            }
        }
        const double mu_from_A = 0.5 * (aa + bb);
        if (std::abs(mu_from_A - mu_c2) > 1e-8)
            throw ContractViolationError(
                "find_hopf: zero of A and zero of Re(pair) disagree: " +
                std::to_string(mu_from_A) + " vs " + std::to_string(mu_c2));
    }

    cert.hypothesis_flags = hypothesis_predicates(p, mu_c2);
    return cert;
}

HopfCertificate locate_hopf(const Parameters& p) {
    const auto [lo, hi] = default_bracket(p);
    const auto brackets = scan_sign_changes(p, lo, hi, 200);
    if (brackets.empty())
        throw BracketError(
            "locate_hopf: no sign change of Re(pair) on the default bracket [" +
            std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return find_hopf(p, brackets.front());
}

HypothesisFlags hypothesis_predicates(const Parameters& p,
                                      std::optional<double> mu_crossing) {
    HypothesisFlags flags;

    // Break-even of the predator at the dilution rate D (not D2): the
    // equal-removal analysis pins the crossing frequency through lambda_Z(D).
    const double lzD = break_even(p.f2, p.gamma2, p.D);
    flags.concavity_condition =
        p.D / (p.gamma2 * lzD) > p.f2.eval(lzD, 1);

    if (mu_crossing) {
        const auto e2 = coexistence(p.with_mu(*mu_crossing));
        if (!e2)
            throw ExistenceError(
                "hypothesis_predicates: no coexistence equilibrium at the "
                "supplied crossing");
        flags.f1_second_negative_at_crossing = p.f1.eval(e2->N, 2) < 0.0;
    }

    flags.f1_concave_global = true;
    for (double x = 1e-3; x < 2e4; x *= 1.5) {
        if (p.f1.eval(x, 2) >= 0.0) {
            flags.f1_concave_global = false;
            break;
        }
    }
    return flags;
}

AppendixReport appendix_bound_check(const Parameters& p,
                                    const std::vector<double>& radii,
                                    int samples_per_circle,
                                    std::pair<double, double> mu_interval,
                                    int mu_samples) {
    if (!p.equal_removal_rates())
        throw DomainError("appendix_bound_check: base parameters must have "
                          "D1 = D2 = D");
    if (samples_per_circle < 1 || mu_samples < 1)
        throw DomainError("appendix_bound_check: sample counts must be >= 1");

    AppendixReport report;
    for (double radius : radii) {
        if (!(radius > 0.0) || radius >= p.D)
            throw DomainError("appendix_bound_check: radii must lie in (0, D)");

        struct Task {
            double D1, D2, mu;
        };
        std::vector<Task> tasks;
        for (int k = 0; k < samples_per_circle; ++k) {
            const double th = 2.0 * M_PI * k / samples_per_circle;
            const double D1 = p.D + radius * std::cos(th);
            const double D2 = p.D + radius * std::sin(th);
            const Parameters q = p.with_removal_rates(D1, D2);
            const double threshold = mu_c1(q);
            const double h = 1e-5 * std::max(1.0, mu_interval.first);
            if (!(mu_interval.first - h > threshold))
                throw ExistenceError(
                    "appendix_bound_check: mu interval reaches below mu_c1=" +
                    std::to_string(threshold) + " at (D1,D2)=(" +
                    std::to_string(D1) + "," + std::to_string(D2) + ")");
            for (int j = 0; j < mu_samples; ++j) {
                const double mu =
                    mu_samples == 1
                        ? mu_interval.first
                        : mu_interval.first + (mu_interval.second -
                                               mu_interval.first) *
                                                  j / (mu_samples - 1);
                tasks.push_back({D1, D2, mu});
            }
        }

        std::vector<AppendixSample> rows(tasks.size());
        parallel_for(tasks.size(), [&](std::size_t i) {
            const auto& t = tasks[i];
            const Parameters q = p.with_removal_rates(t.D1, t.D2);
            const double h = 1e-5 * std::max(1.0, t.mu);
            const double g_hi = spectrum_at(q, t.mu + h).gamma;
            const double g_lo = spectrum_at(q, t.mu - h).gamma;
            const double gprime = (g_hi - g_lo) / (2.0 * h);
            const double aprime = abc_equal_removal(p, t.mu).Aprime;
            const double diff = std::abs(gprime - aprime);
            rows[i] = AppendixSample{radius, t.D1,          t.D2,
                                     t.mu,   gprime,        aprime,
                                     diff,   diff / radius};
        });

        AppendixReport::PerRadius pr{radius, 0.0, 0.0};
        for (const auto& row : rows) {
            pr.max_abs_diff = std::max(pr.max_abs_diff, row.abs_diff);
            pr.max_ratio = std::max(pr.max_ratio, row.ratio);
            report.samples.push_back(row);
        }
        report.per_radius.push_back(pr);
    }
    return report;
}

}  // namespace chemostat
