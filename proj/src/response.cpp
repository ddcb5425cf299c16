#include "chemostat/parameters.hpp"
#include "chemostat/response.hpp"

#include <cmath>
#include <string>

namespace chemostat {

namespace {

// Holling II: f = m x / (a + x). Successive derivatives keep the factor
// m a / (a + x)^k.
double holling2_eval(double m, double a, double x, int order) {
    const double s = a + x;
    switch (order) {
        case 0: return m * x / s;
        case 1: return m * a / (s * s);
        case 2: return -2.0 * m * a / (s * s * s);
        default: return 6.0 * m * a / (s * s * s * s);
    }
}

// Holling III: f = m x^2 / (a + x^2); sigmoidal, inflection at x = sqrt(a/3).
double holling3_eval(double m, double a, double x, int order) {
    const double s = a + x * x;
    switch (order) {
        case 0: return m * x * x / s;
        case 1: return 2.0 * m * a * x / (s * s);
        case 2: return 2.0 * m * a * (a - 3.0 * x * x) / (s * s * s);
        default: return 24.0 * m * a * x * (x * x - a) / (s * s * s * s);
    }
}

}  // namespace

Response Response::holling2(double m, double alpha) {
    if (!(m > 0.0) || !(alpha > 0.0))
        throw DomainError("holling2: m and alpha must be positive");
    Response r;
    r.kind_ = ResponseKind::HollingII;
    r.m_ = m;
    r.alpha_ = alpha;
    r.sup_ = m;
    return r;
}

Response Response::holling3(double m, double alpha) {
    if (!(m > 0.0) || !(alpha > 0.0))
        throw DomainError("holling3: m and alpha must be positive");
    Response r;
    r.kind_ = ResponseKind::HollingIII;
    r.m_ = m;
    r.alpha_ = alpha;
    r.sup_ = m;
    return r;
}

Response Response::custom(Fn value, std::vector<Fn> derivs, double supremum) {
    if (!value) throw DomainError("custom response: value handle is empty");
    if (!(supremum > 0.0))
        throw DomainError("custom response: supremum must be positive");

    // Model assumptions are not recoverable later, so spot-check them now:
    // f(0) = 0, f increasing, f below its declared supremum. A log-spaced
    // grid catches decreasing or unbounded curves without pretending to be
    // a proof.
    const double f0 = value(0.0);
    if (std::abs(f0) > 1e-12 * std::max(1.0, supremum))
        throw DomainError("custom response: value(0) != 0");
    double prev_x = 0.0, prev_f = f0;
    for (double x = 1e-3; x < 2e4; x *= 4.0) {
        const double fx = value(x);
        if (!(fx > prev_f))
            throw DomainError("custom response: not strictly increasing on [" +
                              std::to_string(prev_x) + ", " + std::to_string(x) + "]");
        if (fx >= supremum * (1.0 + 1e-12))
            throw DomainError("custom response: exceeds declared supremum at x=" +
                              std::to_string(x));
        prev_x = x;
        prev_f = fx;
    }

    Response r;
    r.kind_ = ResponseKind::Custom;
    r.sup_ = supremum;
    r.value_ = std::move(value);
    r.derivs_ = std::move(derivs);
    return r;
}

double Response::eval(double x, int order) const {
    if (x < 0.0) throw DomainError("response eval: x < 0");
    if (order < 0 || order > 3)
        throw DomainError("response eval: order must be in 0..3");

    switch (kind_) {
        case ResponseKind::HollingII: return holling2_eval(m_, alpha_, x, order);
        case ResponseKind::HollingIII: return holling3_eval(m_, alpha_, x, order);
        case ResponseKind::Custom: break;
    }
    if (order == 0) return value_(x);
    if (static_cast<size_t>(order) > derivs_.size() || !derivs_[order - 1])
        throw CapabilityError("custom response: derivative of order " +
                              std::to_string(order) + " not supplied");
    return derivs_[order - 1](x);
}

Parameters::Parameters(double mu_, double D_, double D1_, double D2_,
                       double gamma1_, double gamma2_, Response f1_, Response f2_)
    : mu(mu_), D(D_), D1(D1_), D2(D2_), gamma1(gamma1_), gamma2(gamma2_),
      f1(std::move(f1_)), f2(std::move(f2_)) {
    if (!(mu >= 0.0)) throw DomainError("parameters: mu must be >= 0");
    if (!(D > 0.0) || !(D1 > 0.0) || !(D2 > 0.0))
        throw DomainError("parameters: D, D1, D2 must be > 0");
    if (!(gamma1 > 0.0) || !(gamma2 > 0.0))
        throw DomainError("parameters: gamma1, gamma2 must be > 0");
    if (!(gamma1 * f1.supremum() > D1))
        throw DomainError("parameters: gamma1*sup(f1) <= D1, prey cannot break even");
    if (!(gamma2 * f2.supremum() > D2))
        throw DomainError("parameters: gamma2*sup(f2) <= D2, predator cannot break even");
}

Parameters Parameters::with_mu(double new_mu) const {
    Parameters q = *this;
    q.mu = new_mu;
    if (!(new_mu >= 0.0)) throw DomainError("parameters: mu must be >= 0");
    return q;
}

Parameters Parameters::with_removal_rates(double new_D1, double new_D2) const {
    return Parameters(mu, D, new_D1, new_D2, gamma1, gamma2, f1, f2);
}

}  // namespace chemostat
