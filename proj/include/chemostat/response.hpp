#pragma once

#include <functional>
#include <vector>

#include "chemostat/errors.hpp"

namespace chemostat {

enum class ResponseKind { HollingII, HollingIII, Custom };

// Per-capita uptake curve f with f(0) = 0, f strictly increasing and a
// finite supremum. Holling families carry closed-form derivatives up to
// order 3 (differentiating them numerically would put noise straight into
// the bifurcation slope); custom curves supply whatever orders they have.
class Response {
  public:
    using Fn = std::function<double(double)>;

    static Response holling2(double m, double alpha);
    static Response holling3(double m, double alpha);
    // derivs[k] is the derivative of order k+1; pass fewer entries if the
    // curve does not support the higher orders.
    static Response custom(Fn value, std::vector<Fn> derivs, double supremum);

    // order 0 = value, 1..3 = derivatives
    double eval(double x, int order = 0) const;
    double operator()(double x) const { return eval(x, 0); }

    double supremum() const { return sup_; }
    ResponseKind kind() const { return kind_; }
    double max_rate() const { return m_; }
    double half_saturation() const { return alpha_; }

  private:
    Response() = default;

    ResponseKind kind_ = ResponseKind::Custom;
    double m_ = 0.0;      // Holling max rate
    double alpha_ = 0.0;  // Holling half-saturation
    double sup_ = 0.0;
    Fn value_;
    std::vector<Fn> derivs_;
};

}  // namespace chemostat
