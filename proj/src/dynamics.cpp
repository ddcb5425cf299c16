#include "chemostat/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace chemostat {

namespace {

struct Vec3 {
    double x[3];
    double& operator[](int i) { return x[i]; }
    double operator[](int i) const { return x[i]; }
};

// Right-hand side of the model. Stage values of an explicit step can poke
// marginally below zero near the axes; the response argument is clamped so
// those probes stay inside the curves' domain (f(0)=0 keeps the coordinate
// planes exactly invariant either way).
Vec3 rhs(const Parameters& p, const Vec3& y) {
    const double N = y[0], P = y[1], Z = y[2];
    const double f1 = p.f1(std::max(N, 0.0));
    const double f2 = p.f2(std::max(P, 0.0));
    return Vec3{{(p.mu - N) * p.D - P * f1,
                 p.gamma1 * P * f1 - p.D1 * P - Z * f2,
                 p.gamma2 * Z * f2 - p.D2 * Z}};
}

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// y5 - y4 weights (embedded error estimate)
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// dense-output weights of the continuous extension
constexpr double d1 = -12715105075.0 / 11282082432.0,
                 d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0,
                 d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0,
                 d7 = 69997945.0 / 29380423.0;

struct DenseCoeffs {
    double r1[3], r2[3], r3[3], r4[3], r5[3];

    Vec3 eval(double theta) const {
        Vec3 v;
        const double th1 = 1.0 - theta;
        for (int i = 0; i < 3; ++i)
            v[i] = r1[i] +
                   theta * (r2[i] + th1 * (r3[i] + theta * (r4[i] + th1 * r5[i])));
        return v;
    }
};

}  // namespace

Trajectory integrate(const Parameters& p, const State& init, double t_end,
                     double rel_tol, double abs_tol, int n_samples) {
    if (!(init.N > 0.0) || init.P < 0.0 || init.Z < 0.0)
        throw DomainError("integrate: initial state needs N0 > 0 and P0, Z0 >= 0");
    if (!(t_end > 0.0)) throw DomainError("integrate: t_end must be > 0");
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
        throw DomainError("integrate: tolerances must be > 0");
    if (n_samples < 1) throw DomainError("integrate: n_samples must be >= 1");

    Trajectory traj{{}, {}, p, {}};
    traj.times.reserve(n_samples + 1);
    traj.states.reserve(n_samples + 1);

    const double Dhat = std::min({p.D, p.D1, p.D2});
    const double u_bound =
        std::max(init.N + init.P / p.gamma1 + init.Z / (p.gamma1 * p.gamma2),
                 p.D * p.mu / Dhat) +
        1e-6;

    auto push_sample = [&](double t, Vec3 y) {
        for (int i = 0; i < 3; ++i) {
            if (y[i] < -1e-9)
                throw ModelViolationError(
                    "integrate: component " + std::to_string(i) + " = " +
                    std::to_string(y[i]) + " below the -1e-9 floor at t=" +
                    std::to_string(t) + " (tolerances too loose)");
            if (y[i] < 0.0) y[i] = 0.0;
        }
        const double U = y[0] + y[1] / p.gamma1 + y[2] / (p.gamma1 * p.gamma2);
        if (U > u_bound)
            throw ModelViolationError(
                "integrate: mass balance U(t) exceeded its envelope at t=" +
                std::to_string(t));
        traj.times.push_back(t);
        traj.states.push_back(State{y[0], y[1], y[2]});
    };

    Vec3 y{{init.N, init.P, init.Z}};
    double t = 0.0;
    push_sample(0.0, y);
    int next_sample = 1;

    Vec3 k1 = rhs(p, y);

    // initial step size: standard two-stage estimate from the scaled
    // magnitudes of y, f(y) and a trial Euler probe
    double h;
    {
        double dnf = 0.0, dny = 0.0;
        for (int i = 0; i < 3; ++i) {
            const double sc = abs_tol + rel_tol * std::abs(y[i]);
            dnf += (k1[i] / sc) * (k1[i] / sc);
            dny += (y[i] / sc) * (y[i] / sc);
        }
        h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6
                                           : 0.01 * std::sqrt(dny / dnf);
        h = std::min(h, t_end);
        Vec3 y1;
        for (int i = 0; i < 3; ++i) y1[i] = y[i] + h * k1[i];
        const Vec3 f1v = rhs(p, y1);
        double der2 = 0.0;
        for (int i = 0; i < 3; ++i) {
            const double sc = abs_tol + rel_tol * std::abs(y[i]);
            der2 += ((f1v[i] - k1[i]) / sc) * ((f1v[i] - k1[i]) / sc);
        }
        der2 = std::sqrt(der2) / h;
        const double der12 = std::max(der2, std::sqrt(dnf));
        const double h1 = der12 <= 1e-15
                              ? std::max(1e-6, h * 1e-3)
                              : std::pow(0.01 / der12, 0.2);
        h = std::min({100.0 * h, h1, t_end});
    }

    // PI controller constants (Lund stabilization)
    constexpr double safe = 0.9, beta = 0.04, expo1 = 0.2 - beta * 0.75;
    constexpr double facc1 = 1.0 / 0.2, facc2 = 1.0 / 10.0;
    double facold = 1e-4;
    bool rejected_last = false;
    const double eps = std::numeric_limits<double>::epsilon();
    const long max_steps = 50'000'000;

    while (t < t_end) {
        if (traj.stats.accepted + traj.stats.rejected > max_steps)
            throw StiffnessError("integrate: step budget exhausted");
        if (h < 16.0 * eps * std::max(std::abs(t), 1.0))
            throw StiffnessError("integrate: step size underflow at t=" +
                                 std::to_string(t));
        bool last = false;
        if (t + h >= t_end) {
            h = t_end - t;
            last = true;
        }

        Vec3 k2, k3, k4, k5, k6, k7, y_new, tmp;
        for (int i = 0; i < 3; ++i) tmp[i] = y[i] + h * a21 * k1[i];
        k2 = rhs(p, tmp);
        for (int i = 0; i < 3; ++i)
            tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        k3 = rhs(p, tmp);
        for (int i = 0; i < 3; ++i)
            tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        k4 = rhs(p, tmp);
        for (int i = 0; i < 3; ++i)
            tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] +
                                 a54 * k4[i]);
        k5 = rhs(p, tmp);
        for (int i = 0; i < 3; ++i)
            tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                                 a64 * k4[i] + a65 * k5[i]);
        k6 = rhs(p, tmp);
        for (int i = 0; i < 3; ++i)
            y_new[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] +
                                   b5 * k5[i] + b6 * k6[i]);
        k7 = rhs(p, y_new);  // FSAL

        double err = 0.0, err_abs = 0.0;
        for (int i = 0; i < 3; ++i) {
            const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                                  e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sc =
                abs_tol + rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
            err += (e / sc) * (e / sc);
            err_abs = std::max(err_abs, std::abs(e));
        }
        err = std::sqrt(err / 3.0);

        const double fac11 = std::pow(err, expo1);
        if (err <= 1.0) {
            // accepted; fill samples covered by this step from the
            // continuous extension before advancing
            facold = std::max(err, 1e-4);
            traj.stats.accepted += 1;
            traj.stats.max_error_estimate =
                std::max(traj.stats.max_error_estimate, err);
            traj.stats.accumulated_error += err_abs;

            DenseCoeffs dense;
            for (int i = 0; i < 3; ++i) {
                const double dy = y_new[i] - y[i];
                const double bspl = h * k1[i] - dy;
                dense.r1[i] = y[i];
                dense.r2[i] = dy;
                dense.r3[i] = bspl;
                dense.r4[i] = dy - h * k7[i] - bspl;
                dense.r5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] +
                                   d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
            }
            const double t_new = last ? t_end : t + h;
            while (next_sample <= n_samples) {
                const double ts = t_end * next_sample / n_samples;
                if (ts > t_new + 1e-14 * std::max(1.0, t_new)) break;
                push_sample(ts, dense.eval(std::clamp((ts - t) / h, 0.0, 1.0)));
                ++next_sample;
            }

            t = t_new;
            y = y_new;
            k1 = k7;
            double fac = fac11 / std::pow(facold, beta);
            fac = std::max(facc2, std::min(facc1, fac / safe));
            double h_new = h / fac;
            if (rejected_last) h_new = std::min(h_new, h);
            rejected_last = false;
            h = h_new;
        } else {
            traj.stats.rejected += 1;
            rejected_last = true;
            h = h / std::min(facc1, fac11 / safe);
        }
    }
    return traj;
}

DescentReport lyapunov_monitor_E0(const Trajectory& traj) {
    const Parameters& p = traj.params;
    DescentReport rep;
    rep.tolerance = 1e-8;
    rep.samples = static_cast<int>(traj.states.size());
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& s : traj.states) {
        if (std::abs(s.P) > 1e-9)
            throw DomainError(
                "lyapunov_monitor_E0: trajectory leaves the plane P = 0");
        const double L = 0.5 * (p.mu - s.N) * (p.mu - s.N) + 0.5 * s.Z * s.Z;
        if (L - prev > rep.max_increase) rep.max_increase = L - prev;
        prev = L;
    }
    rep.non_increasing = rep.max_increase <= rep.tolerance;
    return rep;
}

namespace {

// Adaptive Simpson on [a, b]; the integrands here are smooth so the
// recursion stays shallow.
double simpson_rec(const std::function<double(double)>& f, double a, double b,
                   double fa, double fm, double fb, double whole, double tol,
                   int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integral(const std::function<double(double)>& f, double a, double b,
                double tol) {
    if (a == b) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 40);
}

}  // namespace

DescentReport lyapunov_monitor_E1(const Trajectory& traj,
                                  const Parameters& p) {
    const double lp = break_even(p.f1, p.gamma1, p.D1);
    if (!(p.mu > lp))
        throw DomainError(
            "lyapunov_monitor_E1: needs mu > lambda_P so the prey "
            "equilibrium exists");
    const double p_star = (p.mu - lp) * p.D * p.gamma1 / p.D1;
    const double f1_lp = p.f1(lp);

    // nutrient term integrand (f1(s) - f1(lambda_P)) / f1(s); vanishes at
    // s = lambda_P, so the integral is well behaved around the equilibrium
    auto w = [&](double s) { return (p.f1(s) - f1_lp) / p.f1(s); };

    DescentReport rep;
    rep.tolerance = 1e-7;
    rep.samples = static_cast<int>(traj.states.size());
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& s : traj.states) {
        if (std::abs(s.Z) > 1e-9)
            throw DomainError(
                "lyapunov_monitor_E1: trajectory leaves the plane Z = 0");
        if (!(s.P > 0.0))
            throw DomainError("lyapunov_monitor_E1: sample with P <= 0");
        const double L = integral(w, lp, s.N, 1e-12) +
                         (s.P - p_star - p_star * std::log(s.P / p_star)) /
                             p.gamma1;
        if (L - prev > rep.max_increase) rep.max_increase = L - prev;
        prev = L;
    }
    rep.non_increasing = rep.max_increase <= rep.tolerance;
    return rep;
}

const char* to_string(CycleClass c) {
    switch (c) {
        case CycleClass::Equilibrium: return "Equilibrium";
        case CycleClass::LimitCycle: return "LimitCycle";
        default: return "Undetermined";
    }
}

CycleReport detect_cycle(const Trajectory& traj, const Parameters& p,
                         const CycleOptions& opts) {
    if (traj.states.size() < 2)
        throw DomainError("detect_cycle: trajectory too short");

    CycleReport rep;
    rep.section_level = break_even(p.f2, p.gamma2, p.D2);

    const double t_end = traj.times.back();
    const double t_start = t_end * opts.transient_fraction;
    std::size_t first = 0;
    while (first < traj.times.size() && traj.times[first] < t_start) ++first;
    if (first + 1 >= traj.states.size())
        throw DomainError("detect_cycle: nothing left after the transient");

    double p_min = std::numeric_limits<double>::infinity(), p_max = -p_min;
    for (std::size_t i = first; i < traj.states.size(); ++i) {
        p_min = std::min(p_min, traj.states[i].P);
        p_max = std::max(p_max, traj.states[i].P);
    }
    rep.amplitude = p_max - p_min;

    // upward crossings of the section, linearly interpolated in t
    std::vector<double> cross_t;
    std::vector<double> cyc_amp;  // per-cycle peak-to-peak between crossings
    double seg_min = 0.0, seg_max = 0.0;
    for (std::size_t i = first; i + 1 < traj.states.size(); ++i) {
        const double p0 = traj.states[i].P, p1 = traj.states[i + 1].P;
        if (!cross_t.empty()) {
            seg_min = std::min(seg_min, p1);
            seg_max = std::max(seg_max, p1);
        }
        if (p0 < rep.section_level && p1 >= rep.section_level) {
            const double frac = (rep.section_level - p0) / (p1 - p0);
            const double tc = traj.times[i] +
                              frac * (traj.times[i + 1] - traj.times[i]);
            if (!cross_t.empty()) cyc_amp.push_back(seg_max - seg_min);
            cross_t.push_back(tc);
            seg_min = seg_max = rep.section_level;
        }
    }
    rep.crossings = static_cast<int>(cross_t.size());

    if (rep.amplitude < opts.amp_floor) {
        rep.classification = CycleClass::Equilibrium;
        return rep;
    }
    if (rep.crossings < opts.min_crossings) {
        rep.classification = CycleClass::Undetermined;
        return rep;
    }

    std::vector<double> returns(cross_t.size() - 1);
    for (std::size_t i = 0; i + 1 < cross_t.size(); ++i)
        returns[i] = cross_t[i + 1] - cross_t[i];

    auto tail_spread = [&](const std::vector<double>& v) {
        const std::size_t k =
            std::min<std::size_t>(v.size(), static_cast<std::size_t>(opts.last_k));
        if (k < 2) return 0.0;
        double mn = v[v.size() - k], mx = mn, sum = 0.0;
        for (std::size_t i = v.size() - k; i < v.size(); ++i) {
            mn = std::min(mn, v[i]);
            mx = std::max(mx, v[i]);
            sum += v[i];
        }
        return (mx - mn) / (sum / k);
    };
    rep.spread = std::max(tail_spread(returns), tail_spread(cyc_amp));

    const std::size_t k =
        std::min<std::size_t>(returns.size(), static_cast<std::size_t>(opts.last_k));
    double sum = 0.0;
    for (std::size_t i = returns.size() - k; i < returns.size(); ++i)
        sum += returns[i];
    rep.period = sum / k;

    rep.classification = rep.spread < opts.spread_tol
                             ? CycleClass::LimitCycle
                             : CycleClass::Undetermined;
    return rep;
}

PersistenceReport persistence_check(const Trajectory& traj, double floor) {
    PersistenceReport rep;
    rep.floor = floor;
    if (traj.states.empty()) return rep;

    const Parameters& p = traj.params;
    const State& init = traj.states.front();
    rep.applicable = init.P > 0.0 && init.Z > 0.0 && p.mu > mu_c1(p);
    if (!rep.applicable) return rep;

    const double t_half = traj.times.back() * 0.5;
    rep.min_N = rep.min_P = rep.min_Z = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        if (traj.times[i] < t_half) continue;
        rep.min_N = std::min(rep.min_N, traj.states[i].N);
        rep.min_P = std::min(rep.min_P, traj.states[i].P);
        rep.min_Z = std::min(rep.min_Z, traj.states[i].Z);
    }
    rep.persistent =
        rep.min_N > floor && rep.min_P > floor && rep.min_Z > floor;
    return rep;
}

}  // namespace chemostat
