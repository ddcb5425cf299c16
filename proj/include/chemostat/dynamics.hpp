#pragma once

#include <vector>

#include "chemostat/equilibria.hpp"

namespace chemostat {

struct IntegratorStats {
    long accepted = 0;
    long rejected = 0;
    // largest scaled local error of an accepted step (<= 1 by construction)
    double max_error_estimate = 0.0;
    // sum of per-step local error magnitudes (max norm); crude forward
    // error proxy used by the step-halving consistency check
    double accumulated_error = 0.0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<State> states;
    Parameters params;
    IntegratorStats stats;
};

// Adaptive Dormand-Prince 5(4) with PI step control; samples on a uniform
// grid of n_samples+1 points through the dense-output interpolant. Samples
// are clipped to 0 within -1e-9; anything lower, or a break of the
// mass-balance envelope U <= max(U(0), D mu / min(D,D1,D2)) + 1e-6, aborts
// the run (the model guarantees both, so a violation means the tolerances
// are too loose).
Trajectory integrate(const Parameters& p, const State& init, double t_end,
                     double rel_tol = 1e-8, double abs_tol = 1e-10,
                     int n_samples = 2000);

struct DescentReport {
    bool non_increasing = false;
    double max_increase = 0.0;  // largest single-step increase of L
    double tolerance = 0.0;
    int samples = 0;
};

// L = (mu-N)^2/2 + Z^2/2 along a trajectory confined to the plane P = 0;
// non-increasing up to 1e-8 per step.
DescentReport lyapunov_monitor_E0(const Trajectory& traj);

// Hsu's function along a trajectory confined to the plane Z = 0 (needs
// mu > lambda_P so the prey equilibrium exists; tolerance 1e-7 per step).
// The nutrient integral term is evaluated by adaptive quadrature.
DescentReport lyapunov_monitor_E1(const Trajectory& traj,
                                  const Parameters& p);

enum class CycleClass { Equilibrium, LimitCycle, Undetermined };
const char* to_string(CycleClass c);

struct CycleOptions {
    double transient_fraction = 0.5;
    int min_crossings = 4;
    double amp_floor = 1e-3;
    double spread_tol = 1e-3;
    int last_k = 5;  // return times / amplitudes entering the spread metric
};

struct CycleReport {
    CycleClass classification = CycleClass::Undetermined;
    double amplitude = 0.0;  // peak-to-peak of P over the post-transient tail
    double period = 0.0;     // mean Poincare return time (last_k returns)
    double spread = 0.0;     // relative spread of return times / amplitudes
    int crossings = 0;       // upward crossings of the section in the tail
    double section_level = 0.0;  // P = lambda_Z(D2)
};

// Discards the transient, collects upward crossings of P = lambda_Z(D2)
// (E2's prey coordinate, so the section is guaranteed to cut cycles around
// it), and classifies: amplitude below amp_floor -> Equilibrium; enough
// crossings with converged return times -> LimitCycle; else Undetermined.
CycleReport detect_cycle(const Trajectory& traj, const Parameters& p,
                         const CycleOptions& opts = {});

struct PersistenceReport {
    bool applicable = false;  // requires P0 > 0, Z0 > 0, mu > mu_c1
    double min_N = 0.0, min_P = 0.0, min_Z = 0.0;
    double floor = 0.0;
    bool persistent = false;
};

// Trailing-half minima of all three components against a positivity floor.
PersistenceReport persistence_check(const Trajectory& traj,
                                    double floor = 1e-6);

}  // namespace chemostat
