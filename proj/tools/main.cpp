// Command-line front end: analyze | scan | hopf | simulate | verify.
// All numeric output is formatted with %.17g so re-runs are byte-identical.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "chemostat/config.hpp"
#include "chemostat/dynamics.hpp"
#include "chemostat/hopf.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace chemostat;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file '" + path.string() + "'");
    out << content;
    if (!out) throw ConfigError("failed writing '" + path.string() + "'");
}

fs::path prepare_out_dir(const std::string& out_dir) {
    fs::path dir(out_dir);
    fs::create_directories(dir);
    return dir;
}

Stability classify_spectrum(const std::array<Complex, 3>& ev) {
    double re_max = ev[0].real(), scale = 1.0;
    for (const auto& e : ev) {
        re_max = std::max(re_max, e.real());
        scale = std::max(scale, std::abs(e));
    }
    if (re_max > 1e-9 * scale) return Stability::Unstable;
    if (re_max < -1e-9 * scale) return Stability::Stable;
    return Stability::Marginal;
}

json spectrum_json(const std::array<Complex, 3>& ev) {
    json arr = json::array();
    for (const auto& e : ev) arr.push_back({{"re", e.real()}, {"im", e.imag()}});
    return arr;
}

// ---------------------------------------------------------------- analyze

int cmd_analyze(const RunConfig& cfg, const std::string& out_dir) {
    if (cfg.mu_range)
        throw ConfigError("parameters.mu: analyze needs a scalar mu, not a range");
    const Parameters& p = cfg.params;
    const EquilibriumSet eq = equilibrium_set(p);

    json out;
    out["mu"] = eq.mu;
    out["lambda_P"] = eq.lambda_P;
    out["lambda_Z"] = eq.lambda_Z;
    out["mu_c1"] = eq.mu_c1;
    json eqs = json::array();

    std::printf("mu       = %s\n", fmt(eq.mu).c_str());
    std::printf("lambda_P = %s\n", fmt(eq.lambda_P).c_str());
    std::printf("lambda_Z = %s\n", fmt(eq.lambda_Z).c_str());
    std::printf("mu_c1    = %s\n\n", fmt(eq.mu_c1).c_str());

    auto emit = [&](const char* name, const State& s) {
        const auto ev = eigenvalues(characteristic_cubic(jacobian(p, s)));
        const Stability cls = classify_spectrum(ev);
        std::printf("%s  N=%s  P=%s  Z=%s\n", name, fmt(s.N).c_str(),
                    fmt(s.P).c_str(), fmt(s.Z).c_str());
        std::printf("    %s; eigenvalues", to_string(cls));
        for (const auto& e : ev)
            std::printf("  (%s %c %si)", fmt6(e.real()).c_str(),
                        e.imag() < 0 ? '-' : '+', fmt6(std::abs(e.imag())).c_str());
        std::printf("\n");
        eqs.push_back({{"name", name},
                       {"state", {{"N", s.N}, {"P", s.P}, {"Z", s.Z}}},
                       {"eigenvalues", spectrum_json(ev)},
                       {"classification", to_string(cls)}});
    };

    emit("E0", eq.e0);
    if (eq.e1) emit("E1", *eq.e1);
    else std::printf("E1  absent (needs mu > lambda_P)\n");
    if (eq.e2) emit("E2", *eq.e2);
    else std::printf("E2  absent (needs mu > mu_c1)\n");

    out["equilibria"] = eqs;
    write_file(prepare_out_dir(out_dir) / "analysis.json", out.dump(2) + "\n");
    return 0;
}

// ------------------------------------------------------------------- scan

int cmd_scan(const RunConfig& cfg, const std::string& out_dir) {
    if (!cfg.mu_range)
        throw ConfigError("parameters.mu: scan needs a {lo, hi, n} range");
    const Parameters& p = cfg.params;
    const MuRange r = *cfg.mu_range;
    const double threshold = mu_c1(p);

    // keep only grid points where the interior equilibrium exists
    const double step = (r.hi - r.lo) / (r.n - 1);
    int first = 0;
    while (first < r.n &&
           r.lo + step * first <= threshold + 1e-9 * std::max(1.0, threshold))
        ++first;
    if (r.n - first < 2)
        throw ExistenceError(
            "scan: the mu range lies at or below mu_c1 = " + fmt(threshold));
    if (first > 0)
        std::fprintf(stderr,
                     "warning: trimmed %d grid point(s) at or below mu_c1 = %s "
                     "(no interior equilibrium there)\n",
                     first, fmt(threshold).c_str());

    const double lo = r.lo + step * first;
    const int n = r.n - first;
    const RealPartCurve curve = real_part_curve(p, lo, r.hi, n);

    std::string csv = "mu,N,Z,re_pair,im_pair,alpha,discriminant,classification\n";
    for (int i = 0; i < n; ++i) {
        const Parameters pi = p.with_mu(curve.mu_grid[i]);
        const auto e2 = coexistence(pi);
        const Stability cls = routh_hurwitz(char_coeffs_E2(pi));
        const double disc = curve.discriminants[i];
        const double im = disc < 0.0 ? 0.5 * std::sqrt(-disc) : 0.0;
        csv += fmt(curve.mu_grid[i]) + "," + fmt(e2->N) + "," + fmt(e2->Z) +
               "," + fmt(curve.re_pair[i]) + "," + fmt(im) + "," +
               fmt(curve.alpha_track[i]) + "," + fmt(disc) + "," +
               to_string(cls) + "\n";
    }
    const fs::path path = prepare_out_dir(out_dir) / "scan.csv";
    write_file(path, csv);
    std::printf("wrote %s (%d rows)\n", path.string().c_str(), n);
    return 0;
}

// ------------------------------------------------------------------- hopf

json certificate_json(const HopfCertificate& c) {
    json h;
    h["concavity_condition"] = c.hypothesis_flags.concavity_condition;
    h["f1_concave_global"] = c.hypothesis_flags.f1_concave_global;
    if (c.hypothesis_flags.f1_second_negative_at_crossing)
        h["f1_second_negative_at_crossing"] =
            *c.hypothesis_flags.f1_second_negative_at_crossing;
    else
        h["f1_second_negative_at_crossing"] = nullptr;
    return json{{"mu_c2", c.mu_c2},
                {"bracket", {c.bracket.first, c.bracket.second}},
                {"re_slope", c.re_slope},
                {"imag_at_crossing", c.imag_at_crossing},
                {"alpha_at_crossing", c.alpha_at_crossing},
                {"discriminant_at_crossing", c.discriminant_at_crossing},
                {"hypothesis_flags", h}};
}

int cmd_hopf(const RunConfig& cfg, const std::string& out_dir) {
    const Parameters& p = cfg.params;
    HopfCertificate cert;
    if (cfg.bracket) {
        cert = find_hopf(p, *cfg.bracket);
    } else if (cfg.mu_range) {
        const auto changes =
            scan_sign_changes(p, cfg.mu_range->lo, cfg.mu_range->hi,
                              std::max(cfg.mu_range->n, 33));
        if (changes.empty())
            throw BracketError("hopf: no real-part sign change on [" +
                               fmt(cfg.mu_range->lo) + ", " +
                               fmt(cfg.mu_range->hi) + "]");
        cert = find_hopf(p, changes.front());
    } else {
        cert = locate_hopf(p);
    }

    std::printf("mu_c2                    = %s\n", fmt(cert.mu_c2).c_str());
    std::printf("re_slope                 = %s\n", fmt(cert.re_slope).c_str());
    std::printf("imag_at_crossing         = %s\n",
                fmt(cert.imag_at_crossing).c_str());
    std::printf("alpha_at_crossing        = %s\n",
                fmt(cert.alpha_at_crossing).c_str());
    std::printf("discriminant_at_crossing = %s\n",
                fmt(cert.discriminant_at_crossing).c_str());
    const fs::path path = prepare_out_dir(out_dir) / "hopf_certificate.json";
    write_file(path, certificate_json(cert).dump(2) + "\n");
    std::printf("wrote %s\n", path.string().c_str());
    return 0;
}

// --------------------------------------------------------------- simulate

int cmd_simulate(const RunConfig& cfg, const std::string& out_dir) {
    if (!cfg.init)
        throw ConfigError("init: missing (simulate needs an initial state)");
    if (cfg.mu_range)
        throw ConfigError("parameters.mu: simulate needs a scalar mu");
    const Parameters& p = cfg.params;

    const Trajectory traj = [&] {
        try {
            return integrate(p, *cfg.init, cfg.t_end, cfg.rel_tol, cfg.abs_tol,
                             cfg.n_samples);
        } catch (const Error& e) {
            throw StiffnessError(std::string("simulate: integration failed: ") +
                                 e.what());
        }
    }();

    std::string csv = "t,N,P,Z\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        csv += fmt(traj.times[i]) + "," + fmt(traj.states[i].N) + "," +
               fmt(traj.states[i].P) + "," + fmt(traj.states[i].Z) + "\n";

    CycleOptions opts;
    opts.transient_fraction = cfg.transient_fraction;
    opts.min_crossings = cfg.min_crossings;
    const CycleReport rep = detect_cycle(traj, p, opts);

    json out{{"classification", to_string(rep.classification)},
             {"amplitude", rep.amplitude},
             {"period", rep.period},
             {"spread", rep.spread},
             {"crossings", rep.crossings},
             {"section_level", rep.section_level},
             {"stats",
              {{"accepted", traj.stats.accepted},
               {"rejected", traj.stats.rejected},
               {"max_error_estimate", traj.stats.max_error_estimate},
               {"accumulated_error", traj.stats.accumulated_error}}}};

    const fs::path dir = prepare_out_dir(out_dir);
    write_file(dir / "trajectory.csv", csv);
    write_file(dir / "cycle_report.json", out.dump(2) + "\n");
    std::printf("%s: amplitude=%s period=%s crossings=%d (%ld steps)\n",
                to_string(rep.classification), fmt6(rep.amplitude).c_str(),
                fmt6(rep.period).c_str(), rep.crossings, traj.stats.accepted);
    std::printf("wrote %s and %s\n", (dir / "trajectory.csv").string().c_str(),
                (dir / "cycle_report.json").string().c_str());
    return 0;
}

// ----------------------------------------------------------------- verify

struct CheckRow {
    std::string name;
    std::string status;  // PASS | FAIL | SKIP
    std::string detail;
};

void run_check(std::vector<CheckRow>& rows, const std::string& name,
               const std::function<std::pair<bool, std::string>()>& body) {
    try {
        auto [ok, detail] = body();
        rows.push_back({name, ok ? "PASS" : "FAIL", detail});
    } catch (const std::exception& e) {
        rows.push_back({name, "FAIL", e.what()});
    }
}

int cmd_verify(const RunConfig& cfg, const std::string& out_dir) {
    const Parameters& p = cfg.params;
    std::vector<CheckRow> rows;
    std::mt19937 rng(cfg.seed);

    const double lambda_P = break_even(p.f1, p.gamma1, p.D1);
    const double threshold = mu_c1(p);

    run_check(rows, "lyapunov-descent-washout-plane", [&] {
        std::uniform_real_distribution<double> uN(0.1 * p.mu, 2.0 * p.mu);
        std::uniform_real_distribution<double> uZ(0.05, 1.0);
        double worst = 0.0;
        for (int k = 0; k < 5; ++k) {
            const Trajectory t = integrate(
                p, State{uN(rng), 0.0, uZ(rng)}, 150.0, cfg.rel_tol,
                cfg.abs_tol, 1500);
            const DescentReport d = lyapunov_monitor_E0(t);
            worst = std::max(worst, d.max_increase);
            if (!d.non_increasing)
                return std::pair{false, "increase " + fmt6(d.max_increase) +
                                            " above tolerance " +
                                            fmt6(d.tolerance)};
        }
        return std::pair{true, "max increase " + fmt6(worst) +
                                   " over 5 starts (tol 1e-08)"};
    });

    if (p.mu > lambda_P) {
        run_check(rows, "lyapunov-descent-prey-plane", [&] {
            std::uniform_real_distribution<double> uN(0.1 * p.mu, 1.5 * p.mu);
            std::uniform_real_distribution<double> uP(0.05, 1.0);
            double worst = 0.0;
            for (int k = 0; k < 5; ++k) {
                const Trajectory t = integrate(
                    p, State{uN(rng), uP(rng), 0.0}, 150.0, cfg.rel_tol,
                    cfg.abs_tol, 1500);
                const DescentReport d = lyapunov_monitor_E1(t, p);
                worst = std::max(worst, d.max_increase);
                if (!d.non_increasing)
                    return std::pair{false,
                                     "increase " + fmt6(d.max_increase) +
                                         " above tolerance " +
                                         fmt6(d.tolerance)};
            }
            return std::pair{true, "max increase " + fmt6(worst) +
                                       " over 5 starts (tol 1e-07)"};
        });
    } else {
        rows.push_back({"lyapunov-descent-prey-plane", "SKIP",
                        "mu <= lambda_P: prey equilibrium absent"});
    }

    run_check(rows, "positivity-and-mass-balance", [&] {
        std::uniform_real_distribution<double> uN(0.2 * p.mu, p.mu);
        std::uniform_real_distribution<double> uPZ(0.05, 0.5);
        double min_c = 1e300;
        for (int k = 0; k < 10; ++k) {
            const Trajectory t =
                integrate(p, State{uN(rng), uPZ(rng), uPZ(rng)}, cfg.t_end,
                          cfg.rel_tol, cfg.abs_tol, cfg.n_samples);
            for (const State& s : t.states)
                min_c = std::min({min_c, s.N, s.P, s.Z});
        }
        // integrate() itself aborts on floor or envelope violations, so
        // reaching this point is the proof; report the observed minimum
        return std::pair{true,
                         "10 interior starts, min component " + fmt6(min_c)};
    });

    run_check(rows, "interior-monotonicity", [&] {
        const double span = threshold - lambda_P;
        const double lo = threshold + 0.01 * span, hi = threshold + 10.0 * span;
        const double z_sup = (p.gamma2 / p.D2) *
                             break_even(p.f2, p.gamma2, p.D2) *
                             (p.gamma1 * p.f1.supremum() - p.D1);
        double prev_N = -1.0, prev_Z = -1.0;
        for (int i = 0; i < 200; ++i) {
            const double mu = lo + (hi - lo) * i / 199;
            const auto e2 = coexistence(p.with_mu(mu));
            if (!e2) return std::pair{false, "no interior point at mu " + fmt6(mu)};
            if (e2->N <= prev_N || e2->Z <= prev_Z)
                return std::pair{false,
                                 "not strictly increasing at mu " + fmt6(mu)};
            if (e2->Z >= z_sup)
                return std::pair{false, "Z* " + fmt6(e2->Z) +
                                            " breaks its bound " + fmt6(z_sup)};
            prev_N = e2->N;
            prev_Z = e2->Z;
        }
        return std::pair{true, "N*, Z* strictly increasing over 200 points; "
                               "Z* < " + fmt6(z_sup)};
    });

    run_check(rows, "secant-tangent-hypothesis", [&] {
        const HypothesisFlags f = hypothesis_predicates(p);
        return std::pair{f.concavity_condition,
                         std::string("D/(gamma2 lambda_Z(D)) > f2'(lambda_Z(D)) is ") +
                             (f.concavity_condition ? "true" : "false")};
    });

    bool appendix_written = false;
    if (p.equal_removal_rates()) {
        run_check(rows, "pair-approach-ratio", [&] {
            const HopfCertificate cert = locate_hopf(p);
            const double half = 0.25 * (cert.mu_c2 - threshold);
            const AppendixReport rep = appendix_bound_check(
                p, cfg.radii, 16, {cert.mu_c2 - half, cert.mu_c2 + half}, 11);

            std::string csv =
                "radius,D1,D2,mu,gamma_prime,A_prime,abs_diff,ratio\n";
            for (const AppendixSample& s : rep.samples)
                csv += fmt(s.radius) + "," + fmt(s.D1) + "," + fmt(s.D2) + "," +
                       fmt(s.mu) + "," + fmt(s.gamma_prime) + "," +
                       fmt(s.A_prime) + "," + fmt(s.abs_diff) + "," +
                       fmt(s.ratio) + "\n";
            write_file(prepare_out_dir(out_dir) / "appendix_ratios.csv", csv);
            appendix_written = true;

            double mn = 1e300, mx = 0.0;
            std::string detail = "max ratio per radius:";
            for (const auto& pr : rep.per_radius) {
                mn = std::min(mn, pr.max_ratio);
                mx = std::max(mx, pr.max_ratio);
                detail += " " + fmt6(pr.radius) + "->" + fmt6(pr.max_ratio);
            }
            const bool ok = std::isfinite(mx) && mx > 0.0 && mx < 2.0 * mn;
            detail += "; spread factor " + fmt6(mx / mn);
            return std::pair{ok, detail};
        });
    } else {
        rows.push_back({"pair-approach-ratio", "SKIP",
                        "needs equal removal rates D1 = D2 = D"});
    }

    int failed = 0;
    std::size_t width = 0;
    for (const CheckRow& r : rows) width = std::max(width, r.name.size());
    for (const CheckRow& r : rows) {
        failed += r.status == "FAIL";
        std::printf("%-*s  %-4s  %s\n", static_cast<int>(width), r.name.c_str(),
                    r.status.c_str(), r.detail.c_str());
    }
    std::printf("verify: %zu checks, %d failed\n", rows.size(), failed);
    if (appendix_written)
        std::printf("wrote %s\n",
                    (fs::path(out_dir) / "appendix_ratios.csv").string().c_str());
    return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nutrient-prey-predator chemostat: equilibria, Hopf "
                 "bifurcation, simulation"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".";
    double rel_tol = -1.0, abs_tol = -1.0, t_end = -1.0, transient = -1.0;
    int min_crossings = -1;
    long seed = -1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON run configuration")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory (default: .)");
        return sub;
    };
    auto add_integration = [&](CLI::App* sub) {
        sub->add_option("--rel-tol", rel_tol, "relative tolerance override");
        sub->add_option("--abs-tol", abs_tol, "absolute tolerance override");
        sub->add_option("--t-end", t_end, "integration horizon override");
        return sub;
    };

    CLI::App* analyze = add_common(app.add_subcommand(
        "analyze", "equilibria, spectra and classification at one mu"));
    CLI::App* scan = add_common(app.add_subcommand(
        "scan", "sweep mu, emit the tracked spectrum as CSV"));
    CLI::App* hopf = add_common(app.add_subcommand(
        "hopf", "locate the Hopf point and emit its certificate"));
    CLI::App* simulate = add_integration(add_common(app.add_subcommand(
        "simulate", "integrate a trajectory, classify the attractor")));
    simulate->add_option("--transient-fraction", transient,
                         "fraction of the horizon discarded before cycle "
                         "detection");
    simulate->add_option("--min-crossings", min_crossings,
                         "crossings required before a cycle is credited");
    CLI::App* verify = add_integration(add_common(app.add_subcommand(
        "verify", "run the invariant suites, report per-check status")));
    verify->add_option("--seed", seed, "RNG seed for the randomized suites");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = load_config(config_path);
        if (rel_tol > 0.0) cfg.rel_tol = rel_tol;
        if (abs_tol > 0.0) cfg.abs_tol = abs_tol;
        if (t_end > 0.0) cfg.t_end = t_end;
        if (transient >= 0.0) cfg.transient_fraction = transient;
        if (min_crossings >= 2) cfg.min_crossings = min_crossings;
        if (seed >= 0) cfg.seed = static_cast<unsigned>(seed);

        if (analyze->parsed()) return cmd_analyze(cfg, out_dir);
        if (scan->parsed()) return cmd_scan(cfg, out_dir);
        if (hopf->parsed()) return cmd_hopf(cfg, out_dir);
        if (simulate->parsed()) return cmd_simulate(cfg, out_dir);
        if (verify->parsed()) return cmd_verify(cfg, out_dir);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 3;
    }
    return 0;
}
