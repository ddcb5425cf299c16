#pragma once

#include <optional>
#include <string>

#include "chemostat/parameters.hpp"
#include "chemostat/state.hpp"

namespace chemostat {

// Feed concentration sweep: n uniformly spaced values on [lo, hi].
struct MuRange {
    double lo = 0.0;
    double hi = 0.0;
    int n = 0;
};

// One parsed run description. `params` carries the scalar mu when given;
// sweeps put a placeholder mu (the range midpoint) there and expose the
// grid through `mu_range`.
struct RunConfig {
    Parameters params;
    std::optional<MuRange> mu_range;

    // simulation options
    std::optional<State> init;
    double t_end = 500.0;
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    int n_samples = 2000;
    double transient_fraction = 0.5;
    int min_crossings = 4;

    // hopf options
    std::optional<std::pair<double, double>> bracket;

    // verify options
    std::vector<double> radii{0.1, 0.05, 0.025};

    unsigned seed = 12345;
};

// Parses the JSON document in `text`. Malformed JSON, missing fields, or
// values of the wrong shape raise ConfigError naming the offending field
// path (e.g. "parameters.f1.alpha").
RunConfig parse_config(const std::string& text);

// Convenience wrapper: reads the file and delegates to parse_config.
RunConfig load_config(const std::string& path);

}  // namespace chemostat
