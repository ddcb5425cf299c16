#include "chemostat/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace chemostat {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
}

const json& field(const json& obj, const std::string& path,
                  const std::string& key) {
    if (!obj.is_object()) fail(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(path + "." + key, "missing");
    return *it;
}

double number(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
}

int integer(const json& v, const std::string& path) {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<int>();
}

Response parse_response(const json& v, const std::string& path) {
    const json& kind = field(v, path, "kind");
    if (!kind.is_string()) fail(path + ".kind", "expected a string");
    const std::string k = kind.get<std::string>();
    const double m = number(field(v, path, "m"), path + ".m");
    const double alpha = number(field(v, path, "alpha"), path + ".alpha");
    if (k == "holling2") return Response::holling2(m, alpha);
    if (k == "holling3") return Response::holling3(m, alpha);
    fail(path + ".kind", "unknown response kind '" + k +
                             "' (expected holling2 or holling3)");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) fail("config", "top level must be an object");

    const json& par = field(doc, "config", "parameters");
    const std::string pp = "parameters";

    double mu = 0.0;
    std::optional<MuRange> range;
    {
        const json& mv = field(par, pp, "mu");
        if (mv.is_number()) {
            mu = mv.get<double>();
        } else if (mv.is_object()) {
            MuRange r;
            r.lo = number(field(mv, pp + ".mu", "lo"), pp + ".mu.lo");
            r.hi = number(field(mv, pp + ".mu", "hi"), pp + ".mu.hi");
            r.n = integer(field(mv, pp + ".mu", "n"), pp + ".mu.n");
            if (!(r.lo < r.hi)) fail(pp + ".mu", "range requires lo < hi");
            if (r.n < 2) fail(pp + ".mu.n", "range requires n >= 2");
            range = r;
            mu = 0.5 * (r.lo + r.hi);
        } else {
            fail(pp + ".mu", "expected a number or {lo, hi, n}");
        }
    }

    const double D = number(field(par, pp, "D"), pp + ".D");
    const double D1 = number(field(par, pp, "D1"), pp + ".D1");
    const double D2 = number(field(par, pp, "D2"), pp + ".D2");
    const double g1 = number(field(par, pp, "gamma1"), pp + ".gamma1");
    const double g2 = number(field(par, pp, "gamma2"), pp + ".gamma2");
    Response f1 = parse_response(field(par, pp, "f1"), pp + ".f1");
    Response f2 = parse_response(field(par, pp, "f2"), pp + ".f2");

    try {
        RunConfig cfg{Parameters(mu, D, D1, D2, g1, g2, std::move(f1),
                                 std::move(f2)),
                      range,
                      {}, 500.0, 1e-8, 1e-10, 2000, 0.5, 4,
                      {}, {0.1, 0.05, 0.025}, 12345};

        if (auto it = doc.find("init"); it != doc.end()) {
            const json& iv = *it;
            cfg.init = State{number(field(iv, "init", "N"), "init.N"),
                             number(field(iv, "init", "P"), "init.P"),
                             number(field(iv, "init", "Z"), "init.Z")};
        }
        if (auto it = doc.find("t_end"); it != doc.end())
            cfg.t_end = number(*it, "t_end");
        if (auto it = doc.find("rel_tol"); it != doc.end())
            cfg.rel_tol = number(*it, "rel_tol");
        if (auto it = doc.find("abs_tol"); it != doc.end())
            cfg.abs_tol = number(*it, "abs_tol");
        if (auto it = doc.find("n_samples"); it != doc.end())
            cfg.n_samples = integer(*it, "n_samples");
        if (auto it = doc.find("transient_fraction"); it != doc.end())
            cfg.transient_fraction = number(*it, "transient_fraction");
        if (auto it = doc.find("min_crossings"); it != doc.end())
            cfg.min_crossings = integer(*it, "min_crossings");
        if (auto it = doc.find("seed"); it != doc.end())
            cfg.seed = static_cast<unsigned>(integer(*it, "seed"));
        if (auto it = doc.find("bracket"); it != doc.end()) {
            const json& bv = *it;
            if (!bv.is_array() || bv.size() != 2)
                fail("bracket", "expected [lo, hi]");
            const double lo = number(bv[0], "bracket[0]");
            const double hi = number(bv[1], "bracket[1]");
            if (!(lo < hi)) fail("bracket", "requires lo < hi");
            cfg.bracket = {lo, hi};
        }
        if (auto it = doc.find("radii"); it != doc.end()) {
            const json& rv = *it;
            if (!rv.is_array() || rv.empty())
                fail("radii", "expected a non-empty array");
            cfg.radii.clear();
            for (std::size_t i = 0; i < rv.size(); ++i)
                cfg.radii.push_back(
                    number(rv[i], "radii[" + std::to_string(i) + "]"));
        }

        if (!(cfg.t_end > 0.0)) fail("t_end", "must be > 0");
        if (!(cfg.rel_tol > 0.0)) fail("rel_tol", "must be > 0");
        if (!(cfg.abs_tol > 0.0)) fail("abs_tol", "must be > 0");
        if (cfg.n_samples < 1) fail("n_samples", "must be >= 1");
        if (!(cfg.transient_fraction >= 0.0 && cfg.transient_fraction < 1.0))
            fail("transient_fraction", "must lie in [0, 1)");
        if (cfg.min_crossings < 2) fail("min_crossings", "must be >= 2");
        return cfg;
    } catch (const DomainError& e) {
        // parameter invariant violations surface as config errors so the
        // CLI can point at the file rather than the library internals
        throw ConfigError(e.what());
    }
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace chemostat
