// End-to-end checks of the command-line tool. Each case runs the real
// binary (path injected by the build) against the shipped fixture configs
// and inspects exit codes, streams and emitted files.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fixture(const std::string& name) {
    return std::string(FIXTURE_DIR) + "/" + name;
}

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

// runs the CLI with output redirected into `dir`, which is wiped first
CliResult run_cli(const std::string& dir, const std::string& args) {
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string cmd = std::string(CLI_BIN) + " " + args + " --out " +
                            dir + " > " + dir + "/stdout.txt 2> " + dir +
                            "/stderr.txt";
    const int rc = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.out = slurp(dir + "/stdout.txt");
    r.err = slurp(dir + "/stderr.txt");
    return r;
}

bool contains(const std::string& s, const std::string& sub) {
    return s.find(sub) != std::string::npos;
}

std::vector<double> csv_fields(const std::string& line) {
    std::vector<double> vals;
    std::istringstream in(line);
    std::string cell;
    while (std::getline(in, cell, ',')) {
        char* end = nullptr;
        vals.push_back(std::strtod(cell.c_str(), &end));
    }
    return vals;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

}  // namespace

TEST_CASE("analyze reports all three equilibria for the reference setup") {
    const auto r = run_cli("cli_analyze",
                           "analyze --config " +
                               fixture("holling2_equal_removal.json"));
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "lambda_P"));
    CHECK(contains(r.out, "E0"));
    CHECK(contains(r.out, "E1"));
    CHECK(contains(r.out, "E2"));
    CHECK(contains(r.out, "Stable"));

    const json doc = json::parse(slurp("cli_analyze/analysis.json"));
    CHECK(doc["mu"].get<double>() == doctest::Approx(0.6));
    CHECK(doc["mu_c1"].get<double>() == doctest::Approx(0.325));
    REQUIRE(doc["equilibria"].size() == 3);
    CHECK(doc["equilibria"][2]["name"] == "E2");
    // mu = 0.6 sits below the oscillation onset, so E2 still attracts
    CHECK(doc["equilibria"][2]["classification"] == "Stable");
    CHECK(doc["equilibria"][2]["eigenvalues"].size() == 3);
    CHECK(doc["equilibria"][0]["classification"] == "Unstable");
}

TEST_CASE("analyze marks absent equilibria below the thresholds") {
    const char* tmpl = R"({
      "parameters": {
        "mu": %MU%, "D": 1.0, "D1": 1.0, "D2": 1.0,
        "gamma1": 2.0, "gamma2": 1.5,
        "f1": {"kind": "holling2", "m": 1.0, "alpha": 0.2},
        "f2": {"kind": "holling2", "m": 2.0, "alpha": 0.5}
      }
    })";
    auto with_mu = [&](const std::string& mu) {
        std::string text = tmpl;
        text.replace(text.find("%MU%"), 4, mu);
        return text;
    };

    // below lambda_P only washout survives
    write_text("cli_analyze_low.json", with_mu("0.1"));
    auto r = run_cli("cli_analyze_low",
                     "analyze --config cli_analyze_low.json");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "E1  absent"));
    CHECK(contains(r.out, "E2  absent"));
    json doc = json::parse(slurp("cli_analyze_low/analysis.json"));
    REQUIRE(doc["equilibria"].size() == 1);
    CHECK(doc["equilibria"][0]["classification"] == "Stable");

    // between lambda_P and mu_c1 the predator-free state takes over
    write_text("cli_analyze_mid.json", with_mu("0.3"));
    r = run_cli("cli_analyze_mid", "analyze --config cli_analyze_mid.json");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "E2  absent"));
    doc = json::parse(slurp("cli_analyze_mid/analysis.json"));
    REQUIRE(doc["equilibria"].size() == 2);
    CHECK(doc["equilibria"][0]["classification"] == "Unstable");
    CHECK(doc["equilibria"][1]["name"] == "E1");
    CHECK(doc["equilibria"][1]["classification"] == "Stable");

    fs::remove("cli_analyze_low.json");
    fs::remove("cli_analyze_mid.json");
}

TEST_CASE("scan emits the tracked pair across the crossing") {
    const auto r = run_cli("cli_scan",
                           "scan --config " +
                               fixture("holling2_equal_removal_scan.json"));
    CHECK(r.exit_code == 0);

    const auto lines = lines_of(slurp("cli_scan/scan.csv"));
    REQUIRE(lines.size() == 112);  // header + 111 grid points
    CHECK(lines[0] == "mu,N,Z,re_pair,im_pair,alpha,discriminant,classification");

    double prev_mu = -1.0;
    int flip_row = -1;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto vals = csv_fields(lines[i]);
        REQUIRE(vals.size() == 8);  // classification parses as 0, ignored
        CHECK(vals[0] > prev_mu);
        prev_mu = vals[0];
        CHECK(vals[5] < 0.0);  // the real eigenvalue stays negative
        if (flip_row < 0 && vals[3] > 0.0) flip_row = static_cast<int>(i);
    }
    REQUIRE(flip_row > 1);
    // the sign change brackets the Hopf point
    const double before = csv_fields(lines[flip_row - 1])[0];
    const double after = csv_fields(lines[flip_row])[0];
    CHECK(before < 0.60725992956937824);
    CHECK(after > 0.60725992956937824);
    // classification column flips with the sign of the pair
    CHECK(contains(lines[flip_row - 1], "Stable"));
    CHECK(contains(lines[flip_row], "Unstable"));
    // oscillatory pair on both sides of the crossing
    CHECK(csv_fields(lines[flip_row])[4] > 0.0);
}

TEST_CASE("scan output is deterministic") {
    run_cli("cli_scan_a", "scan --config " +
                              fixture("holling2_equal_removal_scan.json"));
    run_cli("cli_scan_b", "scan --config " +
                              fixture("holling2_equal_removal_scan.json"));
    CHECK(slurp("cli_scan_a/scan.csv") == slurp("cli_scan_b/scan.csv"));
}

TEST_CASE("scan trims grid points without an interior equilibrium") {
    write_text("cli_scan_trim.json", R"({
      "parameters": {
        "mu": {"lo": 0.2, "hi": 0.9, "n": 71},
        "D": 1.0, "D1": 1.0, "D2": 1.0, "gamma1": 2.0, "gamma2": 1.5,
        "f1": {"kind": "holling2", "m": 1.0, "alpha": 0.2},
        "f2": {"kind": "holling2", "m": 2.0, "alpha": 0.5}
      }
    })");
    const auto r = run_cli("cli_scan_trim",
                           "scan --config cli_scan_trim.json");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.err, "trimmed 13 grid point(s)"));
    const auto lines = lines_of(slurp("cli_scan_trim/scan.csv"));
    CHECK(lines.size() == 59);  // header + 58 surviving points
    CHECK(csv_fields(lines[1])[0] == doctest::Approx(0.33));
    fs::remove("cli_scan_trim.json");
}

TEST_CASE("hopf emits a certificate for the reference setup") {
    const auto r = run_cli("cli_hopf",
                           "hopf --config " +
                               fixture("holling2_equal_removal.json"));
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "mu_c2"));

    const json doc = json::parse(slurp("cli_hopf/hopf_certificate.json"));
    const double mu_c2 = doc["mu_c2"].get<double>();
    CHECK(mu_c2 > 0.55);
    CHECK(mu_c2 < 0.65);
    CHECK(doc["re_slope"].get<double>() > 0.0);
    CHECK(doc["imag_at_crossing"].get<double>() ==
          doctest::Approx(0.52715006840411586).epsilon(1e-9));
    CHECK(doc["hypothesis_flags"]["concavity_condition"].get<bool>());
    CHECK(doc["hypothesis_flags"]["f1_concave_global"].get<bool>());
    CHECK(doc["hypothesis_flags"]["f1_second_negative_at_crossing"].get<bool>());
    REQUIRE(doc["bracket"].size() == 2);
    CHECK(doc["bracket"][0].get<double>() < mu_c2);
    CHECK(doc["bracket"][1].get<double>() > mu_c2);
}

TEST_CASE("simulate classifies both sides of the onset") {
    // past the crossing: a settled oscillation
    auto r = run_cli("cli_sim_after",
                     "simulate --config " +
                         fixture("holling2_after_hopf.json"));
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "LimitCycle: amplitude="));

    const auto lines = lines_of(slurp("cli_sim_after/trajectory.csv"));
    REQUIRE(lines.size() == 18002);  // header + 18001 sample rows
    CHECK(lines[0] == "t,N,P,Z");
    CHECK(csv_fields(lines[1])[0] == 0.0);
    CHECK(csv_fields(lines.back())[0] == doctest::Approx(900.0));

    json doc = json::parse(slurp("cli_sim_after/cycle_report.json"));
    CHECK(doc["classification"] == "LimitCycle");
    CHECK(doc["amplitude"].get<double>() ==
          doctest::Approx(0.449271).epsilon(0.02));
    CHECK(doc["period"].get<double>() == doctest::Approx(12.5305).epsilon(0.005));
    CHECK(doc["crossings"].get<int>() >= 30);
    CHECK(doc["stats"]["accepted"].get<long>() > 0);

    // before the crossing: the trajectory settles onto the interior point
    r = run_cli("cli_sim_before",
                "simulate --config " + fixture("holling2_before_hopf.json"));
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "Equilibrium:"));
    doc = json::parse(slurp("cli_sim_before/cycle_report.json"));
    CHECK(doc["classification"] == "Equilibrium");
    CHECK(doc["amplitude"].get<double>() < 1e-3);
}

TEST_CASE("simulate without a predator settles on the prey branch axis") {
    write_text("cli_sim_noz.json", R"({
      "parameters": {
        "mu": 0.6, "D": 1.0, "D1": 1.0, "D2": 1.0,
        "gamma1": 2.0, "gamma2": 1.5,
        "f1": {"kind": "holling2", "m": 1.0, "alpha": 0.2},
        "f2": {"kind": "holling2", "m": 2.0, "alpha": 0.5}
      },
      "init": {"N": 0.3, "P": 0.0, "Z": 0.1},
      "t_end": 100.0,
      "n_samples": 1000
    })");
    const auto r = run_cli("cli_sim_noz",
                           "simulate --config cli_sim_noz.json");
    CHECK(r.exit_code == 0);
    const json doc = json::parse(slurp("cli_sim_noz/cycle_report.json"));
    CHECK(doc["classification"] == "Equilibrium");
    const auto last = csv_fields(lines_of(slurp("cli_sim_noz/trajectory.csv")).back());
    CHECK(last[1] == doctest::Approx(0.6).epsilon(1e-6));  // N -> feed level
    CHECK(last[2] == 0.0);
    CHECK(last[3] < 1e-9);  // predator starves out
    fs::remove("cli_sim_noz.json");
}

TEST_CASE("simulate honors command-line overrides") {
    const auto r = run_cli("cli_sim_short",
                           "simulate --config " +
                               fixture("holling2_before_hopf.json") +
                               " --t-end 50");
    CHECK(r.exit_code == 0);
    const auto lines = lines_of(slurp("cli_sim_short/trajectory.csv"));
    CHECK(csv_fields(lines.back())[0] == doctest::Approx(50.0));
}

TEST_CASE("simulate rejects configs without an initial state") {
    const auto r = run_cli("cli_sim_noinit",
                           "simulate --config " +
                               fixture("holling2_equal_removal_scan.json"));
    CHECK(r.exit_code == 2);
    CHECK(contains(r.err, "init"));
}

TEST_CASE("verify passes for the equal-removal setup") {
    const auto r = run_cli("cli_verify",
                           "verify --config " +
                               fixture("holling2_equal_removal.json"));
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "lyapunov-descent-washout-plane"));
    CHECK(contains(r.out, "pair-approach-ratio"));
    CHECK(contains(r.out, "verify: 6 checks, 0 failed"));
    CHECK_FALSE(contains(r.out, "FAIL"));

    const auto lines = lines_of(slurp("cli_verify/appendix_ratios.csv"));
    REQUIRE(lines.size() == 529);  // header + 3 radii x 16 points x 11 samples
    CHECK(lines[0] == "radius,D1,D2,mu,gamma_prime,A_prime,abs_diff,ratio");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto vals = csv_fields(lines[i]);
        REQUIRE(vals.size() == 8);
        CHECK(vals[7] > 0.0);  // every ratio finite and positive
    }
}

TEST_CASE("verify skips the ratio suite off the equal-removal line") {
    const auto r = run_cli("cli_verify_perturbed",
                           "verify --config " +
                               fixture("holling2_perturbed.json"));
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "SKIP"));
    CHECK(contains(r.out, "needs equal removal rates"));
    CHECK(contains(r.out, "verify: 6 checks, 0 failed"));
}

TEST_CASE("broken configs exit with a config error") {
    write_text("cli_bad.json", "this is not json");
    const auto r = run_cli("cli_bad", "analyze --config cli_bad.json");
    CHECK(r.exit_code == 2);
    CHECK(contains(r.err, "config error:"));
    CHECK(contains(r.err, "invalid JSON"));
    fs::remove("cli_bad.json");

    // a missing file is caught by the argument parser itself
    const auto miss = run_cli("cli_missing",
                              "analyze --config no_such_file_anywhere.json");
    CHECK(miss.exit_code != 0);
}
