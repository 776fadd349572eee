#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "hrf/common.hpp"
#include "hrf/config.hpp"

using namespace hrf;
namespace fs = std::filesystem;

namespace {

const fs::path& scratch_dir() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "hrf_config_tests";
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string write_file(const std::string& name, const std::string& content) {
    fs::path p = scratch_dir() / name;
    std::ofstream out(p, std::ios::binary);
    out << content;
    return p.string();
}

const char* kScenarioText = R"([scenario]
carrier_hz = 24e9
num_bs_antennas = 4   # trailing comment
antenna_spacing_ratio = 0.5
noise_variance = 1e-9
bs_max_power = 1.0
dr_margin_db = 2.0

# standalone comment
[ofdm]
subcarrier_spacing_hz = 15e3
num_symbols = 2
samples_per_symbol = 16
dl_subcarriers = 0 .. 2
dl_symbol_variance = 1.0

[target]
aoa_deg = 25
range_m = 100
rcs_m2 = 50
doppler_hz = 10

[target]
aoa_deg = -10
range_m = 140
rcs_m2 = 30

[user]
num_antennas = 2
aoa_deg = -20
aod_deg = 0
range_m = 100
max_power = 1.0
observed_targets = 0..1
ul_subcarriers = 3,4
symbol_variance = 1.25
per_target_aod_deg = 5, 7
per_target_path_m = 210, 250
direct_gain_override = 1e-5,-2e-5
)";

// Checks that fn throws a ConfigError whose message carries the given needle
// (location prefix or description).
template <typename Fn>
void expect_config_error(Fn&& fn, const std::string& needle) {
    try {
        fn();
        FAIL_CHECK("expected ConfigError containing `" << needle << "`");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
}

}  // namespace

TEST_CASE("scenario files parse comments, ranges, and degree fields") {
    std::string path = write_file("scn_main.cfg", kScenarioText);
    Scenario sc = load_scenario(path);

    CHECK(sc.carrier_hz == 24e9);
    CHECK(sc.num_bs_antennas == 4);
    CHECK(sc.dr_margin_db == 2.0);
    REQUIRE(sc.num_targets() == 2);
    CHECK(std::abs(sc.targets[0].aoa_rad - 25.0 * kPi / 180.0) < 1e-15);
    CHECK(sc.targets[0].doppler_hz == 10.0);
    CHECK(std::abs(sc.targets[1].aoa_rad + 10.0 * kPi / 180.0) < 1e-15);
    REQUIRE(sc.num_users() == 1);
    const auto& u = sc.users[0];
    CHECK(std::abs(u.aoa_rad + 20.0 * kPi / 180.0) < 1e-15);
    CHECK(u.observed_targets == std::vector<int>{0, 1});
    REQUIRE(u.per_target_aod_rad.size() == 2);
    REQUIRE(u.per_target_aod_rad[1].has_value());
    CHECK(std::abs(*u.per_target_aod_rad[1] - 7.0 * kPi / 180.0) < 1e-15);
    REQUIRE(u.per_target_path_m.size() == 2);
    CHECK(u.per_target_path_m[0] == 210.0);
    CHECK(u.per_target_path_m[1] == 250.0);
    REQUIRE(u.direct_gain_override.has_value());
    CHECK(*u.direct_gain_override == cd(1e-5, -2e-5));
    CHECK(sc.ofdm.dl_subcarriers == std::vector<int>{0, 1, 2});
    CHECK(sc.ofdm.ul_subcarriers[0] == std::vector<int>{3, 4});
    CHECK(sc.ofdm.ul_symbol_variances[0] == 1.25);
    CHECK_NOTHROW(sc.links());  // parser returns finalized scenarios

    // An embedded [experiment] section is ignored by the scenario parser.
    std::string combo = write_file(
        "scn_combo.cfg",
        std::string(kScenarioText) + "\n[experiment]\nkind = boundary\nscenario = x\n");
    CHECK_NOTHROW(load_scenario(combo));
}

TEST_CASE("malformed scenario files fail with location-tagged errors") {
    expect_config_error([] { load_scenario((scratch_dir() / "nope.cfg").string()); },
                        "cannot open");

    auto bad = [](const std::string& name, const std::string& text,
                  const std::string& needle) {
        std::string p = write_file(name, text);
        expect_config_error([&] { load_scenario(p); }, needle);
    };

    bad("scn_b1.cfg", "[scenario]\ncarrier_hz = bogus\n", ":2: expected a number");
    bad("scn_b2.cfg", "carrier_hz = 1\n", ":1: key outside any [section]");
    bad("scn_b3.cfg", "[scenario\ncarrier_hz = 1\n", ":1: unterminated section");
    bad("scn_b4.cfg", "[]\n", ":1: empty section name");
    bad("scn_b5.cfg", "[scenario]\nno_such_key = 1\n", ":2: unknown key `no_such_key`");
    bad("scn_b6.cfg", "[bogus]\nx = 1\n", ":2: unknown section [bogus]");
    bad("scn_b7.cfg", "[scenario]\ncarrier_hz\n", ":2: expected `key = value`");
    bad("scn_b8.cfg", "[scenario]\ncarrier_hz = # gone\n", ":2: empty key or value");
    bad("scn_b9.cfg", "[ofdm]\ndl_subcarriers = 5..3\n", ":2: descending range");
    bad("scn_b10.cfg", "[ofdm]\ndl_subcarriers = 1,x\n", ":2: bad integer `x`");
    bad("scn_b11.cfg", "[target]\ngain_override = 1.0\n", ":2: expected `re,im`");
    bad("scn_b12.cfg", "[user]\nnum_antennas = 2.5\n", ":2: expected an integer");

    // A file that parses but fails scenario validation reports the path and
    // the underlying validation message, not a crash.
    std::string text = kScenarioText;
    auto pos = text.find("num_bs_antennas = 4");
    text.replace(pos, 19, "num_bs_antennas = 1");
    std::string p = write_file("scn_bad_semantics.cfg", text);
    expect_config_error([&] { load_scenario(p); }, "scenario: ");
    expect_config_error([&] { load_scenario(p); }, "scn_bad_semantics.cfg");
}

TEST_CASE("experiment files resolve paths and apply defaults") {
    write_file("scn_exp.cfg", kScenarioText);
    std::string full = write_file("exp_full.cfg", R"([experiment]
kind = distance_sweep
scenario = scn_exp.cfg
bits = 1,2,4..6
distances_m = 90,110,130
n_points = 5
mu_grid = log
seed = 42
n_positions = 10
radius_m = 150
margin_db = 1.5
fixed_bits = 8
)");
    ExperimentConfig cfg = load_experiment(full);
    CHECK(cfg.kind == ExperimentKind::distance_sweep);
    CHECK(cfg.scenario_path == (scratch_dir() / "scn_exp.cfg").string());
    CHECK(cfg.scenario.num_bs_antennas == 4);
    CHECK(cfg.bits == std::vector<int>{1, 2, 4, 5, 6});
    CHECK(cfg.distances_m == std::vector<double>{90.0, 110.0, 130.0});
    CHECK(cfg.n_points == 5);
    CHECK(cfg.log_mu_grid);
    CHECK(cfg.seed == 42);
    CHECK(cfg.n_positions == 10);
    CHECK(cfg.radius_m == 150.0);
    CHECK(cfg.margin_db == 1.5);
    CHECK(cfg.fixed_bits == 8);

    std::string minimal = write_file("exp_min.cfg",
                                     "[experiment]\nkind = min_bits\nscenario = scn_exp.cfg\n");
    ExperimentConfig d = load_experiment(minimal);
    CHECK(d.kind == ExperimentKind::min_bits);
    CHECK(d.bits == std::vector<int>{1, 2, 4, 6, 8, 14});
    CHECK(d.distances_m == std::vector<double>{100.0, 120.0, 140.0, 160.0});
    CHECK(d.n_points == 12);
    CHECK_FALSE(d.log_mu_grid);
    CHECK(d.seed == 1);
    CHECK(d.n_positions == 500);
    CHECK(d.radius_m == 200.0);
    CHECK(d.margin_db == 0.0);
    CHECK(d.fixed_bits == 14);

    CHECK(experiment_kind_name(ExperimentKind::validate_fim) ==
          std::string("validate_fim"));
}

TEST_CASE("experiment validation rejects bad grids and keys") {
    write_file("scn_exp.cfg", kScenarioText);
    auto bad = [](const std::string& name, const std::string& body,
                  const std::string& needle) {
        std::string head = "[experiment]\nkind = boundary\nscenario = scn_exp.cfg\n";
        std::string p = write_file(name, head + body);
        expect_config_error([&] { load_experiment(p); }, needle);
    };

    bad("exp_b1.cfg", "bits = 0\n", "bits must lie in 1..16");
    bad("exp_b2.cfg", "bits = 17\n", "bits must lie in 1..16");
    bad("exp_b3.cfg", "distances_m = 120,100\n", "sorted ascending");
    bad("exp_b4.cfg", "distances_m = 100,100\n", "sorted ascending");
    bad("exp_b5.cfg", "n_points = 1\n", "n_points must be >= 2");
    bad("exp_b6.cfg", "n_positions = 0\n", "n_positions must be >= 1");
    bad("exp_b7.cfg", "radius_m = 0\n", "radius_m must be > 0");
    bad("exp_b8.cfg", "margin_db = -1\n", "margin_db must be >= 0");
    bad("exp_b9.cfg", "fixed_bits = 0\n", "fixed_bits must lie in 1..16");
    bad("exp_b10.cfg", "mu_grid = quadratic\n", "mu_grid must be `lin` or `log`");
    bad("exp_b11.cfg", "surprise = 1\n", "unknown key `surprise`");

    expect_config_error(
        [] {
            load_experiment(write_file("exp_b12.cfg",
                                       "[experiment]\nscenario = scn_exp.cfg\n"));
        },
        "missing `kind`");
    expect_config_error(
        [] { load_experiment(write_file("exp_b13.cfg", "[experiment]\nkind = boundary\n")); },
        "missing `scenario`");
    expect_config_error(
        [] {
            load_experiment(write_file(
                "exp_b14.cfg", "[experiment]\nkind = warp\nscenario = scn_exp.cfg\n"));
        },
        "unknown experiment kind");
    expect_config_error(
        [] {
            load_experiment(write_file(
                "exp_b15.cfg",
                "[experiment]\nkind = boundary\nscenario = scn_exp.cfg\n[scenario]\nx = 1\n"));
        },
        "may only contain [experiment]");
    expect_config_error(
        [] {
            load_experiment(write_file(
                "exp_b16.cfg", "[experiment]\nkind = boundary\nscenario = missing.cfg\n"));
        },
        "cannot open");
}

TEST_CASE("config hash chains the experiment and scenario bytes") {
    std::string scn_v1 = "[scenario]\ncarrier_hz = 24e9\n";
    std::string scn_v2 = "[scenario]\ncarrier_hz = 25e9\n";
    write_file("hash_scn.cfg", scn_v1);
    std::string exp = write_file("hash_exp.cfg",
                                 "[experiment]\nkind = boundary\nscenario = hash_scn.cfg\n");

    std::uint64_t h1 = config_hash(exp);
    CHECK(config_hash(exp) == h1);  // stable across reads

    write_file("hash_scn.cfg", scn_v2);
    std::uint64_t h2 = config_hash(exp);
    CHECK(h2 != h1);

    write_file("hash_scn.cfg", scn_v1);
    CHECK(config_hash(exp) == h1);  // reverting restores the fingerprint

    std::string exp2 = write_file(
        "hash_exp2.cfg",
        "[experiment]\nkind = boundary\nscenario = hash_scn.cfg\n# note\n");
    CHECK(config_hash(exp2) != h1);

    // Without a scenario reference the hash is just the file's own bytes.
    std::string lone = write_file("hash_lone.cfg", scn_v1);
    CHECK(config_hash(lone) == fnv1a64(scn_v1));
}
