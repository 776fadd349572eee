#include "hrf/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

namespace hrf {

namespace {

struct Entry {
    std::string section;
    int instance = 0;  // per-section occurrence count, for [target]/[user]
    std::string key;
    std::string value;
    int line = 0;
};

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& path, int line, const std::string& msg) {
    throw ConfigError(path + ":" + std::to_string(line) + ": " + msg);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<Entry> parse_entries(const std::string& path) {
    std::istringstream in(read_file(path));
    std::vector<Entry> out;
    std::string raw, section;
    int line = 0, instance = -1;
    std::vector<std::pair<std::string, int>> counts;
    while (std::getline(in, raw)) {
        ++line;
        auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        std::string s = trim(raw);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') fail(path, line, "unterminated section header");
            section = trim(s.substr(1, s.size() - 2));
            if (section.empty()) fail(path, line, "empty section name");
            instance = 0;
            for (auto& c : counts)
                if (c.first == section) instance = ++c.second;
            if (instance == 0) counts.emplace_back(section, 0);
            continue;
        }
        auto eq = s.find('=');
        if (eq == std::string::npos) fail(path, line, "expected `key = value`");
        if (section.empty()) fail(path, line, "key outside any [section]");
        Entry e;
        e.section = section;
        e.instance = instance;
        e.key = trim(s.substr(0, eq));
        e.value = trim(s.substr(eq + 1));
        e.line = line;
        if (e.key.empty() || e.value.empty()) fail(path, line, "empty key or value");
        out.push_back(std::move(e));
    }
    return out;
}

double parse_double(const Entry& e, const std::string& path) {
    char* end = nullptr;
    double v = std::strtod(e.value.c_str(), &end);
    if (end == e.value.c_str() || *end != '\0')
        fail(path, e.line, "expected a number for `" + e.key + "`");
    return v;
}

long long parse_int(const Entry& e, const std::string& path) {
    char* end = nullptr;
    long long v = std::strtoll(e.value.c_str(), &end, 10);
    if (end == e.value.c_str() || *end != '\0')
        fail(path, e.line, "expected an integer for `" + e.key + "`");
    return v;
}

std::uint64_t parse_uint64(const Entry& e, const std::string& path) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(e.value.c_str(), &end, 10);
    if (end == e.value.c_str() || *end != '\0')
        fail(path, e.line, "expected an unsigned integer for `" + e.key + "`");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) parts.push_back(trim(cur));
    return parts;
}

// Integer lists accept comma separation and inclusive "a..b" ranges.
std::vector<int> parse_int_list(const Entry& e, const std::string& path) {
    std::vector<int> out;
    for (const auto& part : split(e.value, ',')) {
        auto dots = part.find("..");
        auto num = [&](const std::string& s) {
            char* end = nullptr;
            long v = std::strtol(s.c_str(), &end, 10);
            if (end == s.c_str() || *end != '\0')
                fail(path, e.line, "bad integer `" + s + "` in `" + e.key + "`");
            return static_cast<int>(v);
        };
        if (dots == std::string::npos) {
            out.push_back(num(part));
        } else {
            int a = num(trim(part.substr(0, dots)));
            int b = num(trim(part.substr(dots + 2)));
            if (b < a) fail(path, e.line, "descending range in `" + e.key + "`");
            for (int v = a; v <= b; ++v) out.push_back(v);
        }
    }
    if (out.empty()) fail(path, e.line, "empty list for `" + e.key + "`");
    return out;
}

std::vector<double> parse_double_list(const Entry& e, const std::string& path) {
    std::vector<double> out;
    for (const auto& part : split(e.value, ',')) {
        char* end = nullptr;
        double v = std::strtod(part.c_str(), &end);
        if (end == part.c_str() || *end != '\0')
            fail(path, e.line, "bad number `" + part + "` in `" + e.key + "`");
        out.push_back(v);
    }
    if (out.empty()) fail(path, e.line, "empty list for `" + e.key + "`");
    return out;
}

cd parse_complex(const Entry& e, const std::string& path) {
    auto parts = split(e.value, ',');
    if (parts.size() != 2) fail(path, e.line, "expected `re,im` for `" + e.key + "`");
    char* end = nullptr;
    double re = std::strtod(parts[0].c_str(), &end);
    if (end == parts[0].c_str() || *end != '\0') fail(path, e.line, "bad real part");
    double im = std::strtod(parts[1].c_str(), &end);
    if (end == parts[1].c_str() || *end != '\0') fail(path, e.line, "bad imaginary part");
    return {re, im};
}

double deg_to_rad(double deg) { return deg * kPi / 180.0; }

Scenario scenario_from_entries(const std::vector<Entry>& entries, const std::string& path) {
    Scenario sc;
    sc.ofdm.ul_subcarriers.clear();
    sc.ofdm.ul_symbol_variances.clear();
    int n_targets = 0, n_users = 0;
    for (const auto& e : entries) {
        if (e.section == "target") n_targets = std::max(n_targets, e.instance + 1);
        if (e.section == "user") n_users = std::max(n_users, e.instance + 1);
    }
    sc.targets.resize(n_targets);
    sc.users.resize(n_users);
    sc.ofdm.ul_subcarriers.resize(n_users);
    sc.ofdm.ul_symbol_variances.resize(n_users, 1.0);

    for (const auto& e : entries) {
        if (e.section == "scenario") {
            if (e.key == "carrier_hz") sc.carrier_hz = parse_double(e, path);
            else if (e.key == "num_bs_antennas") sc.num_bs_antennas = static_cast<int>(parse_int(e, path));
            else if (e.key == "antenna_spacing_ratio") sc.antenna_spacing_ratio = parse_double(e, path);
            else if (e.key == "noise_variance") sc.noise_variance = parse_double(e, path);
            else if (e.key == "bs_max_power") sc.bs_max_power = parse_double(e, path);
            else if (e.key == "dr_margin_db") sc.dr_margin_db = parse_double(e, path);
            else fail(path, e.line, "unknown key `" + e.key + "` in [scenario]");
        } else if (e.section == "ofdm") {
            if (e.key == "subcarrier_spacing_hz") sc.ofdm.subcarrier_spacing_hz = parse_double(e, path);
            else if (e.key == "num_symbols") sc.ofdm.num_symbols = static_cast<int>(parse_int(e, path));
            else if (e.key == "samples_per_symbol") sc.ofdm.samples_per_symbol = static_cast<int>(parse_int(e, path));
            else if (e.key == "dl_subcarriers") sc.ofdm.dl_subcarriers = parse_int_list(e, path);
            else if (e.key == "dl_symbol_variance") sc.ofdm.dl_symbol_variance = parse_double(e, path);
            else fail(path, e.line, "unknown key `" + e.key + "` in [ofdm]");
        } else if (e.section == "target") {
            auto& t = sc.targets[e.instance];
            if (e.key == "aoa_deg") t.aoa_rad = deg_to_rad(parse_double(e, path));
            else if (e.key == "range_m") t.range_m = parse_double(e, path);
            else if (e.key == "doppler_hz") t.doppler_hz = parse_double(e, path);
            else if (e.key == "rcs_m2") t.rcs_m2 = parse_double(e, path);
            else if (e.key == "gain_override") t.gain_override = parse_complex(e, path);
            else fail(path, e.line, "unknown key `" + e.key + "` in [target]");
        } else if (e.section == "user") {
            auto& u = sc.users[e.instance];
            if (e.key == "num_antennas") u.num_antennas = static_cast<int>(parse_int(e, path));
            else if (e.key == "aoa_deg") u.aoa_rad = deg_to_rad(parse_double(e, path));
            else if (e.key == "aod_deg") u.aod_rad = deg_to_rad(parse_double(e, path));
            else if (e.key == "range_m") u.range_m = parse_double(e, path);
            else if (e.key == "max_power") u.max_power = parse_double(e, path);
            else if (e.key == "observed_targets") u.observed_targets = parse_int_list(e, path);
            else if (e.key == "ul_subcarriers") sc.ofdm.ul_subcarriers[e.instance] = parse_int_list(e, path);
            else if (e.key == "symbol_variance") sc.ofdm.ul_symbol_variances[e.instance] = parse_double(e, path);
            else if (e.key == "direct_gain_override") u.direct_gain_override = parse_complex(e, path);
            else if (e.key == "per_target_aod_deg") {
                for (double v : parse_double_list(e, path))
                    u.per_target_aod_rad.push_back(deg_to_rad(v));
            } else if (e.key == "per_target_path_m") {
                for (double v : parse_double_list(e, path)) u.per_target_path_m.push_back(v);
            } else fail(path, e.line, "unknown key `" + e.key + "` in [user]");
        } else if (e.section == "experiment") {
            // Ignored here so one file can carry both when convenient.
        } else {
            fail(path, e.line, "unknown section [" + e.section + "]");
        }
    }

    try {
        sc.finalize();
    } catch (const std::exception& ex) {
        throw ConfigError(path + ": " + ex.what());
    }
    return sc;
}

}  // namespace

Scenario load_scenario(const std::string& path) {
    return scenario_from_entries(parse_entries(path), path);
}

ExperimentConfig load_experiment(const std::string& path) {
    ExperimentConfig cfg;
    bool have_kind = false, have_scenario = false;
    for (const auto& e : parse_entries(path)) {
        if (e.section != "experiment")
            fail(path, e.line, "experiment files may only contain [experiment]");
        if (e.key == "kind") {
            if (e.value == "boundary") cfg.kind = ExperimentKind::boundary;
            else if (e.value == "distance_sweep") cfg.kind = ExperimentKind::distance_sweep;
            else if (e.value == "min_bits") cfg.kind = ExperimentKind::min_bits;
            else if (e.value == "validate_fim") cfg.kind = ExperimentKind::validate_fim;
            else fail(path, e.line, "unknown experiment kind `" + e.value + "`");
            have_kind = true;
        } else if (e.key == "scenario") {
            auto dir = std::filesystem::path(path).parent_path();
            cfg.scenario_path = (dir / e.value).string();
            have_scenario = true;
        } else if (e.key == "bits") {
            cfg.bits = parse_int_list(e, path);
        } else if (e.key == "distances_m") {
            cfg.distances_m = parse_double_list(e, path);
        } else if (e.key == "n_points") {
            cfg.n_points = static_cast<int>(parse_int(e, path));
        } else if (e.key == "mu_grid") {
            if (e.value == "lin") cfg.log_mu_grid = false;
            else if (e.value == "log") cfg.log_mu_grid = true;
            else fail(path, e.line, "mu_grid must be `lin` or `log`");
        } else if (e.key == "seed") {
            cfg.seed = parse_uint64(e, path);
        } else if (e.key == "n_positions") {
            cfg.n_positions = static_cast<int>(parse_int(e, path));
        } else if (e.key == "radius_m") {
            cfg.radius_m = parse_double(e, path);
        } else if (e.key == "margin_db") {
            cfg.margin_db = parse_double(e, path);
        } else if (e.key == "fixed_bits") {
            cfg.fixed_bits = static_cast<int>(parse_int(e, path));
        } else {
            fail(path, e.line, "unknown key `" + e.key + "` in [experiment]");
        }
    }
    if (!have_kind) throw ConfigError(path + ": missing `kind`");
    if (!have_scenario) throw ConfigError(path + ": missing `scenario`");
    cfg.scenario = load_scenario(cfg.scenario_path);

    if (cfg.bits.empty()) throw ConfigError(path + ": empty bit list");
    for (int b : cfg.bits)
        if (b < 1 || b > 16) throw ConfigError(path + ": bits must lie in 1..16");
    if (cfg.distances_m.empty()) throw ConfigError(path + ": empty distance grid");
    for (std::size_t i = 1; i < cfg.distances_m.size(); ++i)
        if (cfg.distances_m[i] <= cfg.distances_m[i - 1])
            throw ConfigError(path + ": distance grid must be sorted ascending");
    if (cfg.n_points < 2) throw ConfigError(path + ": n_points must be >= 2");
    if (cfg.n_positions < 1) throw ConfigError(path + ": n_positions must be >= 1");
    if (cfg.radius_m <= 0) throw ConfigError(path + ": radius_m must be > 0");
    if (cfg.margin_db < 0) throw ConfigError(path + ": margin_db must be >= 0");
    if (cfg.fixed_bits < 1 || cfg.fixed_bits > 16)
        throw ConfigError(path + ": fixed_bits must lie in 1..16");
    return cfg;
}

std::uint64_t config_hash(const std::string& path) {
    std::uint64_t h = fnv1a64(read_file(path));
    for (const auto& e : parse_entries(path)) {
        if (e.section == "experiment" && e.key == "scenario") {
            auto dir = std::filesystem::path(path).parent_path();
            h = fnv1a64(read_file((dir / e.value).string()), h);
        }
    }
    return h;
}

const char* experiment_kind_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::boundary: return "boundary";
        case ExperimentKind::distance_sweep: return "distance_sweep";
        case ExperimentKind::min_bits: return "min_bits";
        case ExperimentKind::validate_fim: return "validate_fim";
    }
    return "unknown";
}

}  // namespace hrf
