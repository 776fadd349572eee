#include "hrf/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hrf/fisher.hpp"
#include "hrf/pareto.hpp"
#include "hrf/quantizer.hpp"

namespace hrf {
namespace {

const std::vector<std::string>& boundary_columns() {
    static const std::vector<std::string> c = {
        "b", "mu_bits", "crb_rad2", "rate_kbps",
        "rank1_gap_bs", "rank1_gap_user", "solver_status"};
    return c;
}

const std::vector<std::string>& distance_columns() {
    static const std::vector<std::string> c = {"d", "crb", "rate"};
    return c;
}

const std::vector<std::string>& min_bits_columns() {
    static const std::vector<std::string> c = {"dr_sig_db", "b_min"};
    return c;
}

const std::vector<std::string>& validate_columns() {
    static const std::vector<std::string> c = {
        "check", "computed", "oracle", "rel_err", "pass"};
    return c;
}

// Empty cell for a non-finite value; the solver_status column explains why.
std::string num_cell(double v) {
    return std::isfinite(v) ? ResultTable::num(v) : std::string();
}

// Lenient parse for plot building: empty or non-numeric cells become NaN,
// which the renderer drops.
double parse_or_nan(const std::string& cell) {
    if (cell.empty()) return std::numeric_limits<double>::quiet_NaN();
    const char* s = cell.c_str();
    char* end = nullptr;
    double v = std::strtod(s, &end);
    if (end == s || *end != '\0') return std::numeric_limits<double>::quiet_NaN();
    return v;
}

// n-th variate of the seed's stream, uniform on [0, 1).
double uniform01(std::uint64_t seed, std::uint64_t n) {
    std::uint64_t v = splitmix64(seed + 0x9e3779b97f4a7c15ull * n);
    return static_cast<double>(v >> 11) * 0x1.0p-53;
}

void check_bits_value(int bits, const char* who) {
    if (bits < 1 || bits > 16)
        throw ConfigError(std::string(who) + ": ADC resolution must lie in 1..16, got " +
                          std::to_string(bits));
}

// One validation row. pass compares |computed - oracle| / |oracle| against
// rel_tol, or computed <= oracle (1 + rel_tol) for one-sided ratio checks.
// A non-finite computed value fails the row instead of aborting the run.
void add_check(ResultTable& t, const std::string& name, double computed, double oracle,
               double rel_tol, bool one_sided = false) {
    if (!std::isfinite(computed)) {
        t.add_row({name, "", ResultTable::num(oracle), "", "0"});
        return;
    }
    double rel = std::abs(computed - oracle) / std::max(std::abs(oracle), 1e-300);
    bool pass = one_sided ? computed <= oracle + rel_tol * std::abs(oracle)
                          : rel <= rel_tol;
    t.add_row({name, ResultTable::num(computed), ResultTable::num(oracle),
               ResultTable::num(rel), pass ? "1" : "0"});
}

// Two-antenna single-target echo scenario, small enough that the empirical
// FIM converges well inside the 5% tolerance at 2e5 draws.
Scenario validate_tiny_scenario() {
    Scenario sc;
    sc.carrier_hz = 24e9;
    sc.num_bs_antennas = 2;
    sc.antenna_spacing_ratio = 0.5;
    sc.noise_variance = 1.0;
    sc.bs_max_power = 1.0;
    TargetSpec tg;
    tg.aoa_rad = 0.35;
    tg.range_m = 60.0;
    tg.rcs_m2 = 1.0;
    tg.gain_override = cd(0.45, -0.20);
    sc.targets = {tg};
    sc.ofdm.subcarrier_spacing_hz = 15e3;
    sc.ofdm.num_symbols = 1;
    sc.ofdm.samples_per_symbol = 1;
    sc.ofdm.dl_subcarriers = {0};
    sc.ofdm.dl_symbol_variance = 1.0;
    sc.finalize();
    return sc;
}

Precoders validate_tiny_precoders() {
    Precoders p;
    p.bs.resize(2);
    p.bs << cd(0.8, 0.0), 0.55 * std::exp(cd(0.0, 0.4));
    return p;
}

// Echo plus one uplink user at roughly -14 dB per-antenna SNR, where the
// low-SNR bound ordering holds with margin inside the 2% slack.
Scenario validate_bound_scenario() {
    Scenario sc;
    sc.carrier_hz = 24e9;
    sc.num_bs_antennas = 3;
    sc.antenna_spacing_ratio = 0.5;
    sc.noise_variance = 1.0;
    sc.bs_max_power = 1.0;
    TargetSpec tg;
    tg.aoa_rad = 0.30;
    tg.range_m = 100.0;
    tg.rcs_m2 = 1.0;
    tg.gain_override = cd(0.065, 0.0195);
    sc.targets = {tg};
    UserSpec u;
    u.num_antennas = 2;
    u.aoa_rad = -0.40;
    u.aod_rad = 0.10;
    u.range_m = 80.0;
    u.max_power = 1.0;
    u.observed_targets = {0};
    u.direct_gain_override = cd(0.0715, -0.0325);
    u.reflected_gain_override = {cd(0.0325, 0.013)};
    sc.users = {u};
    sc.ofdm.subcarrier_spacing_hz = 15e3;
    sc.ofdm.num_symbols = 2;
    sc.ofdm.samples_per_symbol = 2;
    sc.ofdm.dl_subcarriers = {0};
    sc.ofdm.ul_subcarriers = {{1}};
    sc.ofdm.dl_symbol_variance = 1.0;
    sc.ofdm.ul_symbol_variances = {1.0};
    sc.finalize();
    return sc;
}

Precoders validate_bound_precoders() {
    Precoders p;
    p.bs.resize(3);
    p.bs << cd(0.7, 0.0), 0.5 * std::exp(cd(0.0, 0.2)), 0.5 * std::exp(cd(0.0, -0.4));
    p.users.resize(1);
    p.users[0].resize(2);
    p.users[0] << cd(0.8, 0.0), 0.6 * std::exp(cd(0.0, 0.5));
    return p;
}

}  // namespace

ResultTable run_boundary(const ExperimentConfig& cfg) {
    if (cfg.bits.empty())
        throw ConfigError("boundary: the ADC bit list is empty");
    for (int b : cfg.bits) check_bits_value(b, "boundary");
    if (cfg.n_points < 2)
        throw ConfigError("boundary: n_points must be at least 2");

    ResultTable t(boundary_columns());
    for (int b : cfg.bits) {
        std::vector<ParetoPoint> pts =
            boundary_sweep(cfg.scenario, b, cfg.n_points, cfg.log_mu_grid);
        for (const ParetoPoint& p : pts) {
            double gap_bs = 0.0;
            Rank1Extraction ex0 = extract_rank1(p.covariances.r0);
            if (ex0.defined) gap_bs = ex0.gap;
            double gap_user = 0.0;
            for (const Eigen::MatrixXcd& rk : p.covariances.rk) {
                Rank1Extraction exk = extract_rank1(rk);
                if (exk.defined) gap_user = std::max(gap_user, exk.gap);
            }
            t.add_row({ResultTable::integer(b), num_cell(p.mu_bits), num_cell(p.crb),
                       num_cell(p.rate_kbps), num_cell(gap_bs), num_cell(gap_user),
                       solve_status_name(p.report.status)});
        }
    }
    return t;
}

ResultTable run_distance_sweep(const ExperimentConfig& cfg) {
    if (cfg.distances_m.empty())
        throw ConfigError("distance_sweep: the distance grid is empty");
    for (double d : cfg.distances_m)
        if (!(d >= 1.0))
            throw ConfigError("distance_sweep: distances must be at least 1 m");
    check_bits_value(cfg.fixed_bits, "distance_sweep");
    if (cfg.scenario.num_targets() == 0)
        throw ConfigError("distance_sweep: the scenario has no target");

    ResultTable t(distance_columns());
    for (double d : cfg.distances_m) {
        Scenario sc = cfg.scenario;
        for (TargetSpec& tg : sc.targets) tg.range_m = d;
        sc.finalize();
        ParetoPoint sensing = solve_p0(sc, cfg.fixed_bits, 0.0);
        ParetoPoint comm = solve_p1(sc, cfg.fixed_bits, 0.0);
        if (!std::isfinite(sensing.crb) || !std::isfinite(comm.rate_kbps))
            throw std::runtime_error("distance_sweep: endpoint solve failed at d=" +
                                     ResultTable::num(d) + ": " + sensing.report.message);
        t.add_row({ResultTable::num(d), ResultTable::num(sensing.crb),
                   ResultTable::num(comm.rate_kbps)});
    }
    return t;
}

ResultTable run_min_bits(const ExperimentConfig& cfg) {
    if (cfg.n_positions < 1)
        throw ConfigError("min_bits: n_positions must be positive");
    if (!(cfg.radius_m >= 2.0))
        throw ConfigError("min_bits: sampling radius must be at least 2 m");
    const Scenario& base = cfg.scenario;
    if (base.num_targets() == 0)
        throw ConfigError("min_bits: the scenario has no target");
    int k0 = -1;
    for (int k = 0; k < base.num_users() && k0 < 0; ++k)
        for (int j : base.users[k].observed_targets)
            if (j == 0) {
                k0 = k;
                break;
            }
    if (k0 < 0)
        throw ConfigError("min_bits: no user observes target 0");

    std::vector<std::pair<double, int>> rows;
    rows.reserve(static_cast<std::size_t>(cfg.n_positions));
    std::uint64_t counter = 0;
    for (int i = 0; i < cfg.n_positions; ++i) {
        bool accepted = false;
        for (int attempt = 0; attempt < 1000 && !accepted; ++attempt) {
            double u1 = uniform01(cfg.seed, counter++);
            double u2 = uniform01(cfg.seed, counter++);
            double r = cfg.radius_m * std::sqrt(u1);
            double phi = (u2 - 0.5) * (kPi - 2e-6);
            if (r < 1.0) continue;
            double tx = r * std::sin(phi);
            double ty = r * std::cos(phi);
            bool too_close = false;
            for (const UserSpec& us : base.users) {
                double ux = us.range_m * std::sin(us.aoa_rad);
                double uy = us.range_m * std::cos(us.aoa_rad);
                if (std::hypot(tx - ux, ty - uy) < 1.0) {
                    too_close = true;
                    break;
                }
            }
            if (too_close) continue;
            Scenario sc = base;
            sc.targets[0].range_m = r;
            sc.targets[0].aoa_rad = phi;
            try {
                sc.finalize();
            } catch (const std::invalid_argument&) {
                continue;  // degenerate geometry; resample
            }
            double dr = 0.0;
            bool found = false;
            for (const ReflectedLink& rl : sc.links().users[k0].reflected) {
                if (rl.target_index == 0) {
                    dr = rl.dr_sig_db;
                    found = true;
                    break;
                }
            }
            if (!found) continue;
            rows.emplace_back(dr, min_bits_for_dr(dr, cfg.margin_db).bits);
            accepted = true;
        }
        if (!accepted)
            throw std::runtime_error("min_bits: position sampler stalled; "
                                     "check the radius and user geometry");
    }
    std::sort(rows.begin(), rows.end());

    ResultTable t(min_bits_columns());
    for (const auto& [dr, b] : rows)
        t.add_row({ResultTable::num(dr), ResultTable::integer(b)});
    return t;
}

ResultTable run_validate_fim(const ExperimentConfig& cfg) {
    ResultTable t(validate_columns());

    // Closed-form quantizer facts.
    Quantizer q1 = design_lloyd_max(1);
    add_check(t, "eta_1bit", q1.eta, 1.0 - 2.0 / kPi, 1e-6);
    add_check(t, "level_1bit", q1.levels[1], std::sqrt(2.0 / kPi), 1e-8);
    add_check(t, "lambda_sum_zero_1bit", lambda_sum(0.0, 1.0, q1, 1.0), 2.0 / kPi, 1e-9);
    add_check(t, "adc_dynamic_range_b4", adc_dynamic_range(4), 6.02 * 4 + 1.76, 1e-12);
    add_check(t, "min_bits_20db",
              static_cast<double>(min_bits_for_dr(20.0, 0.0).bits), 4.0, 0.0);

    // 2x2 FIM inversion against the hand-inverted matrix [[2,1],[1,2]].
    {
        FimResult toy;
        toy.matrix.resize(2, 2);
        toy.matrix << 2.0, 1.0, 1.0, 2.0;
        toy.param_labels = {"p0", "p1"};
        add_check(t, "crb_2x2", crb(toy, 0).value, 2.0 / 3.0, 1e-12);
    }

    // Exact quantized FIM against a Monte-Carlo estimate of the score
    // variance, and against the Gaussian closed form in the fine limit.
    Scenario tiny = validate_tiny_scenario();
    Precoders tp = validate_tiny_precoders();
    SymbolSource tsym{splitmix64(cfg.seed ^ 0x51ull), SymbolSource::Mode::qpsk};
    ParamRef aoa{ParamRef::Kind::target_aoa, 0, 0};
    for (int b : {1, 2, 3}) {
        Quantizer q = design_lloyd_max(b);
        double exact = fim_exact(tiny, tp, q, {aoa}, tsym).matrix(0, 0);
        double emp = empirical_fim(tiny, tp, q, aoa, 200000,
                                   splitmix64(cfg.seed ^ (0x90ull + static_cast<std::uint64_t>(b))),
                                   tsym)
                         .matrix(0, 0);
        add_check(t, "fim_exact_vs_empirical_b" + std::to_string(b), emp, exact, 0.05);
    }
    {
        Quantizer q16 = design_lloyd_max(16);
        double exact16 = fim_exact(tiny, tp, q16, {aoa}, tsym).matrix(0, 0);
        double gauss = unquantized_gaussian_fim(tiny, tp, {aoa}, tsym).matrix(0, 0);
        add_check(t, "fim_exact_vs_gaussian_b16", exact16, gauss, 0.01);
    }

    // Sandwich ordering at low SNR: the covariance-level lower bound sits
    // below the symbol-averaged exact FIM, which quantization keeps below
    // the unquantized Gaussian FIM. Ratios are one-sided with 2% slack.
    {
        Scenario sc = validate_bound_scenario();
        Precoders p = validate_bound_precoders();
        Quantizer q2 = design_lloyd_max(2);
        double exact_mean = 0.0;
        double gauss_mean = 0.0;
        const int n_draws = 128;
        for (int i = 0; i < n_draws; ++i) {
            SymbolSource sym{splitmix64(cfg.seed ^ (0xb0ull + static_cast<std::uint64_t>(i))),
                             SymbolSource::Mode::qpsk};
            exact_mean += fim_exact(sc, p, q2, {aoa}, sym).matrix(0, 0);
            gauss_mean += unquantized_gaussian_fim(sc, p, {aoa}, sym).matrix(0, 0);
        }
        exact_mean /= n_draws;
        gauss_mean /= n_draws;
        Eigen::MatrixXcd r0 = p.bs * p.bs.adjoint();
        std::vector<Eigen::MatrixXcd> rk = {p.users[0] * p.users[0].adjoint()};
        double bound = fim_lower_bound_aoa(r0, rk, sc, q2.eta).matrix(0, 0);
        add_check(t, "bound_le_exact_b2", bound / exact_mean, 1.0, 0.02, true);
        add_check(t, "exact_le_gaussian_b2", exact_mean / gauss_mean, 1.0, 0.02, true);
    }
    return t;
}

PlotSpec plot_for(const ResultTable& table, ExperimentKind kind) {
    const std::vector<std::string>* expected = nullptr;
    switch (kind) {
        case ExperimentKind::boundary: expected = &boundary_columns(); break;
        case ExperimentKind::distance_sweep: expected = &distance_columns(); break;
        case ExperimentKind::min_bits: expected = &min_bits_columns(); break;
        case ExperimentKind::validate_fim: expected = &validate_columns(); break;
    }
    if (expected == nullptr || table.columns() != *expected)
        throw std::invalid_argument(std::string("plot_for: table schema does not match ") +
                                    experiment_kind_name(kind));

    PlotSpec spec;
    const auto& rows = table.rows();
    switch (kind) {
        case ExperimentKind::boundary: {
            spec.title = "CRB / rate Pareto boundary";
            spec.x_label = "rate (kbps)";
            spec.y_label = "CRB (rad^2)";
            spec.log_y = true;
            for (const auto& row : rows) {
                std::string label = "b=" + row[0];
                PlotSeries* s = nullptr;
                for (PlotSeries& existing : spec.series)
                    if (existing.label == label) {
                        s = &existing;
                        break;
                    }
                if (s == nullptr) {
                    spec.series.push_back({label, {}, {}});
                    s = &spec.series.back();
                }
                s->x.push_back(parse_or_nan(row[3]));
                s->y.push_back(parse_or_nan(row[2]));
            }
            break;
        }
        case ExperimentKind::distance_sweep: {
            spec.title = "Sensing and rate endpoints vs target distance";
            spec.x_label = "target distance (m)";
            spec.y_label = "CRB (rad^2), rate (kbps)";
            spec.log_y = true;
            PlotSeries crb_series{"CRB (rad^2)", {}, {}};
            PlotSeries rate_series{"rate (kbps)", {}, {}};
            for (const auto& row : rows) {
                double d = parse_or_nan(row[0]);
                crb_series.x.push_back(d);
                crb_series.y.push_back(parse_or_nan(row[1]));
                rate_series.x.push_back(d);
                rate_series.y.push_back(parse_or_nan(row[2]));
            }
            spec.series = {std::move(crb_series), std::move(rate_series)};
            break;
        }
        case ExperimentKind::min_bits: {
            spec.title = "Minimum ADC resolution vs signal dynamic range";
            spec.x_label = "signal dynamic range (dB)";
            spec.y_label = "minimum ADC bits";
            spec.staircase = true;
            PlotSeries s{"b_min", {}, {}};
            for (const auto& row : rows) {
                s.x.push_back(parse_or_nan(row[0]));
                s.y.push_back(parse_or_nan(row[1]));
            }
            spec.series = {std::move(s)};
            break;
        }
        case ExperimentKind::validate_fim: {
            spec.title = "FIM validation relative errors";
            spec.x_label = "check index";
            spec.y_label = "relative error";
            PlotSeries s{"rel_err", {}, {}};
            for (std::size_t i = 0; i < rows.size(); ++i) {
                s.x.push_back(static_cast<double>(i + 1));
                s.y.push_back(parse_or_nan(rows[i][3]));
            }
            spec.series = {std::move(s)};
            break;
        }
    }
    return spec;
}

RunOutcome run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                          std::uint64_t config_hash) {
    ResultTable table = [&] {
        switch (cfg.kind) {
            case ExperimentKind::boundary: return run_boundary(cfg);
            case ExperimentKind::distance_sweep: return run_distance_sweep(cfg);
            case ExperimentKind::min_bits: return run_min_bits(cfg);
            case ExperimentKind::validate_fim: return run_validate_fim(cfg);
        }
        throw std::logic_error("run_experiment: unknown experiment kind");
    }();
    table.set_meta(config_hash, cfg.seed);

    std::filesystem::create_directories(out_dir);
    std::string base = (std::filesystem::path(out_dir) / experiment_kind_name(cfg.kind)).string();
    std::string csv_path = base + ".csv";
    std::string svg_path = base + ".svg";
    table.write_csv(csv_path);
    write_svg(svg_path, plot_for(table, cfg.kind));

    bool failed = false;
    if (cfg.kind == ExperimentKind::validate_fim) {
        for (const auto& row : table.rows())
            if (row[4] == "0") failed = true;
    }
    if (cfg.kind == ExperimentKind::min_bits) {
        long saturated = 0;
        for (std::size_t i = 0; i < table.rows().size(); ++i)
            if (min_bits_for_dr(table.cell_value(i, 0), cfg.margin_db).saturated)
                ++saturated;
        if (saturated > 0)
            std::fprintf(stderr,
                         "warning: %ld of %zu positions exceed the 16-bit dynamic range\n",
                         saturated, table.rows().size());
    }
    return RunOutcome{std::move(table), {csv_path, svg_path}, failed};
}

}  // namespace hrf
