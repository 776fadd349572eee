#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hrf/common.hpp"
#include "hrf/config.hpp"
#include "hrf/experiments.hpp"

namespace {

// Exit codes are part of the tool contract.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitSolver = 2;
constexpr int kExitValidation = 3;

struct CliArgs {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::vector<int> bits;
    std::string mu_grid;
};

void add_common_options(CLI::App* sub, CliArgs& args) {
    sub->add_option("--config", args.config_path, "experiment config file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", args.out_dir, "output directory for CSV and SVG")
        ->required();
    sub->add_option("--seed", args.seed, "override the config's RNG seed")
        ->each([&args](const std::string&) { args.seed_given = true; });
}

int run(hrf::ExperimentKind kind, const CliArgs& args, bool bits_given, bool grid_given) {
    hrf::ExperimentConfig cfg = hrf::load_experiment(args.config_path);
    if (cfg.kind != kind)
        throw hrf::ConfigError(std::string("config file declares kind '") +
                               hrf::experiment_kind_name(cfg.kind) +
                               "' but the '" + hrf::experiment_kind_name(kind) +
                               "' subcommand was invoked");
    if (args.seed_given) cfg.seed = args.seed;
    if (bits_given) {
        if (kind == hrf::ExperimentKind::boundary) {
            cfg.bits = args.bits;
        } else {  // distance sweep: a single fixed resolution
            if (args.bits.size() != 1)
                throw hrf::ConfigError("distance-sweep takes exactly one --bits value");
            cfg.fixed_bits = args.bits[0];
        }
    }
    if (grid_given) cfg.log_mu_grid = args.mu_grid == "log";

    hrf::RunOutcome outcome =
        hrf::run_experiment(cfg, args.out_dir, hrf::config_hash(args.config_path));
    for (const std::string& f : outcome.files)
        std::printf("wrote %s\n", f.c_str());
    if (outcome.validation_failed) {
        std::fprintf(stderr, "validation failed: see the pass column in the CSV\n");
        return kExitValidation;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantized ISAC boundary explorer"};
    app.set_version_flag("--version", std::string(hrf::kToolVersion));
    app.require_subcommand(1);

    CliArgs args;
    CLI::App* boundary = app.add_subcommand("boundary", "CRB/rate Pareto boundary per ADC resolution");
    CLI::App* distance = app.add_subcommand("distance-sweep", "endpoint CRB and rate vs target distance");
    CLI::App* min_bits = app.add_subcommand("min-bits", "minimum ADC bits over sampled target positions");
    CLI::App* validate = app.add_subcommand("validate-fim", "FIM implementation self-checks");
    for (CLI::App* sub : {boundary, distance, min_bits, validate})
        add_common_options(sub, args);

    CLI::Option* bits_opt =
        boundary->add_option("--bits", args.bits, "ADC bit list, e.g. 1,2,4")
            ->delimiter(',');
    CLI::Option* fixed_bits_opt =
        distance->add_option("--bits", args.bits, "fixed ADC resolution")
            ->delimiter(',');
    CLI::Option* grid_opt =
        boundary->add_option("--mu-grid", args.mu_grid, "rate-floor grid spacing")
            ->check(CLI::IsMember({"lin", "log"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    hrf::ExperimentKind kind = hrf::ExperimentKind::boundary;
    bool bits_given = false;
    bool grid_given = false;
    if (boundary->parsed()) {
        kind = hrf::ExperimentKind::boundary;
        bits_given = bits_opt->count() > 0;
        grid_given = grid_opt->count() > 0;
    } else if (distance->parsed()) {
        kind = hrf::ExperimentKind::distance_sweep;
        bits_given = fixed_bits_opt->count() > 0;
    } else if (min_bits->parsed()) {
        kind = hrf::ExperimentKind::min_bits;
    } else if (validate->parsed()) {
        kind = hrf::ExperimentKind::validate_fim;
    }

    try {
        return run(kind, args, bits_given, grid_given);
    } catch (const hrf::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::filesystem::filesystem_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return kExitSolver;
    }
}
