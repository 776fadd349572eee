#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hrf/config.hpp"
#include "hrf/svg.hpp"
#include "hrf/table.hpp"

namespace hrf {

// Experiment drivers: each consumes a parsed config and returns the result
// table with the kind's fixed column schema (metadata header not yet set).
ResultTable run_boundary(const ExperimentConfig& cfg);
ResultTable run_distance_sweep(const ExperimentConfig& cfg);
ResultTable run_min_bits(const ExperimentConfig& cfg);
ResultTable run_validate_fim(const ExperimentConfig& cfg);

// Plot layout for a table of the given kind; throws on schema mismatch.
PlotSpec plot_for(const ResultTable& table, ExperimentKind kind);

struct RunOutcome {
    ResultTable table;
    std::vector<std::string> files;   // paths written (CSV then SVG)
    bool validation_failed = false;   // validate_fim only: any row failed
};

// Dispatches on cfg.kind, stamps the metadata header, writes
// <kind>.csv and <kind>.svg into out_dir (created if missing).
RunOutcome run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                          std::uint64_t config_hash);

}  // namespace hrf
