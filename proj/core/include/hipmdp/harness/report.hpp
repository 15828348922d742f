#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "hipmdp/harness/logging.hpp"

namespace hipmdp::harness {

struct ReportOptions {
    // Reward level for the episodes-to-threshold summary. Default: 90% of the
    // way from the worst to the best per-episode mean across agents.
    std::optional<double> threshold;
};

struct CurvePoint {
    std::string agent;
    int instance_index{0};
    int episode{0};
    double mean{0.0};
    double stderr_mean{0.0};
    int n{0};
};

struct SummaryRow {
    std::string agent;
    double final_mean{0.0};
    double threshold{0.0};
    int episodes_to_threshold{-1};  // flattened episode count; -1 when never reached
};

struct ReportTables {
    std::vector<CurvePoint> curve;
    std::vector<SummaryRow> summary;
};

// Aggregates per-episode cumulative reward as mean +- standard error per
// agent kind, aligned by (instance, episode). Logs must share a domain;
// mismatches raise std::invalid_argument. Output is invariant to log order.
ReportTables aggregate_results(const std::vector<ExperimentLog>& logs,
                               const ReportOptions& options = {});

// Writes curve.csv and summary.csv under out_dir and returns the tables.
ReportTables emit_results(const std::vector<ExperimentLog>& logs,
                          const std::filesystem::path& out_dir,
                          const ReportOptions& options = {});

}  // namespace hipmdp::harness
