#include "hipmdp/harness/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>

namespace hipmdp::harness {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

ReportTables aggregate_results(const std::vector<ExperimentLog>& logs,
                               const ReportOptions& options) {
    if (logs.empty()) throw std::invalid_argument("emit_results: need at least one log");
    const std::string domain = logs.front().meta().domain;
    for (const auto& log : logs) {
        if (log.meta().domain != domain) {
            throw std::invalid_argument("emit_results: logs mix domains '" + domain + "' and '" +
                                        log.meta().domain + "'");
        }
    }

    // (agent, instance, episode) -> samples across logs.
    std::map<std::tuple<std::string, int, int>, std::vector<double>> cells;
    for (const auto& log : logs) {
        for (const auto& r : log.records()) {
            cells[{log.meta().agent, r.instance_index, r.episode}].push_back(r.cum_reward);
        }
    }

    ReportTables tables;
    for (const auto& [key, values] : cells) {
        CurvePoint p;
        p.agent = std::get<0>(key);
        p.instance_index = std::get<1>(key);
        p.episode = std::get<2>(key);
        p.n = static_cast<int>(values.size());
        double mean = 0.0;
        for (const double v : values) mean += v;
        mean /= static_cast<double>(values.size());
        p.mean = mean;
        double var = 0.0;
        if (values.size() > 1) {
            for (const double v : values) var += (v - mean) * (v - mean);
            var /= static_cast<double>(values.size() - 1);
        }
        p.stderr_mean = values.size() > 1
                            ? std::sqrt(var / static_cast<double>(values.size()))
                            : 0.0;
        tables.curve.push_back(std::move(p));
    }

    // Threshold: 90% of the way from the worst to the best observed mean.
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& p : tables.curve) {
        lo = std::min(lo, p.mean);
        hi = std::max(hi, p.mean);
    }
    const double threshold = options.threshold ? *options.threshold : lo + 0.9 * (hi - lo);

    std::map<std::string, std::vector<const CurvePoint*>> per_agent;
    for (const auto& p : tables.curve) per_agent[p.agent].push_back(&p);
    for (auto& [agent, points] : per_agent) {
        // cells is ordered, so points are already sorted by (instance, episode).
        SummaryRow row;
        row.agent = agent;
        row.threshold = threshold;
        row.final_mean = points.back()->mean;
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (points[i]->mean >= threshold) {
                row.episodes_to_threshold = static_cast<int>(i);
                break;
            }
        }
        tables.summary.push_back(std::move(row));
    }
    return tables;
}

ReportTables emit_results(const std::vector<ExperimentLog>& logs,
                          const std::filesystem::path& out_dir, const ReportOptions& options) {
    ReportTables tables = aggregate_results(logs, options);
    std::filesystem::create_directories(out_dir);

    std::ofstream curve(out_dir / "curve.csv");
    if (!curve) throw std::runtime_error("emit_results: cannot write curve.csv");
    curve << "agent,instance_index,episode,mean_cum_reward,stderr_cum_reward,n\n";
    for (const auto& p : tables.curve) {
        curve << p.agent << ',' << p.instance_index << ',' << p.episode << ',' << fmt(p.mean)
              << ',' << fmt(p.stderr_mean) << ',' << p.n << '\n';
    }

    std::ofstream summary(out_dir / "summary.csv");
    if (!summary) throw std::runtime_error("emit_results: cannot write summary.csv");
    summary << "agent,final_mean,threshold,episodes_to_threshold\n";
    for (const auto& row : tables.summary) {
        summary << row.agent << ',' << fmt(row.final_mean) << ',' << fmt(row.threshold) << ','
                << row.episodes_to_threshold << '\n';
    }
    return tables;
}

}  // namespace hipmdp::harness
