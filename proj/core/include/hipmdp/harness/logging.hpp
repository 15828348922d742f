#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace hipmdp::harness {

struct LogMeta {
    std::string run_id;
    std::string agent;
    std::string domain;
    std::string model_mode;
    std::uint64_t seed{0};
    int instances{0};
    int episodes_per_instance{0};
};

// One per-episode record. Wall-clock time deliberately lives outside this
// structure (see TimingWriter) so logs are byte-reproducible under a seed.
struct EpisodeRecord {
    std::string instance_id;
    int instance_index{0};
    int episode{0};
    long steps{0};
    double cum_reward{0.0};
    std::vector<double> latent_mean;
    std::optional<double> model_rmse;
};

class ExperimentLog {
public:
    ExperimentLog() = default;
    explicit ExperimentLog(LogMeta meta) : meta_(std::move(meta)) {}

    const LogMeta& meta() const { return meta_; }
    const std::vector<EpisodeRecord>& records() const { return records_; }

    // Enforces strict (instance, episode) ordering with no gaps.
    void append(EpisodeRecord record);

    void write_jsonl(const std::filesystem::path& path) const;
    static ExperimentLog read_jsonl(const std::filesystem::path& path);

    static nlohmann::json meta_to_json(const LogMeta& meta);
    static nlohmann::json record_to_json(const EpisodeRecord& record);

private:
    LogMeta meta_;
    std::vector<EpisodeRecord> records_;
};

// Streaming writer: header line on open, one JSON line per episode, flushed
// immediately so interrupted runs stay analyzable.
class LogWriter {
public:
    LogWriter(const std::filesystem::path& path, const LogMeta& meta);
    void append(const EpisodeRecord& record);

private:
    std::ofstream out_;
};

// Sidecar for non-deterministic wall-clock measurements.
class TimingWriter {
public:
    explicit TimingWriter(const std::filesystem::path& path);
    void append(int instance_index, int episode, double wall_ms);

private:
    std::ofstream out_;
};

// Trajectory dump: CSV with header instance_id,episode,step,state...,action,reward,done.
class TrajectoryWriter {
public:
    TrajectoryWriter(const std::filesystem::path& path, Eigen::Index state_dim);
    void append(const std::string& instance_id, int episode, long step,
                const Eigen::VectorXd& raw_state, int action, double reward, bool done);

private:
    std::ofstream out_;
    Eigen::Index state_dim_;
};

}  // namespace hipmdp::harness
