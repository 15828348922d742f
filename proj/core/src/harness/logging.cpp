#include "hipmdp/harness/logging.hpp"

#include <cmath>
#include <stdexcept>

namespace hipmdp::harness {

nlohmann::json ExperimentLog::meta_to_json(const LogMeta& meta) {
    return {{"type", "meta"},
            {"run_id", meta.run_id},
            {"agent", meta.agent},
            {"domain", meta.domain},
            {"model_mode", meta.model_mode},
            {"seed", meta.seed},
            {"instances", meta.instances},
            {"episodes_per_instance", meta.episodes_per_instance}};
}

nlohmann::json ExperimentLog::record_to_json(const EpisodeRecord& r) {
    nlohmann::json j{{"type", "episode"},
                     {"instance_id", r.instance_id},
                     {"instance_index", r.instance_index},
                     {"episode", r.episode},
                     {"steps", r.steps},
                     {"cum_reward", r.cum_reward},
                     {"latent_mean", r.latent_mean}};
    if (r.model_rmse) {
        j["model_rmse"] = *r.model_rmse;
    } else {
        j["model_rmse"] = nullptr;
    }
    return j;
}

void ExperimentLog::append(EpisodeRecord record) {
    if (!records_.empty()) {
        const auto& last = records_.back();
        const bool next_episode =
            record.instance_index == last.instance_index && record.episode == last.episode + 1;
        const bool next_instance =
            record.instance_index == last.instance_index + 1 && record.episode == 0;
        if (!next_episode && !next_instance) {
            throw std::invalid_argument("ExperimentLog: records must be gap-free and ordered");
        }
    } else if (record.instance_index != 0 || record.episode != 0) {
        throw std::invalid_argument("ExperimentLog: first record must be (instance 0, episode 0)");
    }
    records_.push_back(std::move(record));
}

void ExperimentLog::write_jsonl(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open log file " + path.string());
    out << meta_to_json(meta_).dump() << '\n';
    for (const auto& r : records_) out << record_to_json(r).dump() << '\n';
}

ExperimentLog ExperimentLog::read_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open log file " + path.string());
    std::string line;
    ExperimentLog log;
    bool have_meta = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line);
        const std::string type = j.value("type", "");
        if (type == "meta") {
            LogMeta meta;
            meta.run_id = j.value("run_id", "");
            meta.agent = j.value("agent", "");
            meta.domain = j.value("domain", "");
            meta.model_mode = j.value("model_mode", "");
            meta.seed = j.value("seed", std::uint64_t{0});
            meta.instances = j.value("instances", 0);
            meta.episodes_per_instance = j.value("episodes_per_instance", 0);
            log.meta_ = std::move(meta);
            have_meta = true;
        } else if (type == "episode") {
            EpisodeRecord r;
            r.instance_id = j.at("instance_id").get<std::string>();
            r.instance_index = j.at("instance_index").get<int>();
            r.episode = j.at("episode").get<int>();
            r.steps = j.at("steps").get<long>();
            r.cum_reward = j.at("cum_reward").get<double>();
            r.latent_mean = j.at("latent_mean").get<std::vector<double>>();
            if (!j.at("model_rmse").is_null()) r.model_rmse = j.at("model_rmse").get<double>();
            log.append(std::move(r));
        } else {
            throw std::invalid_argument("log line with unknown type in " + path.string());
        }
    }
    if (!have_meta) throw std::invalid_argument("log missing meta header: " + path.string());
    return log;
}

LogWriter::LogWriter(const std::filesystem::path& path, const LogMeta& meta) : out_(path) {
    if (!out_) throw std::runtime_error("cannot open log file " + path.string());
    out_ << ExperimentLog::meta_to_json(meta).dump() << '\n';
    out_.flush();
}

void LogWriter::append(const EpisodeRecord& record) {
    out_ << ExperimentLog::record_to_json(record).dump() << '\n';
    out_.flush();
}

TimingWriter::TimingWriter(const std::filesystem::path& path) : out_(path) {
    if (!out_) throw std::runtime_error("cannot open timing file " + path.string());
}

void TimingWriter::append(int instance_index, int episode, double wall_ms) {
    out_ << nlohmann::json{{"instance_index", instance_index},
                           {"episode", episode},
                           {"wall_ms", wall_ms}}
                .dump()
         << '\n';
    out_.flush();
}

TrajectoryWriter::TrajectoryWriter(const std::filesystem::path& path, Eigen::Index state_dim)
    : out_(path), state_dim_(state_dim) {
    if (!out_) throw std::runtime_error("cannot open trajectory file " + path.string());
    out_ << "instance_id,episode,step";
    for (Eigen::Index d = 0; d < state_dim_; ++d) out_ << ",state" << d;
    out_ << ",action,reward,done\n";
}

void TrajectoryWriter::append(const std::string& instance_id, int episode, long step,
                              const Eigen::VectorXd& raw_state, int action, double reward,
                              bool done) {
    out_ << instance_id << ',' << episode << ',' << step;
    char buf[32];
    for (Eigen::Index d = 0; d < state_dim_; ++d) {
        std::snprintf(buf, sizeof(buf), "%.17g", raw_state(d));
        out_ << ',' << buf;
    }
    std::snprintf(buf, sizeof(buf), "%.17g", reward);
    out_ << ',' << action << ',' << buf << ',' << (done ? 1 : 0) << '\n';
}

}  // namespace hipmdp::harness
