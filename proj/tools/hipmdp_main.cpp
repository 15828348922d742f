// Command-line front end: `run` executes one experiment and writes its log,
// timing sidecar and model checkpoint; `report` aggregates logs into CSV
// tables; `probe` queries a checkpointed model's per-class predictive
// variance at a chosen point.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "hipmdp/errors.hpp"
#include "hipmdp/harness/experiment.hpp"
#include "hipmdp/harness/report.hpp"

namespace fs = std::filesystem;
using namespace hipmdp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalidConfig = 2;
constexpr int kExitNumericalFailure = 3;

std::vector<double> parse_csv_doubles(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(std::stod(item));
    }
    return out;
}

int cmd_run(const std::string& domain_name, const std::string& agent_name,
            const std::string& model_name, std::optional<std::uint64_t> seed,
            const std::string& config_path, const std::string& out_dir,
            bool dump_trajectories) {
    harness::ExperimentConfig config;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw std::invalid_argument("cannot open config file " + config_path);
        nlohmann::json j;
        in >> j;
        config = harness::ExperimentConfig::from_json(j);
        if (harness::parse_domain(domain_name) != config.domain) {
            throw std::invalid_argument("--domain disagrees with the config file");
        }
    } else {
        config = harness::ExperimentConfig::defaults(harness::parse_domain(domain_name));
    }
    if (seed) config.seed = *seed;
    const auto agent = harness::parse_agent(agent_name);
    const auto mode = harness::parse_model_mode(model_name);
    if (agent == harness::AgentKind::HipMdp && mode == harness::ModelMode::TrueSimulator) {
        throw std::invalid_argument("--model sim applies to baselines only");
    }
    config.validate();

    const fs::path out(out_dir);
    fs::create_directories(out);
    {
        std::ofstream resolved(out / "resolved_config.json");
        resolved << config.to_json().dump(2) << '\n';
    }

    harness::LogMeta meta;
    meta.run_id = config.run_id.empty()
                      ? harness::to_string(config.domain) + "-" + harness::to_string(agent) +
                            "-s" + std::to_string(config.seed)
                      : config.run_id;
    meta.agent = harness::to_string(agent);
    meta.domain = harness::to_string(config.domain);
    meta.model_mode = harness::to_string(mode);
    meta.seed = config.seed;
    meta.instances = config.instances;
    meta.episodes_per_instance = config.episodes_per_instance;

    harness::LogWriter log_writer(out / "log.jsonl", meta);
    harness::TimingWriter timing(out / "timings.jsonl");
    std::optional<harness::TrajectoryWriter> traj;
    if (dump_trajectories) {
        traj.emplace(out / "trajectories.csv",
                     config.domain == domains::DomainKind::Toy ? 2 : 6);
    }
    harness::RunSinks sinks;
    sinks.log = &log_writer;
    sinks.timing = &timing;
    if (traj) sinks.trajectories = &*traj;

    const auto result = agent == harness::AgentKind::HipMdp
                            ? harness::run_hipmdp(config, sinks)
                            : harness::run_baseline(agent, config, mode, sinks);

    if (result.model) {
        nlohmann::json checkpoint;
        checkpoint["domain"] = harness::to_string(config.domain);
        checkpoint["obs_shift"] = config.hiv.obs_shift;
        checkpoint["obs_scale"] = config.hiv.obs_scale;
        checkpoint["log_floor"] = config.hiv.log_floor;
        checkpoint["model"] = result.model->to_json();
        std::ofstream model_out(out / "model.json");
        model_out << checkpoint.dump() << '\n';
    }
    std::cout << "run complete: " << result.log.records().size() << " episode records in "
              << (out / "log.jsonl").string() << '\n';
    return kExitOk;
}

int cmd_report(const std::vector<std::string>& log_paths, const std::string& out_dir,
               std::optional<double> threshold) {
    std::vector<harness::ExperimentLog> logs;
    logs.reserve(log_paths.size());
    for (const auto& p : log_paths) logs.push_back(harness::ExperimentLog::read_jsonl(p));
    harness::ReportOptions options;
    options.threshold = threshold;
    const auto tables = harness::emit_results(logs, out_dir, options);
    std::cout << "wrote " << (fs::path(out_dir) / "curve.csv").string() << " ("
              << tables.curve.size() << " rows) and summary.csv (" << tables.summary.size()
              << " agents)\n";
    return kExitOk;
}

int cmd_probe(const std::string& checkpoint_path, const std::string& state_text, int action,
              const std::string& weights_text, bool raw_units) {
    std::ifstream in(checkpoint_path);
    if (!in) throw std::invalid_argument("cannot open checkpoint " + checkpoint_path);
    nlohmann::json j;
    in >> j;
    const auto model = latent::TransitionModel::from_json(j.at("model"));
    if (!model.fitted()) throw std::invalid_argument("checkpointed model is not fitted");

    const auto values = parse_csv_doubles(state_text);
    Eigen::VectorXd state =
        Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
    if (raw_units && j.value("domain", std::string()) == "hiv") {
        const auto shift = j.at("obs_shift").get<std::vector<double>>();
        const auto scale = j.at("obs_scale").get<std::vector<double>>();
        const double floor = j.value("log_floor", 1e-8);
        for (Eigen::Index i = 0; i < state.size(); ++i) {
            state(i) = (std::log10(std::max(state(i), floor)) - shift[static_cast<std::size_t>(i)]) /
                       scale[static_cast<std::size_t>(i)];
        }
    }

    std::vector<latent::LatentWeights> classes;
    if (!weights_text.empty()) {
        std::stringstream ss(weights_text);
        std::string group;
        int k = 0;
        while (std::getline(ss, group, ';')) {
            const auto w = parse_csv_doubles(group);
            latent::LatentWeights lw = latent::LatentWeights::standard_prior(
                static_cast<Eigen::Index>(w.size()), "w" + std::to_string(k++));
            lw.mean = Eigen::Map<const Eigen::VectorXd>(w.data(),
                                                        static_cast<Eigen::Index>(w.size()));
            classes.push_back(std::move(lw));
        }
    } else {
        for (const auto& [id, w] : model.latent_table()) classes.push_back(w);
    }
    if (classes.empty()) {
        throw std::invalid_argument("no latent classes: checkpoint table is empty and no "
                                    "--weights were given");
    }

    const Eigen::VectorXd vars = model.uncertainty_probe(state, action, classes);
    for (std::size_t c = 0; c < classes.size(); ++c) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", vars(static_cast<Eigen::Index>(c)));
        std::cout << "class=" << classes[c].instance_id << " variance=" << buf << '\n';
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"HiP-MDP transfer-RL laboratory"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "Execute one experiment run");
    std::string domain = "toy", agent = "hipmdp", model = "gp", config_path, out_dir = "out";
    std::optional<std::uint64_t> seed;
    bool dump_trajectories = false;
    run->add_option("--domain", domain, "Domain: toy or hiv")
        ->check(CLI::IsMember({"toy", "hiv"}));
    run->add_option("--agent", agent, "Agent: hipmdp, onesize or personal")
        ->check(CLI::IsMember({"hipmdp", "onesize", "personal"}));
    run->add_option("--model", model, "Synthetic-batch source for baselines: sim or gp")
        ->check(CLI::IsMember({"sim", "gp"}));
    run->add_option("--seed", seed, "Master seed (overrides the config file)");
    run->add_option("--config", config_path, "JSON config file");
    run->add_option("--out", out_dir, "Output directory");
    run->add_flag("--dump-trajectories", dump_trajectories, "Also write trajectories.csv");

    // report
    auto* report = app.add_subcommand("report", "Aggregate run logs into CSV tables");
    std::vector<std::string> log_paths;
    std::string report_out = "report";
    std::optional<double> threshold;
    report->add_option("logs", log_paths, "log.jsonl files")->required()->expected(-1);
    report->add_option("--out", report_out, "Output directory");
    report->add_option("--threshold", threshold, "Episodes-to-threshold reward level");

    // probe
    auto* probe = app.add_subcommand("probe", "Per-class predictive variance at a point");
    std::string checkpoint, state_text, weights_text;
    int action = 0;
    bool raw_units = false;
    probe->add_option("--checkpoint", checkpoint, "model.json from a run")->required();
    probe->add_option("--state", state_text, "Comma-separated state (observation units)")
        ->required();
    probe->add_option("--action", action, "Action index");
    probe->add_option("--weights", weights_text,
                      "Semicolon-separated latent vectors, e.g. '0.1,0.2;-1,0' "
                      "(default: every instance in the checkpoint)");
    probe->add_flag("--raw", raw_units, "Interpret --state in raw simulator units");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInvalidConfig;
    }

    try {
        if (run->parsed()) {
            return cmd_run(domain, agent, model, seed, config_path, out_dir, dump_trajectories);
        }
        if (report->parsed()) {
            return cmd_report(log_paths, report_out, threshold);
        }
        return cmd_probe(checkpoint, state_text, action, weights_text, raw_units);
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumericalFailure;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "invalid config: " << e.what() << '\n';
        return kExitInvalidConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid config: " << e.what() << '\n';
        return kExitInvalidConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
