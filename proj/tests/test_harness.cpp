#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "hipmdp/harness/experiment.hpp"
#include "hipmdp/harness/report.hpp"
#include "hipmdp/policy/learner.hpp"

using namespace hipmdp;
using namespace hipmdp::harness;

namespace {

// Desk-scale toy configuration keeping GP work tiny.
ExperimentConfig tiny_toy(int instances, int episodes, std::uint64_t seed) {
    ExperimentConfig cfg = ExperimentConfig::defaults(domains::DomainKind::Toy);
    cfg.instances = instances;
    cfg.episodes_per_instance = episodes;
    cfg.seed = seed;
    cfg.toy.episode_cap = 20;
    cfg.support_size = 40;
    cfg.candidate_cap = 120;
    cfg.instance_rows_cap = 120;
    cfg.anneal.steps = 50;
    cfg.episode_anneal.steps = 30;
    cfg.gp_fit.max_iterations = 40;
    cfg.infer.max_iterations = 25;
    cfg.infer.restarts = 1;
    cfg.policy.rollouts_per_episode = 6;
    cfg.policy.rollout_horizon = 3;
    cfg.policy.train_steps_per_episode = 15;
    cfg.policy.batch_size = 8;
    cfg.policy.buffer_capacity = 2000;
    return cfg;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

ExperimentLog synthetic_log(const std::string& agent, const std::string& domain,
                            const std::vector<double>& rewards) {
    LogMeta meta;
    meta.run_id = agent + "-x";
    meta.agent = agent;
    meta.domain = domain;
    meta.model_mode = "gp";
    meta.instances = 1;
    meta.episodes_per_instance = static_cast<int>(rewards.size());
    ExperimentLog log(meta);
    for (std::size_t e = 0; e < rewards.size(); ++e) {
        EpisodeRecord r;
        r.instance_id = "inst000";
        r.instance_index = 0;
        r.episode = static_cast<int>(e);
        r.steps = 5;
        r.cum_reward = rewards[e];
        log.append(r);
    }
    return log;
}

}  // namespace

TEST_CASE("run_hipmdp accounting: one instance, one episode, one record") {
    const auto out = run_hipmdp(tiny_toy(1, 1, 3));
    CHECK(out.log.records().size() == 1);
    CHECK(out.log.records().front().instance_index == 0);
    CHECK(out.log.records().front().episode == 0);
    CHECK(out.log.meta().agent == "hipmdp");
}

TEST_CASE("identical master seeds give byte-identical logs") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "hipmdp_determinism_test";
    fs::create_directories(dir);
    const auto cfg = tiny_toy(2, 2, 17);
    run_hipmdp(cfg).log.write_jsonl(dir / "a.jsonl");
    run_hipmdp(cfg).log.write_jsonl(dir / "b.jsonl");
    CHECK(read_file(dir / "a.jsonl") == read_file(dir / "b.jsonl"));
    CHECK(read_file(dir / "a.jsonl").size() > 0);
    fs::remove_all(dir);
}

TEST_CASE("log round trip preserves records and rejects gaps") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "hipmdp_log_test";
    fs::create_directories(dir);
    const auto out = run_hipmdp(tiny_toy(1, 3, 5));
    out.log.write_jsonl(dir / "log.jsonl");
    const auto back = ExperimentLog::read_jsonl(dir / "log.jsonl");
    CHECK(back.records().size() == out.log.records().size());
    CHECK(back.meta().agent == out.log.meta().agent);
    for (std::size_t i = 0; i < back.records().size(); ++i) {
        CHECK(back.records()[i].cum_reward == out.log.records()[i].cum_reward);
    }
    fs::remove_all(dir);

    ExperimentLog bad(out.log.meta());
    EpisodeRecord r;
    r.instance_index = 0;
    r.episode = 1;  // gap: must start at episode 0
    CHECK_THROWS_AS(bad.append(r), std::invalid_argument);
}

TEST_CASE("personally tailored baseline with one instance matches hipmdp without latent dims") {
    // Structural equivalence: with B = 1 and K = 0 the two loops coincide;
    // rng streams are labeled identically, so the curves agree exactly.
    for (const std::uint64_t seed : {11u, 12u, 13u, 14u, 15u}) {
        auto cfg = tiny_toy(1, 3, seed);
        cfg.latent_dim = 0;
        const auto hip = run_hipmdp(cfg);
        const auto pt = run_baseline(AgentKind::PersonallyTailored, cfg, ModelMode::GpApprox);
        REQUIRE(hip.log.records().size() == pt.log.records().size());
        for (std::size_t i = 0; i < hip.log.records().size(); ++i) {
            CHECK(hip.log.records()[i].cum_reward == pt.log.records()[i].cum_reward);
            CHECK(hip.log.records()[i].steps == pt.log.records()[i].steps);
        }
    }
}

TEST_CASE("equal per-instance real-step budgets across agent kinds") {
    const auto cfg = tiny_toy(2, 2, 23);
    const auto hip = run_hipmdp(cfg);
    const auto pt = run_baseline(AgentKind::PersonallyTailored, cfg, ModelMode::GpApprox);
    const auto os = run_baseline(AgentKind::OneSizeFitsAll, cfg, ModelMode::GpApprox);
    CHECK(hip.diagnostics.episode_budget_per_instance == pt.diagnostics.episode_budget_per_instance);
    CHECK(hip.diagnostics.episode_budget_per_instance == os.diagnostics.episode_budget_per_instance);
}

TEST_CASE("personally tailored baseline reconstructs policy and buffer from scratch") {
    const auto cfg = tiny_toy(3, 2, 29);
    const auto out = run_baseline(AgentKind::PersonallyTailored, cfg, ModelMode::GpApprox);
    REQUIRE(out.diagnostics.policy_start_checksums.size() == 3);
    REQUIRE(out.diagnostics.buffer_start_sizes == std::vector<std::size_t>{0, 0, 0});
    // Each instance's initial policy equals an independent fresh construction
    // from the same labeled stream: no state carried across the boundary.
    const Rng master(cfg.seed);
    for (std::uint64_t b = 0; b < 3; ++b) {
        Rng net_rng = master.fork("policy").fork(b);
        policy::DdqnLearner fresh(2, 4, cfg.learner_config(), net_rng);
        CHECK(out.diagnostics.policy_start_checksums[b] == fresh.online().checksum());
    }
}

TEST_CASE("one-size-fits-all keeps a single policy across instances") {
    const auto cfg = tiny_toy(3, 2, 31);
    const auto out = run_baseline(AgentKind::OneSizeFitsAll, cfg, ModelMode::GpApprox);
    REQUIRE(out.diagnostics.policy_start_checksums.size() == 3);
    // After training in instance 0 the instance-1 starting policy must differ
    // from a fresh one (state carries over), and the buffer is non-empty.
    CHECK(out.diagnostics.buffer_start_sizes[0] == 0);
    CHECK(out.diagnostics.buffer_start_sizes[1] > 0);
    const Rng master(cfg.seed);
    Rng net_rng = master.fork("policy").fork(std::uint64_t{1});
    policy::DdqnLearner fresh(2, 4, cfg.learner_config(), net_rng);
    CHECK(out.diagnostics.policy_start_checksums[1] != fresh.online().checksum());
}

TEST_CASE("baselines run with true-simulator synthetic batches") {
    auto cfg = tiny_toy(1, 2, 37);
    const auto out = run_baseline(AgentKind::PersonallyTailored, cfg, ModelMode::TrueSimulator);
    CHECK(out.log.records().size() == 2);
    CHECK_FALSE(out.model.has_value());  // model absent in simulator mode
    for (const auto& r : out.log.records()) CHECK_FALSE(r.model_rmse.has_value());
}

TEST_CASE("hipmdp agent refuses the simulator model mode") {
    CHECK_THROWS_AS(run_baseline(AgentKind::HipMdp, tiny_toy(1, 1, 1), ModelMode::TrueSimulator),
                    std::invalid_argument);
}

// One deterministic greedy policy picks one gate, so it cannot satisfy both
// latent classes: the domain rule behind the one-size-fits-all ceiling.
TEST_CASE("deterministic survey policy succeeds only for the matching class") {
    const domains::ToyConfig cfg;
    const auto run_class = [&](domains::ToyClass cls, int parity) {
        domains::ToyParams params{cls, 0.0};  // zero noise: fully deterministic
        Rng rng(1);
        Eigen::Vector2d s(0.2, 0.1);
        // Hold the first-target phase: a policy committed to one gate.
        for (int step = 0; step < cfg.episode_cap / 2; ++step) {
            const auto a = static_cast<domains::ToyAction>(toy_survey_action(s, parity, 0, cfg));
            const auto r = domains::toy_step(s, a, params, cfg, rng);
            if (r.done) return true;
            s = r.next;
        }
        return false;
    };
    // Blue-seeking policy (parity 0): succeeds for blue, never for red.
    CHECK(run_class(domains::ToyClass::Blue, 0));
    CHECK_FALSE(run_class(domains::ToyClass::Red, 0));
    // Red-seeking policy (parity 1): the mirror image.
    CHECK(run_class(domains::ToyClass::Red, 1));
    CHECK_FALSE(run_class(domains::ToyClass::Blue, 1));
}

TEST_CASE("emit_results single log: means equal raw values with zero standard error") {
    const auto log = synthetic_log("hipmdp", "toy", {1.0, 2.0, 0.5});
    const auto tables = aggregate_results({log});
    REQUIRE(tables.curve.size() == 3);
    CHECK(tables.curve[0].mean == 1.0);
    CHECK(tables.curve[1].mean == 2.0);
    CHECK(tables.curve[2].mean == 0.5);
    for (const auto& p : tables.curve) {
        CHECK(p.stderr_mean == 0.0);
        CHECK(p.n == 1);
    }
}

TEST_CASE("emit_results hand-computed mean and standard error") {
    const auto a = synthetic_log("hipmdp", "toy", {1.0});
    const auto b = synthetic_log("hipmdp", "toy", {2.0});
    const auto tables = aggregate_results({a, b});
    REQUIRE(tables.curve.size() == 1);
    CHECK(tables.curve[0].mean == 1.5);
    CHECK(tables.curve[0].stderr_mean == 0.5);  // sd = sqrt(0.5), se = sd/sqrt(2)
    CHECK(tables.curve[0].n == 2);
}

TEST_CASE("emit_results is invariant to log order and writes csv files") {
    namespace fs = std::filesystem;
    const auto a = synthetic_log("hipmdp", "toy", {1.0, 3.0});
    const auto b = synthetic_log("personal", "toy", {0.0, 2.0});
    const fs::path d1 = fs::temp_directory_path() / "hipmdp_report_1";
    const fs::path d2 = fs::temp_directory_path() / "hipmdp_report_2";
    emit_results({a, b}, d1);
    emit_results({b, a}, d2);
    CHECK(read_file(d1 / "curve.csv") == read_file(d2 / "curve.csv"));
    CHECK(read_file(d1 / "summary.csv") == read_file(d2 / "summary.csv"));
    CHECK(read_file(d1 / "curve.csv").find("agent,instance_index,episode") == 0);
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST_CASE("emit_results rejects mixed domains") {
    const auto a = synthetic_log("hipmdp", "toy", {1.0});
    const auto b = synthetic_log("hipmdp", "hiv", {1.0});
    CHECK_THROWS_AS(aggregate_results({a, b}), std::invalid_argument);
}

TEST_CASE("config validation catches bad values and unknown keys") {
    auto cfg = ExperimentConfig::defaults(domains::DomainKind::Toy);
    cfg.gamma = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.gamma = 1.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    nlohmann::json j{{"domain", "toy"}, {"bogus_key", 1}};
    CHECK_THROWS_AS(ExperimentConfig::from_json(j), std::invalid_argument);
    nlohmann::json bad_section{{"domain", "toy"}, {"policy", {{"unknown", 2}}}};
    CHECK_THROWS_AS(ExperimentConfig::from_json(bad_section), std::invalid_argument);
}

TEST_CASE("config json round trip preserves every section") {
    auto cfg = ExperimentConfig::defaults(domains::DomainKind::Hiv);
    cfg.seed = 42;
    cfg.policy.rollouts_per_episode = 12;
    cfg.infer.max_transitions = 99;
    cfg.anneal.steps = 123;
    const auto back = ExperimentConfig::from_json(cfg.to_json());
    CHECK(back.domain == domains::DomainKind::Hiv);
    CHECK(back.seed == 42);
    CHECK(back.policy.rollouts_per_episode == 12);
    CHECK(back.infer.max_transitions == 99);
    CHECK(back.anneal.steps == 123);
    CHECK(back.hiv.dt == cfg.hiv.dt);
}

TEST_CASE("latent weights appear in hipmdp logs once the model is fitted") {
    auto cfg = tiny_toy(2, 2, 41);
    cfg.latent_dim = 2;
    const auto out = run_hipmdp(cfg);
    for (const auto& r : out.log.records()) {
        CHECK(r.latent_mean.size() == 2);
    }
    CHECK(out.model.has_value());
    CHECK(out.model->latent_table().size() == 2);
}
