#include "hipmdp/harness/config.hpp"

#include <set>
#include <stdexcept>

namespace hipmdp::harness {

namespace {

void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                const std::string& section) {
    for (const auto& [key, value] : j.items()) {
        if (allowed.count(key) == 0) {
            throw std::invalid_argument("config: unknown key '" + key + "' in " + section);
        }
    }
}

latent::AnnealConfig anneal_from_json(const nlohmann::json& j, const std::string& section,
                                      latent::AnnealConfig base) {
    check_keys(j, {"steps", "cooling", "holdout_fraction", "initial_temperature"}, section);
    base.steps = j.value("steps", base.steps);
    base.cooling = j.value("cooling", base.cooling);
    base.holdout_fraction = j.value("holdout_fraction", base.holdout_fraction);
    base.initial_temperature = j.value("initial_temperature", base.initial_temperature);
    return base;
}

nlohmann::json anneal_to_json(const latent::AnnealConfig& a) {
    return {{"steps", a.steps},
            {"cooling", a.cooling},
            {"holdout_fraction", a.holdout_fraction},
            {"initial_temperature", a.initial_temperature}};
}

}  // namespace

std::string to_string(AgentKind kind) {
    switch (kind) {
        case AgentKind::HipMdp: return "hipmdp";
        case AgentKind::OneSizeFitsAll: return "onesize";
        case AgentKind::PersonallyTailored: return "personal";
    }
    return "?";
}

std::string to_string(ModelMode mode) {
    return mode == ModelMode::TrueSimulator ? "sim" : "gp";
}

std::string to_string(domains::DomainKind domain) {
    return domain == domains::DomainKind::Toy ? "toy" : "hiv";
}

AgentKind parse_agent(const std::string& name) {
    if (name == "hipmdp") return AgentKind::HipMdp;
    if (name == "onesize") return AgentKind::OneSizeFitsAll;
    if (name == "personal") return AgentKind::PersonallyTailored;
    throw std::invalid_argument("unknown agent kind '" + name + "'");
}

ModelMode parse_model_mode(const std::string& name) {
    if (name == "sim") return ModelMode::TrueSimulator;
    if (name == "gp") return ModelMode::GpApprox;
    throw std::invalid_argument("unknown model mode '" + name + "'");
}

domains::DomainKind parse_domain(const std::string& name) {
    if (name == "toy") return domains::DomainKind::Toy;
    if (name == "hiv") return domains::DomainKind::Hiv;
    throw std::invalid_argument("unknown domain '" + name + "'");
}

ExperimentConfig ExperimentConfig::defaults(domains::DomainKind domain) {
    ExperimentConfig cfg;
    cfg.domain = domain;
    if (domain == domains::DomainKind::Toy) {
        cfg.instances = 20;
        cfg.episodes_per_instance = 15;
        cfg.support_size = 80;
        cfg.policy.rollouts_per_episode = 100;
        cfg.policy.rollout_horizon = 10;
        cfg.policy.reward_scale = 1.0;
        cfg.policy.buffer_capacity = 20000;
    } else {
        cfg.instances = 5;
        cfg.episodes_per_instance = 30;
        cfg.support_size = 120;
        cfg.policy.rollouts_per_episode = 30;
        cfg.policy.rollout_horizon = 5;
        cfg.policy.reward_scale = 1e-5;
        cfg.policy.buffer_capacity = 50000;
    }
    return cfg;
}

void ExperimentConfig::validate() const {
    if (!(gamma > 0.0) || gamma > 1.0) {
        throw std::invalid_argument("config: gamma must lie in (0, 1]");
    }
    if (instances < 1 || episodes_per_instance < 1) {
        throw std::invalid_argument("config: instances and episodes_per_instance must be >= 1");
    }
    if (latent_dim < 0) throw std::invalid_argument("config: latent_dim must be >= 0");
    if (support_size < 1) throw std::invalid_argument("config: support_size must be >= 1");
    if (policy.train_steps_per_episode < 0 || policy.rollouts_per_episode < 0 ||
        policy.rollout_horizon < 1) {
        throw std::invalid_argument("config: invalid policy section");
    }
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    check_keys(j,
               {"domain", "instances", "episodes_per_instance", "latent_dim", "support_size",
                "candidate_cap", "instance_rows_cap", "min_fit_transitions", "gamma", "seed",
                "run_id", "toy", "hiv", "gp_fit", "anneal", "episode_anneal", "infer", "policy"},
               "top level");
    ExperimentConfig cfg = defaults(parse_domain(j.value("domain", std::string("toy"))));
    cfg.instances = j.value("instances", cfg.instances);
    cfg.episodes_per_instance = j.value("episodes_per_instance", cfg.episodes_per_instance);
    cfg.latent_dim = j.value("latent_dim", cfg.latent_dim);
    cfg.support_size = j.value("support_size", cfg.support_size);
    cfg.candidate_cap = j.value("candidate_cap", cfg.candidate_cap);
    cfg.instance_rows_cap = j.value("instance_rows_cap", cfg.instance_rows_cap);
    cfg.min_fit_transitions = j.value("min_fit_transitions", cfg.min_fit_transitions);
    cfg.gamma = j.value("gamma", cfg.gamma);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.run_id = j.value("run_id", cfg.run_id);

    if (j.contains("toy")) {
        const auto& t = j.at("toy");
        check_keys(t,
                   {"step_size", "noise_scale", "episode_cap", "goal_x_lo", "goal_x_hi",
                    "goal_y_lo", "goal_y_hi", "start_y_hi", "step_reward", "goal_reward"},
                   "toy");
        cfg.toy.step_size = t.value("step_size", cfg.toy.step_size);
        cfg.toy.noise_scale = t.value("noise_scale", cfg.toy.noise_scale);
        cfg.toy.episode_cap = t.value("episode_cap", cfg.toy.episode_cap);
        cfg.toy.goal_x_lo = t.value("goal_x_lo", cfg.toy.goal_x_lo);
        cfg.toy.goal_x_hi = t.value("goal_x_hi", cfg.toy.goal_x_hi);
        cfg.toy.goal_y_lo = t.value("goal_y_lo", cfg.toy.goal_y_lo);
        cfg.toy.goal_y_hi = t.value("goal_y_hi", cfg.toy.goal_y_hi);
        cfg.toy.start_y_hi = t.value("start_y_hi", cfg.toy.start_y_hi);
        cfg.toy.step_reward = t.value("step_reward", cfg.toy.step_reward);
        cfg.toy.goal_reward = t.value("goal_reward", cfg.toy.goal_reward);
    }
    if (j.contains("hiv")) {
        check_keys(j.at("hiv"),
                   {"eps1_max", "eps2_max", "reward_virus_coeff", "reward_rti_coeff",
                    "reward_pi_coeff", "reward_effector_coeff", "dt", "decision_interval",
                    "episode_cap", "perturbation_delta", "perturbed_coeffs", "log_floor",
                    "initial_state", "obs_shift", "obs_scale"},
                   "hiv");
        cfg.hiv = domains::HivConfig::from_json(j.at("hiv"));
    }
    if (j.contains("gp_fit")) {
        const auto& g = j.at("gp_fit");
        check_keys(g, {"max_iterations", "grad_tolerance"}, "gp_fit");
        cfg.gp_fit.max_iterations = g.value("max_iterations", cfg.gp_fit.max_iterations);
        cfg.gp_fit.grad_tolerance = g.value("grad_tolerance", cfg.gp_fit.grad_tolerance);
    }
    if (j.contains("anneal")) cfg.anneal = anneal_from_json(j.at("anneal"), "anneal", cfg.anneal);
    if (j.contains("episode_anneal")) {
        cfg.episode_anneal = anneal_from_json(j.at("episode_anneal"), "episode_anneal",
                                              cfg.episode_anneal);
    }
    if (j.contains("infer")) {
        const auto& i = j.at("infer");
        check_keys(i, {"max_iterations", "grad_tolerance", "restarts", "max_transitions"},
                   "infer");
        cfg.infer.max_iterations = i.value("max_iterations", cfg.infer.max_iterations);
        cfg.infer.grad_tolerance = i.value("grad_tolerance", cfg.infer.grad_tolerance);
        cfg.infer.restarts = i.value("restarts", cfg.infer.restarts);
        cfg.infer.max_transitions = i.value("max_transitions", cfg.infer.max_transitions);
    }
    if (j.contains("policy")) {
        const auto& p = j.at("policy");
        check_keys(p,
                   {"hidden_layers", "batch_size", "learning_rate", "target_sync_every",
                    "priority_floor", "replay_alpha", "beta_start", "beta_end",
                    "beta_anneal_steps", "buffer_capacity", "rollouts_per_episode",
                    "rollout_horizon", "train_steps_per_episode", "reward_scale",
                    "epsilon_floor", "warm_fraction", "synthetic_stale_threshold"},
                   "policy");
        auto& pol = cfg.policy;
        if (p.contains("hidden_layers")) {
            pol.hidden_layers.clear();
            for (const auto& h : p.at("hidden_layers")) {
                pol.hidden_layers.push_back(h.get<Eigen::Index>());
            }
        }
        pol.batch_size = p.value("batch_size", pol.batch_size);
        pol.learning_rate = p.value("learning_rate", pol.learning_rate);
        pol.target_sync_every = p.value("target_sync_every", pol.target_sync_every);
        pol.priority_floor = p.value("priority_floor", pol.priority_floor);
        pol.replay_alpha = p.value("replay_alpha", pol.replay_alpha);
        pol.beta_start = p.value("beta_start", pol.beta_start);
        pol.beta_end = p.value("beta_end", pol.beta_end);
        pol.beta_anneal_steps = p.value("beta_anneal_steps", pol.beta_anneal_steps);
        pol.buffer_capacity = p.value("buffer_capacity", pol.buffer_capacity);
        pol.rollouts_per_episode = p.value("rollouts_per_episode", pol.rollouts_per_episode);
        pol.rollout_horizon = p.value("rollout_horizon", pol.rollout_horizon);
        pol.train_steps_per_episode =
            p.value("train_steps_per_episode", pol.train_steps_per_episode);
        pol.reward_scale = p.value("reward_scale", pol.reward_scale);
        pol.epsilon_floor = p.value("epsilon_floor", pol.epsilon_floor);
        pol.warm_fraction = p.value("warm_fraction", pol.warm_fraction);
        pol.synthetic_stale_threshold =
            p.value("synthetic_stale_threshold", pol.synthetic_stale_threshold);
    }
    cfg.validate();
    return cfg;
}

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["domain"] = to_string(domain);
    j["instances"] = instances;
    j["episodes_per_instance"] = episodes_per_instance;
    j["latent_dim"] = latent_dim;
    j["support_size"] = support_size;
    j["candidate_cap"] = candidate_cap;
    j["instance_rows_cap"] = instance_rows_cap;
    j["min_fit_transitions"] = min_fit_transitions;
    j["gamma"] = gamma;
    j["seed"] = seed;
    j["run_id"] = run_id;
    j["toy"] = {{"step_size", toy.step_size},
                {"noise_scale", toy.noise_scale},
                {"episode_cap", toy.episode_cap},
                {"goal_x_lo", toy.goal_x_lo},
                {"goal_x_hi", toy.goal_x_hi},
                {"goal_y_lo", toy.goal_y_lo},
                {"goal_y_hi", toy.goal_y_hi},
                {"start_y_hi", toy.start_y_hi},
                {"step_reward", toy.step_reward},
                {"goal_reward", toy.goal_reward}};
    j["hiv"] = hiv.to_json();
    j["gp_fit"] = {{"max_iterations", gp_fit.max_iterations},
                   {"grad_tolerance", gp_fit.grad_tolerance}};
    j["anneal"] = anneal_to_json(anneal);
    j["episode_anneal"] = anneal_to_json(episode_anneal);
    j["infer"] = {{"max_iterations", infer.max_iterations},
                  {"grad_tolerance", infer.grad_tolerance},
                  {"restarts", infer.restarts},
                  {"max_transitions", infer.max_transitions}};
    j["policy"] = {{"hidden_layers", policy.hidden_layers},
                   {"batch_size", policy.batch_size},
                   {"learning_rate", policy.learning_rate},
                   {"target_sync_every", policy.target_sync_every},
                   {"priority_floor", policy.priority_floor},
                   {"replay_alpha", policy.replay_alpha},
                   {"beta_start", policy.beta_start},
                   {"beta_end", policy.beta_end},
                   {"beta_anneal_steps", policy.beta_anneal_steps},
                   {"buffer_capacity", policy.buffer_capacity},
                   {"rollouts_per_episode", policy.rollouts_per_episode},
                   {"rollout_horizon", policy.rollout_horizon},
                   {"train_steps_per_episode", policy.train_steps_per_episode},
                   {"reward_scale", policy.reward_scale},
                   {"epsilon_floor", policy.epsilon_floor},
                   {"warm_fraction", policy.warm_fraction},
                   {"synthetic_stale_threshold", policy.synthetic_stale_threshold}};
    return j;
}

latent::TransitionModelConfig ExperimentConfig::transition_config(
    Eigen::Index latent_dim_override) const {
    latent::TransitionModelConfig cfg;
    cfg.layout.state_dim = domain == domains::DomainKind::Toy ? 2 : 6;
    cfg.layout.num_actions = 4;
    cfg.layout.latent_dim = latent_dim_override;
    cfg.support_size = support_size;
    cfg.candidate_cap = candidate_cap;
    cfg.anneal = anneal;
    cfg.episode_anneal = episode_anneal;
    cfg.fit = gp_fit;
    cfg.infer.max_iterations = infer.max_iterations;
    cfg.infer.grad_tolerance = infer.grad_tolerance;
    cfg.infer.restarts = infer.restarts;
    return cfg;
}

policy::LearnerConfig ExperimentConfig::learner_config() const {
    policy::LearnerConfig cfg;
    cfg.network.hidden = policy.hidden_layers;
    cfg.batch_size = policy.batch_size;
    cfg.gamma = gamma;
    cfg.learning_rate = policy.learning_rate;
    cfg.target_sync_every = policy.target_sync_every;
    cfg.priority_floor = policy.priority_floor;
    cfg.beta_start = policy.beta_start;
    cfg.beta_end = policy.beta_end;
    cfg.beta_anneal_steps = policy.beta_anneal_steps;
    return cfg;
}

}  // namespace hipmdp::harness
