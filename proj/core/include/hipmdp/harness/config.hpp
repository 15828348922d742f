#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"

#include "hipmdp/domains/hiv.hpp"
#include "hipmdp/domains/tasks.hpp"
#include "hipmdp/domains/toy.hpp"
#include "hipmdp/latent/transition_model.hpp"
#include "hipmdp/policy/learner.hpp"

namespace hipmdp::harness {

enum class AgentKind { HipMdp, OneSizeFitsAll, PersonallyTailored };
enum class ModelMode { TrueSimulator, GpApprox };

std::string to_string(AgentKind kind);
std::string to_string(ModelMode mode);
std::string to_string(domains::DomainKind domain);
AgentKind parse_agent(const std::string& name);
ModelMode parse_model_mode(const std::string& name);
domains::DomainKind parse_domain(const std::string& name);

// Policy-side knobs beyond the learner itself.
struct PolicySection {
    std::vector<Eigen::Index> hidden_layers{64, 64};
    std::size_t batch_size{32};
    double learning_rate{1e-3};
    int target_sync_every{500};
    double priority_floor{1e-6};
    double replay_alpha{0.6};
    double beta_start{0.4};
    double beta_end{1.0};
    long beta_anneal_steps{20000};
    std::size_t buffer_capacity{20000};
    int rollouts_per_episode{100};
    int rollout_horizon{10};
    int train_steps_per_episode{200};
    double reward_scale{1.0};
    double epsilon_floor{0.05};
    double warm_fraction{0.2};
    // Synthetic tuples are evicted when w_b moves farther than this.
    double synthetic_stale_threshold{0.5};
};

struct InferSection {
    int max_iterations{60};
    double grad_tolerance{1e-5};
    int restarts{3};
    int max_transitions{200};  // most recent transitions fed to inference
};

struct ExperimentConfig {
    domains::DomainKind domain{domains::DomainKind::Toy};
    int instances{20};
    int episodes_per_instance{15};
    Eigen::Index latent_dim{2};
    Eigen::Index support_size{80};
    Eigen::Index candidate_cap{600};
    Eigen::Index instance_rows_cap{400};
    int min_fit_transitions{10};
    double gamma{0.98};
    std::uint64_t seed{0};
    std::string run_id;  // derived from (domain, agent, seed) when empty

    domains::ToyConfig toy;
    domains::HivConfig hiv;
    gp::FitConfig gp_fit;
    latent::AnnealConfig anneal{.steps = 600};
    latent::AnnealConfig episode_anneal{.steps = 200};
    InferSection infer;
    PolicySection policy;

    static ExperimentConfig defaults(domains::DomainKind domain);

    // Throws std::invalid_argument with the offending key on malformed input.
    static ExperimentConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    void validate() const;

    latent::TransitionModelConfig transition_config(Eigen::Index latent_dim_override) const;
    policy::LearnerConfig learner_config() const;
};

}  // namespace hipmdp::harness
