#pragma once

#include "hipmdp/policy/qnetwork.hpp"
#include "hipmdp/policy/replay.hpp"
#include "hipmdp/rng.hpp"

namespace hipmdp::policy {

// Double-Q bootstrap: the online network picks the action, the target
// network evaluates it. Terminal transitions return the raw reward.
double ddqn_target(double reward, const Eigen::VectorXd& next_obs, bool done,
                   const QNetwork& online, const QNetwork& target, double gamma);

struct LearnerConfig {
    QNetworkConfig network;
    std::size_t batch_size{32};
    double gamma{0.98};
    double learning_rate{1e-3};
    int target_sync_every{500};
    double priority_floor{1e-6};
    double beta_start{0.4};
    double beta_end{1.0};
    long beta_anneal_steps{20000};
};

// Owns the online/target pair, the optimizer, and the train-step counter.
class DdqnLearner {
public:
    DdqnLearner(Eigen::Index obs_dim, Eigen::Index num_actions, const LearnerConfig& config,
                Rng& rng);

    // One fitted-Q update on a prioritized batch. Updates the sampled
    // priorities to |TD error| + floor and hard-syncs the target network
    // every target_sync_every steps. Returns the batch loss.
    double train_step(PrioritizedBuffer& buffer, Rng& rng);

    int select_action(const Eigen::VectorXd& obs, double epsilon, Rng& rng) const;

    const QNetwork& online() const { return online_; }
    const QNetwork& target() const { return target_; }
    const LearnerConfig& config() const { return config_; }
    long steps() const { return step_count_; }
    double current_beta() const;
    void sync_target() { target_.copy_from(online_); }
    void set_learning_rate(double lr) { adam_.set_learning_rate(lr); }

private:
    LearnerConfig config_;
    QNetwork online_;
    QNetwork target_;
    AdamOptimizer adam_;
    long step_count_{0};
};

// Annealed exploration rate: 1.0 -> floor over the first warm fraction of an
// instance's real-step budget.
double epsilon_schedule(long step, long total_steps, double floor = 0.05,
                        double warm_fraction = 0.2);

}  // namespace hipmdp::policy
