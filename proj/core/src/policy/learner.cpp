#include "hipmdp/policy/learner.hpp"

#include <cmath>
#include <stdexcept>

#include "hipmdp/errors.hpp"

namespace hipmdp::policy {

double ddqn_target(double reward, const Eigen::VectorXd& next_obs, bool done,
                   const QNetwork& online, const QNetwork& target, double gamma) {
    if (gamma < 0.0 || gamma > 1.0) {
        throw std::invalid_argument("ddqn_target: gamma must lie in [0, 1]");
    }
    if (done) return reward;
    const Eigen::VectorXd q_online = online.forward(next_obs);
    const Eigen::VectorXd q_target = target.forward(next_obs);
    if (!q_online.allFinite() || !q_target.allFinite()) {
        throw NumericalError("ddqn_target: non-finite network output");
    }
    const int pick = QNetwork::argmax_lowest(q_online);
    return reward + gamma * q_target(pick);
}

DdqnLearner::DdqnLearner(Eigen::Index obs_dim, Eigen::Index num_actions,
                         const LearnerConfig& config, Rng& rng)
    : config_(config),
      online_(obs_dim, num_actions, config.network, rng),
      target_(obs_dim, num_actions, config.network, rng),
      adam_(config.learning_rate) {
    target_.copy_from(online_);
}

double DdqnLearner::current_beta() const {
    const double frac = config_.beta_anneal_steps <= 0
                            ? 1.0
                            : std::min(1.0, static_cast<double>(step_count_) /
                                                static_cast<double>(config_.beta_anneal_steps));
    return config_.beta_start + (config_.beta_end - config_.beta_start) * frac;
}

double DdqnLearner::train_step(PrioritizedBuffer& buffer, Rng& rng) {
    const std::size_t batch = config_.batch_size;
    if (buffer.size() < batch) {
        throw std::logic_error("train_step: buffer smaller than batch size");
    }
    const auto sample = buffer.sample(batch, current_beta(), rng);

    const Eigen::Index obs_dim = online_.input_dim();
    Eigen::MatrixXd obs(obs_dim, static_cast<Eigen::Index>(batch));
    Eigen::MatrixXd next_obs(obs_dim, static_cast<Eigen::Index>(batch));
    std::vector<int> actions(batch);
    Eigen::VectorXd targets(static_cast<Eigen::Index>(batch));
    for (std::size_t b = 0; b < batch; ++b) {
        const auto& t = buffer.at(sample.indices[b]);
        obs.col(static_cast<Eigen::Index>(b)) = t.state;
        next_obs.col(static_cast<Eigen::Index>(b)) = t.done ? t.state : t.next_state;
        actions[b] = t.action;
    }
    const Eigen::MatrixXd q_online_next = online_.forward_batch(next_obs);
    const Eigen::MatrixXd q_target_next = target_.forward_batch(next_obs);
    if (!q_online_next.allFinite() || !q_target_next.allFinite()) {
        throw NumericalError("train_step: non-finite bootstrap values");
    }
    for (std::size_t b = 0; b < batch; ++b) {
        const auto& t = buffer.at(sample.indices[b]);
        if (t.done) {
            targets(static_cast<Eigen::Index>(b)) = t.reward;
        } else {
            const int pick = QNetwork::argmax_lowest(q_online_next.col(static_cast<Eigen::Index>(b)));
            targets(static_cast<Eigen::Index>(b)) =
                t.reward + config_.gamma * q_target_next(pick, static_cast<Eigen::Index>(b));
        }
    }

    QNetwork::Gradients grads;
    Eigen::VectorXd td;
    const double loss = online_.td_backward(obs, actions, targets, sample.weights, grads, td);
    if (!std::isfinite(loss)) {
        throw NumericalError("train_step: non-finite loss");
    }
    adam_.step(online_, grads);
    for (std::size_t b = 0; b < batch; ++b) {
        buffer.update_priority(sample.indices[b],
                               std::abs(td(static_cast<Eigen::Index>(b))) + config_.priority_floor);
    }
    ++step_count_;
    if (config_.target_sync_every > 0 && step_count_ % config_.target_sync_every == 0) {
        sync_target();
    }
    return loss;
}

int DdqnLearner::select_action(const Eigen::VectorXd& obs, double epsilon, Rng& rng) const {
    if (rng.uniform() < epsilon) {
        return static_cast<int>(rng.index(static_cast<std::size_t>(online_.num_actions())));
    }
    return online_.greedy_action(obs);
}

double epsilon_schedule(long step, long total_steps, double floor, double warm_fraction) {
    const double warm = warm_fraction * static_cast<double>(total_steps);
    if (warm <= 0.0) return floor;
    const double frac = std::min(1.0, static_cast<double>(step) / warm);
    return std::max(floor, 1.0 - (1.0 - floor) * frac);
}

}  // namespace hipmdp::policy
