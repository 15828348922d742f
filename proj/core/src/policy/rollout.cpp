#include "hipmdp/policy/rollout.hpp"

#include <cmath>
#include <stdexcept>

namespace hipmdp::policy {

std::vector<TransitionTuple> synthetic_rollout(
    const latent::TransitionModel& model, const QNetwork& policy,
    const latent::LatentWeights& weights, const std::vector<Eigen::VectorXd>& start_states,
    int horizon, double epsilon, const SyntheticReward& reward, Rng& rng,
    const StateProjection& project) {
    if (horizon < 1) throw std::invalid_argument("synthetic_rollout: horizon must be >= 1");
    if (!reward) throw std::invalid_argument("synthetic_rollout: reward model required");

    std::vector<TransitionTuple> out;
    out.reserve(start_states.size() * static_cast<std::size_t>(horizon));

    std::vector<Eigen::VectorXd> states = start_states;
    std::vector<std::size_t> alive(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) alive[i] = i;

    const auto num_actions = static_cast<std::size_t>(policy.num_actions());

    for (int h = 0; h < horizon && !alive.empty(); ++h) {
        const Eigen::Index n = static_cast<Eigen::Index>(alive.size());
        Eigen::MatrixXd S(n, states.front().size());
        std::vector<int> actions(alive.size());
        for (Eigen::Index r = 0; r < n; ++r) {
            const auto& s = states[alive[static_cast<std::size_t>(r)]];
            S.row(r) = s.transpose();
            actions[static_cast<std::size_t>(r)] =
                rng.uniform() < epsilon ? static_cast<int>(rng.index(num_actions))
                                        : policy.greedy_action(s);
        }
        Eigen::MatrixXd mean_next, var;
        model.predict_transition_batch(S, actions, weights.mean, mean_next, var);

        std::vector<std::size_t> still_alive;
        still_alive.reserve(alive.size());
        for (Eigen::Index r = 0; r < n; ++r) {
            const std::size_t idx = alive[static_cast<std::size_t>(r)];
            Eigen::VectorXd next(mean_next.cols());
            for (Eigen::Index d = 0; d < mean_next.cols(); ++d) {
                next(d) = mean_next(r, d) + std::sqrt(std::max(var(r, d), 0.0)) * rng.normal();
            }
            if (project) next = project(next);
            const auto [r_step, done] = reward(states[idx], actions[static_cast<std::size_t>(r)], next);

            TransitionTuple t;
            t.state = states[idx];
            t.action = actions[static_cast<std::size_t>(r)];
            t.next_state = next;
            t.reward = r_step;
            t.done = done;
            t.synthetic = true;
            out.push_back(std::move(t));

            states[idx] = next;
            if (!done) still_alive.push_back(idx);
        }
        alive = std::move(still_alive);
    }
    return out;
}

}  // namespace hipmdp::policy
