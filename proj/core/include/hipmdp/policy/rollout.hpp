#pragma once

#include <functional>
#include <vector>

#include "hipmdp/latent/transition_model.hpp"
#include "hipmdp/policy/qnetwork.hpp"
#include "hipmdp/rng.hpp"
#include "hipmdp/types.hpp"

namespace hipmdp::policy {

// Reward model applied to model-generated transitions: (s, a, s') -> (reward, done).
using SyntheticReward =
    std::function<std::pair<double, bool>(const Eigen::VectorXd&, int, const Eigen::VectorXd&)>;

// Optional projection of sampled next states back into a valid region.
using StateProjection = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// Imagined experience from the learned dynamics: for every start state,
// iterate epsilon-greedy actions, draw s' from the per-dimension Gaussian
// predictive distribution, and score with the domain reward model. Rollout
// branches stop early when the reward model reports done. Tuples carry the
// synthetic flag.
std::vector<TransitionTuple> synthetic_rollout(
    const latent::TransitionModel& model, const QNetwork& policy,
    const latent::LatentWeights& weights, const std::vector<Eigen::VectorXd>& start_states,
    int horizon, double epsilon, const SyntheticReward& reward, Rng& rng,
    const StateProjection& project = nullptr);

}  // namespace hipmdp::policy
