#pragma once

#include <optional>
#include <vector>

#include "hipmdp/harness/config.hpp"
#include "hipmdp/harness/logging.hpp"
#include "hipmdp/latent/transition_model.hpp"

namespace hipmdp::harness {

struct RunDiagnostics {
    // Initial policy checksum per instance; verifies from-scratch
    // reconstruction for the personally-tailored baseline.
    std::vector<std::uint64_t> policy_start_checksums;
    std::vector<std::size_t> buffer_start_sizes;
    std::vector<long> real_steps_per_instance;
    std::vector<long> episode_budget_per_instance;
};

struct RunSinks {
    LogWriter* log{nullptr};
    TimingWriter* timing{nullptr};
    TrajectoryWriter* trajectories{nullptr};
};

struct RunOutputs {
    ExperimentLog log;
    std::optional<latent::TransitionModel> model;
    RunDiagnostics diagnostics;
};

// The HiP-MDP agent loop over sequential task instances: act, record, re-infer
// w_b each episode, plan on synthetic batches from the learned model, train
// the Double-DQN, and merge the instance into the global model at its end.
RunOutputs run_hipmdp(const ExperimentConfig& config, const RunSinks& sinks = {});

// The two naive baselines. OneSizeFitsAll keeps one policy and pools data
// across instances; PersonallyTailored rebuilds everything per instance from
// that instance's data only. model_mode selects true-simulator or GP-backed
// synthetic batches.
RunOutputs run_baseline(AgentKind kind, const ExperimentConfig& config, ModelMode mode,
                        const RunSinks& sinks = {});

// Deterministic scripted surveyor for the toy domain: walks under the gate
// targeted by the episode's parity, pushes up persistently with a small
// lateral dither, and switches to the other gate halfway through the
// episode cap. Used by the latent-separation experiments, which need gate
// encounters at both segments without a trained policy.
int toy_survey_action(const Eigen::Vector2d& position, int episode_index, int step_index,
                      const domains::ToyConfig& config);

// Transitions fed to latent inference when an instance's history exceeds the
// cap: the most recent half plus a seeded uniform subsample of the rest.
std::vector<TransitionTuple> inference_window(const std::vector<TransitionTuple>& transitions,
                                              std::size_t cap, const Rng& rng);

}  // namespace hipmdp::harness
