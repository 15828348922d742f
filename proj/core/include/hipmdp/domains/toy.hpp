#pragma once

#include <optional>
#include <utility>

#include <Eigen/Dense>

#include "hipmdp/rng.hpp"

namespace hipmdp::domains {

enum class ToyClass { Red, Blue };
enum class GateColor { Blue, Red };

// Hidden per-instance parameters of the navigation toy.
struct ToyParams {
    ToyClass latent_class{ToyClass::Red};
    double noise_scale{0.005};
};

// Geometry and episode constants. The goal box sits on the top edge of the
// unit square; its lower edge is split into a blue (left) and a red (right)
// gate segment. Every other goal-box edge blocks everyone.
struct ToyConfig {
    double step_size{0.05};
    double noise_scale{0.005};
    int episode_cap{100};
    double goal_x_lo{0.4};
    double goal_x_hi{0.6};
    double goal_y_lo{0.8};
    double goal_y_hi{1.0};
    double start_y_hi{0.3};
    double step_reward{-0.01};
    double goal_reward{1.0};

    double gate_split_x() const { return 0.5 * (goal_x_lo + goal_x_hi); }
};

// Actions: 0 Up, 1 Down, 2 Left, 3 Right.
enum class ToyAction : int { Up = 0, Down = 1, Left = 2, Right = 3 };
inline constexpr int kToyNumActions = 4;

struct ToyStepResult {
    Eigen::Vector2d next;
    double reward{0.0};
    bool done{false};
    bool blocked{false};
    std::optional<GateColor> crossed_gate;  // instrumentation for crossing logs
};

bool toy_in_goal(const Eigen::Vector2d& s, const ToyConfig& config);

// One kinematic step: move step_size along the action axis plus isotropic
// Gaussian noise; unit-square walls clamp, goal-box edges block unless the
// crossed gate matches the instance class. Throws std::invalid_argument if
// the state is outside the unit square.
ToyStepResult toy_step(const Eigen::Vector2d& state, ToyAction action, const ToyParams& params,
                       const ToyConfig& config, Rng& rng);

Eigen::Vector2d toy_initial_state(const ToyConfig& config, Rng& rng);

// Reward model used for model-generated rollouts: goal-box membership of the
// predicted next state decides (goal_reward, done) versus (step_reward, not).
std::pair<double, bool> toy_synthetic_reward(const Eigen::VectorXd& next_state,
                                             const ToyConfig& config);

}  // namespace hipmdp::domains
