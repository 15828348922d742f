#pragma once

#include <Eigen/Dense>

namespace hipmdp {

// One observed (or model-generated) environment transition. Replay priority
// lives in the buffer, not here.
struct TransitionTuple {
    Eigen::VectorXd state;
    int action{0};
    Eigen::VectorXd next_state;
    double reward{0.0};
    bool done{false};
    bool synthetic{false};
};

}  // namespace hipmdp
