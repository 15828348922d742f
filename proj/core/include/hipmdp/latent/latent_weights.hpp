#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace hipmdp::latent {

// Per-instance latent embedding: mean and diagonal covariance of w_b.
struct LatentWeights {
    Eigen::VectorXd mean;      // K entries
    Eigen::VectorXd cov_diag;  // K entries, each >= 0
    std::string instance_id;

    static LatentWeights standard_prior(Eigen::Index latent_dim, std::string instance_id = {}) {
        LatentWeights w;
        w.mean = Eigen::VectorXd::Zero(latent_dim);
        w.cov_diag = Eigen::VectorXd::Ones(latent_dim);
        w.instance_id = std::move(instance_id);
        return w;
    }

    Eigen::Index dim() const { return mean.size(); }
};

// Fixed slot layout of the augmented GP input [state; one-hot action; w].
struct AugmentLayout {
    Eigen::Index state_dim{0};
    Eigen::Index num_actions{0};
    Eigen::Index latent_dim{0};

    Eigen::Index total() const { return state_dim + num_actions + latent_dim; }
    Eigen::Index latent_offset() const { return state_dim + num_actions; }
};

inline Eigen::VectorXd augment(const Eigen::VectorXd& state, int action,
                               const Eigen::VectorXd& weights, const AugmentLayout& layout) {
    if (state.size() != layout.state_dim || weights.size() != layout.latent_dim ||
        action < 0 || action >= layout.num_actions) {
        throw std::invalid_argument("augment: shape mismatch with layout");
    }
    Eigen::VectorXd out = Eigen::VectorXd::Zero(layout.total());
    out.head(layout.state_dim) = state;
    out(layout.state_dim + action) = 1.0;
    out.tail(layout.latent_dim) = weights;
    return out;
}

inline Eigen::VectorXd augment(const Eigen::VectorXd& state, int action,
                               const LatentWeights& weights, const AugmentLayout& layout) {
    return augment(state, action, weights.mean, layout);
}

}  // namespace hipmdp::latent
