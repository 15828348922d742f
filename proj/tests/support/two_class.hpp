#pragma once

// Shared test fixture: a generator-known two-class system exercising the
// latent machinery at desk scale.

#include <string>
#include <vector>

#include "hipmdp/latent/transition_model.hpp"
#include "hipmdp/rng.hpp"

namespace hipmdp::testsupport {

// One state dimension, two actions. Class A moves +0.1 (action 0) / -0.1
// (action 1); class B is mirrored. Classes roam different state intervals so
// latent coverage is asymmetric, like the toy domain's gates.
struct TwoClassSystem {
    double noise{0.01};

    TransitionTuple sample(bool class_a, Rng& rng) const {
        TransitionTuple t;
        const double lo = class_a ? 0.0 : 0.4;
        const double hi = class_a ? 0.6 : 1.0;
        t.state = Eigen::VectorXd::Constant(1, rng.uniform(lo, hi));
        t.action = static_cast<int>(rng.index(2));
        const double base = (t.action == 0) ? 0.1 : -0.1;
        const double delta = (class_a ? base : -base) + rng.normal(0.0, noise);
        t.next_state = t.state.array() + delta;
        return t;
    }

    std::vector<TransitionTuple> episode(bool class_a, int n, Rng& rng) const {
        std::vector<TransitionTuple> out;
        out.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) out.push_back(sample(class_a, rng));
        return out;
    }
};

inline latent::TransitionModelConfig two_class_config(Eigen::Index latent_dim) {
    latent::TransitionModelConfig cfg;
    cfg.layout =
        latent::AugmentLayout{.state_dim = 1, .num_actions = 2, .latent_dim = latent_dim};
    cfg.support_size = 60;
    cfg.candidate_cap = 240;
    cfg.anneal.steps = 200;
    cfg.episode_anneal.steps = 120;
    return cfg;
}

struct TrainedTwoClass {
    latent::TransitionModel model;
    std::vector<std::string> ids;
    std::vector<bool> is_class_a;
    std::vector<std::vector<TransitionTuple>> data;
};

// Alternating-class instances pushed through the full update path, inferring
// each instance's weights against the model so far, as in the experiment loop.
inline TrainedTwoClass train_two_class(std::uint64_t seed, int instances = 4,
                                       int per_instance = 60) {
    const TwoClassSystem sys;
    Rng root(seed);
    TrainedTwoClass out{latent::TransitionModel(two_class_config(2)), {}, {}, {}};
    for (int b = 0; b < instances; ++b) {
        const bool class_a = (b % 2 == 0);
        Rng rng = root.fork("instance").fork(static_cast<std::uint64_t>(b));
        auto ts = sys.episode(class_a, per_instance, rng);
        latent::LatentWeights w = out.model.latent_prior();
        if (out.model.fitted()) {
            w = out.model.infer_latent_weights(ts, w, rng.fork("infer"));
        }
        const std::string id = "inst" + std::to_string(b);
        out.model.update_global_model(id, ts, w, rng.fork("update"));
        out.ids.push_back(id);
        out.is_class_a.push_back(class_a);
        out.data.push_back(std::move(ts));
    }
    return out;
}

}  // namespace hipmdp::testsupport
