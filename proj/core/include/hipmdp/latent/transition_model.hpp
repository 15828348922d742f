#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hipmdp/gp/model.hpp"
#include "hipmdp/latent/latent_weights.hpp"
#include "hipmdp/latent/support_selection.hpp"
#include "hipmdp/rng.hpp"
#include "hipmdp/types.hpp"

namespace hipmdp::latent {

struct InferConfig {
    int max_iterations{60};
    double grad_tolerance{1e-5};
    double initial_step{0.2};
    double min_step{1e-10};
    int restarts{3};            // extra prior-sampled starts beside the prior mean
    double hessian_fd_step{1e-3};
};

struct InferInfo {
    bool converged{false};
    double final_objective{0.0};
    std::vector<double> objective_trace;  // accepted values, non-decreasing
};

struct TransitionModelConfig {
    AugmentLayout layout;
    Eigen::Index support_size{150};    // m
    Eigen::Index candidate_cap{800};   // pool subsample bound fed to annealing
    AnnealConfig anneal;               // instance-boundary support reselection
    AnnealConfig episode_anneal{.steps = 300};  // cheaper, for per-episode provisional fits
    gp::FitConfig fit;
    InferConfig infer;
    // Lengthscale floor for the latent input dimensions; keeps the latent
    // slots active when all stored weights are still identical.
    double latent_lengthscale_floor{1.0};
};

// The GPLVM transition model: one delta-target GP per state dimension over
// augmented inputs [state; one-hot action; w_b], a shared support set, and a
// per-instance latent weight table. Mutated only between episodes/instances;
// all queries are const and safe for concurrent readers.
class TransitionModel {
public:
    explicit TransitionModel(TransitionModelConfig config);

    const TransitionModelConfig& config() const { return config_; }
    const AugmentLayout& layout() const { return config_.layout; }
    bool fitted() const { return fitted_; }

    LatentWeights latent_prior(std::string instance_id = {}) const {
        return LatentWeights::standard_prior(config_.layout.latent_dim, std::move(instance_id));
    }

    // Mean next state and per-dimension predictive variance (posterior
    // variance plus noise). Throws std::logic_error when unfitted.
    std::pair<Eigen::VectorXd, Eigen::VectorXd> predict_transition(
        const Eigen::VectorXd& state, int action, const LatentWeights& weights) const;

    // Batched variant sharing one latent weight vector across rows.
    void predict_transition_batch(const Eigen::MatrixXd& states, const std::vector<int>& actions,
                                  const Eigen::VectorXd& weights, Eigen::MatrixXd& mean_next,
                                  Eigen::MatrixXd& var) const;

    // MAP latent weights for one instance's transitions: maximizes summed
    // predictive log likelihood of the observed deltas plus the log prior
    // density; diagonal covariance from a Laplace approximation at the
    // optimum. Empty transition lists return the prior unchanged.
    LatentWeights infer_latent_weights(const std::vector<TransitionTuple>& transitions,
                                       const LatentWeights& prior, const Rng& rng,
                                       InferInfo* info = nullptr) const;

    // Merge a completed instance (transitions augmented with its final
    // weights) into the pool, reselect support points, refit hyperparameters,
    // and record the instance's weights. Instance ids must be unique.
    void update_global_model(const std::string& instance_id,
                             const std::vector<TransitionTuple>& transitions,
                             const LatentWeights& final_weights, const Rng& rng);

    // Mean over state dimensions of predictive variance at (state, action)
    // under each supplied latent class. Throws on an empty class list.
    Eigen::VectorXd uncertainty_probe(const Eigen::VectorXd& state, int action,
                                      const std::vector<LatentWeights>& classes) const;

    // Read-only working copy whose GPs also condition on the most recent
    // instance transitions (capped), keeping hyperparameters fixed.
    TransitionModel with_instance_data(const std::vector<TransitionTuple>& transitions,
                                       const Eigen::VectorXd& weights,
                                       Eigen::Index max_rows = 400) const;

    // Provisional model from a single instance's data only (no global pool);
    // hyperparameters fitted from scratch. Used before any instance has been
    // merged, and by the personally-tailored baseline.
    static TransitionModel fit_single_instance(const TransitionModelConfig& config,
                                               const std::vector<TransitionTuple>& transitions,
                                               const Eigen::VectorXd& weights, const Rng& rng);

    const std::map<std::string, LatentWeights>& latent_table() const { return latent_table_; }
    const std::vector<gp::GpModel>& dimension_models() const { return models_; }
    const Eigen::MatrixXd& support_inputs() const { return support_inputs_; }
    const Eigen::MatrixXd& support_targets() const { return support_targets_; }
    Eigen::Index pool_size() const { return pool_inputs_.rows(); }

    // Checkpoint: per-dimension hyperparameters, support inputs/targets and
    // the latent weight table. The merge pool is not part of the checkpoint.
    nlohmann::json to_json() const;
    static TransitionModel from_json(const nlohmann::json& j);

    static Eigen::MatrixXd build_augmented(const std::vector<TransitionTuple>& transitions,
                                           const Eigen::VectorXd& weights,
                                           const AugmentLayout& layout);
    static Eigen::MatrixXd build_deltas(const std::vector<TransitionTuple>& transitions);

private:
    struct Objective;  // latent-weight likelihood machinery

    void refit_from_pool(const Rng& rng);
    void fit_dimensions(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
                        bool warm_start);
    std::vector<gp::KernelHyper> initial_hypers(const Eigen::MatrixXd& inputs,
                                                const Eigen::MatrixXd& targets) const;
    void require_fitted(const char* op) const;

    TransitionModelConfig config_;
    Eigen::MatrixXd pool_inputs_;    // candidate pool across completed instances
    Eigen::MatrixXd pool_targets_;
    Eigen::MatrixXd support_inputs_;
    Eigen::MatrixXd support_targets_;
    std::vector<gp::GpModel> models_;  // one per state dimension
    std::map<std::string, LatentWeights> latent_table_;
    bool fitted_{false};
};

}  // namespace hipmdp::latent
