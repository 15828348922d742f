#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hipmdp/gp/kernel.hpp"

namespace hipmdp::gp {

struct MllResult {
    double value{0.0};
    Eigen::VectorXd grad;  // w.r.t. packed log-hyperparameters; empty for n = 0
};

// Exact log marginal likelihood and its analytic gradient. n = 0 returns
// (0, empty) by convention. Throws NumericalError if the Gram matrix cannot
// be factorized even after jitter escalation.
MllResult marginal_log_likelihood(const KernelHyper& hyper,
                                  const Eigen::MatrixXd& inputs,
                                  const Eigen::VectorXd& targets);

struct FitConfig {
    int max_iterations{200};
    double grad_tolerance{1e-6};
    double initial_step{0.1};
    double min_step{1e-12};
    double log_bound{20.0};  // packed log-hypers are clamped to +-log_bound
};

struct FitInfo {
    int iterations{0};
    bool converged{false};
    double final_mll{0.0};
    std::vector<double> mll_trace;  // accepted values, non-decreasing
};

// Immutable exact GP with zero prior mean. Construction factorizes
// K + sn2*I once (escalating diagonal jitter if needed) and caches alpha
// and the explicit inverse used by downstream latent-weight gradients.
class GpModel {
public:
    GpModel(KernelHyper hyper, Eigen::MatrixXd inputs, Eigen::VectorXd targets);

    // Gradient ascent with an adaptive step on log-hyperparameters. Never
    // returns a model whose MLL is below the initialization.
    static GpModel fit(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
                       const KernelHyper& init, const FitConfig& config = {},
                       FitInfo* info = nullptr);

    // Posterior mean and latent-function variance (noise-free), variance
    // clipped at zero. Throws std::invalid_argument on dimension mismatch.
    std::pair<double, double> predict(const Eigen::VectorXd& x_star) const;

    // Batched version; rows of Xstar are query points.
    void predict_batch(const Eigen::MatrixXd& Xstar, Eigen::VectorXd& means,
                       Eigen::VectorXd& vars) const;

    const KernelHyper& hyper() const { return hyper_; }
    const Eigen::MatrixXd& inputs() const { return inputs_; }
    const Eigen::VectorXd& targets() const { return targets_; }
    const Eigen::MatrixXd& chol() const { return chol_; }
    const Eigen::VectorXd& alpha() const { return alpha_; }
    const Eigen::MatrixXd& gram_inverse() const { return gram_inverse_; }
    double applied_jitter() const { return applied_jitter_; }
    Eigen::Index size() const { return inputs_.rows(); }

    nlohmann::json to_json() const;
    static GpModel from_json(const nlohmann::json& j);

private:
    KernelHyper hyper_;
    Eigen::MatrixXd inputs_;
    Eigen::VectorXd targets_;
    Eigen::MatrixXd chol_;          // lower triangular L, L L^T = K + sn2 I (+ jitter)
    Eigen::VectorXd alpha_;         // (K + sn2 I)^-1 y
    Eigen::MatrixXd gram_inverse_;  // (K + sn2 I)^-1
    double applied_jitter_{0.0};
};

// Factorize M (+ jitter escalation along the spec schedule) in place into a
// lower Cholesky factor. Returns the jitter that succeeded. Throws
// NumericalError, naming the smallest attempted jitter, when escalation runs out.
double cholesky_with_jitter(Eigen::MatrixXd& M, Eigen::MatrixXd& L);

}  // namespace hipmdp::gp
