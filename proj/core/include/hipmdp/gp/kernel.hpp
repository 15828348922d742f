#pragma once

#include <Eigen/Dense>

#include "json.hpp"

namespace hipmdp::gp {

// ARD squared-exponential hyperparameters plus observation noise. Stored in
// log space so positivity is structural; accessors exponentiate.
struct KernelHyper {
    double log_signal_variance{0.0};
    Eigen::VectorXd log_lengthscales;
    double log_noise_variance{std::log(0.1)};

    static KernelHyper from_values(double signal_variance,
                                   const Eigen::VectorXd& lengthscales,
                                   double noise_variance);

    double signal_variance() const { return std::exp(log_signal_variance); }
    double noise_variance() const { return std::exp(log_noise_variance); }
    Eigen::VectorXd lengthscales() const { return log_lengthscales.array().exp(); }
    Eigen::Index input_dim() const { return log_lengthscales.size(); }

    // Optimizer layout: [log sf2, log ls_0 .. log ls_{d-1}, log sn2].
    Eigen::VectorXd pack() const;
    static KernelHyper unpack(const Eigen::VectorXd& packed);

    nlohmann::json to_json() const;
    static KernelHyper from_json(const nlohmann::json& j);
};

// k(x1, x2) = sf2 * exp(-1/2 sum_i (x1_i - x2_i)^2 / ls_i^2).
// Throws std::invalid_argument on dimension mismatch.
double kernel_eval(const Eigen::VectorXd& x1, const Eigen::VectorXd& x2,
                   const KernelHyper& hyper);

// Noise-free Gram matrix K(X, X); X is n x d with rows as points.
Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& X, const KernelHyper& hyper);

// Cross-covariance K(Xstar, X), nstar x n.
Eigen::MatrixXd kernel_cross(const Eigen::MatrixXd& Xstar, const Eigen::MatrixXd& X,
                             const KernelHyper& hyper);

// Initialization heuristic: lengthscales from per-dimension input spread,
// signal variance from target variance, noise at a tenth of it. Degenerate
// (constant) input dimensions get the supplied floor.
KernelHyper suggest_hyper_init(const Eigen::MatrixXd& inputs,
                               const Eigen::VectorXd& targets,
                               double lengthscale_floor = 1e-3);

}  // namespace hipmdp::gp
