#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "hipmdp/rng.hpp"

namespace hipmdp::policy {

struct QNetworkConfig {
    std::vector<Eigen::Index> hidden{64, 64};
};

// Fully connected rectifier network mapping an observation to one value per
// action. Plain Eigen matrices; training support lives in td_backward plus
// AdamOptimizer.
class QNetwork {
public:
    QNetwork(Eigen::Index input_dim, Eigen::Index num_actions, const QNetworkConfig& config,
             Rng& rng);

    Eigen::VectorXd forward(const Eigen::VectorXd& obs) const;
    // Columns are observations; returns num_actions x batch.
    Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& obs_cols) const;

    // Ties broken toward the lowest action index.
    int greedy_action(const Eigen::VectorXd& obs) const;
    static int argmax_lowest(const Eigen::VectorXd& values);

    struct Gradients {
        std::vector<Eigen::MatrixXd> weights;
        std::vector<Eigen::VectorXd> biases;
    };

    // Importance-weighted squared TD error over the chosen actions:
    //   loss = mean_i sample_weights_i * (Q(s_i, a_i) - targets_i)^2.
    // Fills parameter gradients and the signed per-sample TD errors.
    double td_backward(const Eigen::MatrixXd& obs_cols, const std::vector<int>& actions,
                       const Eigen::VectorXd& targets, const Eigen::VectorXd& sample_weights,
                       Gradients& grads, Eigen::VectorXd& td_errors) const;

    void copy_from(const QNetwork& other);
    bool same_architecture(const QNetwork& other) const;

    Eigen::Index input_dim() const { return weights_.front().cols(); }
    Eigen::Index num_actions() const { return weights_.back().rows(); }
    std::size_t num_layers() const { return weights_.size(); }
    std::vector<Eigen::MatrixXd>& weights() { return weights_; }
    std::vector<Eigen::VectorXd>& biases() { return biases_; }
    const std::vector<Eigen::MatrixXd>& weights() const { return weights_; }
    const std::vector<Eigen::VectorXd>& biases() const { return biases_; }

    // FNV over the raw parameter bytes; used by leakage checks.
    std::uint64_t checksum() const;

    nlohmann::json to_json() const;
    static QNetwork from_json(const nlohmann::json& j);

private:
    QNetwork() = default;
    std::vector<Eigen::MatrixXd> weights_;
    std::vector<Eigen::VectorXd> biases_;
};

class AdamOptimizer {
public:
    AdamOptimizer(double learning_rate = 1e-3, double beta1 = 0.9, double beta2 = 0.999,
                  double epsilon = 1e-8)
        : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon) {}

    void step(QNetwork& net, const QNetwork::Gradients& grads);
    void set_learning_rate(double lr) { lr_ = lr; }
    long steps_taken() const { return t_; }

private:
    double lr_, beta1_, beta2_, eps_;
    long t_{0};
    std::vector<Eigen::MatrixXd> mw_, vw_;
    std::vector<Eigen::VectorXd> mb_, vb_;
};

}  // namespace hipmdp::policy
