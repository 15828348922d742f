#include "hipmdp/policy/qnetwork.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace hipmdp::policy {

QNetwork::QNetwork(Eigen::Index input_dim, Eigen::Index num_actions,
                   const QNetworkConfig& config, Rng& rng) {
    if (input_dim < 1 || num_actions < 1) {
        throw std::invalid_argument("QNetwork: invalid dimensions");
    }
    std::vector<Eigen::Index> sizes{input_dim};
    sizes.insert(sizes.end(), config.hidden.begin(), config.hidden.end());
    sizes.push_back(num_actions);
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        const Eigen::Index in = sizes[l], out = sizes[l + 1];
        Eigen::MatrixXd W(out, in);
        const double scale = std::sqrt(2.0 / static_cast<double>(in));
        for (Eigen::Index i = 0; i < out; ++i) {
            for (Eigen::Index j = 0; j < in; ++j) W(i, j) = scale * rng.normal();
        }
        weights_.push_back(std::move(W));
        biases_.push_back(Eigen::VectorXd::Zero(out));
    }
}

Eigen::MatrixXd QNetwork::forward_batch(const Eigen::MatrixXd& obs_cols) const {
    Eigen::MatrixXd a = obs_cols;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        a = (weights_[l] * a).colwise() + biases_[l];
        if (l + 1 < weights_.size()) a = a.cwiseMax(0.0);
    }
    return a;
}

Eigen::VectorXd QNetwork::forward(const Eigen::VectorXd& obs) const {
    return forward_batch(obs);
}

int QNetwork::argmax_lowest(const Eigen::VectorXd& values) {
    int best = 0;
    for (int i = 1; i < values.size(); ++i) {
        if (values(i) > values(best)) best = i;
    }
    return best;
}

int QNetwork::greedy_action(const Eigen::VectorXd& obs) const {
    return argmax_lowest(forward(obs));
}

double QNetwork::td_backward(const Eigen::MatrixXd& obs_cols, const std::vector<int>& actions,
                             const Eigen::VectorXd& targets,
                             const Eigen::VectorXd& sample_weights, Gradients& grads,
                             Eigen::VectorXd& td_errors) const {
    const Eigen::Index batch = obs_cols.cols();
    if (static_cast<Eigen::Index>(actions.size()) != batch || targets.size() != batch ||
        sample_weights.size() != batch) {
        throw std::invalid_argument("td_backward: batch size mismatch");
    }

    // Forward pass keeping post-activation values per layer.
    std::vector<Eigen::MatrixXd> acts{obs_cols};
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        Eigen::MatrixXd z = (weights_[l] * acts.back()).colwise() + biases_[l];
        if (l + 1 < weights_.size()) z = z.cwiseMax(0.0);
        acts.push_back(std::move(z));
    }
    const Eigen::MatrixXd& q = acts.back();

    td_errors.resize(batch);
    Eigen::MatrixXd dq = Eigen::MatrixXd::Zero(q.rows(), batch);
    double loss = 0.0;
    for (Eigen::Index i = 0; i < batch; ++i) {
        const double td = q(actions[static_cast<std::size_t>(i)], i) - targets(i);
        td_errors(i) = td;
        loss += sample_weights(i) * td * td;
        dq(actions[static_cast<std::size_t>(i)], i) =
            2.0 * sample_weights(i) * td / static_cast<double>(batch);
    }
    loss /= static_cast<double>(batch);

    grads.weights.assign(weights_.size(), {});
    grads.biases.assign(biases_.size(), {});
    Eigen::MatrixXd delta = dq;
    for (std::size_t l = weights_.size(); l-- > 0;) {
        grads.weights[l] = delta * acts[l].transpose();
        grads.biases[l] = delta.rowwise().sum();
        if (l > 0) {
            delta = weights_[l].transpose() * delta;
            // Rectifier derivative through the stored post-activation.
            delta = (acts[l].array() > 0.0).cast<double>() * delta.array();
        }
    }
    return loss;
}

void QNetwork::copy_from(const QNetwork& other) {
    if (!same_architecture(other)) {
        throw std::invalid_argument("QNetwork::copy_from: architecture mismatch");
    }
    weights_ = other.weights_;
    biases_ = other.biases_;
}

bool QNetwork::same_architecture(const QNetwork& other) const {
    if (weights_.size() != other.weights_.size()) return false;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        if (weights_[l].rows() != other.weights_[l].rows() ||
            weights_[l].cols() != other.weights_[l].cols()) {
            return false;
        }
    }
    return true;
}

std::uint64_t QNetwork::checksum() const {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    const auto mix_bytes = [&h](const double* p, std::size_t n) {
        const auto* bytes = reinterpret_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n * sizeof(double); ++i) {
            h ^= bytes[i];
            h *= 0x100000001B3ULL;
        }
    };
    for (const auto& W : weights_) mix_bytes(W.data(), static_cast<std::size_t>(W.size()));
    for (const auto& b : biases_) mix_bytes(b.data(), static_cast<std::size_t>(b.size()));
    return h;
}

nlohmann::json QNetwork::to_json() const {
    nlohmann::json layers = nlohmann::json::array();
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        std::vector<std::vector<double>> rows(static_cast<std::size_t>(weights_[l].rows()));
        for (Eigen::Index i = 0; i < weights_[l].rows(); ++i) {
            rows[static_cast<std::size_t>(i)] =
                std::vector<double>(weights_[l].row(i).begin(), weights_[l].row(i).end());
        }
        layers.push_back({{"weights", rows},
                          {"biases", std::vector<double>(biases_[l].begin(), biases_[l].end())}});
    }
    return {{"layers", layers}};
}

QNetwork QNetwork::from_json(const nlohmann::json& j) {
    QNetwork net;
    for (const auto& layer : j.at("layers")) {
        const auto rows = layer.at("weights").get<std::vector<std::vector<double>>>();
        const auto bias = layer.at("biases").get<std::vector<double>>();
        const Eigen::Index out = static_cast<Eigen::Index>(rows.size());
        const Eigen::Index in = static_cast<Eigen::Index>(rows.front().size());
        Eigen::MatrixXd W(out, in);
        for (Eigen::Index i = 0; i < out; ++i) {
            W.row(i) = Eigen::Map<const Eigen::VectorXd>(rows[static_cast<std::size_t>(i)].data(), in);
        }
        net.weights_.push_back(std::move(W));
        net.biases_.push_back(
            Eigen::Map<const Eigen::VectorXd>(bias.data(), static_cast<Eigen::Index>(bias.size())));
    }
    return net;
}

void AdamOptimizer::step(QNetwork& net, const QNetwork::Gradients& grads) {
    if (mw_.empty()) {
        for (const auto& W : net.weights()) {
            mw_.push_back(Eigen::MatrixXd::Zero(W.rows(), W.cols()));
            vw_.push_back(Eigen::MatrixXd::Zero(W.rows(), W.cols()));
        }
        for (const auto& b : net.biases()) {
            mb_.push_back(Eigen::VectorXd::Zero(b.size()));
            vb_.push_back(Eigen::VectorXd::Zero(b.size()));
        }
    }
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t l = 0; l < net.weights().size(); ++l) {
        mw_[l] = beta1_ * mw_[l] + (1.0 - beta1_) * grads.weights[l];
        vw_[l] = beta2_ * vw_[l] + (1.0 - beta2_) * grads.weights[l].cwiseProduct(grads.weights[l]);
        net.weights()[l].array() -=
            lr_ * (mw_[l].array() / c1) / ((vw_[l].array() / c2).sqrt() + eps_);
        mb_[l] = beta1_ * mb_[l] + (1.0 - beta1_) * grads.biases[l];
        vb_[l] = beta2_ * vb_[l] + (1.0 - beta2_) * grads.biases[l].cwiseProduct(grads.biases[l]);
        net.biases()[l].array() -=
            lr_ * (mb_[l].array() / c1) / ((vb_[l].array() / c2).sqrt() + eps_);
    }
}

}  // namespace hipmdp::policy
