#include "hipmdp/gp/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace hipmdp::gp {

KernelHyper KernelHyper::from_values(double signal_variance,
                                     const Eigen::VectorXd& lengthscales,
                                     double noise_variance) {
    if (!(signal_variance > 0.0) || !(noise_variance > 0.0) ||
        !(lengthscales.array() > 0.0).all()) {
        throw std::invalid_argument("KernelHyper: all hyperparameters must be strictly positive");
    }
    KernelHyper h;
    h.log_signal_variance = std::log(signal_variance);
    h.log_lengthscales = lengthscales.array().log();
    h.log_noise_variance = std::log(noise_variance);
    return h;
}

Eigen::VectorXd KernelHyper::pack() const {
    Eigen::VectorXd p(log_lengthscales.size() + 2);
    p(0) = log_signal_variance;
    p.segment(1, log_lengthscales.size()) = log_lengthscales;
    p(p.size() - 1) = log_noise_variance;
    return p;
}

KernelHyper KernelHyper::unpack(const Eigen::VectorXd& packed) {
    KernelHyper h;
    h.log_signal_variance = packed(0);
    h.log_lengthscales = packed.segment(1, packed.size() - 2);
    h.log_noise_variance = packed(packed.size() - 1);
    return h;
}

nlohmann::json KernelHyper::to_json() const {
    // Log-space fields are the stored representation and round-trip exactly;
    // log(exp(x)) would lose the last ulp.
    return {{"log_signal_variance", log_signal_variance},
            {"log_lengthscales",
             std::vector<double>(log_lengthscales.begin(), log_lengthscales.end())},
            {"log_noise_variance", log_noise_variance}};
}

KernelHyper KernelHyper::from_json(const nlohmann::json& j) {
    KernelHyper h;
    h.log_signal_variance = j.at("log_signal_variance").get<double>();
    const auto ls = j.at("log_lengthscales").get<std::vector<double>>();
    h.log_lengthscales =
        Eigen::Map<const Eigen::VectorXd>(ls.data(), static_cast<Eigen::Index>(ls.size()));
    h.log_noise_variance = j.at("log_noise_variance").get<double>();
    if (!std::isfinite(h.log_signal_variance) || !std::isfinite(h.log_noise_variance) ||
        !h.log_lengthscales.allFinite()) {
        throw std::invalid_argument("KernelHyper: non-finite serialized hyperparameters");
    }
    return h;
}

double kernel_eval(const Eigen::VectorXd& x1, const Eigen::VectorXd& x2,
                   const KernelHyper& hyper) {
    if (x1.size() != hyper.input_dim() || x2.size() != hyper.input_dim()) {
        throw std::invalid_argument("kernel_eval: input dimension mismatch");
    }
    const Eigen::ArrayXd inv_ls2 = (-2.0 * hyper.log_lengthscales.array()).exp();
    const double q = ((x1 - x2).array().square() * inv_ls2).sum();
    return hyper.signal_variance() * std::exp(-0.5 * q);
}

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& X, const KernelHyper& hyper) {
    if (X.cols() != hyper.input_dim()) {
        throw std::invalid_argument("kernel_matrix: input dimension mismatch");
    }
    const Eigen::Index n = X.rows();
    // Scale columns by 1/ls, then use the squared-distance expansion.
    const Eigen::VectorXd inv_ls = (-hyper.log_lengthscales.array()).exp();
    const Eigen::MatrixXd Xs = X * inv_ls.asDiagonal();
    const Eigen::VectorXd sq = Xs.rowwise().squaredNorm();
    Eigen::MatrixXd D = sq.replicate(1, n) + sq.transpose().replicate(n, 1) - 2.0 * Xs * Xs.transpose();
    D = D.cwiseMax(0.0);
    return hyper.signal_variance() * (-0.5 * D.array()).exp().matrix();
}

Eigen::MatrixXd kernel_cross(const Eigen::MatrixXd& Xstar, const Eigen::MatrixXd& X,
                             const KernelHyper& hyper) {
    if (X.cols() != hyper.input_dim() || Xstar.cols() != hyper.input_dim()) {
        throw std::invalid_argument("kernel_cross: input dimension mismatch");
    }
    const Eigen::VectorXd inv_ls = (-hyper.log_lengthscales.array()).exp();
    const Eigen::MatrixXd As = Xstar * inv_ls.asDiagonal();
    const Eigen::MatrixXd Bs = X * inv_ls.asDiagonal();
    const Eigen::VectorXd sa = As.rowwise().squaredNorm();
    const Eigen::VectorXd sb = Bs.rowwise().squaredNorm();
    Eigen::MatrixXd D = sa.replicate(1, Bs.rows()) + sb.transpose().replicate(As.rows(), 1) -
                        2.0 * As * Bs.transpose();
    D = D.cwiseMax(0.0);
    return hyper.signal_variance() * (-0.5 * D.array()).exp().matrix();
}

KernelHyper suggest_hyper_init(const Eigen::MatrixXd& inputs,
                               const Eigen::VectorXd& targets,
                               double lengthscale_floor) {
    const Eigen::Index n = inputs.rows();
    const Eigen::Index d = inputs.cols();
    Eigen::VectorXd ls(d);
    for (Eigen::Index j = 0; j < d; ++j) {
        double sd = 0.0;
        if (n > 1) {
            const double mean = inputs.col(j).mean();
            sd = std::sqrt((inputs.col(j).array() - mean).square().sum() / static_cast<double>(n - 1));
        }
        ls(j) = std::max(sd, lengthscale_floor);
    }
    double tvar = 0.0;
    if (n > 1) {
        const double mean = targets.mean();
        tvar = (targets.array() - mean).square().sum() / static_cast<double>(n - 1);
    }
    tvar = std::max(tvar, 1e-6);
    return KernelHyper::from_values(tvar, ls, 0.1 * tvar);
}

}  // namespace hipmdp::gp
