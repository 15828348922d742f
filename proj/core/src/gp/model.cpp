#include "hipmdp/gp/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hipmdp/errors.hpp"

namespace hipmdp::gp {

namespace {
constexpr double kLog2Pi = 1.8378770664093455;

Eigen::MatrixXd squared_dist_per_dim(const Eigen::MatrixXd& X, Eigen::Index j) {
    const Eigen::VectorXd c = X.col(j);
    const Eigen::Index n = X.rows();
    return (c.replicate(1, n) - c.transpose().replicate(n, 1)).array().square().matrix();
}
}  // namespace

double cholesky_with_jitter(Eigen::MatrixXd& M, Eigen::MatrixXd& L) {
    const Eigen::Index n = M.rows();
    if (n == 0) {
        L.resize(0, 0);
        return 0.0;
    }
    const double scale = M.trace() / static_cast<double>(n);
    double jitter = 0.0;
    const double smallest = 1e-10 * scale;
    const double largest = 1e-4 * scale;
    for (;;) {
        Eigen::MatrixXd A = M;
        if (jitter > 0.0) A.diagonal().array() += jitter;
        Eigen::LLT<Eigen::MatrixXd> llt(A);
        if (llt.info() == Eigen::Success) {
            L = llt.matrixL();
            if (L.allFinite()) return jitter;
        }
        jitter = (jitter == 0.0) ? smallest : jitter * 10.0;
        if (jitter > largest * (1.0 + 1e-12)) {
            std::ostringstream msg;
            msg << "Cholesky factorization failed after jitter escalation"
                << " (smallest attempted jitter " << smallest
                << ", largest " << largest << ")";
            throw NumericalError(msg.str());
        }
    }
}

MllResult marginal_log_likelihood(const KernelHyper& hyper,
                                  const Eigen::MatrixXd& inputs,
                                  const Eigen::VectorXd& targets) {
    const Eigen::Index n = inputs.rows();
    if (targets.size() != n) {
        throw std::invalid_argument("marginal_log_likelihood: inputs/targets shape mismatch");
    }
    MllResult out;
    if (n == 0) return out;  // (0, empty) convention

    const Eigen::Index d = hyper.input_dim();
    const double sn2 = hyper.noise_variance();

    const Eigen::MatrixXd K = kernel_matrix(inputs, hyper);
    Eigen::MatrixXd Kn = K;
    Kn.diagonal().array() += sn2;

    Eigen::MatrixXd L;
    cholesky_with_jitter(Kn, L);

    const Eigen::VectorXd alpha =
        L.triangularView<Eigen::Lower>().transpose().solve(
            L.triangularView<Eigen::Lower>().solve(targets));

    double log_det = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) log_det += std::log(L(i, i));
    log_det *= 2.0;

    out.value = -0.5 * targets.dot(alpha) - 0.5 * log_det -
                0.5 * static_cast<double>(n) * kLog2Pi;

    // W = alpha alpha^T - (K + sn2 I)^-1; dMLL/dtheta = 1/2 tr(W dK/dtheta).
    Eigen::MatrixXd Kinv = L.triangularView<Eigen::Lower>().transpose().solve(
        L.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(n, n)));
    const Eigen::MatrixXd W = alpha * alpha.transpose() - Kinv;

    out.grad.resize(d + 2);
    // d/d log sf2: dK = K (noise-free part).
    out.grad(0) = 0.5 * W.cwiseProduct(K).sum();
    // d/d log ls_j: dK_ij = K_ij * (x_i - x_j)^2 / ls_j^2.
    const Eigen::ArrayXd inv_ls2 = (-2.0 * hyper.log_lengthscales.array()).exp();
    for (Eigen::Index j = 0; j < d; ++j) {
        const Eigen::MatrixXd Dj = squared_dist_per_dim(inputs, j);
        out.grad(1 + j) = 0.5 * inv_ls2(j) * W.cwiseProduct(K.cwiseProduct(Dj)).sum();
    }
    // d/d log sn2: dK = sn2 I.
    out.grad(d + 1) = 0.5 * sn2 * W.trace();
    return out;
}

GpModel::GpModel(KernelHyper hyper, Eigen::MatrixXd inputs, Eigen::VectorXd targets)
    : hyper_(std::move(hyper)), inputs_(std::move(inputs)), targets_(std::move(targets)) {
    if (inputs_.rows() != targets_.size()) {
        throw std::invalid_argument("GpModel: inputs/targets shape mismatch");
    }
    if (inputs_.cols() != hyper_.input_dim()) {
        throw std::invalid_argument("GpModel: hyperparameter dimension mismatch");
    }
    if (!inputs_.allFinite() || !targets_.allFinite()) {
        throw std::invalid_argument("GpModel: non-finite training data");
    }
    const Eigen::Index n = inputs_.rows();
    Eigen::MatrixXd Kn = kernel_matrix(inputs_, hyper_);
    Kn.diagonal().array() += hyper_.noise_variance();
    applied_jitter_ = cholesky_with_jitter(Kn, chol_);
    alpha_ = chol_.triangularView<Eigen::Lower>().transpose().solve(
        chol_.triangularView<Eigen::Lower>().solve(targets_));
    gram_inverse_ = chol_.triangularView<Eigen::Lower>().transpose().solve(
        chol_.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(n, n)));
}

GpModel GpModel::fit(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
                     const KernelHyper& init, const FitConfig& config, FitInfo* info) {
    if (inputs.rows() < 1) throw std::invalid_argument("gp_fit: need at least one data point");
    if (!inputs.allFinite() || !targets.allFinite()) {
        throw std::invalid_argument("gp_fit: non-finite training data");
    }

    const auto clamp = [&](Eigen::VectorXd v) {
        return v.cwiseMax(-config.log_bound).cwiseMin(config.log_bound);
    };
    const auto sign = [](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); };

    Eigen::VectorXd theta = clamp(init.pack());
    MllResult cur = marginal_log_likelihood(KernelHyper::unpack(theta), inputs, targets);

    FitInfo local;
    local.mll_trace.push_back(cur.value);

    // Per-dimension sign-based ascent with backtracking: a step is taken only
    // when it improves the MLL, so the trace is monotone by construction.
    Eigen::VectorXd delta = Eigen::VectorXd::Constant(theta.size(), config.initial_step);

    int iter = 0;
    for (; iter < config.max_iterations; ++iter) {
        if (cur.grad.lpNorm<Eigen::Infinity>() < config.grad_tolerance) {
            local.converged = true;
            break;
        }
        bool accepted = false;
        while (delta.maxCoeff() >= config.min_step) {
            Eigen::VectorXd trial = theta;
            for (Eigen::Index j = 0; j < theta.size(); ++j) {
                trial(j) += delta(j) * sign(cur.grad(j));
            }
            trial = clamp(trial);
            MllResult next;
            bool ok = true;
            try {
                next = marginal_log_likelihood(KernelHyper::unpack(trial), inputs, targets);
            } catch (const NumericalError&) {
                ok = false;
            }
            if (ok && std::isfinite(next.value) && next.value > cur.value) {
                for (Eigen::Index j = 0; j < theta.size(); ++j) {
                    if (next.grad(j) * cur.grad(j) > 0.0) {
                        delta(j) = std::min(delta(j) * 1.2, 1.0);
                    } else {
                        delta(j) = std::max(delta(j) * 0.5, config.min_step);
                    }
                }
                theta = trial;
                cur = next;
                local.mll_trace.push_back(cur.value);
                accepted = true;
                break;
            }
            delta *= 0.5;
        }
        if (!accepted) break;  // no improving step at any admissible size
    }
    local.iterations = iter;
    local.final_mll = cur.value;
    if (info) *info = local;
    return GpModel(KernelHyper::unpack(theta), inputs, targets);
}

std::pair<double, double> GpModel::predict(const Eigen::VectorXd& x_star) const {
    if (x_star.size() != hyper_.input_dim()) {
        throw std::invalid_argument("gp_predict: input dimension mismatch");
    }
    const Eigen::Index n = inputs_.rows();
    Eigen::VectorXd k(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        k(i) = kernel_eval(x_star, inputs_.row(i).transpose(), hyper_);
    }
    const double mean = k.dot(alpha_);
    const Eigen::VectorXd v = chol_.triangularView<Eigen::Lower>().solve(k);
    const double var = std::max(0.0, hyper_.signal_variance() - v.squaredNorm());
    return {mean, var};
}

void GpModel::predict_batch(const Eigen::MatrixXd& Xstar, Eigen::VectorXd& means,
                            Eigen::VectorXd& vars) const {
    if (Xstar.cols() != hyper_.input_dim()) {
        throw std::invalid_argument("gp_predict: input dimension mismatch");
    }
    const Eigen::MatrixXd Ks = kernel_cross(Xstar, inputs_, hyper_);
    means = Ks * alpha_;
    // var_i = sf2 - k_i^T Kinv k_i
    const Eigen::MatrixXd KB = Ks * gram_inverse_;
    vars = (hyper_.signal_variance() - KB.cwiseProduct(Ks).rowwise().sum().array())
               .cwiseMax(0.0)
               .matrix();
}

nlohmann::json GpModel::to_json() const {
    nlohmann::json j;
    j["hyper"] = hyper_.to_json();
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(inputs_.rows()));
    for (Eigen::Index i = 0; i < inputs_.rows(); ++i) {
        rows[static_cast<std::size_t>(i)] =
            std::vector<double>(inputs_.row(i).begin(), inputs_.row(i).end());
    }
    j["inputs"] = rows;
    j["targets"] = std::vector<double>(targets_.begin(), targets_.end());
    return j;
}

GpModel GpModel::from_json(const nlohmann::json& j) {
    const KernelHyper hyper = KernelHyper::from_json(j.at("hyper"));
    const auto rows = j.at("inputs").get<std::vector<std::vector<double>>>();
    const auto targ = j.at("targets").get<std::vector<double>>();
    const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
    const Eigen::Index d = hyper.input_dim();
    Eigen::MatrixXd X(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        X.row(i) = Eigen::Map<const Eigen::VectorXd>(rows[static_cast<std::size_t>(i)].data(), d);
    }
    Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(targ.data(), n);
    return GpModel(hyper, std::move(X), std::move(y));
}

}  // namespace hipmdp::gp
