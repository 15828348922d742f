#include "hipmdp/latent/transition_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "hipmdp/errors.hpp"

namespace hipmdp::latent {

namespace {
constexpr double kLog2Pi = 1.8378770664093455;
}

TransitionModel::TransitionModel(TransitionModelConfig config) : config_(std::move(config)) {
    const auto& l = config_.layout;
    if (l.state_dim < 1 || l.num_actions < 1 || l.latent_dim < 0) {
        throw std::invalid_argument("TransitionModel: invalid augmented layout");
    }
    pool_inputs_.resize(0, l.total());
    pool_targets_.resize(0, l.state_dim);
}

Eigen::MatrixXd TransitionModel::build_augmented(const std::vector<TransitionTuple>& transitions,
                                                 const Eigen::VectorXd& weights,
                                                 const AugmentLayout& layout) {
    Eigen::MatrixXd X(static_cast<Eigen::Index>(transitions.size()), layout.total());
    for (std::size_t i = 0; i < transitions.size(); ++i) {
        X.row(static_cast<Eigen::Index>(i)) =
            augment(transitions[i].state, transitions[i].action, weights, layout).transpose();
    }
    return X;
}

Eigen::MatrixXd TransitionModel::build_deltas(const std::vector<TransitionTuple>& transitions) {
    if (transitions.empty()) return {};
    const Eigen::Index d = transitions.front().state.size();
    Eigen::MatrixXd Y(static_cast<Eigen::Index>(transitions.size()), d);
    for (std::size_t i = 0; i < transitions.size(); ++i) {
        Y.row(static_cast<Eigen::Index>(i)) =
            (transitions[i].next_state - transitions[i].state).transpose();
    }
    return Y;
}

void TransitionModel::require_fitted(const char* op) const {
    if (!fitted_) {
        throw std::logic_error(std::string(op) + ": transition model is not fitted");
    }
}

std::vector<gp::KernelHyper> TransitionModel::initial_hypers(const Eigen::MatrixXd& inputs,
                                                             const Eigen::MatrixXd& targets) const {
    std::vector<gp::KernelHyper> out;
    const auto& l = config_.layout;
    out.reserve(static_cast<std::size_t>(l.state_dim));
    for (Eigen::Index d = 0; d < l.state_dim; ++d) {
        gp::KernelHyper h = gp::suggest_hyper_init(inputs, targets.col(d));
        for (Eigen::Index j = l.latent_offset(); j < l.total(); ++j) {
            h.log_lengthscales(j) = std::max(h.log_lengthscales(j),
                                             std::log(config_.latent_lengthscale_floor));
        }
        out.push_back(std::move(h));
    }
    return out;
}

void TransitionModel::fit_dimensions(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
                                     bool warm_start) {
    std::vector<gp::KernelHyper> inits;
    if (warm_start && fitted_) {
        for (const auto& m : models_) inits.push_back(m.hyper());
    } else {
        inits = initial_hypers(inputs, targets);
    }
    std::vector<gp::GpModel> next;
    next.reserve(inits.size());
    for (Eigen::Index d = 0; d < config_.layout.state_dim; ++d) {
        next.push_back(gp::GpModel::fit(inputs, targets.col(d), inits[static_cast<std::size_t>(d)],
                                        config_.fit));
    }
    models_ = std::move(next);
    support_inputs_ = inputs;
    support_targets_ = targets;
    fitted_ = true;
}

void TransitionModel::refit_from_pool(const Rng& rng) {
    const Eigen::Index n = pool_inputs_.rows();
    // Deterministic uniform subsample of the pool when it outgrows the cap.
    Eigen::MatrixXd cand_inputs, cand_targets;
    if (n > config_.candidate_cap) {
        std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
        std::iota(idx.begin(), idx.end(), 0);
        Rng r = rng.fork("candidate_subsample");
        for (std::size_t i = 0; i < static_cast<std::size_t>(config_.candidate_cap); ++i) {
            std::swap(idx[i], idx[i + r.index(idx.size() - i)]);
        }
        cand_inputs.resize(config_.candidate_cap, pool_inputs_.cols());
        cand_targets.resize(config_.candidate_cap, pool_targets_.cols());
        for (Eigen::Index i = 0; i < config_.candidate_cap; ++i) {
            cand_inputs.row(i) = pool_inputs_.row(idx[static_cast<std::size_t>(i)]);
            cand_targets.row(i) = pool_targets_.row(idx[static_cast<std::size_t>(i)]);
        }
    } else {
        cand_inputs = pool_inputs_;
        cand_targets = pool_targets_;
    }

    const Eigen::Index m = std::min(config_.support_size, cand_inputs.rows());
    AnnealConfig anneal = config_.anneal;
    anneal.seed = rng.fork("support_anneal").next_u64();
    if (fitted_) {
        anneal.hypers.clear();
        for (const auto& mod : models_) anneal.hypers.push_back(mod.hyper());
    } else {
        anneal.hypers = initial_hypers(cand_inputs, cand_targets);
    }

    const SelectionResult sel = select_support_points(cand_inputs, cand_targets, m, anneal);
    Eigen::MatrixXd sup_inputs(m, cand_inputs.cols());
    Eigen::MatrixXd sup_targets(m, cand_targets.cols());
    for (Eigen::Index i = 0; i < m; ++i) {
        sup_inputs.row(i) = cand_inputs.row(sel.indices[static_cast<std::size_t>(i)]);
        sup_targets.row(i) = cand_targets.row(sel.indices[static_cast<std::size_t>(i)]);
    }
    fit_dimensions(sup_inputs, sup_targets, /*warm_start=*/true);
}

void TransitionModel::update_global_model(const std::string& instance_id,
                                          const std::vector<TransitionTuple>& transitions,
                                          const LatentWeights& final_weights, const Rng& rng) {
    if (latent_table_.count(instance_id) != 0) {
        throw std::invalid_argument("update_global_model: duplicate instance id " + instance_id);
    }
    if (transitions.empty()) {
        throw std::invalid_argument("update_global_model: no transitions for " + instance_id);
    }
    const Eigen::MatrixXd X = build_augmented(transitions, final_weights.mean, config_.layout);
    const Eigen::MatrixXd Y = build_deltas(transitions);

    const Eigen::Index old = pool_inputs_.rows();
    pool_inputs_.conservativeResize(old + X.rows(), Eigen::NoChange);
    pool_targets_.conservativeResize(old + Y.rows(), Eigen::NoChange);
    pool_inputs_.bottomRows(X.rows()) = X;
    pool_targets_.bottomRows(Y.rows()) = Y;

    LatentWeights stored = final_weights;
    stored.instance_id = instance_id;
    latent_table_.emplace(instance_id, std::move(stored));

    refit_from_pool(rng);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> TransitionModel::predict_transition(
    const Eigen::VectorXd& state, int action, const LatentWeights& weights) const {
    require_fitted("predict_transition");
    const Eigen::VectorXd x = augment(state, action, weights, config_.layout);
    Eigen::VectorXd mean(config_.layout.state_dim), var(config_.layout.state_dim);
    for (Eigen::Index d = 0; d < config_.layout.state_dim; ++d) {
        const auto [mu, v] = models_[static_cast<std::size_t>(d)].predict(x);
        mean(d) = state(d) + mu;  // delta parameterization
        var(d) = v + models_[static_cast<std::size_t>(d)].hyper().noise_variance();
    }
    return {mean, var};
}

void TransitionModel::predict_transition_batch(const Eigen::MatrixXd& states,
                                               const std::vector<int>& actions,
                                               const Eigen::VectorXd& weights,
                                               Eigen::MatrixXd& mean_next,
                                               Eigen::MatrixXd& var) const {
    require_fitted("predict_transition");
    const Eigen::Index n = states.rows();
    if (static_cast<Eigen::Index>(actions.size()) != n) {
        throw std::invalid_argument("predict_transition: states/actions length mismatch");
    }
    const auto& l = config_.layout;
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, l.total());
    for (Eigen::Index i = 0; i < n; ++i) {
        X.row(i) = augment(states.row(i).transpose(), actions[static_cast<std::size_t>(i)],
                           weights, l)
                       .transpose();
    }
    mean_next.resize(n, l.state_dim);
    var.resize(n, l.state_dim);
    Eigen::VectorXd mu, v;
    for (Eigen::Index d = 0; d < l.state_dim; ++d) {
        models_[static_cast<std::size_t>(d)].predict_batch(X, mu, v);
        mean_next.col(d) = states.col(d) + mu;
        var.col(d) = v.array() + models_[static_cast<std::size_t>(d)].hyper().noise_variance();
    }
}

Eigen::VectorXd TransitionModel::uncertainty_probe(const Eigen::VectorXd& state, int action,
                                                   const std::vector<LatentWeights>& classes) const {
    require_fitted("uncertainty_probe");
    if (classes.empty()) {
        throw std::invalid_argument("uncertainty_probe: empty class list");
    }
    Eigen::VectorXd out(static_cast<Eigen::Index>(classes.size()));
    for (std::size_t c = 0; c < classes.size(); ++c) {
        const Eigen::VectorXd x = augment(state, action, classes[c], config_.layout);
        double acc = 0.0;
        for (Eigen::Index d = 0; d < config_.layout.state_dim; ++d) {
            const auto [mu, v] = models_[static_cast<std::size_t>(d)].predict(x);
            acc += v + models_[static_cast<std::size_t>(d)].hyper().noise_variance();
        }
        out(static_cast<Eigen::Index>(c)) = acc / static_cast<double>(config_.layout.state_dim);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Latent weight inference
// ---------------------------------------------------------------------------

// Joint predictive log likelihood of the instance's delta block under each
// dimension's GP, conditioned on the global support set, as a function of
// the shared latent weights. The within-instance kernel block is constant in
// w (all rows share one w), so each evaluation costs one T x T factorization
// plus T x m products per dimension. Scoring the block jointly rather than
// row-by-row is what penalizes a w that merely inflates variance: correlated
// repeats stop collecting independent likelihood bonuses.
struct TransitionModel::Objective {
    const TransitionModel& model;
    Eigen::MatrixXd deltas;                // T x D observed deltas
    std::vector<Eigen::MatrixXd> sa_part;  // per dim: exp(-1/2 sa-distance to support), T x m
    std::vector<Eigen::MatrixXd> block;    // per dim: within-instance kernel + sn2 I, T x T
    std::vector<Eigen::VectorXd> lat_inv_ls2;
    Eigen::MatrixXd support_lat;
    Eigen::VectorXd prior_mean, prior_var;

    Objective(const TransitionModel& m, const std::vector<TransitionTuple>& transitions,
              const LatentWeights& prior)
        : model(m) {
        const auto& layout = m.config_.layout;
        const Eigen::Index T = static_cast<Eigen::Index>(transitions.size());
        const Eigen::Index sa = layout.latent_offset();
        deltas = build_deltas(transitions);

        Eigen::MatrixXd Xsa(T, sa);
        for (Eigen::Index i = 0; i < T; ++i) {
            const auto& t = transitions[static_cast<std::size_t>(i)];
            Xsa.row(i).head(layout.state_dim) = t.state.transpose();
            Xsa.row(i).segment(layout.state_dim, layout.num_actions).setZero();
            Xsa(i, layout.state_dim + t.action) = 1.0;
        }
        const Eigen::MatrixXd support_sa = m.support_inputs_.leftCols(sa);
        support_lat = m.support_inputs_.rightCols(layout.latent_dim);

        for (Eigen::Index d = 0; d < layout.state_dim; ++d) {
            const auto& hyper = m.models_[static_cast<std::size_t>(d)].hyper();
            const Eigen::VectorXd inv_ls = (-hyper.log_lengthscales.array()).exp();
            const Eigen::MatrixXd A = Xsa * inv_ls.head(sa).asDiagonal();
            const Eigen::MatrixXd S = support_sa * inv_ls.head(sa).asDiagonal();
            const Eigen::VectorXd qa = A.rowwise().squaredNorm();
            const Eigen::VectorXd qs = S.rowwise().squaredNorm();
            Eigen::MatrixXd D = qa.replicate(1, S.rows()) + qs.transpose().replicate(T, 1) -
                                2.0 * A * S.transpose();
            sa_part.push_back((-0.5 * D.cwiseMax(0.0).array()).exp().matrix());

            Eigen::MatrixXd Db = qa.replicate(1, T) + qa.transpose().replicate(T, 1) -
                                 2.0 * A * A.transpose();
            Eigen::MatrixXd Kb =
                hyper.signal_variance() * (-0.5 * Db.cwiseMax(0.0).array()).exp().matrix();
            Kb.diagonal().array() += hyper.noise_variance();
            block.push_back(std::move(Kb));

            lat_inv_ls2.push_back(
                (-2.0 * hyper.log_lengthscales.tail(layout.latent_dim).array()).exp());
        }
        prior_mean = prior.mean;
        prior_var = prior.cov_diag.cwiseMax(1e-12);
    }

    // Value and (optionally) gradient of the log posterior objective at w.
    double eval(const Eigen::VectorXd& w, Eigen::VectorXd* grad) const {
        const auto& layout = model.config_.layout;
        const Eigen::Index T = deltas.rows();
        const Eigen::Index K = layout.latent_dim;
        double value = 0.0;
        if (grad) grad->setZero(K);

        for (Eigen::Index d = 0; d < layout.state_dim; ++d) {
            const auto& gpm = model.models_[static_cast<std::size_t>(d)];
            const Eigen::VectorXd& inv_ls2 = lat_inv_ls2[static_cast<std::size_t>(d)];

            Eigen::VectorXd latq = Eigen::VectorXd::Zero(support_lat.rows());
            for (Eigen::Index j = 0; j < K; ++j) {
                latq += inv_ls2(j) * (support_lat.col(j).array() - w(j)).square().matrix();
            }
            const Eigen::VectorXd col_factor =
                gpm.hyper().signal_variance() * (-0.5 * latq.array()).exp();

            const Eigen::MatrixXd Ks =
                sa_part[static_cast<std::size_t>(d)] * col_factor.asDiagonal();
            const Eigen::VectorXd mu = Ks * gpm.alpha();
            const Eigen::MatrixXd W = Ks * gpm.gram_inverse();  // T x m
            Eigen::MatrixXd Sigma = block[static_cast<std::size_t>(d)] - W * Ks.transpose();

            Eigen::MatrixXd L;
            gp::cholesky_with_jitter(Sigma, L);
            const Eigen::VectorXd resid = deltas.col(d) - mu;
            const Eigen::VectorXd u = L.triangularView<Eigen::Lower>().transpose().solve(
                L.triangularView<Eigen::Lower>().solve(resid));
            double log_det = 0.0;
            for (Eigen::Index i = 0; i < T; ++i) log_det += std::log(L(i, i));
            value += -0.5 * resid.dot(u) - log_det -
                     0.5 * static_cast<double>(T) * std::log(2.0 * M_PI);

            if (grad) {
                const Eigen::VectorXd b = Ks.transpose() * u;                 // m
                const Eigen::VectorXd Bb = gpm.gram_inverse() * b;            // m
                for (Eigen::Index j = 0; j < K; ++j) {
                    const Eigen::VectorXd Dj =
                        inv_ls2(j) * (support_lat.col(j).array() - w(j)).matrix();
                    const Eigen::MatrixXd Mj = Ks * Dj.asDiagonal();          // dKs/dw_j
                    const Eigen::VectorXd dmu = Mj * gpm.alpha();
                    const Eigen::VectorXd aj = Mj.transpose() * u;            // m
                    // Sigma' = -(Mj B Ks^T + Ks B Mj^T)
                    const Eigen::MatrixXd Sj = L.triangularView<Eigen::Lower>().transpose().solve(
                        L.triangularView<Eigen::Lower>().solve(Mj));          // Sigma^-1 Mj
                    (*grad)(j) += dmu.dot(u) - aj.dot(Bb) + Sj.cwiseProduct(W).sum();
                }
            }
        }
        // Prior density.
        value += (-0.5 * (prior_var.array() * 2.0 * M_PI).log() -
                  0.5 * (w - prior_mean).array().square() / prior_var.array())
                     .sum();
        if (grad) *grad -= ((w - prior_mean).array() / prior_var.array()).matrix();
        return value;
    }
};

LatentWeights TransitionModel::infer_latent_weights(const std::vector<TransitionTuple>& transitions,
                                                    const LatentWeights& prior, const Rng& rng,
                                                    InferInfo* info) const {
    if (transitions.empty() || config_.layout.latent_dim == 0) {
        if (info) *info = InferInfo{.converged = true};
        return prior;
    }
    require_fitted("infer_latent_weights");
    if (prior.dim() != config_.layout.latent_dim) {
        throw std::invalid_argument("infer_latent_weights: prior dimension mismatch");
    }

    const Objective obj(*this, transitions, prior);
    const Eigen::Index K = config_.layout.latent_dim;
    const auto& cfg = config_.infer;
    const auto sign = [](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); };

    // The prior mean is a stationary point whenever every support row shares
    // one latent coordinate (the kernel gradient vanishes there), so ascent
    // also launches from deterministic one-sigma axis offsets plus sampled
    // restarts.
    std::vector<Eigen::VectorXd> starts{prior.mean};
    for (Eigen::Index j = 0; j < K; ++j) {
        const double sigma = std::sqrt(std::max(prior.cov_diag(j), 1e-12));
        Eigen::VectorXd up = prior.mean, dn = prior.mean;
        up(j) += sigma;
        dn(j) -= sigma;
        starts.push_back(up);
        starts.push_back(dn);
    }
    Rng start_rng = rng.fork("infer_starts");
    for (int r = 0; r < cfg.restarts; ++r) {
        Eigen::VectorXd s(K);
        for (Eigen::Index j = 0; j < K; ++j) {
            s(j) = prior.mean(j) + std::sqrt(std::max(prior.cov_diag(j), 1e-12)) * start_rng.normal();
        }
        starts.push_back(s);
    }

    Eigen::VectorXd best_w = prior.mean;
    double best_value = -std::numeric_limits<double>::infinity();
    InferInfo best_info;

    for (const auto& start : starts) {
        Eigen::VectorXd w = start;
        Eigen::VectorXd grad(K);
        double value = obj.eval(w, &grad);
        if (!std::isfinite(value)) {
            throw NumericalError("infer_latent_weights: non-finite objective");
        }
        InferInfo local;
        local.objective_trace.push_back(value);
        Eigen::VectorXd delta = Eigen::VectorXd::Constant(K, cfg.initial_step);

        for (int iter = 0; iter < cfg.max_iterations; ++iter) {
            if (grad.lpNorm<Eigen::Infinity>() < cfg.grad_tolerance) {
                local.converged = true;
                break;
            }
            // Backtrack with a local scale so one hard step does not
            // permanently collapse the step vector.
            bool accepted = false;
            double scale = 1.0;
            for (int attempt = 0; attempt < 16 && delta.maxCoeff() * scale >= cfg.min_step;
                 ++attempt) {
                Eigen::VectorXd trial = w;
                for (Eigen::Index j = 0; j < K; ++j) trial(j) += scale * delta(j) * sign(grad(j));
                Eigen::VectorXd trial_grad(K);
                const double trial_value = obj.eval(trial, &trial_grad);
                if (std::isfinite(trial_value) && trial_value > value) {
                    for (Eigen::Index j = 0; j < K; ++j) {
                        const double base = std::max(delta(j) * scale, cfg.min_step);
                        delta(j) = (trial_grad(j) * grad(j) > 0.0) ? std::min(base * 1.5, 2.0)
                                                                   : std::max(base * 0.5, cfg.min_step);
                    }
                    w = trial;
                    value = trial_value;
                    grad = trial_grad;
                    local.objective_trace.push_back(value);
                    accepted = true;
                    break;
                }
                scale *= 0.5;
            }
            if (!accepted) break;
        }
        local.final_objective = value;
        if (value > best_value) {
            best_value = value;
            best_w = w;
            best_info = local;
        }
    }

    // Diagonal Laplace approximation from central second differences.
    LatentWeights out;
    out.instance_id = prior.instance_id;
    out.mean = best_w;
    out.cov_diag.resize(K);
    const double h = cfg.hessian_fd_step;
    const double f0 = obj.eval(best_w, nullptr);
    for (Eigen::Index j = 0; j < K; ++j) {
        Eigen::VectorXd up = best_w, dn = best_w;
        up(j) += h;
        dn(j) -= h;
        const double second = (obj.eval(up, nullptr) - 2.0 * f0 + obj.eval(dn, nullptr)) / (h * h);
        const double curvature = std::max(-second, 1e-6);
        out.cov_diag(j) = std::min(1.0 / curvature, 1e4);
    }
    if (info) *info = best_info;
    return out;
}

// ---------------------------------------------------------------------------
// Working-copy construction
// ---------------------------------------------------------------------------

TransitionModel TransitionModel::with_instance_data(const std::vector<TransitionTuple>& transitions,
                                                    const Eigen::VectorXd& weights,
                                                    Eigen::Index max_rows) const {
    require_fitted("with_instance_data");
    std::vector<TransitionTuple> recent = transitions;
    if (static_cast<Eigen::Index>(recent.size()) > max_rows) {
        recent.assign(transitions.end() - max_rows, transitions.end());
    }
    const Eigen::MatrixXd X = build_augmented(recent, weights, config_.layout);
    const Eigen::MatrixXd Y = build_deltas(recent);

    TransitionModel out(config_);
    out.latent_table_ = latent_table_;
    Eigen::MatrixXd inputs(support_inputs_.rows() + X.rows(), support_inputs_.cols());
    Eigen::MatrixXd targets(support_targets_.rows() + Y.rows(), support_targets_.cols());
    inputs << support_inputs_, X;
    targets << support_targets_, Y;
    out.support_inputs_ = inputs;
    out.support_targets_ = targets;
    for (Eigen::Index d = 0; d < config_.layout.state_dim; ++d) {
        out.models_.emplace_back(models_[static_cast<std::size_t>(d)].hyper(), inputs,
                                 targets.col(d));
    }
    out.fitted_ = true;
    return out;
}

TransitionModel TransitionModel::fit_single_instance(const TransitionModelConfig& config,
                                                     const std::vector<TransitionTuple>& transitions,
                                                     const Eigen::VectorXd& weights,
                                                     const Rng& rng) {
    if (transitions.empty()) {
        throw std::invalid_argument("fit_single_instance: no transitions");
    }
    TransitionModel out(config);
    Eigen::MatrixXd X = build_augmented(transitions, weights, config.layout);
    Eigen::MatrixXd Y = build_deltas(transitions);

    if (X.rows() > config.support_size) {
        // Cap via the cheaper per-episode annealing schedule.
        Eigen::Index cap = std::min<Eigen::Index>(X.rows(), config.candidate_cap);
        if (cap < X.rows()) {
            std::vector<Eigen::Index> idx(static_cast<std::size_t>(X.rows()));
            std::iota(idx.begin(), idx.end(), 0);
            Rng r = rng.fork("single_instance_subsample");
            for (std::size_t i = 0; i < static_cast<std::size_t>(cap); ++i) {
                std::swap(idx[i], idx[i + r.index(idx.size() - i)]);
            }
            Eigen::MatrixXd Xc(cap, X.cols()), Yc(cap, Y.cols());
            for (Eigen::Index i = 0; i < cap; ++i) {
                Xc.row(i) = X.row(idx[static_cast<std::size_t>(i)]);
                Yc.row(i) = Y.row(idx[static_cast<std::size_t>(i)]);
            }
            X = std::move(Xc);
            Y = std::move(Yc);
        }
        AnnealConfig anneal = config.episode_anneal;
        anneal.seed = rng.fork("single_instance_anneal").next_u64();
        anneal.hypers = out.initial_hypers(X, Y);
        const SelectionResult sel =
            select_support_points(X, Y, std::min(config.support_size, X.rows()), anneal);
        Eigen::MatrixXd Xs(static_cast<Eigen::Index>(sel.indices.size()), X.cols());
        Eigen::MatrixXd Ys(static_cast<Eigen::Index>(sel.indices.size()), Y.cols());
        for (std::size_t i = 0; i < sel.indices.size(); ++i) {
            Xs.row(static_cast<Eigen::Index>(i)) = X.row(sel.indices[i]);
            Ys.row(static_cast<Eigen::Index>(i)) = Y.row(sel.indices[i]);
        }
        X = std::move(Xs);
        Y = std::move(Ys);
    }
    out.fit_dimensions(X, Y, /*warm_start=*/false);
    return out;
}

// ---------------------------------------------------------------------------
// Checkpointing
// ---------------------------------------------------------------------------

nlohmann::json TransitionModel::to_json() const {
    nlohmann::json j;
    j["layout"] = {{"state_dim", config_.layout.state_dim},
                   {"num_actions", config_.layout.num_actions},
                   {"latent_dim", config_.layout.latent_dim}};
    j["fitted"] = fitted_;
    if (fitted_) {
        std::vector<std::vector<double>> rows(static_cast<std::size_t>(support_inputs_.rows()));
        for (Eigen::Index i = 0; i < support_inputs_.rows(); ++i) {
            rows[static_cast<std::size_t>(i)] = std::vector<double>(
                support_inputs_.row(i).begin(), support_inputs_.row(i).end());
        }
        j["support_inputs"] = rows;
        nlohmann::json dims = nlohmann::json::array();
        for (Eigen::Index d = 0; d < config_.layout.state_dim; ++d) {
            const auto& m = models_[static_cast<std::size_t>(d)];
            dims.push_back({{"hyper", m.hyper().to_json()},
                            {"targets", std::vector<double>(m.targets().begin(), m.targets().end())}});
        }
        j["dimensions"] = dims;
    }
    nlohmann::json table = nlohmann::json::object();
    for (const auto& [id, w] : latent_table_) {
        table[id] = {{"mean", std::vector<double>(w.mean.begin(), w.mean.end())},
                     {"cov_diag", std::vector<double>(w.cov_diag.begin(), w.cov_diag.end())}};
    }
    j["latent_table"] = table;
    return j;
}

TransitionModel TransitionModel::from_json(const nlohmann::json& j) {
    TransitionModelConfig config;
    config.layout.state_dim = j.at("layout").at("state_dim").get<Eigen::Index>();
    config.layout.num_actions = j.at("layout").at("num_actions").get<Eigen::Index>();
    config.layout.latent_dim = j.at("layout").at("latent_dim").get<Eigen::Index>();
    TransitionModel out(config);

    for (const auto& [id, wj] : j.at("latent_table").items()) {
        LatentWeights w;
        const auto mean = wj.at("mean").get<std::vector<double>>();
        const auto cov = wj.at("cov_diag").get<std::vector<double>>();
        w.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(mean.size()));
        w.cov_diag = Eigen::Map<const Eigen::VectorXd>(cov.data(), static_cast<Eigen::Index>(cov.size()));
        w.instance_id = id;
        out.latent_table_.emplace(id, std::move(w));
    }

    if (j.at("fitted").get<bool>()) {
        const auto rows = j.at("support_inputs").get<std::vector<std::vector<double>>>();
        const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
        Eigen::MatrixXd X(n, config.layout.total());
        for (Eigen::Index i = 0; i < n; ++i) {
            X.row(i) = Eigen::Map<const Eigen::VectorXd>(rows[static_cast<std::size_t>(i)].data(),
                                                         config.layout.total());
        }
        out.support_inputs_ = X;
        out.support_targets_.resize(n, config.layout.state_dim);
        for (Eigen::Index d = 0; d < config.layout.state_dim; ++d) {
            const auto& dj = j.at("dimensions").at(static_cast<std::size_t>(d));
            const auto targ = dj.at("targets").get<std::vector<double>>();
            Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(targ.data(), n);
            out.support_targets_.col(d) = y;
            out.models_.emplace_back(gp::KernelHyper::from_json(dj.at("hyper")), X, y);
        }
        out.fitted_ = true;
    }
    return out;
}

}  // namespace hipmdp::latent
