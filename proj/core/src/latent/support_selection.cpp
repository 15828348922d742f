#include "hipmdp/latent/support_selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "hipmdp/gp/model.hpp"
#include "hipmdp/rng.hpp"

namespace hipmdp::latent {

namespace {

// Shared evaluator: per-dimension lengthscale-weighted squared distances are
// precomputed once, so a subset evaluation costs one Cholesky per dimension.
// Intended for batches of at most ~1000 rows; callers cap candidate pools.
class Evaluator {
public:
    Evaluator(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
              const std::vector<gp::KernelHyper>& hypers)
        : targets_(targets), hypers_(hypers) {
        const Eigen::Index n = inputs.rows();
        const Eigen::Index dims = targets.cols();
        dist_.reserve(static_cast<std::size_t>(dims));
        for (Eigen::Index d = 0; d < dims; ++d) {
            const Eigen::VectorXd inv_ls =
                (-hypers_[static_cast<std::size_t>(d)].log_lengthscales.array()).exp();
            const Eigen::MatrixXd Xs = inputs * inv_ls.asDiagonal();
            const Eigen::VectorXd sq = Xs.rowwise().squaredNorm();
            Eigen::MatrixXd D = sq.replicate(1, n) + sq.transpose().replicate(n, 1) -
                                2.0 * Xs * Xs.transpose();
            dist_.push_back(D.cwiseMax(0.0));
        }
    }

    double objective(const std::vector<Eigen::Index>& selected,
                     const std::vector<Eigen::Index>& eval_rows) const {
        const auto m = static_cast<Eigen::Index>(selected.size());
        const auto h = static_cast<Eigen::Index>(eval_rows.size());
        double worst = 0.0;
        for (std::size_t d = 0; d < dist_.size(); ++d) {
            const auto& hyper = hypers_[d];
            const double sf2 = hyper.signal_variance();
            Eigen::MatrixXd K(m, m);
            for (Eigen::Index i = 0; i < m; ++i) {
                for (Eigen::Index j = 0; j <= i; ++j) {
                    const double v =
                        sf2 * std::exp(-0.5 * dist_[d](selected[static_cast<std::size_t>(i)],
                                                       selected[static_cast<std::size_t>(j)]));
                    K(i, j) = v;
                    K(j, i) = v;
                }
            }
            K.diagonal().array() += hyper.noise_variance();
            Eigen::MatrixXd L;
            gp::cholesky_with_jitter(K, L);
            Eigen::VectorXd y(m);
            for (Eigen::Index i = 0; i < m; ++i) {
                y(i) = targets_(selected[static_cast<std::size_t>(i)],
                                static_cast<Eigen::Index>(d));
            }
            const Eigen::VectorXd alpha = L.triangularView<Eigen::Lower>().transpose().solve(
                L.triangularView<Eigen::Lower>().solve(y));
            Eigen::MatrixXd Ks(h, m);
            for (Eigen::Index i = 0; i < h; ++i) {
                for (Eigen::Index j = 0; j < m; ++j) {
                    Ks(i, j) = sf2 * std::exp(-0.5 * dist_[d](eval_rows[static_cast<std::size_t>(i)],
                                                              selected[static_cast<std::size_t>(j)]));
                }
            }
            const Eigen::VectorXd pred = Ks * alpha;
            for (Eigen::Index i = 0; i < h; ++i) {
                worst = std::max(worst,
                                 std::abs(pred(i) - targets_(eval_rows[static_cast<std::size_t>(i)],
                                                             static_cast<Eigen::Index>(d))));
            }
        }
        return worst;
    }

private:
    const Eigen::MatrixXd& targets_;
    const std::vector<gp::KernelHyper>& hypers_;
    std::vector<Eigen::MatrixXd> dist_;
};

std::vector<gp::KernelHyper> resolve_hypers(const Eigen::MatrixXd& inputs,
                                            const Eigen::MatrixXd& targets,
                                            const std::vector<gp::KernelHyper>& given) {
    const auto dims = static_cast<std::size_t>(targets.cols());
    if (!given.empty()) {
        if (given.size() != dims) {
            throw std::invalid_argument(
                "select_support_points: one KernelHyper per target dimension required");
        }
        return given;
    }
    std::vector<gp::KernelHyper> out;
    out.reserve(dims);
    for (std::size_t d = 0; d < dims; ++d) {
        out.push_back(gp::suggest_hyper_init(inputs, targets.col(static_cast<Eigen::Index>(d))));
    }
    return out;
}

// Row order independent of presentation: stable lexicographic sort over the
// concatenated (input, target) rows.
std::vector<Eigen::Index> canonical_order(const Eigen::MatrixXd& inputs,
                                          const Eigen::MatrixXd& targets) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(inputs.rows()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        for (Eigen::Index j = 0; j < inputs.cols(); ++j) {
            if (inputs(a, j) != inputs(b, j)) return inputs(a, j) < inputs(b, j);
        }
        for (Eigen::Index j = 0; j < targets.cols(); ++j) {
            if (targets(a, j) != targets(b, j)) return targets(a, j) < targets(b, j);
        }
        return false;
    });
    return order;
}

}  // namespace

double reconstruction_objective(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
                                const std::vector<Eigen::Index>& selected,
                                const std::vector<Eigen::Index>& eval_rows,
                                const std::vector<gp::KernelHyper>& hypers) {
    const Evaluator eval(inputs, targets, resolve_hypers(inputs, targets, hypers));
    return eval.objective(selected, eval_rows);
}

SelectionResult select_support_points(const Eigen::MatrixXd& inputs,
                                      const Eigen::MatrixXd& targets,
                                      Eigen::Index m, const AnnealConfig& config) {
    const Eigen::Index n = inputs.rows();
    if (targets.rows() != n) {
        throw std::invalid_argument("select_support_points: inputs/targets row mismatch");
    }
    if (m < 1 || m > n) {
        throw std::invalid_argument("select_support_points: m out of range");
    }
    const auto hypers = resolve_hypers(inputs, targets, config.hypers);

    SelectionResult result;
    if (m == n) {
        result.indices.resize(static_cast<std::size_t>(n));
        std::iota(result.indices.begin(), result.indices.end(), 0);
        const Evaluator eval(inputs, targets, hypers);
        result.final_objective = eval.objective(result.indices, result.indices);
        result.holdout_rows = result.indices;
        result.candidate_rows = result.indices;
        return result;
    }

    // Canonical order plus a seeded shuffle makes the held-out split and the
    // annealing path a function of the data multiset, not the row order.
    std::vector<Eigen::Index> perm = canonical_order(inputs, targets);
    Rng rng(Rng(config.seed).fork("support_selection").next_u64());
    for (std::size_t i = perm.size() - 1; i > 0; --i) {
        std::swap(perm[i], perm[rng.index(i + 1)]);
    }

    Eigen::Index holdout_size = static_cast<Eigen::Index>(
        std::llround(config.holdout_fraction * static_cast<double>(n)));
    holdout_size = std::min(holdout_size, n - m);  // keep enough candidates
    holdout_size = std::max<Eigen::Index>(holdout_size, 0);

    std::vector<Eigen::Index> holdout(perm.begin(), perm.begin() + holdout_size);
    std::vector<Eigen::Index> candidates(perm.begin() + holdout_size, perm.end());
    const std::vector<Eigen::Index>& eval_rows = holdout.empty() ? candidates : holdout;
    result.holdout_rows = eval_rows;
    result.candidate_rows = candidates;

    const Evaluator eval(inputs, targets, hypers);

    std::vector<Eigen::Index> selected(candidates.begin(), candidates.begin() + m);
    std::vector<Eigen::Index> unselected(candidates.begin() + m, candidates.end());

    double cur = eval.objective(selected, eval_rows);
    std::vector<Eigen::Index> best = selected;
    double best_obj = cur;

    double temperature = config.initial_temperature < 0.0 ? cur : config.initial_temperature;
    result.objective_trace.reserve(static_cast<std::size_t>(config.steps));

    for (int step = 0; step < config.steps && !unselected.empty(); ++step) {
        const std::size_t i = rng.index(selected.size());
        const std::size_t j = rng.index(unselected.size());
        std::swap(selected[i], unselected[j]);
        const double prop = eval.objective(selected, eval_rows);
        const double delta = prop - cur;
        bool accept;
        if (delta <= 0.0) {
            accept = true;
        } else if (temperature > 1e-300) {
            accept = rng.uniform() < std::exp(-delta / temperature);
        } else {
            accept = false;  // greedy limit
        }
        if (accept) {
            cur = prop;
            if (cur < best_obj) {
                best_obj = cur;
                best = selected;
            }
        } else {
            std::swap(selected[i], unselected[j]);  // revert
        }
        result.objective_trace.push_back(cur);
        temperature *= config.cooling;
    }

    result.indices = std::move(best);
    std::sort(result.indices.begin(), result.indices.end());
    result.final_objective = best_obj;
    return result;
}

}  // namespace hipmdp::latent
