// Acceptance suite: one pass/fail line per criterion, exit 0 only if all
// pass. Each criterion pins its tolerances in code. Individual criteria can
// be selected with `acceptance --only 3 5` while debugging.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <vector>

#include "hipmdp/domains/tasks.hpp"
#include "hipmdp/gp/model.hpp"
#include "hipmdp/harness/experiment.hpp"
#include "hipmdp/harness/report.hpp"
#include "hipmdp/latent/transition_model.hpp"
#include "hipmdp/policy/learner.hpp"
#include "hipmdp/rng.hpp"

using namespace hipmdp;
namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------------------
// Criterion 1: GP correctness suite
// ---------------------------------------------------------------------------

Eigen::MatrixXd random_inputs(Rng& rng, Eigen::Index n, Eigen::Index d) {
    Eigen::MatrixXd X(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < d; ++j) X(i, j) = rng.uniform(-2.0, 2.0);
    return X;
}

bool criterion1(std::string& detail) {
    Rng rng(101);
    double worst_rel = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Index n = 3 + static_cast<Eigen::Index>(rng.index(28));
        const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng.index(8));
        const Eigen::MatrixXd X = random_inputs(rng, n, d);
        Eigen::VectorXd y(n);
        for (Eigen::Index i = 0; i < n; ++i) y(i) = rng.normal();
        Eigen::VectorXd ls(d);
        for (Eigen::Index j = 0; j < d; ++j) ls(j) = rng.uniform(0.3, 2.0);
        const auto hyper =
            gp::KernelHyper::from_values(rng.uniform(0.5, 2.0), ls, rng.uniform(0.01, 0.3));

        const auto res = gp::marginal_log_likelihood(hyper, X, y);
        Eigen::VectorXd packed = hyper.pack();
        Eigen::VectorXd fd(packed.size());
        const double h = 1e-5;
        for (Eigen::Index k = 0; k < packed.size(); ++k) {
            Eigen::VectorXd up = packed, dn = packed;
            up(k) += h;
            dn(k) -= h;
            fd(k) = (gp::marginal_log_likelihood(gp::KernelHyper::unpack(up), X, y).value -
                     gp::marginal_log_likelihood(gp::KernelHyper::unpack(dn), X, y).value) /
                    (2.0 * h);
        }
        const double rel = (res.grad - fd).lpNorm<Eigen::Infinity>() /
                           std::max(1.0, fd.lpNorm<Eigen::Infinity>());
        worst_rel = std::max(worst_rel, rel);
    }
    bool ok = worst_rel < 1e-4;

    // Interpolation at near-zero noise.
    double worst_interp = 0.0;
    {
        const Eigen::MatrixXd X = random_inputs(rng, 12, 2);
        Eigen::VectorXd y(12);
        for (Eigen::Index i = 0; i < 12; ++i) y(i) = rng.normal();
        const gp::GpModel model(
            gp::KernelHyper::from_values(1.0, Eigen::VectorXd::Ones(2), 1e-12), X, y);
        for (Eigen::Index i = 0; i < 12; ++i) {
            worst_interp = std::max(worst_interp,
                                    std::abs(model.predict(X.row(i).transpose()).first - y(i)));
        }
        ok = ok && worst_interp < 1e-6;
    }

    // Posterior variance never exceeds the prior.
    double worst_excess = -1.0;
    {
        const Eigen::MatrixXd X = random_inputs(rng, 40, 3);
        Eigen::VectorXd y(40);
        for (Eigen::Index i = 0; i < 40; ++i) y(i) = rng.normal();
        const auto hyper =
            gp::KernelHyper::from_values(1.4, Eigen::VectorXd::Constant(3, 0.6), 0.05);
        const gp::GpModel model(hyper, X, y);
        const double prior = hyper.signal_variance() + hyper.noise_variance();
        for (int t = 0; t < 500; ++t) {
            Eigen::VectorXd q(3);
            for (int j = 0; j < 3; ++j) q(j) = rng.uniform(-4.0, 4.0);
            const auto [mean, var] = model.predict(q);
            worst_excess = std::max(worst_excess, var + hyper.noise_variance() - prior);
        }
        ok = ok && worst_excess <= 1e-8;
    }

    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "max grad rel err %.2e (<1e-4), max interp err %.2e (<1e-6), "
                  "max prior excess %.2e (<=1e-8)",
                  worst_rel, worst_interp, worst_excess);
    detail = buf;
    return ok;
}

// ---------------------------------------------------------------------------
// Criteria 2 and 3 share a survey-trained toy model per seed.
// ---------------------------------------------------------------------------

struct SurveyRun {
    latent::TransitionModel model;
    std::vector<bool> is_red;                        // per training instance
    std::vector<std::vector<TransitionTuple>> data;  // per training instance
    std::vector<Eigen::VectorXd> refreshed_mu;       // against the final model
};

latent::TransitionModelConfig toy_model_config() {
    latent::TransitionModelConfig cfg;
    cfg.layout = latent::AugmentLayout{.state_dim = 2, .num_actions = 4, .latent_dim = 2};
    cfg.support_size = 80;
    cfg.candidate_cap = 500;
    cfg.anneal.steps = 300;
    cfg.episode_anneal.steps = 150;
    cfg.fit.max_iterations = 100;
    return cfg;
}

std::vector<TransitionTuple> survey_episodes(const domains::ToyConfig& toy,
                                             const domains::ToyParams& params, int episodes,
                                             Rng rng) {
    std::vector<TransitionTuple> out;
    for (int e = 0; e < episodes; ++e) {
        Rng ep = rng.fork(static_cast<std::uint64_t>(e));
        Eigen::Vector2d s = domains::toy_initial_state(toy, ep);
        for (int step = 0; step < toy.episode_cap; ++step) {
            const int a = harness::toy_survey_action(s, e, step, toy);
            const auto r =
                domains::toy_step(s, static_cast<domains::ToyAction>(a), params, toy, ep);
            TransitionTuple t;
            t.state = s;
            t.action = a;
            t.next_state = r.next;
            t.reward = r.reward;
            t.done = r.done;
            out.push_back(std::move(t));
            s = r.next;
            if (r.done) break;
        }
    }
    return out;
}

std::vector<TransitionTuple> window(const std::vector<TransitionTuple>& data, std::size_t cap,
                                    std::uint64_t salt) {
    return harness::inference_window(data, cap, Rng(salt));
}

SurveyRun train_survey_model(std::uint64_t seed, int instances = 6, int episodes = 10) {
    const domains::ToyConfig toy;
    Rng root(seed);
    SurveyRun run{latent::TransitionModel(toy_model_config()), {}, {}, {}};
    for (int b = 0; b < instances; ++b) {
        const bool red = (b % 2 == 0);
        const domains::ToyParams params{red ? domains::ToyClass::Red : domains::ToyClass::Blue,
                                        toy.noise_scale};
        Rng rng = root.fork("instance").fork(static_cast<std::uint64_t>(b));
        auto data = survey_episodes(toy, params, episodes, rng.fork("episodes"));
        latent::LatentWeights w = run.model.latent_prior();
        if (run.model.fitted()) {
            w = run.model.infer_latent_weights(window(data, 200, seed * 97 + b),
                                               run.model.latent_prior(), rng.fork("infer"));
        }
        run.model.update_global_model("inst" + std::to_string(b), data, w, rng.fork("update"));
        run.is_red.push_back(red);
        run.data.push_back(std::move(data));
    }
    for (int b = 0; b < instances; ++b) {
        run.refreshed_mu.push_back(
            run.model
                .infer_latent_weights(window(run.data[static_cast<std::size_t>(b)], 200,
                                             seed * 131 + static_cast<std::uint64_t>(b)),
                                      run.model.latent_prior(),
                                      root.fork("refresh").fork(static_cast<std::uint64_t>(b)))
                .mean);
    }
    return run;
}

// Separating hyperplane via a perceptron sweep; 6 points in 2-D.
bool linearly_separable(const std::vector<Eigen::VectorXd>& mu, const std::vector<bool>& red) {
    Eigen::Vector3d w = Eigen::Vector3d::Zero();  // [w1 w2 bias]
    for (int epoch = 0; epoch < 5000; ++epoch) {
        bool clean = true;
        for (std::size_t i = 0; i < mu.size(); ++i) {
            const Eigen::Vector3d x(mu[i](0), mu[i](1), 1.0);
            const double y = red[i] ? 1.0 : -1.0;
            if (y * w.dot(x) <= 0.0) {
                w += y * x;
                clean = false;
            }
        }
        if (clean) return true;
    }
    return false;
}

void criterion23(std::string& detail2, std::string& detail3, bool& pass2, bool& pass3) {
    const domains::ToyConfig toy;
    int nn_correct = 0, separable = 0, probe_correct = 0;
    const int seeds = 20;
    for (int seed = 0; seed < seeds; ++seed) {
        const SurveyRun run = train_survey_model(9000 + static_cast<std::uint64_t>(seed));

        // Criterion 2: held-out instance classified from <= 2 episodes.
        const bool held_red = seed % 2 == 0;
        const domains::ToyParams held{held_red ? domains::ToyClass::Red : domains::ToyClass::Blue,
                                      toy.noise_scale};
        Rng held_rng = Rng(7700 + static_cast<std::uint64_t>(seed));
        const auto held_data = window(survey_episodes(toy, held, 2, held_rng.fork("episodes")),
                                      200, 5500 + static_cast<std::uint64_t>(seed));
        const auto mu = run.model
                            .infer_latent_weights(held_data, run.model.latent_prior(),
                                                  held_rng.fork("infer"))
                            .mean;
        double best = std::numeric_limits<double>::infinity();
        bool best_red = false;
        for (std::size_t b = 0; b < run.refreshed_mu.size(); ++b) {
            const double dist = (run.refreshed_mu[b] - mu).norm();
            if (dist < best) {
                best = dist;
                best_red = run.is_red[b];
            }
        }
        if (best_red == held_red) ++nn_correct;
        if (linearly_separable(run.refreshed_mu, run.is_red)) ++separable;

        // Criterion 3: probe a red training point under both class centroids.
        Eigen::Vector2d red_centroid = Eigen::Vector2d::Zero();
        Eigen::Vector2d blue_centroid = Eigen::Vector2d::Zero();
        int nr = 0, nb = 0;
        for (std::size_t b = 0; b < run.refreshed_mu.size(); ++b) {
            if (run.is_red[b]) {
                red_centroid += run.refreshed_mu[b].head<2>();
                ++nr;
            } else {
                blue_centroid += run.refreshed_mu[b].head<2>();
                ++nb;
            }
        }
        red_centroid /= nr;
        blue_centroid /= nb;

        // The red training point with the most red-specific coverage: max
        // state-action distance to blue data minus distance to other red data.
        std::vector<Eigen::Vector3d> red_points, blue_points;  // (x, y, action)
        for (std::size_t b = 0; b < run.data.size(); ++b) {
            for (const auto& t : run.data[b]) {
                (run.is_red[b] ? red_points : blue_points)
                    .push_back(Eigen::Vector3d(t.state(0), t.state(1), t.action));
            }
        }
        double best_score = -std::numeric_limits<double>::infinity();
        Eigen::Vector3d probe_pt = red_points.front();
        Rng pick(314 + static_cast<std::uint64_t>(seed));
        for (int k = 0; k < 400; ++k) {  // subsampled candidate sweep
            const auto& cand = red_points[pick.index(red_points.size())];
            double to_blue = std::numeric_limits<double>::infinity();
            for (const auto& q : blue_points) {
                to_blue = std::min(to_blue, (cand - q).squaredNorm());
            }
            double to_red = std::numeric_limits<double>::infinity();
            for (const auto& q : red_points) {
                const double d = (cand - q).squaredNorm();
                if (d > 0.0) to_red = std::min(to_red, d);
            }
            const double score = to_blue - to_red;
            if (score > best_score) {
                best_score = score;
                probe_pt = cand;
            }
        }
        latent::LatentWeights wr = run.model.latent_prior("red");
        latent::LatentWeights wb = run.model.latent_prior("blue");
        wr.mean = red_centroid;
        wb.mean = blue_centroid;
        const Eigen::VectorXd vars = run.model.uncertainty_probe(
            probe_pt.head<2>(), static_cast<int>(probe_pt(2)), {wr, wb});
        if (vars(0) < vars(1)) ++probe_correct;
    }

    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "held-out NN classification %d/20 (>=18), linear separability %d/20 (>=18)",
                  nn_correct, separable);
    detail2 = buf;
    pass2 = nn_correct >= 18 && separable >= 18;
    std::snprintf(buf, sizeof(buf), "red-point variance lower under red weights in %d/20 (>=18)",
                  probe_correct);
    detail3 = buf;
    pass3 = probe_correct >= 18;
}

// ---------------------------------------------------------------------------
// Criterion 4: support selection beats the best of 20 random subsets
// ---------------------------------------------------------------------------

bool criterion4(std::string& detail) {
    int wins = 0;
    const int trials = 20;
    Rng root(4004);
    for (int trial = 0; trial < trials; ++trial) {
        Rng rng = root.fork(static_cast<std::uint64_t>(trial));
        const Eigen::Index n = 200;  // N <= 500, m = N/5
        const Eigen::Index m = n / 5;
        const Eigen::MatrixXd X = random_inputs(rng, n, 3);
        Eigen::MatrixXd Y(n, 2);
        for (Eigen::Index i = 0; i < n; ++i) {
            Y(i, 0) = std::sin(2.0 * X(i, 0)) * std::cos(X(i, 1)) + 0.02 * rng.normal();
            Y(i, 1) = 0.5 * X(i, 2) * X(i, 0) + 0.02 * rng.normal();
        }
        latent::AnnealConfig cfg;  // spec schedule: 2000 steps, geometric 0.95
        cfg.seed = rng.next_u64();
        const auto result = latent::select_support_points(X, Y, m, cfg);

        std::vector<gp::KernelHyper> hypers;
        for (Eigen::Index d = 0; d < 2; ++d) {
            hypers.push_back(gp::suggest_hyper_init(X, Y.col(d)));
        }
        double best_random = std::numeric_limits<double>::infinity();
        for (int r = 0; r < 20; ++r) {
            auto pool = result.candidate_rows;
            for (std::size_t i = 0; i < static_cast<std::size_t>(m); ++i) {
                std::swap(pool[i], pool[i + rng.index(pool.size() - i)]);
            }
            best_random =
                std::min(best_random, latent::reconstruction_objective(
                                          X, Y, {pool.begin(), pool.begin() + m},
                                          result.holdout_rows, hypers));
        }
        if (result.final_objective <= best_random + 1e-12) ++wins;
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "annealed <= best-of-20-random in %d/20 trials (>=18)", wins);
    detail = buf;
    return wins >= 18;
}

// ---------------------------------------------------------------------------
// Criterion 5: HIV simulator validity
// ---------------------------------------------------------------------------

domains::HivState euler_oracle(domains::HivState y, double eps1, double eps2,
                               const domains::HivParams& p, double days, double dt = 1e-3) {
    const long steps = static_cast<long>(std::llround(days / dt));
    for (long i = 0; i < steps; ++i) {
        const double T1 = y(0), T2 = y(1), T1s = y(2), T2s = y(3), V = y(4), E = y(5);
        const double infected = T1s + T2s;
        domains::HivState d;
        d(0) = p.lambda1 - p.d1 * T1 - (1.0 - eps1) * p.k1 * V * T1;
        d(1) = p.lambda2 - p.d2 * T2 - (1.0 - p.f * eps1) * p.k2 * V * T2;
        d(2) = (1.0 - eps1) * p.k1 * V * T1 - p.delta * T1s - p.m1 * E * T1s;
        d(3) = (1.0 - p.f * eps1) * p.k2 * V * T2 - p.delta * T2s - p.m2 * E * T2s;
        d(4) = (1.0 - eps2) * p.NT * p.delta * infected - p.c * V -
               ((1.0 - eps1) * p.rho1 * p.k1 * T1 + (1.0 - p.f * eps1) * p.rho2 * p.k2 * T2) * V;
        d(5) = p.lambdaE + p.bE * infected * E / (infected + p.Kb) -
               p.dE * infected * E / (infected + p.Kd) - p.deltaE * E;
        y += dt * d;
    }
    return y;
}

bool criterion5(std::string& detail) {
    const domains::HivParams nominal;
    domains::HivConfig cfg;

    // Stationarity at the oracle-located untreated equilibrium.
    const domains::HivState eq =
        euler_oracle(domains::hiv_initial_state(cfg), 0.0, 0.0, nominal, 2000.0);
    domains::HivState y = eq;
    for (int step = 0; step < 20; ++step) y = domains::hiv_step(y, 0, nominal, cfg).next;
    double drift = 0.0;
    for (int i = 0; i < 6; ++i) {
        drift = std::max(drift, std::abs(y(i) - eq(i)) / std::max(std::abs(eq(i)), 1e-12));
    }
    bool ok = drift < 1e-3;

    // Step halving at the spec-pinned pair.
    domains::HivConfig coarse = cfg, fine = cfg;
    coarse.dt = 0.05;
    fine.dt = 0.025;
    double halving = 0.0;
    domains::HivState s = domains::hiv_initial_state(cfg);
    for (const int action : {0, 1, 2, 3}) {
        const domains::HivState a = domains::hiv_step(s, action, nominal, coarse).next;
        const domains::HivState b = domains::hiv_step(s, action, nominal, fine).next;
        for (int i = 0; i < 6; ++i) {
            halving = std::max(halving, std::abs(a(i) - b(i)) /
                                            std::max({std::abs(a(i)), std::abs(b(i)), 1e-12}));
        }
        s = a;
    }
    ok = ok && halving < 1e-4;

    // Nonnegativity over 1e5 random-action trajectory steps.
    Rng rng(555);
    long steps = 0;
    bool nonneg = true;
    for (int ep = 0; steps < 100000; ++ep) {
        const domains::HivParams p = domains::sample_hiv_task(cfg, 800 + ep);
        domains::HivState x = domains::hiv_initial_state(cfg);
        for (int t = 0; t < cfg.episode_cap && steps < 100000; ++t, ++steps) {
            x = domains::hiv_step(x, static_cast<int>(rng.index(4)), p, cfg).next;
            if ((x.array() < 0.0).any()) nonneg = false;
        }
    }
    ok = ok && nonneg;

    char buf[176];
    std::snprintf(buf, sizeof(buf),
                  "equilibrium drift %.2e (<1e-3), step-halving %.2e (<1e-4), nonnegativity %s "
                  "over 1e5 steps",
                  drift, halving, nonneg ? "held" : "VIOLATED");
    detail = buf;
    return ok;
}

// ---------------------------------------------------------------------------
// Criterion 6: directional reproduction of the treatment-transfer figure
// ---------------------------------------------------------------------------

harness::ExperimentConfig hiv_acceptance_config(std::uint64_t seed) {
    auto cfg = harness::ExperimentConfig::defaults(domains::DomainKind::Hiv);
    cfg.instances = 5;
    cfg.episodes_per_instance = 16;
    cfg.seed = seed;
    cfg.support_size = 120;
    cfg.candidate_cap = 500;
    cfg.instance_rows_cap = 300;
    cfg.anneal.steps = 300;
    cfg.episode_anneal.steps = 120;
    cfg.gp_fit.max_iterations = 60;
    cfg.infer.max_transitions = 150;
    cfg.infer.restarts = 2;
    return cfg;
}

struct AgentCurve {
    std::vector<double> by_episode;  // mean over patients of cumulative reward
    double final5{0.0};
};

AgentCurve curve_from_log(const harness::ExperimentLog& log, int instances, int episodes) {
    AgentCurve c;
    c.by_episode.assign(static_cast<std::size_t>(episodes), 0.0);
    for (const auto& r : log.records()) {
        c.by_episode[static_cast<std::size_t>(r.episode)] += r.cum_reward;
    }
    for (auto& v : c.by_episode) v /= static_cast<double>(instances);
    double acc = 0.0;
    for (int e = episodes - 5; e < episodes; ++e) acc += c.by_episode[static_cast<std::size_t>(e)];
    c.final5 = acc / 5.0;
    return c;
}

bool criterion6(std::string& detail) {
    const int seeds = 5;
    int beats_onesize = 0, fast_transfer = 0;
    std::ostringstream lines;
    for (int s = 0; s < seeds; ++s) {
        const auto cfg = hiv_acceptance_config(600 + static_cast<std::uint64_t>(s));
        const auto hip = harness::run_hipmdp(cfg);
        const auto ones = harness::run_baseline(harness::AgentKind::OneSizeFitsAll, cfg,
                                                harness::ModelMode::GpApprox);
        const auto pers = harness::run_baseline(harness::AgentKind::PersonallyTailored, cfg,
                                                harness::ModelMode::GpApprox);
        const auto hc = curve_from_log(hip.log, cfg.instances, cfg.episodes_per_instance);
        const auto oc = curve_from_log(ones.log, cfg.instances, cfg.episodes_per_instance);
        const auto pc = curve_from_log(pers.log, cfg.instances, cfg.episodes_per_instance);

        const bool cond_a = hc.final5 >= oc.final5;
        if (cond_a) ++beats_onesize;

        int reach = -1;
        for (std::size_t e = 0; e < hc.by_episode.size(); ++e) {
            if (hc.by_episode[e] >= pc.final5) {
                reach = static_cast<int>(e);
                break;
            }
        }
        const int half = (cfg.episodes_per_instance + 1) / 2;
        const bool cond_b = reach >= 0 && reach + 1 <= half;
        if (cond_b) ++fast_transfer;

        lines << "    seed " << s << ": hip final5 " << std::scientific << hc.final5
              << ", onesize " << oc.final5 << ", personal " << pc.final5 << ", reach-episode "
              << (reach >= 0 ? std::to_string(reach + 1) : std::string("never")) << "/" << half
              << (cond_a ? "" : "  [a FAILED]") << (cond_b ? "" : "  [b FAILED]") << "\n";
    }
    std::ostringstream d;
    d << "hipmdp>=onesize in " << beats_onesize << "/5 (>=4), reaches personal-final within half "
      << "the episodes in " << fast_transfer << "/5 (>=4)\n"
      << lines.str();
    detail = d.str();
    return beats_onesize >= 4 && fast_transfer >= 4;
}

// ---------------------------------------------------------------------------
// Criterion 7: DDQN / replay micro-suite
// ---------------------------------------------------------------------------

bool criterion7(std::string& detail) {
    // Regression fixed point at zero discount.
    Rng rng(700);
    policy::LearnerConfig cfg;
    cfg.batch_size = 8;
    cfg.gamma = 0.0;
    cfg.learning_rate = 0.01;
    cfg.network.hidden = {16};
    policy::DdqnLearner fixed(1, 2, cfg, rng);
    policy::PrioritizedBuffer fixed_buffer(16, 0.6);
    TransitionTuple t;
    t.state = Eigen::VectorXd::Constant(1, 0.3);
    t.action = 1;
    t.reward = 0.5;
    t.next_state = Eigen::VectorXd::Constant(1, 0.7);
    for (std::size_t i = 0; i < cfg.batch_size; ++i) fixed_buffer.push(t);
    Rng train_rng(701);
    for (int step = 0; step < 500; ++step) fixed.train_step(fixed_buffer, train_rng);
    const double q_fixed = fixed.online().forward(t.state)(1);
    bool ok = std::abs(q_fixed - 0.5) < 1e-2;

    // 2-state MDP against tabular value iteration.
    const double r[2][2] = {{0.0, 0.2}, {1.0, 0.0}};
    const int nxt[2][2] = {{0, 1}, {1, 0}};
    const double gamma = 0.9;
    Eigen::Matrix2d q_star = Eigen::Matrix2d::Zero();
    for (int it = 0; it < 20000; ++it) {
        Eigen::Matrix2d q;
        for (int s = 0; s < 2; ++s)
            for (int a = 0; a < 2; ++a)
                q(s, a) = r[s][a] + gamma * std::max(q_star(nxt[s][a], 0), q_star(nxt[s][a], 1));
        if ((q - q_star).cwiseAbs().maxCoeff() < 1e-13) {
            q_star = q;
            break;
        }
        q_star = q;
    }
    Rng rng2(702);
    policy::LearnerConfig cfg2;
    cfg2.batch_size = 16;
    cfg2.gamma = gamma;
    cfg2.learning_rate = 5e-3;
    cfg2.network.hidden = {32, 32};
    cfg2.target_sync_every = 100;
    policy::DdqnLearner learner(1, 2, cfg2, rng2);
    policy::PrioritizedBuffer buffer(64, 0.6);
    for (int rep = 0; rep < 4; ++rep) {
        for (int s = 0; s < 2; ++s) {
            for (int a = 0; a < 2; ++a) {
                TransitionTuple u;
                u.state = Eigen::VectorXd::Constant(1, s);
                u.action = a;
                u.reward = r[s][a];
                u.next_state = Eigen::VectorXd::Constant(1, nxt[s][a]);
                buffer.push(u);
            }
        }
    }
    Rng train2(703);
    for (int step = 0; step < 5000; ++step) learner.train_step(buffer, train2);
    learner.set_learning_rate(5e-4);  // settle the Adam oscillation
    for (int step = 0; step < 5000; ++step) learner.train_step(buffer, train2);
    double q_err = 0.0;
    for (int s = 0; s < 2; ++s) {
        const Eigen::VectorXd q = learner.online().forward(Eigen::VectorXd::Constant(1, s));
        for (int a = 0; a < 2; ++a) q_err = std::max(q_err, std::abs(q(a) - q_star(s, a)));
    }
    ok = ok && q_err < 0.05;

    // Prioritized sampling frequencies within 5% of the p^alpha proportions.
    policy::PrioritizedBuffer pbuf(2, 1.0);
    pbuf.push(t);
    pbuf.push(t);
    pbuf.update_priority(0, 1.0);
    pbuf.update_priority(1, 3.0);
    Rng sample_rng(704);
    long c0 = 0, c1 = 0;
    const auto sample = pbuf.sample(100000, 0.4, sample_rng);
    for (const auto idx : sample.indices) (idx == 0 ? c0 : c1)++;
    const double ratio = static_cast<double>(c0) / static_cast<double>(c1);
    const bool freq_ok = std::abs(ratio - 1.0 / 3.0) <= 0.05 * (1.0 / 3.0);
    ok = ok && freq_ok;

    char buf[176];
    std::snprintf(buf, sizeof(buf),
                  "gamma=0 fixed point |Q-r|=%.1e (<1e-2), 2-state MDP max|Q-Q*|=%.3f (<0.05), "
                  "sampling ratio %.4f (1/3 +-5%%)",
                  std::abs(q_fixed - 0.5), q_err, ratio);
    detail = buf;
    return ok;
}

// ---------------------------------------------------------------------------
// Criterion 8: byte-identical logs through the CLI
// ---------------------------------------------------------------------------

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool criterion8(std::string& detail) {
    const fs::path dir = fs::temp_directory_path() / "hipmdp_acceptance_c8";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path cfg_path = dir / "config.json";
    {
        auto cfg = harness::ExperimentConfig::defaults(domains::DomainKind::Toy);
        cfg.instances = 2;
        cfg.episodes_per_instance = 2;
        cfg.toy.episode_cap = 25;
        cfg.support_size = 40;
        cfg.candidate_cap = 120;
        cfg.anneal.steps = 60;
        cfg.episode_anneal.steps = 40;
        cfg.gp_fit.max_iterations = 40;
        cfg.infer.max_iterations = 25;
        cfg.policy.rollouts_per_episode = 8;
        cfg.policy.rollout_horizon = 3;
        cfg.policy.train_steps_per_episode = 20;
        cfg.policy.batch_size = 8;
        std::ofstream out(cfg_path);
        out << cfg.to_json().dump(2) << '\n';
    }
    const std::string base = std::string(HIPMDP_CLI_PATH) + " run --domain toy --agent hipmdp " +
                             "--seed 424242 --config " + cfg_path.string();
    const std::string cmd1 = base + " --out " + (dir / "r1").string() + " >/dev/null 2>&1";
    const std::string cmd2 = base + " --out " + (dir / "r2").string() + " >/dev/null 2>&1";
    if (std::system(cmd1.c_str()) != 0 || std::system(cmd2.c_str()) != 0) {
        detail = "CLI run failed";
        return false;
    }
    const std::string log1 = slurp(dir / "r1" / "log.jsonl");
    const std::string log2 = slurp(dir / "r2" / "log.jsonl");
    const std::string model1 = slurp(dir / "r1" / "model.json");
    const std::string model2 = slurp(dir / "r2" / "model.json");
    const bool logs_equal = !log1.empty() && log1 == log2;
    const bool models_equal = !model1.empty() && model1 == model2;
    char buf[120];
    std::snprintf(buf, sizeof(buf), "log.jsonl byte-identical: %s (%zu bytes); model.json: %s",
                  logs_equal ? "yes" : "NO", log1.size(), models_equal ? "yes" : "NO");
    detail = buf;
    fs::remove_all(dir);
    return logs_equal && models_equal;
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--only") continue;
        only.insert(std::atoi(arg.c_str()));
    }
    const auto wanted = [&](int c) { return only.empty() || only.count(c) > 0; };

    struct Line {
        int id;
        bool pass;
        std::string name;
        std::string detail;
    };
    std::vector<Line> lines;

    if (wanted(1)) {
        std::string d;
        const bool p = criterion1(d);
        lines.push_back({1, p, "GP correctness suite", d});
    }
    if (wanted(2) || wanted(3)) {
        std::string d2, d3;
        bool p2 = false, p3 = false;
        criterion23(d2, d3, p2, p3);
        if (wanted(2)) lines.push_back({2, p2, "latent-class recovery", d2});
        if (wanted(3)) lines.push_back({3, p3, "class-conditioned uncertainty probe", d3});
    }
    if (wanted(4)) {
        std::string d;
        const bool p = criterion4(d);
        lines.push_back({4, p, "support selection beats random", d});
    }
    if (wanted(5)) {
        std::string d;
        const bool p = criterion5(d);
        lines.push_back({5, p, "HIV simulator validity", d});
    }
    if (wanted(6)) {
        std::string d;
        const bool p = criterion6(d);
        lines.push_back({6, p, "treatment-transfer directional reproduction", d});
    }
    if (wanted(7)) {
        std::string d;
        const bool p = criterion7(d);
        lines.push_back({7, p, "DDQN/replay micro-suite", d});
    }
    if (wanted(8)) {
        std::string d;
        const bool p = criterion8(d);
        lines.push_back({8, p, "seeded determinism through the CLI", d});
    }

    int failures = 0;
    for (const auto& line : lines) {
        std::cout << "[" << line.id << "/8] " << (line.pass ? "PASS" : "FAIL") << "  "
                  << line.name << ": " << line.detail << "\n";
        if (!line.pass) ++failures;
    }
    std::cout << (failures == 0
                      ? "ACCEPTANCE: all criteria passed\n"
                      : "ACCEPTANCE: " + std::to_string(failures) + " criteria FAILED\n");
    return failures == 0 ? 0 : 1;
}
