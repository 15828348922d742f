#include "hipmdp/harness/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "hipmdp/policy/rollout.hpp"

namespace hipmdp::harness {

namespace {

using domains::DomainKind;

// Value-type environment adapter: raw simulator state inside, observation
// space (normalized log10 for the HIV domain) outside.
class Env {
public:
    Env(const ExperimentConfig& config, const domains::TaskParams& params)
        : config_(config), params_(params) {}

    DomainKind domain() const { return config_.domain; }
    Eigen::Index obs_dim() const { return domain() == DomainKind::Toy ? 2 : 6; }
    int num_actions() const { return 4; }
    int episode_cap() const {
        return domain() == DomainKind::Toy ? config_.toy.episode_cap : config_.hiv.episode_cap;
    }

    Eigen::VectorXd reset(Rng& rng) {
        if (domain() == DomainKind::Toy) {
            toy_state_ = domains::toy_initial_state(config_.toy, rng);
        } else {
            hiv_state_ = domains::hiv_initial_state(config_.hiv);
        }
        steps_ = 0;
        return observe();
    }

    struct StepOut {
        Eigen::VectorXd obs;
        double reward{0.0};
        bool done{false};
    };

    StepOut step(int action, Rng& rng) {
        StepOut out;
        if (domain() == DomainKind::Toy) {
            const auto r = domains::toy_step(toy_state_, static_cast<domains::ToyAction>(action),
                                             std::get<domains::ToyParams>(params_), config_.toy, rng);
            toy_state_ = r.next;
            out.reward = r.reward;
            out.done = r.done;
        } else {
            const auto r = domains::hiv_step(hiv_state_, action,
                                             std::get<domains::HivParams>(params_), config_.hiv);
            hiv_state_ = r.next;
            out.reward = r.reward;
            out.done = false;  // the cap below is the only terminal condition
        }
        ++steps_;
        if (steps_ >= episode_cap()) out.done = true;
        out.obs = observe();
        return out;
    }

    Eigen::VectorXd observe() const {
        if (domain() == DomainKind::Toy) return toy_state_;
        const Eigen::VectorXd log_obs = domains::hiv_observe(hiv_state_, config_.hiv);
        Eigen::VectorXd out(6);
        for (int i = 0; i < 6; ++i) {
            out(i) = (log_obs(i) - config_.hiv.obs_shift[static_cast<std::size_t>(i)]) /
                     config_.hiv.obs_scale[static_cast<std::size_t>(i)];
        }
        return out;
    }

    Eigen::VectorXd raw_state() const {
        if (domain() == DomainKind::Toy) return toy_state_;
        return hiv_state_;
    }

    Eigen::VectorXd obs_to_raw(const Eigen::VectorXd& obs) const {
        if (domain() == DomainKind::Toy) return obs;
        Eigen::VectorXd log_obs(6);
        for (int i = 0; i < 6; ++i) {
            log_obs(i) = obs(i) * config_.hiv.obs_scale[static_cast<std::size_t>(i)] +
                         config_.hiv.obs_shift[static_cast<std::size_t>(i)];
        }
        return domains::hiv_from_log10(log_obs);
    }

    policy::SyntheticReward synthetic_reward() const {
        if (domain() == DomainKind::Toy) {
            const domains::ToyConfig toy = config_.toy;
            return [toy](const Eigen::VectorXd&, int, const Eigen::VectorXd& next) {
                return domains::toy_synthetic_reward(next, toy);
            };
        }
        const domains::HivConfig hiv = config_.hiv;
        const Env* self = this;
        return [hiv, self](const Eigen::VectorXd&, int action, const Eigen::VectorXd& next) {
            const auto [e1, e2] = domains::hiv_action_efficacies(action, hiv);
            const double r = domains::hiv_reward(self->obs_to_raw(next), e1, e2, hiv);
            return std::pair<double, bool>{r, false};
        };
    }

    policy::StateProjection projection() const {
        if (domain() == DomainKind::Toy) {
            return [](const Eigen::VectorXd& s) {
                Eigen::VectorXd out = s;
                out(0) = std::clamp(out(0), 0.0, 1.0);
                out(1) = std::clamp(out(1), 0.0, 1.0);
                return out;
            };
        }
        const domains::HivConfig hiv = config_.hiv;
        return [hiv](const Eigen::VectorXd& s) {
            Eigen::VectorXd out = s;
            for (int i = 0; i < 6; ++i) {
                const double lo = (std::log10(hiv.log_floor) - hiv.obs_shift[static_cast<std::size_t>(i)]) /
                                  hiv.obs_scale[static_cast<std::size_t>(i)];
                const double hi = (9.0 - hiv.obs_shift[static_cast<std::size_t>(i)]) /
                                  hiv.obs_scale[static_cast<std::size_t>(i)];
                out(i) = std::clamp(out(i), lo, hi);
            }
            return out;
        };
    }

    // Synthetic batch through the true simulator with this instance's hidden
    // parameters (the "model present" baseline mode).
    std::vector<TransitionTuple> simulator_rollout(const policy::QNetwork& policy,
                                                   const std::vector<Eigen::VectorXd>& starts,
                                                   int horizon, double epsilon, Rng& rng) const {
        std::vector<TransitionTuple> out;
        for (const auto& start_obs : starts) {
            Env scratch(config_, params_);
            if (domain() == DomainKind::Toy) {
                scratch.toy_state_ = Eigen::Vector2d(std::clamp(start_obs(0), 0.0, 1.0),
                                                     std::clamp(start_obs(1), 0.0, 1.0));
            } else {
                scratch.hiv_state_ = scratch.obs_to_raw(start_obs);
            }
            Eigen::VectorXd obs = scratch.observe();
            for (int h = 0; h < horizon; ++h) {
                const int a = rng.uniform() < epsilon
                                  ? static_cast<int>(rng.index(4))
                                  : policy.greedy_action(obs);
                const auto step = scratch.step(a, rng);
                TransitionTuple t;
                t.state = obs;
                t.action = a;
                t.next_state = step.obs;
                t.reward = step.reward;
                t.done = step.done;
                t.synthetic = true;
                out.push_back(t);
                obs = step.obs;
                if (step.done) break;
            }
        }
        return out;
    }

private:
    ExperimentConfig config_;
    domains::TaskParams params_;
    Eigen::Vector2d toy_state_{0.5, 0.1};
    domains::HivState hiv_state_ = domains::HivState::Zero();
    int steps_{0};
};

struct LoopSpec {
    AgentKind kind;
    ModelMode mode{ModelMode::GpApprox};
    bool reset_per_instance{true};
    bool merge_into_global{true};
    Eigen::Index latent_dim{0};
};

LoopSpec make_spec(AgentKind kind, ModelMode mode, const ExperimentConfig& config) {
    LoopSpec spec;
    spec.kind = kind;
    spec.mode = mode;
    switch (kind) {
        case AgentKind::HipMdp:
            spec.reset_per_instance = true;
            spec.merge_into_global = true;
            spec.latent_dim = config.latent_dim;
            break;
        case AgentKind::OneSizeFitsAll:
            spec.reset_per_instance = false;
            spec.merge_into_global = mode == ModelMode::GpApprox;
            spec.latent_dim = 0;
            break;
        case AgentKind::PersonallyTailored:
            spec.reset_per_instance = true;
            spec.merge_into_global = false;
            spec.latent_dim = 0;
            break;
    }
    if (mode == ModelMode::TrueSimulator) spec.merge_into_global = false;
    return spec;
}

std::string instance_name(int index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "inst%03d", index);
    return buf;
}

double one_step_rmse(const latent::TransitionModel& model,
                     const std::vector<TransitionTuple>& episode,
                     const latent::LatentWeights& weights) {
    if (episode.empty()) return std::numeric_limits<double>::quiet_NaN();
    const Eigen::Index n = static_cast<Eigen::Index>(episode.size());
    Eigen::MatrixXd states(n, episode.front().state.size());
    std::vector<int> actions(episode.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        states.row(i) = episode[static_cast<std::size_t>(i)].state.transpose();
        actions[static_cast<std::size_t>(i)] = episode[static_cast<std::size_t>(i)].action;
    }
    Eigen::MatrixXd mean, var;
    model.predict_transition_batch(states, actions, weights.mean, mean, var);
    double se = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        se += (mean.row(i).transpose() - episode[static_cast<std::size_t>(i)].next_state)
                  .squaredNorm();
    }
    return std::sqrt(se / static_cast<double>(n * states.cols()));
}

RunOutputs run_agent(AgentKind kind, const ExperimentConfig& config, ModelMode mode,
                     const RunSinks& sinks) {
    config.validate();
    if (kind == AgentKind::HipMdp && mode == ModelMode::TrueSimulator) {
        throw std::invalid_argument("run: the hipmdp agent always plans through its learned model");
    }
    const LoopSpec spec = make_spec(kind, mode, config);
    const Rng master(config.seed);

    LogMeta meta;
    meta.run_id = config.run_id.empty()
                      ? to_string(config.domain) + "-" + to_string(kind) + "-s" +
                            std::to_string(config.seed)
                      : config.run_id;
    meta.agent = to_string(kind);
    meta.domain = to_string(config.domain);
    meta.model_mode = to_string(mode);
    meta.seed = config.seed;
    meta.instances = config.instances;
    meta.episodes_per_instance = config.episodes_per_instance;

    RunOutputs out;
    out.log = ExperimentLog(meta);

    latent::TransitionModel global(config.transition_config(spec.latent_dim));

    std::optional<policy::DdqnLearner> learner;
    std::optional<policy::PrioritizedBuffer> buffer;

    const int B = config.instances;
    const int E = config.episodes_per_instance;

    for (int b = 0; b < B; ++b) {
        const std::string id = instance_name(b);
        const std::uint64_t task_seed = master.fork("task").fork(static_cast<std::uint64_t>(b)).next_u64();
        const domains::TaskParams params =
            domains::sample_task(config.domain, config.toy, config.hiv, task_seed);
        Env env(config, params);

        if (!learner || spec.reset_per_instance) {
            Rng net_rng = master.fork("policy").fork(static_cast<std::uint64_t>(b));
            learner.emplace(env.obs_dim(), env.num_actions(), config.learner_config(), net_rng);
            buffer.emplace(config.policy.buffer_capacity, config.policy.replay_alpha);
        }
        out.diagnostics.policy_start_checksums.push_back(learner->online().checksum());
        out.diagnostics.buffer_start_sizes.push_back(buffer->size());
        out.diagnostics.episode_budget_per_instance.push_back(
            static_cast<long>(E) * env.episode_cap());

        latent::LatentWeights w = global.latent_prior(id);
        Eigen::VectorXd w_synth = w.mean;
        std::vector<TransitionTuple> instance_transitions;
        std::optional<latent::TransitionModel> working;
        long instance_steps = 0;
        const long step_budget = static_cast<long>(E) * env.episode_cap();

        for (int e = 0; e < E; ++e) {
            const auto t0 = std::chrono::steady_clock::now();
            Rng ep_rng = master.fork("episode").fork(static_cast<std::uint64_t>(b)).fork(
                static_cast<std::uint64_t>(e));
            const latent::LatentWeights w_at_start = w;

            Eigen::VectorXd obs = env.reset(ep_rng);
            std::vector<TransitionTuple> episode;
            double cum_reward = 0.0;
            long steps = 0;
            bool done = false;
            while (!done && steps < env.episode_cap()) {
                const double eps = policy::epsilon_schedule(instance_steps, step_budget,
                                                            config.policy.epsilon_floor,
                                                            config.policy.warm_fraction);
                const int action = learner->select_action(obs, eps, ep_rng);
                const Eigen::VectorXd raw_before = env.raw_state();
                const auto step = env.step(action, ep_rng);
                if (sinks.trajectories) {
                    sinks.trajectories->append(id, e, steps, raw_before, action, step.reward,
                                               step.done);
                }
                TransitionTuple t;
                t.state = obs;
                t.action = action;
                t.next_state = step.obs;
                t.reward = step.reward * config.policy.reward_scale;
                t.done = step.done;
                episode.push_back(t);
                buffer->push(t);
                cum_reward += step.reward;
                obs = step.obs;
                done = step.done;
                ++steps;
                ++instance_steps;
            }
            instance_transitions.insert(instance_transitions.end(), episode.begin(), episode.end());

            // One-step model error of the episode-start model on fresh data.
            std::optional<double> rmse;
            if (working) {
                const double v = one_step_rmse(*working, episode, w_at_start);
                if (std::isfinite(v)) rmse = v;
            }

            // Latent update cadence: once per episode, against the global model.
            if (spec.latent_dim > 0 && global.fitted()) {
                const Rng infer_rng = master.fork("infer").fork(static_cast<std::uint64_t>(b))
                                          .fork(static_cast<std::uint64_t>(e));
                const auto window = inference_window(
                    instance_transitions, static_cast<std::size_t>(config.infer.max_transitions),
                    infer_rng);
                w = global.infer_latent_weights(window, global.latent_prior(id), infer_rng);
                if ((w.mean - w_synth).norm() > config.policy.synthetic_stale_threshold) {
                    buffer->purge_synthetic();  // stale-model guard
                }
            }

            // Refresh the working model for planning.
            if (spec.mode == ModelMode::GpApprox) {
                const Rng fit_rng = master.fork("fit").fork(static_cast<std::uint64_t>(b)).fork(
                    static_cast<std::uint64_t>(e));
                if (spec.merge_into_global && global.fitted()) {
                    working = global.with_instance_data(instance_transitions, w.mean,
                                                        config.instance_rows_cap);
                } else if (static_cast<int>(instance_transitions.size()) >=
                           config.min_fit_transitions) {
                    std::vector<TransitionTuple> fit_data = instance_transitions;
                    if (static_cast<Eigen::Index>(fit_data.size()) > config.instance_rows_cap) {
                        fit_data.assign(instance_transitions.end() - config.instance_rows_cap,
                                        instance_transitions.end());
                    }
                    working = latent::TransitionModel::fit_single_instance(
                        config.transition_config(spec.latent_dim), fit_data, w.mean, fit_rng);
                }
            }

            // Synthetic batch and policy improvement.
            if (config.policy.rollouts_per_episode > 0 &&
                (working || spec.mode == ModelMode::TrueSimulator) &&
                !instance_transitions.empty()) {
                Rng roll_rng = master.fork("rollout").fork(static_cast<std::uint64_t>(b)).fork(
                    static_cast<std::uint64_t>(e));
                std::vector<Eigen::VectorXd> starts;
                starts.reserve(static_cast<std::size_t>(config.policy.rollouts_per_episode));
                for (int r = 0; r < config.policy.rollouts_per_episode; ++r) {
                    starts.push_back(
                        instance_transitions[roll_rng.index(instance_transitions.size())].state);
                }
                const double eps = policy::epsilon_schedule(instance_steps, step_budget,
                                                            config.policy.epsilon_floor,
                                                            config.policy.warm_fraction);
                std::vector<TransitionTuple> synth;
                if (spec.mode == ModelMode::TrueSimulator) {
                    synth = env.simulator_rollout(learner->online(), starts,
                                                  config.policy.rollout_horizon, eps, roll_rng);
                } else {
                    synth = policy::synthetic_rollout(*working, learner->online(), w, starts,
                                                      config.policy.rollout_horizon, eps,
                                                      env.synthetic_reward(), roll_rng,
                                                      env.projection());
                }
                for (auto& t : synth) {
                    t.reward *= config.policy.reward_scale;
                    buffer->push(std::move(t));
                }
                w_synth = w.mean;
            }

            if (buffer->size() >= config.policy.batch_size) {
                Rng train_rng = master.fork("train").fork(static_cast<std::uint64_t>(b)).fork(
                    static_cast<std::uint64_t>(e));
                for (int s = 0; s < config.policy.train_steps_per_episode; ++s) {
                    learner->train_step(*buffer, train_rng);
                }
            }

            EpisodeRecord record;
            record.instance_id = id;
            record.instance_index = b;
            record.episode = e;
            record.steps = steps;
            record.cum_reward = cum_reward;
            record.latent_mean = std::vector<double>(w.mean.begin(), w.mean.end());
            record.model_rmse = rmse;
            out.log.append(record);
            if (sinks.log) sinks.log->append(record);
            if (sinks.timing) {
                const auto t1 = std::chrono::steady_clock::now();
                sinks.timing->append(b, e,
                                     std::chrono::duration<double, std::milli>(t1 - t0).count());
            }
        }

        out.diagnostics.real_steps_per_instance.push_back(instance_steps);
        if (spec.merge_into_global && !instance_transitions.empty()) {
            global.update_global_model(id, instance_transitions, w,
                                       master.fork("update").fork(static_cast<std::uint64_t>(b)));
        }
    }

    if (global.fitted()) out.model = std::move(global);
    return out;
}

}  // namespace

RunOutputs run_hipmdp(const ExperimentConfig& config, const RunSinks& sinks) {
    return run_agent(AgentKind::HipMdp, config, ModelMode::GpApprox, sinks);
}

RunOutputs run_baseline(AgentKind kind, const ExperimentConfig& config, ModelMode mode,
                        const RunSinks& sinks) {
    return run_agent(kind, config, mode, sinks);
}

int toy_survey_action(const Eigen::Vector2d& position, int episode_index, int step_index,
                      const domains::ToyConfig& config) {
    // Even episodes head for the blue (left) gate first, odd ones for the
    // red; the target alternates every twelve steps so both gates are probed
    // even when the first one blocks. At the gate it pushes up with a small
    // lateral dither covering the segment.
    const bool blue_first = episode_index % 2 == 0;
    const bool switched = (step_index / 12) % 2 == 1;
    const bool target_blue = blue_first != switched;
    const double gate_x = target_blue ? 0.5 * (config.goal_x_lo + config.gate_split_x())
                                      : 0.5 * (config.gate_split_x() + config.goal_x_hi);
    const double dx = gate_x - position.x();
    const bool below_gate = position.y() < config.goal_y_lo - 0.015;
    if (std::abs(dx) > 0.03 && below_gate) {
        return dx > 0.0 ? static_cast<int>(domains::ToyAction::Right)
                        : static_cast<int>(domains::ToyAction::Left);
    }
    switch (step_index % 6) {
        case 2: return static_cast<int>(domains::ToyAction::Right);
        case 5: return static_cast<int>(domains::ToyAction::Left);
        default: return static_cast<int>(domains::ToyAction::Up);
    }
}

std::vector<TransitionTuple> inference_window(const std::vector<TransitionTuple>& transitions,
                                              std::size_t cap, const Rng& rng) {
    if (transitions.size() <= cap) return transitions;
    // Half the budget on the most recent transitions, half spread uniformly
    // over the older history so both gates/regimes stay represented.
    const std::size_t recent = cap / 2;
    const std::size_t older_budget = cap - recent;
    const std::size_t older_count = transitions.size() - recent;
    std::vector<std::size_t> idx(older_count);
    std::iota(idx.begin(), idx.end(), 0);
    Rng r = rng.fork("inference_window");
    for (std::size_t i = 0; i < older_budget; ++i) {
        std::swap(idx[i], idx[i + r.index(idx.size() - i)]);
    }
    std::vector<std::size_t> chosen(idx.begin(), idx.begin() + older_budget);
    std::sort(chosen.begin(), chosen.end());
    std::vector<TransitionTuple> out;
    out.reserve(cap);
    for (const auto i : chosen) out.push_back(transitions[i]);
    out.insert(out.end(), transitions.end() - static_cast<long>(recent), transitions.end());
    return out;
}

}  // namespace hipmdp::harness
