#include "hipmdp/domains/hiv.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hipmdp/errors.hpp"

namespace hipmdp::domains {

double& HivParams::by_name(const std::string& name) {
    if (name == "lambda1") return lambda1;
    if (name == "d1") return d1;
    if (name == "k1") return k1;
    if (name == "lambda2") return lambda2;
    if (name == "d2") return d2;
    if (name == "f") return f;
    if (name == "k2") return k2;
    if (name == "delta") return delta;
    if (name == "m1") return m1;
    if (name == "m2") return m2;
    if (name == "NT") return NT;
    if (name == "c") return c;
    if (name == "rho1") return rho1;
    if (name == "rho2") return rho2;
    if (name == "lambdaE") return lambdaE;
    if (name == "bE") return bE;
    if (name == "Kb") return Kb;
    if (name == "dE") return dE;
    if (name == "Kd") return Kd;
    if (name == "deltaE") return deltaE;
    throw std::invalid_argument("HivParams: unknown coefficient " + name);
}

std::pair<double, double> hiv_action_efficacies(int action, const HivConfig& config) {
    if (action < 0 || action > 3) {
        throw std::invalid_argument("hiv action index must be in {0,1,2,3}");
    }
    const double eps1 = (action & 1) ? config.eps1_max : 0.0;
    const double eps2 = (action & 2) ? config.eps2_max : 0.0;
    return {eps1, eps2};
}

HivState hiv_derivative(const HivState& s, double eps1, double eps2, const HivParams& p) {
    const double T1 = s(0), T2 = s(1), T1s = s(2), T2s = s(3), V = s(4), E = s(5);
    const double infected = T1s + T2s;
    HivState d;
    d(0) = p.lambda1 - p.d1 * T1 - (1.0 - eps1) * p.k1 * V * T1;
    d(1) = p.lambda2 - p.d2 * T2 - (1.0 - p.f * eps1) * p.k2 * V * T2;
    d(2) = (1.0 - eps1) * p.k1 * V * T1 - p.delta * T1s - p.m1 * E * T1s;
    d(3) = (1.0 - p.f * eps1) * p.k2 * V * T2 - p.delta * T2s - p.m2 * E * T2s;
    d(4) = (1.0 - eps2) * p.NT * p.delta * infected - p.c * V -
           ((1.0 - eps1) * p.rho1 * p.k1 * T1 + (1.0 - p.f * eps1) * p.rho2 * p.k2 * T2) * V;
    d(5) = p.lambdaE + p.bE * infected * E / (infected + p.Kb) -
           p.dE * infected * E / (infected + p.Kd) - p.deltaE * E;
    return d;
}

double hiv_reward(const HivState& s, double eps1, double eps2, const HivConfig& cfg) {
    return -cfg.reward_virus_coeff * s(4) - cfg.reward_rti_coeff * eps1 * eps1 -
           cfg.reward_pi_coeff * eps2 * eps2 + cfg.reward_effector_coeff * s(5);
}

HivStepResult hiv_step(const HivState& state, int action, const HivParams& params,
                       const HivConfig& cfg) {
    if ((state.array() < 0.0).any()) {
        throw std::invalid_argument("hiv_step: state must be componentwise nonnegative");
    }
    const auto [eps1, eps2] = hiv_action_efficacies(action, cfg);
    const int steps = static_cast<int>(std::llround(cfg.decision_interval / cfg.dt));
    HivState y = state;
    for (int i = 0; i < steps; ++i) {
        const HivState k1 = hiv_derivative(y, eps1, eps2, params);
        const HivState k2 = hiv_derivative(y + 0.5 * cfg.dt * k1, eps1, eps2, params);
        const HivState k3 = hiv_derivative(y + 0.5 * cfg.dt * k2, eps1, eps2, params);
        const HivState k4 = hiv_derivative(y + cfg.dt * k3, eps1, eps2, params);
        y += (cfg.dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        y = y.cwiseMax(0.0);
        if (!y.allFinite()) {
            std::ostringstream msg;
            msg << "hiv_step: non-finite state at internal step " << i << " of " << steps;
            throw NumericalError(msg.str());
        }
    }
    return {y, hiv_reward(y, eps1, eps2, cfg)};
}

HivState hiv_initial_state(const HivConfig& cfg) {
    if (cfg.initial_state.size() != 6) {
        throw std::invalid_argument("HivConfig: initial_state must have 6 entries");
    }
    return Eigen::Map<const HivState>(cfg.initial_state.data());
}

Eigen::VectorXd hiv_observe(const HivState& s, const HivConfig& cfg) {
    return s.array().max(cfg.log_floor).log10().matrix();
}

HivState hiv_from_log10(const Eigen::VectorXd& obs) {
    if (obs.size() != 6) {
        throw std::invalid_argument("hiv_from_log10: observation must have 6 entries");
    }
    HivState s;
    for (int i = 0; i < 6; ++i) s(i) = std::pow(10.0, obs(i));
    return s;
}

nlohmann::json HivConfig::to_json() const {
    return {{"eps1_max", eps1_max},
            {"eps2_max", eps2_max},
            {"reward_virus_coeff", reward_virus_coeff},
            {"reward_rti_coeff", reward_rti_coeff},
            {"reward_pi_coeff", reward_pi_coeff},
            {"reward_effector_coeff", reward_effector_coeff},
            {"dt", dt},
            {"decision_interval", decision_interval},
            {"episode_cap", episode_cap},
            {"perturbation_delta", perturbation_delta},
            {"perturbed_coeffs", perturbed_coeffs},
            {"log_floor", log_floor},
            {"initial_state", initial_state},
            {"obs_shift", obs_shift},
            {"obs_scale", obs_scale}};
}

HivConfig HivConfig::from_json(const nlohmann::json& j) {
    HivConfig cfg;
    cfg.eps1_max = j.value("eps1_max", cfg.eps1_max);
    cfg.eps2_max = j.value("eps2_max", cfg.eps2_max);
    cfg.reward_virus_coeff = j.value("reward_virus_coeff", cfg.reward_virus_coeff);
    cfg.reward_rti_coeff = j.value("reward_rti_coeff", cfg.reward_rti_coeff);
    cfg.reward_pi_coeff = j.value("reward_pi_coeff", cfg.reward_pi_coeff);
    cfg.reward_effector_coeff = j.value("reward_effector_coeff", cfg.reward_effector_coeff);
    cfg.dt = j.value("dt", cfg.dt);
    cfg.decision_interval = j.value("decision_interval", cfg.decision_interval);
    cfg.episode_cap = j.value("episode_cap", cfg.episode_cap);
    cfg.perturbation_delta = j.value("perturbation_delta", cfg.perturbation_delta);
    cfg.perturbed_coeffs = j.value("perturbed_coeffs", cfg.perturbed_coeffs);
    cfg.log_floor = j.value("log_floor", cfg.log_floor);
    cfg.initial_state = j.value("initial_state", cfg.initial_state);
    cfg.obs_shift = j.value("obs_shift", cfg.obs_shift);
    cfg.obs_scale = j.value("obs_scale", cfg.obs_scale);
    return cfg;
}

}  // namespace hipmdp::domains
