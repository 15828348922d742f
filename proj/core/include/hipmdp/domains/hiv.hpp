#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace hipmdp::domains {

using HivState = Eigen::Matrix<double, 6, 1>;  // T1, T2, T1*, T2*, V, E

// Coefficients of the six-compartment infection model. Defaults are the
// standard values of the cited treatment simulator; sampled patients carry
// perturbed copies.
struct HivParams {
    double lambda1{10000.0};  // healthy type-1 cell production
    double d1{0.01};          // type-1 death rate
    double k1{8.0e-7};        // type-1 infection rate
    double lambda2{31.98};    // healthy type-2 cell production
    double d2{0.01};          // type-2 death rate
    double f{0.34};           // RTI efficacy reduction in population 2
    double k2{1.0e-4};        // type-2 infection rate
    double delta{0.7};        // infected cell death rate
    double m1{1.0e-5};        // immune-induced clearance, population 1
    double m2{1.0e-5};        // immune-induced clearance, population 2
    double NT{100.0};         // virions produced per infected cell
    double c{13.0};           // virus natural death rate
    double rho1{1.0};         // virions lost infecting a type-1 cell
    double rho2{1.0};         // virions lost infecting a type-2 cell
    double lambdaE{1.0};      // immune effector production
    double bE{0.3};           // max effector birth rate
    double Kb{100.0};         // effector birth saturation
    double dE{0.25};          // max effector death rate
    double Kd{500.0};         // effector death saturation
    double deltaE{0.1};       // effector natural death rate

    double& by_name(const std::string& name);
};

struct HivConfig {
    double eps1_max{0.7};
    double eps2_max{0.3};
    // Reward R = -cV*V - c1*eps1^2 - c2*eps2^2 + cE*E.
    double reward_virus_coeff{0.1};
    double reward_rti_coeff{2.0e4};
    double reward_pi_coeff{2.0e3};
    double reward_effector_coeff{1.0e3};
    // RK4 step in days. Viral-rebound spikes reach V ~ 1.4e6, where the
    // infection-rate terms exceed the RK4 stability bound for steps much
    // coarser than this.
    double dt{0.01};
    double decision_interval{5.0};      // days per action
    int episode_cap{200};               // decision steps (1000 simulated days)
    double perturbation_delta{0.25};    // multiplier range [1-d, 1+d]
    std::vector<std::string> perturbed_coeffs{"k1", "k2", "bE", "dE"};
    double log_floor{1e-8};             // floor before log10 observation
    // Unhealthy steady state of the nominal system (episode start).
    std::vector<double> initial_state{163574.0, 5.0, 11945.0, 46.0, 63919.0, 24.0};
    // Fixed affine normalization of the log10 observation.
    std::vector<double> obs_shift{5.5, 1.5, 3.0, 1.0, 3.5, 3.0};
    std::vector<double> obs_scale{1.0, 1.5, 2.0, 1.5, 2.0, 2.5};

    nlohmann::json to_json() const;
    static HivConfig from_json(const nlohmann::json& j);
};

// a in {0,1,2,3}: bit 0 toggles the RTI, bit 1 the PI.
std::pair<double, double> hiv_action_efficacies(int action, const HivConfig& config);

HivState hiv_derivative(const HivState& s, double eps1, double eps2, const HivParams& params);

double hiv_reward(const HivState& s, double eps1, double eps2, const HivConfig& config);

struct HivStepResult {
    HivState next;
    double reward{0.0};
};

// Integrates one decision interval with fixed-step RK4 at config.dt,
// clamping negative components to zero after every internal step, and
// evaluates the reward at the interval end. Throws NumericalError naming the
// internal step if the state loses finiteness.
HivStepResult hiv_step(const HivState& state, int action, const HivParams& params,
                       const HivConfig& config);

HivState hiv_initial_state(const HivConfig& config);

// log10 observation with the config's floor; the affine normalization is
// applied by the experiment harness.
Eigen::VectorXd hiv_observe(const HivState& s, const HivConfig& config);
HivState hiv_from_log10(const Eigen::VectorXd& obs);

}  // namespace hipmdp::domains
