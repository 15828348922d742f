#include "hipmdp/domains/tasks.hpp"

namespace hipmdp::domains {

ToyParams sample_toy_task(const ToyConfig& config, std::uint64_t seed) {
    Rng rng = Rng(seed).fork("toy_task");
    ToyParams params;
    params.latent_class = rng.uniform() < 0.5 ? ToyClass::Red : ToyClass::Blue;
    params.noise_scale = config.noise_scale;
    return params;
}

HivParams sample_hiv_task(const HivConfig& config, std::uint64_t seed) {
    Rng rng = Rng(seed).fork("hiv_task");
    HivParams params;
    const double d = config.perturbation_delta;
    for (const auto& name : config.perturbed_coeffs) {
        params.by_name(name) *= rng.uniform(1.0 - d, 1.0 + d);
    }
    return params;
}

TaskParams sample_task(DomainKind domain, const ToyConfig& toy, const HivConfig& hiv,
                       std::uint64_t seed) {
    if (domain == DomainKind::Toy) return sample_toy_task(toy, seed);
    return sample_hiv_task(hiv, seed);
}

}  // namespace hipmdp::domains
