#pragma once

#include <cstdint>
#include <variant>

#include "hipmdp/domains/hiv.hpp"
#include "hipmdp/domains/toy.hpp"
#include "hipmdp/rng.hpp"

namespace hipmdp::domains {

enum class DomainKind { Toy, Hiv };

// Hidden parameters theta_b of one task instance.
using TaskParams = std::variant<ToyParams, HivParams>;

// Draws theta_b from the prior: equiprobable latent classes for the toy,
// independent uniform multipliers on the configured coefficient subset for
// the HIV patients. Deterministic in the seed.
ToyParams sample_toy_task(const ToyConfig& config, std::uint64_t seed);
HivParams sample_hiv_task(const HivConfig& config, std::uint64_t seed);

TaskParams sample_task(DomainKind domain, const ToyConfig& toy, const HivConfig& hiv,
                       std::uint64_t seed);

}  // namespace hipmdp::domains
