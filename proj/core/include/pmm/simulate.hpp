#pragma once

#include <cstdint>

#include "pmm/model.hpp"
#include "pmm/obs.hpp"

namespace pmm {

// Seeded sampling of one trajectory. Draw layout per 1-based step t:
// coordinate 0 samples the hidden state (or the joint cell for joint-kernel
// models), coordinate 1 the discrete observation, coordinates 2,3 / 4,5 / ...
// feed Box-Muller pairs for Euclidean observations. Identical
// (model, steps, seed) inputs reproduce the trajectory exactly.
Trajectory simulate(const Model& model, long long steps, std::uint64_t seed);

}  // namespace pmm
