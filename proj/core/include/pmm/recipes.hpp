#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pmm/model.hpp"

namespace pmm {

// Named, reproducible experiment runs shared by the CLI and the acceptance
// suite. Each recipe is deterministic given (name, seed, steps); steps = 0
// selects the recipe default.
struct RecipeResult {
  std::string csv;
  nlohmann::json meta;
};

RecipeResult run_recipe(const std::string& name, std::uint64_t seed, long long steps = 0);

const std::vector<std::string>& recipe_names();

// Decoded first state of the lexicographic best path. Float pass with an
// exact-rational recheck when the decision margin at time 1 is within float
// noise; the exact pass keeps values normalized so it stays cheap.
int decode_first_state(const Model& model, const ObsSeq& obs);

}  // namespace pmm
