#include "pmm/node.hpp"

#include "pmm/rng.hpp"
#include "pmm/simulate.hpp"

namespace pmm {

FalsifyResult falsify_barrier(const Model& model, const std::vector<int>& block, int order,
                              int target_state, long long trials, std::uint64_t seed) {
  if (!model.discrete()) throw ModelError("falsification requires a discrete model");
  if (trials < 1) throw ModelError("trials must be >= 1");
  const int M = static_cast<int>(block.size());
  if (M < 1) throw ModelError("empty block");
  if (target_state < 1 || target_state > model.num_states()) throw ModelError("state out of range");

  // prefix long enough that the tested time lands inside the sequence
  const int min_prefix = std::max(1, order - M + 1);

  FalsifyResult result;
  for (long long trial = 0; trial < trials; ++trial) {
    const std::uint64_t sub = RandomStream::derive(seed, static_cast<std::uint64_t>(trial));
    const RandomStream pick(sub);
    const int prefix_len = min_prefix + static_cast<int>(pick.bits(0, 0) % 30);
    const int suffix_len = static_cast<int>(pick.bits(0, 1) % 8);
    const Trajectory sim = simulate(model, prefix_len + suffix_len + 1, sub);

    std::vector<int> obs;
    obs.reserve(static_cast<std::size_t>(prefix_len) + M);
    const auto& sym = sim.observations.symbols();
    obs.insert(obs.end(), sym.begin(), sym.begin() + prefix_len);
    obs.insert(obs.end(), block.begin(), block.end());
    const int m = static_cast<int>(obs.size());
    const int t = m - order;

    auto rep = detect_node<LogDomain>(model, ObsSeq::discrete(obs), t);
    if (!rep.has(target_state)) {
      result.counterexample_found = true;
      result.trial = trial;
      result.prefix.assign(sym.begin(), sym.begin() + prefix_len);
      result.suffix.assign(sym.begin() + prefix_len, sym.begin() + prefix_len + suffix_len);
      result.report = std::move(rep);
      return result;
    }
  }
  return result;
}

}  // namespace pmm
