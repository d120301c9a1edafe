#pragma once

#include <string>
#include <vector>

#include "pmm/dp.hpp"
#include "pmm/model.hpp"
#include "pmm/model_zoo.hpp"
#include "pmm/rng.hpp"
#include "pmm/simulate.hpp"

namespace pmmtest {

using namespace pmm;

// Random joint-kernel model with small-denominator rational entries; rows
// normalize exactly to 1. zero_tenths of the mass draws are zeroed to put
// -inf entries on realistic instances (every row keeps one positive cell).
inline Model random_generic(int num_symbols, int num_states, std::uint64_t seed,
                            int zero_tenths = 3) {
  const RandomStream rng(seed);
  const int nz = num_symbols * num_states;
  GenericDiscrete g;
  g.num_symbols = num_symbols;
  g.num_states = num_states;
  g.kernel.assign(static_cast<std::size_t>(nz) * nz, Rational(0));
  g.initial.assign(nz, Rational(0));
  std::uint64_t c = 0;
  const auto draw = [&](int row) -> long {
    const std::uint64_t b = rng.bits(static_cast<std::uint64_t>(row), c++);
    if (static_cast<int>(b % 10) < zero_tenths) return 0;
    return static_cast<long>(1 + (b >> 8) % 9);
  };
  for (int zp = 0; zp < nz; ++zp) {
    long sum = 0;
    std::vector<long> w(nz, 0);
    for (int z = 0; z < nz; ++z) {
      w[z] = draw(zp);
      sum += w[z];
    }
    if (sum == 0) {
      w[static_cast<int>(rng.bits(zp, c++) % nz)] = 1;
      sum = 1;
    }
    for (int z = 0; z < nz; ++z) g.kernel[static_cast<std::size_t>(zp) * nz + z] = Rational(w[z], sum);
  }
  long isum = 0;
  std::vector<long> iw(nz, 0);
  for (int z = 0; z < nz; ++z) {
    iw[z] = draw(nz);
    isum += iw[z];
  }
  if (isum == 0) {
    iw[0] = 1;
    isum = 1;
  }
  for (int z = 0; z < nz; ++z) g.initial[z] = Rational(iw[z], isum);
  return Model(std::move(g));
}

inline ObsSeq random_obs(int num_symbols, int length, std::uint64_t seed) {
  const RandomStream rng(seed);
  std::vector<int> xs(length);
  for (int t = 0; t < length; ++t) {
    xs[t] = 1 + static_cast<int>(rng.bits(static_cast<std::uint64_t>(t + 1), 7) %
                                 static_cast<std::uint64_t>(num_symbols));
  }
  return ObsSeq::discrete(std::move(xs));
}

struct CorpusEntry {
  std::string name;
  Model model;
  ObsSeq obs;
};

// Discrete node-test corpus: named models with simulated and constructed
// observation sequences, sized so exact arithmetic stays fast.
inline std::vector<CorpusEntry> discrete_corpus() {
  std::vector<CorpusEntry> corpus;
  const auto add_sims = [&](const std::string& name, const Model& model, int count, int len,
                            std::uint64_t seed0) {
    for (int k = 0; k < count; ++k) {
      const auto traj = simulate(model, len, seed0 + static_cast<std::uint64_t>(k));
      corpus.push_back({name + "#" + std::to_string(k), model, traj.observations});
    }
  };
  add_sims("two_state", two_state_pmm_recipe(), 8, 40, 101);
  add_sims("revealing", state_revealing_hmm(), 6, 30, 201);
  add_sims("no_stabilize", no_stabilize_model(), 4, 30, 301);
  add_sims("no_nodes", no_nodes_model(), 4, 30, 401);

  // tie-pathology blocks embedded in simulated context
  const Model tiebreak = tiebreak_pathology_model();
  for (int k = 0; k < 6; ++k) {
    auto traj = simulate(tiebreak, 24, 501 + static_cast<std::uint64_t>(k));
    auto sym = traj.observations.symbols();
    const int pos = 5 + k;
    const int pattern[] = {1, 1, 2, 1, 1, 1, 1};
    for (int i = 0; i < 7; ++i) sym[static_cast<std::size_t>(pos + i)] = pattern[i];
    corpus.push_back({"tiebreak#" + std::to_string(k), tiebreak, ObsSeq::discrete(sym)});
  }

  for (int k = 0; k < 8; ++k) {
    const auto model = random_generic(2, 3, 601 + static_cast<std::uint64_t>(k));
    corpus.push_back({"random#" + std::to_string(k), model,
                      random_obs(2, 12, 701 + static_cast<std::uint64_t>(k))});
  }
  return corpus;
}

}  // namespace pmmtest
