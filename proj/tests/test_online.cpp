#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "helpers.hpp"
#include "pmm/online.hpp"

using namespace pmm;

namespace {

struct RunResult {
  std::vector<CommitRow> committed;
  FlushResult flush;
};

RunResult run_stream(const Model& model, const ObsSeq& obs, DecoderConfig cfg) {
  StreamDecoder dec(model, cfg);
  RunResult out;
  for (int t = 1; t <= obs.size(); ++t) {
    const auto rows = obs.is_discrete() ? dec.push(obs.symbol(t)) : dec.push(obs.point(t));
    out.committed.insert(out.committed.end(), rows.begin(), rows.end());
  }
  out.flush = dec.flush();
  return out;
}

}  // namespace

TEST_CASE("a fresh stream has committed nothing") {
  const Model m = two_state_pmm_recipe();
  StreamDecoder dec(m, DecoderConfig{});
  CHECK(dec.committed_length() == 0);
  const auto f = dec.flush();
  CHECK(f.provisional.empty());
  CHECK(f.diagnostics.steps == 0);
}

TEST_CASE("flush with no commits reproduces offline decoding") {
  const Model m = two_state_pmm_recipe();
  const auto traj = simulate(m, 40, 17);
  DecoderConfig cfg;
  cfg.order = 40;  // window never completes, so nothing commits
  const auto run = run_stream(m, traj.observations, cfg);
  CHECK(run.committed.empty());
  const auto offline = viterbi_path<LogDomain>(m, traj.observations);
  REQUIRE(run.flush.provisional.size() == static_cast<std::size_t>(40));
  for (int t = 1; t <= 40; ++t) {
    CHECK(run.flush.provisional[static_cast<std::size_t>(t - 1)].state ==
          offline.path[static_cast<std::size_t>(t - 1)]);
  }
  CHECK(run.flush.total_log_likelihood ==
        doctest::Approx(offline.log_likelihood()).epsilon(1e-9));
}

TEST_CASE("order zero commits at unique-survivor times") {
  // a revealing symbol kills the other state's delta, so the window of
  // order 0 commits immediately at that time
  const Model m = state_revealing_hmm();
  DecoderConfig cfg;
  cfg.order = 0;
  const ObsSeq obs = ObsSeq::discrete({3, 1, 3, 2, 3, 1});
  const auto run = run_stream(m, obs, cfg);
  std::map<long long, int> committed;
  for (const auto& r : run.committed) committed[r.t] = r.state;
  REQUIRE(committed.count(2) == 1);
  CHECK(committed[2] == 1);
  REQUIRE(committed.count(4) == 1);
  CHECK(committed[4] == 2);
  REQUIRE(committed.count(6) == 1);
  CHECK(committed[6] == 1);
}

TEST_CASE("strong-node mode never commits on the frozen-regime chain") {
  const Model m = no_nodes_model();
  const auto traj = simulate(m, 2000, 5);
  for (int order : {0, 1, 3}) {
    DecoderConfig cfg;
    cfg.order = order;
    cfg.require_strong = true;
    const auto run = run_stream(m, traj.observations, cfg);
    CHECK(run.committed.empty());
    CHECK(run.flush.diagnostics.commits == 0);
  }
}

TEST_CASE("long anchor runs trigger commits inside the run") {
  const Model m = two_state_pmm_recipe();
  auto sym = simulate(m, 60, 23).observations.symbols();
  for (int i = 20; i < 40; ++i) sym[static_cast<std::size_t>(i)] = 1;  // times 21..40
  DecoderConfig cfg;
  cfg.order = 1;
  const auto run = run_stream(m, ObsSeq::discrete(sym), cfg);
  REQUIRE(!run.committed.empty());
  bool in_run = false;
  for (const auto& r : run.committed) {
    if (r.t >= 25 && r.t <= 40) {
      in_run = true;
      CHECK(r.state == 1);
    }
  }
  CHECK(in_run);
}

TEST_CASE("the twin-node block commits its lowest node state") {
  const Model m = tiebreak_pathology_model();
  const ObsSeq obs = ObsSeq::discrete({1, 1, 2, 1, 1, 1, 1, 3, 3});
  DecoderConfig cfg;
  cfg.order = 3;
  const auto run = run_stream(m, obs, cfg);
  REQUIRE(!run.committed.empty());
  // the first commit fires at the block's second position and lexicographic
  // preference picks state 1 of the tied pair {1,2}
  CHECK(run.committed.front().t == 2);
  CHECK(run.committed.front().state == 1);
}

TEST_CASE("emitted rows are immutable, increasing, and gap-separated") {
  const Model m = two_state_pmm_recipe();
  const auto traj = simulate(m, 4000, 29);
  DecoderConfig cfg;
  cfg.order = 1;
  cfg.separation = 3;
  StreamDecoder dec(m, cfg);
  std::map<long long, int> seen;
  long long last_commit_time = 0;
  for (int t = 1; t <= 4000; ++t) {
    for (const auto& r : dec.push(traj.observations.symbol(t))) {
      CHECK(seen.count(r.t) == 0);  // never re-emitted
      seen[r.t] = r.state;
    }
    if (dec.committed_length() != last_commit_time) {
      CHECK(dec.committed_length() > last_commit_time);
      if (last_commit_time > 0) CHECK(dec.committed_length() - last_commit_time >= 3);
      last_commit_time = dec.committed_length();
    }
  }
  REQUIRE(last_commit_time > 0);
  // emitted rows cover exactly 1..committed_length
  CHECK(static_cast<long long>(seen.size()) == last_commit_time);
}

TEST_CASE("committed prefix is consistent with offline decoding of any extension") {
  const Model m = two_state_pmm_recipe();
  const auto base = simulate(m, 60, 31);
  DecoderConfig cfg;
  cfg.order = 1;
  const auto run = run_stream(m, base.observations, cfg);
  REQUIRE(!run.committed.empty());

  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const RandomStream rng(9000 + seed);
    const int ext_len = static_cast<int>(rng.bits(0, 0) % 8);
    auto sym = base.observations.symbols();
    for (int k = 0; k < ext_len; ++k) {
      sym.push_back(1 + static_cast<int>(rng.bits(1, static_cast<std::uint64_t>(k)) % 2));
    }
    const ObsSeq full = ObsSeq::discrete(sym);
    // the committed rows must be realizable by an optimal path of the
    // extension: pinning them costs nothing
    std::map<int, int> pins;
    for (const auto& r : run.committed) pins[static_cast<int>(r.t)] = r.state;
    const auto pinned = viterbi_path<LogDomain>(m, full, TieRule::pinned(pins));
    const auto free_dec = viterbi_path<LogDomain>(m, full);
    REQUIRE(!free_dec.zero_likelihood);
    REQUIRE(!pinned.zero_likelihood);
    CHECK(pinned.log_likelihood() == doctest::Approx(free_dec.log_likelihood()).epsilon(1e-9));
  }
}

TEST_CASE("strong commits equal the offline lexicographic prefix") {
  const Model models[] = {two_state_pmm_recipe(), state_revealing_hmm()};
  int streams_with_commits = 0;
  for (const auto& m : models) {
    for (std::uint64_t seed = 40; seed < 44; ++seed) {
      const auto traj = simulate(m, 3000, seed);
      DecoderConfig cfg;
      cfg.order = 1;
      cfg.require_strong = true;
      const auto run = run_stream(m, traj.observations, cfg);
      if (run.committed.empty()) continue;
      ++streams_with_commits;
      const auto offline = viterbi_path<LogDomain>(m, traj.observations, TieRule::lex());
      for (const auto& r : run.committed) {
        CHECK(r.state == offline.path[static_cast<std::size_t>(r.t - 1)]);
      }
    }
  }
  CHECK(streams_with_commits >= 4);
}

TEST_CASE("committed plus provisional tail matches offline likelihood") {
  const Model m = two_state_pmm_recipe();
  for (std::uint64_t seed = 50; seed < 54; ++seed) {
    const auto traj = simulate(m, 2500, seed);
    DecoderConfig cfg;
    cfg.order = 1;
    const auto run = run_stream(m, traj.observations, cfg);
    const auto offline = viterbi_path<LogDomain>(m, traj.observations);
    CHECK(run.flush.total_log_likelihood ==
          doctest::Approx(offline.log_likelihood()).epsilon(1e-9));
    // flush is also repeatable and does not disturb the stream
    StreamDecoder dec(m, cfg);
    for (int t = 1; t <= traj.observations.size(); ++t) dec.push(traj.observations.symbol(t));
    const auto f1 = dec.flush();
    const auto f2 = dec.flush();
    CHECK(f1.total_log_likelihood == f2.total_log_likelihood);
    CHECK(f1.provisional.size() == f2.provisional.size());
  }
}

TEST_CASE("normalization keeps the working weights in a safe band") {
  const Model m = two_state_pmm_recipe();
  const auto traj = simulate(m, 100000, 61);
  DecoderConfig cfg;
  cfg.order = 1;
  StreamDecoder dec(m, cfg);
  for (int t = 1; t <= traj.observations.size(); ++t) {
    dec.push(traj.observations.symbol(t));
  }
  // the decoder survived 1e5 steps; its committed likelihood is the partial
  // sum of a genuine path, finite and strictly negative
  const auto f = dec.flush();
  CHECK(std::isfinite(f.total_log_likelihood));
  CHECK(f.total_log_likelihood < 0);
  CHECK(f.diagnostics.commits > 100);
}

TEST_CASE("zero-likelihood streams raise the diagnostic") {
  const Model m = two_state_pmm_recipe();
  StreamDecoder dec(m, DecoderConfig{});
  dec.push(1);
  CHECK_THROWS_AS(dec.push(3), ZeroLikelihoodError);  // symbol outside the alphabet
  CHECK(dec.diagnostics().zero_likelihood);
}

TEST_CASE("buffer overflow policies") {
  const Model m = no_nodes_model();  // never commits, so the buffer only grows
  const auto traj = simulate(m, 300, 71);

  DecoderConfig block;
  block.order = 2;
  block.max_buffer = 50;
  StreamDecoder strict(m, block);
  bool threw = false;
  try {
    for (int t = 1; t <= 300; ++t) strict.push(traj.observations.symbol(t));
  } catch (const GuardError&) {
    threw = true;
  }
  CHECK(threw);

  DecoderConfig forced = block;
  forced.overflow = DecoderConfig::OverflowPolicy::ForceCommit;
  StreamDecoder lax(m, forced);
  std::vector<CommitRow> rows;
  for (int t = 1; t <= 300; ++t) {
    const auto r = lax.push(traj.observations.symbol(t));
    rows.insert(rows.end(), r.begin(), r.end());
  }
  REQUIRE(!rows.empty());
  CHECK(rows.front().forced);
  CHECK(lax.diagnostics().forced_commits);
  CHECK(lax.committed_length() > 0);
}

TEST_CASE("euclidean streams commit through the same machinery") {
  const Model glm = glm_scalar_recipe();
  const auto traj = simulate(glm, 3000, 81);
  DecoderConfig cfg;
  cfg.order = 5;
  const auto run = run_stream(glm, traj.observations, cfg);
  CHECK(run.flush.diagnostics.commits > 0);
  const auto offline = viterbi_path<LogDomain>(glm, traj.observations);
  CHECK(run.flush.total_log_likelihood ==
        doctest::Approx(offline.log_likelihood()).epsilon(1e-9));
}
