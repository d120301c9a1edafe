#include "pmm/recipes.hpp"

#include <algorithm>
#include <sstream>

#include "pmm/dp.hpp"
#include "pmm/io.hpp"
#include "pmm/model_zoo.hpp"
#include "pmm/node.hpp"
#include "pmm/online.hpp"
#include "pmm/simulate.hpp"

namespace pmm {

namespace {

// backward suffix maxima; returns the values at time 1 (no storage)
template <class D>
std::vector<typename D::Weight> beta_front(const Model& model, const ObsSeq& obs) {
  using W = typename D::Weight;
  const int n = obs.size();
  const int ns = model.num_states();
  std::vector<W> beta(ns, D::one());
  std::vector<W> next(ns), step(static_cast<std::size_t>(ns) * ns);
  for (int t = n - 1; t >= 1; --t) {
    model.template step_matrix<D>(obs, t + 1, step.data());
    for (int yp = 1; yp <= ns; ++yp) {
      W best = D::zero();
      for (int y = 1; y <= ns; ++y) {
        W cand = D::mul(step[static_cast<std::size_t>(yp - 1) * ns + (y - 1)], beta[y - 1]);
        if (best < cand) best = cand;
      }
      next[yp - 1] = best;
    }
    // renormalize by the max so exact values stay small
    W top = D::zero();
    for (const W& v : next) top = D::max(top, v);
    if (!D::is_zero(top)) {
      for (W& v : next) v = D::div(v, top);
    }
    beta = next;
  }
  return beta;
}

}  // namespace

int decode_first_state(const Model& model, const ObsSeq& obs) {
  const int ns = model.num_states();
  const auto beta = beta_front<LogDomain>(model, obs);
  std::vector<double> w1(ns);
  model.initial_vector_log(obs, w1.data());
  double best = kLogZero, second = kLogZero;
  int arg = 0;
  for (int y = 1; y <= ns; ++y) {
    const double v = w1[y - 1] + beta[y - 1];
    if (v > best) {
      second = best;
      best = v;
      arg = y;
    } else if (v > second) {
      second = v;
    }
  }
  if (best == kLogZero) throw ZeroLikelihoodError("no positive-probability path");
  const bool close = second != kLogZero && best - second < 1e-6;
  if ((close || !std::isfinite(best - second)) && model.exact_capable() && obs.is_discrete()) {
    const auto ebeta = beta_front<ExactDomain>(model, obs);
    std::vector<Rational> ew1(ns);
    model.initial_vector_exact(obs, ew1.data());
    Rational ebest(0);
    int earg = 0;
    for (int y = 1; y <= ns; ++y) {
      const Rational v = ew1[y - 1] * ebeta[y - 1];
      if (v > ebest) {
        ebest = v;
        earg = y;
      }
    }
    return earg;
  }
  return arg;
}

namespace {

RecipeResult recipe_no_stabilize(std::uint64_t seed, long long steps) {
  if (steps == 0) steps = 100000;
  const Model model = no_stabilize_model();
  const Trajectory traj = simulate(model, steps, seed);
  const auto& sym = traj.observations.symbols();

  // independent walk oracle: S_k = #1s - #2s over x_{2:k}
  std::vector<long long> flips_upto(steps + 1, 0);
  long long s = 0, flips = 0;
  int rule = 1;
  flips_upto[1] = 0;
  for (long long k = 2; k <= steps; ++k) {
    s += (sym[static_cast<std::size_t>(k - 1)] == 1) ? 1 : -1;
    const int r = s >= 0 ? 1 : 2;
    if (r != rule) ++flips;
    rule = r;
    flips_upto[k] = flips;
  }

  std::vector<long long> checkpoints;
  for (long long n = 1024; n <= steps; n *= 2) checkpoints.push_back(n);
  if (checkpoints.empty() || checkpoints.back() != steps) checkpoints.push_back(steps);

  std::ostringstream csv;
  csv << "n,first_state,flips_so_far\n";
  for (long long n : checkpoints) {
    const int first = decode_first_state(model, traj.observations.slice(1, static_cast<int>(n)));
    csv << n << ',' << first << ',' << flips_upto[n] << '\n';
  }
  return {csv.str(), nlohmann::json{{"recipe", "no-stabilize"},
                                    {"seed", seed},
                                    {"steps", steps},
                                    {"total_flips", flips}}};
}

RecipeResult recipe_no_nodes(std::uint64_t seed, long long steps) {
  if (steps == 0) steps = 10000;
  const Model model = no_nodes_model();
  const Trajectory traj = simulate(model, steps, seed);
  const int max_order = 10;
  const auto hits = scan_nodes<LogDomain>(model, traj.observations, max_order);
  std::vector<long long> counts(max_order + 1, 0);
  for (const auto& h : hits) {
    if (h.order <= max_order) ++counts[h.order];
  }
  std::ostringstream csv;
  csv << "order,node_count\n";
  for (int r = 0; r <= max_order; ++r) csv << r << ',' << counts[r] << '\n';
  return {csv.str(), nlohmann::json{{"recipe", "no-nodes"},
                                    {"seed", seed},
                                    {"steps", steps},
                                    {"total_hits", hits.size()}}};
}

RecipeResult recipe_tiebreak(std::uint64_t seed, long long /*steps*/) {
  const Model model = tiebreak_pathology_model();
  const ObsSeq obs = ObsSeq::discrete({1, 1, 2, 1, 1, 1, 1});
  std::ostringstream csv;
  csv << "pin_t2,pin_t4,log_likelihood\n";
  for (int a = 1; a <= 2; ++a) {
    for (int b = 1; b <= 2; ++b) {
      const auto dec = viterbi_path<LogDomain>(model, obs, TieRule::pinned({{2, a}, {4, b}}));
      csv << a << ',' << b << ','
          << format_double(dec.zero_likelihood ? kLogZero : dec.log_likelihood()) << '\n';
    }
  }
  return {csv.str(), nlohmann::json{{"recipe", "tiebreak-pathology"}, {"seed", seed}}};
}

RecipeResult recipe_growth(const Model& model, const char* name, int order, std::uint64_t seed,
                           long long steps) {
  const Trajectory traj = simulate(model, steps, seed);
  DecoderConfig cfg;
  cfg.order = order;
  StreamDecoder dec(model, cfg);
  const long long stride = std::max<long long>(1, steps / 100);
  std::ostringstream csv;
  csv << "n,committed_length\n";
  for (long long t = 1; t <= steps; ++t) {
    if (model.discrete()) {
      dec.push(traj.observations.symbol(static_cast<int>(t)));
    } else {
      dec.push(traj.observations.point(static_cast<int>(t)));
    }
    if (t % stride == 0 || t == steps) csv << t << ',' << dec.committed_length() << '\n';
  }
  const auto flush = dec.flush();
  nlohmann::json meta = to_json(flush.diagnostics);
  meta["recipe"] = name;
  meta["seed"] = seed;
  meta["order"] = order;
  meta["total_log_likelihood"] = flush.total_log_likelihood;
  return {csv.str(), std::move(meta)};
}

}  // namespace

const std::vector<std::string>& recipe_names() {
  static const std::vector<std::string> names = {"no-stabilize", "no-nodes", "tiebreak-pathology",
                                                 "barrier-growth", "glm-growth"};
  return names;
}

RecipeResult run_recipe(const std::string& name, std::uint64_t seed, long long steps) {
  if (name == "no-stabilize") return recipe_no_stabilize(seed, steps);
  if (name == "no-nodes") return recipe_no_nodes(seed, steps);
  if (name == "tiebreak-pathology") return recipe_tiebreak(seed, steps);
  if (name == "barrier-growth") {
    return recipe_growth(two_state_pmm_recipe(), "barrier-growth", 1, seed,
                         steps == 0 ? 100000 : steps);
  }
  if (name == "glm-growth") {
    return recipe_growth(glm_scalar_recipe(), "glm-growth", 5, seed, steps == 0 ? 20000 : steps);
  }
  throw UsageError("unknown recipe '" + name + "'");
}

}  // namespace pmm
