#pragma once

#include <optional>
#include <vector>

#include "pmm/node.hpp"

namespace pmm {

struct PrimitivityResult {
  bool primitive = false;
  int exponent = 0;  // smallest R with an all-positive R-th power
};

// Boolean-semiring powers of the support pattern up to the Wielandt bound
// (n-1)^2 + 1.
PrimitivityResult primitivity(const std::vector<std::vector<double>>& matrix);
PrimitivityResult primitivity(const std::vector<Rational>& matrix, int n);

// strong connectivity of the support digraph
bool irreducible(const std::vector<Rational>& matrix, int n);

// ---------------------------------------------------------------------------
// Factored-chain checks (transition matrix + discrete emissions).

struct ConditionIReport {
  bool pass = false;
  // score[j-1][x-1] = f_j(x) * max_i p_ij
  std::vector<std::vector<Rational>> score;
  // per state j: symbols where score_j strictly beats every other state
  std::vector<std::vector<int>> witnesses;
};

struct ClusterReport {
  std::vector<std::vector<int>> supports;  // G_i as sorted symbol lists
  std::vector<std::vector<int>> clusters;
  std::vector<std::vector<int>> weak_clusters;
  struct Candidate {
    std::vector<int> states;
    bool primitive = false;
    int exponent = 0;
  };
  std::vector<Candidate> weak_cluster_primitivity;
};

struct HmmCorollaryReport {
  ConditionIReport condition_i;
  ClusterReport clusters;
  bool irreducible = false;
  bool has_primitive_weak_cluster = false;
  bool pass = false;
};

// Requires a discrete-emission factored model with |Y| <= 12 (subset guard).
HmmCorollaryReport check_hmm_corollary(const Model& model);

// ---------------------------------------------------------------------------
// Joint discrete chain checks: subpositivity of some word plus a strictly
// dominating anchor cycle with the one-sided strictness orientations.

struct DiscreteCorollaryReport {
  bool irreducible_recurrent = false;
  bool condition_i = false;
  std::vector<int> subpositive_word;
  bool condition_ii = false;
  std::optional<CycleCandidate> cycle;
  bool anchor_reachable = false;  // (x*_1, 1) lies in the chain's state space
  bool row_strict = false;        // p_11 > p_i1 for all i != 1 on the cycle
  bool col_strict = false;        // p_11 > p_1i for all i != 1 on the cycle
  bool pass = false;
};

DiscreteCorollaryReport check_discrete_corollary(const Model& model, int max_word_len = 4,
                                                 int max_cycle_len = 4);

// ---------------------------------------------------------------------------
// Gaussian linear switching checks.

struct GlmHijEntry {
  int i = 0, j = 0;
  bool empty = false;     // p_ij == 0 or density ratio > 1
  double ratio = 0;       // p_11 sqrt(|Sigma_j|) / (p_ij sqrt(|Sigma_1|))
  double quad_form = 0;   // (w - mu_j)^T Sigma_j^{-1} (w - mu_j) at w = (I-F(j)) x*
  double threshold = 0;   // -2 ln ratio
  bool pass = false;      // w outside H_ij
};

struct GlmConditionReport {
  bool primitive = false;
  int exponent = 0;
  bool column_dominance = false;  // p_11 = max_i p_i1
  double dominance_margin = 0;    // p_11 - max_{i != 1} p_i1
  bool fixed_point_ok = false;    // I - F(1) nonsingular
  Eigen::VectorXd fixed_point;    // x* = (I - F(1))^{-1} mu_1
  std::vector<GlmHijEntry> hij;   // all (i, j != 1)
  bool hij_all_pass = false;
  double drift_value = 0;  // max_i sum_j p_ij ||F(j)||_1
  bool drift_ok = false;
  bool harris_certified = false;  // drift holds and the hidden chain is irreducible
  bool pass = false;
};

GlmConditionReport check_glm_corollary(const Model& model);

// Informational two-state check: some symbol has f_1(x) != f_2(x).
bool two_state_hmm_distinct_emissions(const Model& model);

}  // namespace pmm
