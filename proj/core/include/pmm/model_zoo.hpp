#pragma once

#include "pmm/model.hpp"

namespace pmm {

// Canonical models used by the CLI recipes and the test corpora. Each builder
// is exact: all probabilities are constructed as rationals.

// Joint-kernel chain over two tracked symbols plus K absorbing noise states.
// The decoded path follows the running symbol majority, so it flips forever
// and never stabilizes. Requires eps = 1/(2K) with
// eps < 1-p-eps/2 < 1/2 < p-eps/2 < 1. Initial: X1, Y1 independent uniform
// over {1,2}.
Model no_stabilize_model(const Rational& p = Rational(3, 4), int K = 4);

// The same chain in factored form (transition matrix + emissions). Initial
// hidden distribution is uniform over the two tracking states.
Model no_stabilize_hmm(const Rational& p = Rational(3, 4), int K = 4);

// Two-state chain with identity hidden transitions: the decoded path is
// decided by the symbol majority of the whole prefix and no time is ever
// pinned down by a finite window.
Model no_nodes_model(const Rational& p = Rational(3, 4));

// Four-state chain where the blocks (1,1,2,1,1) and (2,1,1,1,1) pin the path
// to {1,2} at their second position but same-state pinning across both
// blocks has zero likelihood. Symbols: 1 and 2 as revealing observations, 3
// carries the residual emission mass 1-p from every state. All nonzero
// transition entries equal 1/3.
Model tiebreak_pathology_model(const Rational& p = Rational(1, 2));

// Standard two-state parameter set used by the recipes:
// p=q=1/2, lambda1=4/5, lambda2=3/10, mu1=3/5, mu2=2/5.
TwoStatePmmParams two_state_recipe_params();
Model two_state_pmm_recipe();

// Scalar 2-state linear switching recipe: P=[[0.6,0.4],[0.5,0.5]],
// F=(0.3,0.4), noise means (0,2), unit variances.
Model glm_scalar_recipe();

// Two-state chain with a state-revealing symbol per state (disjoint supports
// except one shared symbol); any occurrence of a revealing symbol forces the
// path through its state.
Model state_revealing_hmm();

}  // namespace pmm
