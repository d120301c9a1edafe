#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include "pmm/domain.hpp"
#include "pmm/errors.hpp"
#include "pmm/model.hpp"

namespace pmm {

// Tie-breaking among maximum-probability paths. Lexicographic order compares
// from the first element with 1 < 2 < ... < |Y|, co-lexicographic from the
// last. PiecewisePinned adds hard state pins at given times and breaks the
// remaining ties lexicographically.
enum class TieKind { Lexicographic, CoLexicographic, PiecewisePinned };

struct TieRule {
  TieKind kind = TieKind::Lexicographic;
  std::map<int, int> pins;  // 1-based time -> state

  static TieRule lex() { return {}; }
  static TieRule colex() { return {TieKind::CoLexicographic, {}}; }
  static TieRule pinned(std::map<int, int> p) { return {TieKind::PiecewisePinned, std::move(p)}; }
};

// ---------------------------------------------------------------------------

template <class D>
struct DeltaTable {
  using W = typename D::Weight;
  int n = 0, ns = 0;
  bool normalized = true;
  std::vector<W> value;         // n*ns, scaled per step when normalized
  std::vector<W> offset;        // n, scale removed at each step (one() if not)
  std::vector<int> argmax_prev; // n*ns, smallest maximizing predecessor; 0 at t=1
  int zero_from = 0;            // first time with an all-zero column, 0 if none

  const W& at(int t, int y) const { return value[static_cast<std::size_t>(t - 1) * ns + (y - 1)]; }
  int prev(int t, int y) const { return argmax_prev[static_cast<std::size_t>(t - 1) * ns + (y - 1)]; }
  W offset_product(int t) const {
    W p = D::one();
    for (int s = 1; s <= t; ++s) p = D::mul(p, offset[s - 1]);
    return p;
  }
  // un-normalized value
  W raw(int t, int y) const { return D::mul(at(t, y), offset_product(t)); }
};

// ---------------------------------------------------------------------------
// Segment-max matrices: entry (i,j) is the best product of kernel terms over
// the observation segment [a,b] among hidden paths pinned to i at a and j at
// b (no initial density). A single-time segment is the max-plus identity.

template <class D>
struct SegMatrix {
  using W = typename D::Weight;
  int ns = 0;
  int a = 0, b = 0;  // 1-based segment bounds, a == b for the identity
  std::vector<W> m;  // ns*ns row-major

  const W& at(int i, int j) const { return m[static_cast<std::size_t>(i - 1) * ns + (j - 1)]; }
  W& at(int i, int j) { return m[static_cast<std::size_t>(i - 1) * ns + (j - 1)]; }

  static SegMatrix identity(int ns, int t = 0) {
    SegMatrix s;
    s.ns = ns;
    s.a = s.b = t;
    s.m.assign(static_cast<std::size_t>(ns) * ns, D::zero());
    for (int i = 1; i <= ns; ++i) s.at(i, i) = D::one();
    return s;
  }
};

template <class D>
SegMatrix<D> maxplus(const SegMatrix<D>& A, const SegMatrix<D>& B) {
  using W = typename D::Weight;
  SegMatrix<D> C;
  C.ns = A.ns;
  C.a = A.a;
  C.b = B.b;
  C.m.assign(static_cast<std::size_t>(A.ns) * A.ns, D::zero());
  for (int i = 1; i <= A.ns; ++i)
    for (int l = 1; l <= A.ns; ++l) {
      const W& ail = A.at(i, l);
      if (D::is_zero(ail)) continue;
      for (int j = 1; j <= A.ns; ++j) {
        W cand = D::mul(ail, B.at(l, j));
        if (C.at(i, j) < cand) C.at(i, j) = cand;
      }
    }
  return C;
}

// kernel-step matrix obs[t-1] -> obs[t] viewed as a segment [t-1, t]
template <class D>
SegMatrix<D> step_segment(const Model& model, const ObsSeq& obs, int t) {
  SegMatrix<D> s;
  s.ns = model.num_states();
  s.a = t - 1;
  s.b = t;
  s.m.resize(static_cast<std::size_t>(s.ns) * s.ns);
  model.template step_matrix<D>(obs, t, s.m.data());
  return s;
}

template <class D>
SegMatrix<D> segment_max(const Model& model, const ObsSeq& obs, int a, int b) {
  if (a < 1 || b > obs.size() || a > b) throw ModelError("segment bounds out of range");
  SegMatrix<D> acc = SegMatrix<D>::identity(model.num_states(), a);
  for (int t = a + 1; t <= b; ++t) acc = maxplus(acc, step_segment<D>(model, obs, t));
  acc.a = a;
  acc.b = b;
  return acc;
}

template <class D>
SegMatrix<D> segment_max(const Model& model, const ObsSeq& segment) {
  return segment_max<D>(model, segment, 1, segment.size());
}

// Endpoint pairs with positive segment weight and their projections.
struct YPlusSet {
  int a = 0, b = 0;
  std::vector<std::pair<int, int>> pairs;
  std::vector<int> proj1, proj2;

  // subpositivity: proj1 x proj2 subset of pairs, proj1 nonempty
  bool full_rectangle() const {
    return !proj1.empty() && pairs.size() == proj1.size() * proj2.size();
  }
};

template <class D>
YPlusSet y_plus(const SegMatrix<D>& seg) {
  YPlusSet out;
  out.a = seg.a;
  out.b = seg.b;
  std::vector<bool> in1(seg.ns, false), in2(seg.ns, false);
  for (int i = 1; i <= seg.ns; ++i)
    for (int j = 1; j <= seg.ns; ++j)
      if (!D::is_zero(seg.at(i, j))) {
        out.pairs.emplace_back(i, j);
        in1[i - 1] = true;
        in2[j - 1] = true;
      }
  for (int i = 1; i <= seg.ns; ++i) {
    if (in1[i - 1]) out.proj1.push_back(i);
    if (in2[i - 1]) out.proj2.push_back(i);
  }
  return out;
}

// ---------------------------------------------------------------------------

template <class D>
struct Decode {
  std::vector<int> path;
  typename D::Weight likelihood = D::zero();
  bool zero_likelihood = true;
  int final_tie_count = 0;

  double log_likelihood() const { return D::to_log(likelihood); }
};

namespace detail {

template <class D>
DeltaTable<D> forward_pass(const Model& model, const ObsSeq& obs,
                           const std::vector<typename D::Weight>& init_weights,
                           const std::map<int, int>& pins, bool normalize) {
  using W = typename D::Weight;
  const int n = obs.size();
  const int ns = model.num_states();
  if (n < 1) throw ModelError("empty observation sequence");

  DeltaTable<D> tab;
  tab.n = n;
  tab.ns = ns;
  tab.normalized = normalize;
  tab.value.assign(static_cast<std::size_t>(n) * ns, D::zero());
  tab.offset.assign(n, D::one());
  tab.argmax_prev.assign(static_cast<std::size_t>(n) * ns, 0);

  const auto allowed = [&pins](int t, int y) {
    const auto it = pins.find(t);
    return it == pins.end() || it->second == y;
  };
  const auto normalize_column = [&](int t) {
    W* col = &tab.value[static_cast<std::size_t>(t - 1) * ns];
    W best = D::zero();
    for (int y = 0; y < ns; ++y) best = D::max(best, col[y]);
    if (D::is_zero(best)) {
      if (tab.zero_from == 0) tab.zero_from = t;
      return;
    }
    if (!normalize) return;
    for (int y = 0; y < ns; ++y) col[y] = D::div(col[y], best);
    tab.offset[t - 1] = best;
  };

  for (int y = 1; y <= ns; ++y) {
    if (allowed(1, y)) tab.value[y - 1] = init_weights[y - 1];
  }
  normalize_column(1);

  std::vector<W> step(static_cast<std::size_t>(ns) * ns);
  for (int t = 2; t <= n; ++t) {
    model.template step_matrix<D>(obs, t, step.data());
    const W* prev = &tab.value[static_cast<std::size_t>(t - 2) * ns];
    W* cur = &tab.value[static_cast<std::size_t>(t - 1) * ns];
    int* bp = &tab.argmax_prev[static_cast<std::size_t>(t - 1) * ns];
    for (int y = 1; y <= ns; ++y) {
      if (!allowed(t, y)) continue;
      W best = D::zero();
      for (int yp = 1; yp <= ns; ++yp) {
        W cand = D::mul(prev[yp - 1], step[static_cast<std::size_t>(yp - 1) * ns + (y - 1)]);
        if (best < cand) best = cand;
      }
      if (D::is_zero(best)) continue;
      // smallest predecessor within the equality class
      for (int yp = 1; yp <= ns; ++yp) {
        W cand = D::mul(prev[yp - 1], step[static_cast<std::size_t>(yp - 1) * ns + (y - 1)]);
        if (D::eq(cand, best)) {
          bp[y - 1] = yp;
          break;
        }
      }
      cur[y - 1] = best;
    }
    normalize_column(t);
  }
  return tab;
}

// raw suffix maxima: beta[t][y] = best kernel product over paths y_{t:n}
// starting in y, honoring pins (pins zero out other states at their time)
template <class D>
std::vector<typename D::Weight> backward_pass(const Model& model, const ObsSeq& obs,
                                              const std::map<int, int>& pins) {
  using W = typename D::Weight;
  const int n = obs.size();
  const int ns = model.num_states();
  std::vector<W> beta(static_cast<std::size_t>(n) * ns, D::zero());
  const auto allowed = [&pins](int t, int y) {
    const auto it = pins.find(t);
    return it == pins.end() || it->second == y;
  };
  for (int y = 1; y <= ns; ++y) {
    if (allowed(n, y)) beta[static_cast<std::size_t>(n - 1) * ns + (y - 1)] = D::one();
  }
  std::vector<W> step(static_cast<std::size_t>(ns) * ns);
  for (int t = n - 1; t >= 1; --t) {
    model.template step_matrix<D>(obs, t + 1, step.data());
    const W* nxt = &beta[static_cast<std::size_t>(t) * ns];
    W* cur = &beta[static_cast<std::size_t>(t - 1) * ns];
    for (int yp = 1; yp <= ns; ++yp) {
      if (!allowed(t, yp)) continue;
      W best = D::zero();
      for (int y = 1; y <= ns; ++y) {
        W cand = D::mul(step[static_cast<std::size_t>(yp - 1) * ns + (y - 1)], nxt[y - 1]);
        if (best < cand) best = cand;
      }
      cur[yp - 1] = best;
    }
  }
  return beta;
}

template <class D>
std::vector<typename D::Weight> initial_weights(const Model& model, const ObsSeq& obs,
                                                std::optional<int> start_pin, bool include_initial) {
  using W = typename D::Weight;
  const int ns = model.num_states();
  std::vector<W> w(ns, D::zero());
  if (include_initial) {
    model.template initial_vector<D>(obs, w.data());
    if (start_pin) {
      for (int y = 1; y <= ns; ++y)
        if (y != *start_pin) w[y - 1] = D::zero();
    }
  } else if (start_pin) {
    w[*start_pin - 1] = D::one();
  } else {
    w.assign(ns, D::one());
  }
  return w;
}

template <class D>
std::map<int, int> merged_pins(const TieRule& tie, std::optional<int> start_pin,
                               std::optional<int> end_pin, int n) {
  std::map<int, int> pins;
  if (tie.kind == TieKind::PiecewisePinned) pins = tie.pins;
  if (start_pin) pins[1] = *start_pin;
  if (end_pin) pins[n] = *end_pin;
  return pins;
}

}  // namespace detail

// Maximum-probability path under endpoint pins. include_initial selects
// whether the time-1 factor is the initial density (true) or one (false).
template <class D>
Decode<D> constrained_path(const Model& model, const ObsSeq& obs, std::optional<int> start_pin,
                           std::optional<int> end_pin, bool include_initial,
                           const TieRule& tie = {}, bool normalize = true) {
  using W = typename D::Weight;
  const int n = obs.size();
  const int ns = model.num_states();
  if (n < 1) throw ModelError("empty observation sequence");
  for (int s : {start_pin.value_or(1), end_pin.value_or(1)}) {
    if (s < 1 || s > ns) throw ModelError("pinned state out of range");
  }
  const auto pins = detail::merged_pins<D>(tie, start_pin, end_pin, n);
  const auto w1 = detail::initial_weights<D>(model, obs, start_pin, include_initial);

  Decode<D> out;
  out.path.reserve(n);

  if (tie.kind == TieKind::CoLexicographic) {
    auto tab = detail::forward_pass<D>(model, obs, w1, pins, normalize);
    W best = D::zero();
    for (int y = 1; y <= ns; ++y) best = D::max(best, tab.at(n, y));
    if (D::is_zero(best)) return out;
    int last = 0;
    for (int y = 1; y <= ns; ++y) {
      if (D::eq(tab.at(n, y), best)) {
        ++out.final_tie_count;
        if (last == 0) last = y;
      }
    }
    out.path.assign(n, 0);
    out.path[n - 1] = last;
    for (int t = n; t >= 2; --t) out.path[t - 2] = tab.prev(t, out.path[t - 1]);
    out.likelihood = D::mul(best, tab.offset_product(n));
    out.zero_likelihood = false;
    return out;
  }

  // Lexicographic (and PiecewisePinned): suffix maxima + forward selection
  const auto beta = detail::backward_pass<D>(model, obs, pins);
  const auto beta_at = [&](int t, int y) -> const W& {
    return beta[static_cast<std::size_t>(t - 1) * ns + (y - 1)];
  };
  W best = D::zero();
  for (int y = 1; y <= ns; ++y) best = D::max(best, D::mul(w1[y - 1], beta_at(1, y)));
  if (D::is_zero(best)) return out;
  int first = 0;
  for (int y = 1; y <= ns; ++y) {
    if (D::eq(D::mul(w1[y - 1], beta_at(1, y)), best)) {
      ++out.final_tie_count;
      if (first == 0) first = y;
    }
  }
  out.path.push_back(first);
  std::vector<W> step(static_cast<std::size_t>(ns) * ns);
  for (int t = 1; t < n; ++t) {
    model.template step_matrix<D>(obs, t + 1, step.data());
    const int cur = out.path.back();
    const W& target = beta_at(t, cur);
    int next = 0;
    for (int y = 1; y <= ns; ++y) {
      W cand = D::mul(step[static_cast<std::size_t>(cur - 1) * ns + (y - 1)], beta_at(t + 1, y));
      if (D::eq(cand, target)) {
        next = y;
        break;
      }
    }
    if (next == 0) {
      // tolerance classification can in principle leave no exact continuation;
      // fall back to the argmax continuation
      W cbest = D::zero();
      for (int y = 1; y <= ns; ++y) {
        W cand = D::mul(step[static_cast<std::size_t>(cur - 1) * ns + (y - 1)], beta_at(t + 1, y));
        if (cbest < cand) {
          cbest = cand;
          next = y;
        }
      }
    }
    out.path.push_back(next);
  }
  out.likelihood = best;
  out.zero_likelihood = false;
  return out;
}

template <class D>
Decode<D> viterbi_path(const Model& model, const ObsSeq& obs, const TieRule& tie = {},
                       bool normalize = true) {
  return constrained_path<D>(model, obs, std::nullopt, std::nullopt, true, tie, normalize);
}

// the spec-level delta recursion with per-step normalization offsets
template <class D>
DeltaTable<D> delta_forward(const Model& model, const ObsSeq& obs, bool normalize = true) {
  const auto w1 = detail::initial_weights<D>(model, obs, std::nullopt, true);
  return detail::forward_pass<D>(model, obs, w1, {}, normalize);
}

// direct product of kernel terms (and optionally the initial density) along
// a fixed path; independent of the DP tables
template <class D>
typename D::Weight path_weight(const Model& model, const ObsSeq& obs, const std::vector<int>& path,
                               bool include_initial) {
  using W = typename D::Weight;
  const int n = obs.size();
  if (static_cast<int>(path.size()) != n) throw ModelError("path length mismatch");
  std::vector<W> w1 = detail::initial_weights<D>(model, obs, std::nullopt, include_initial);
  W acc = w1[path[0] - 1];
  std::vector<W> step(static_cast<std::size_t>(model.num_states()) * model.num_states());
  for (int t = 2; t <= n; ++t) {
    model.template step_matrix<D>(obs, t, step.data());
    acc = D::mul(acc, step[static_cast<std::size_t>(path[t - 2] - 1) * model.num_states() +
                          (path[t - 1] - 1)]);
  }
  return acc;
}

// Exhaustive enumeration in ascending path order; the incumbent is replaced
// only on a strict improvement, so the result is the lexicographically
// smallest maximizer. Guarded to |Y|^n <= 10^7.
template <class D>
Decode<D> brute_force_oracle(const Model& model, const ObsSeq& obs, std::optional<int> start_pin,
                             std::optional<int> end_pin, bool include_initial) {
  using W = typename D::Weight;
  const int n = obs.size();
  const int ns = model.num_states();
  if (n < 1) throw ModelError("empty observation sequence");
  if (n * std::log(static_cast<double>(ns)) > std::log(1e7)) {
    throw GuardError("brute force instance too large: |Y|^n exceeds 10^7");
  }

  std::vector<std::vector<W>> steps;  // step matrices for t=2..n
  steps.reserve(n - 1);
  for (int t = 2; t <= n; ++t) {
    std::vector<W> s(static_cast<std::size_t>(ns) * ns);
    model.template step_matrix<D>(obs, t, s.data());
    steps.push_back(std::move(s));
  }
  const auto w1 = detail::initial_weights<D>(model, obs, start_pin, include_initial);

  Decode<D> out;
  std::vector<int> path(n, 0);
  std::vector<W> prefix(n, D::zero());

  // iterative DFS over paths in ascending order, sharing prefix products
  const auto extend = [&](int t) {  // weight of path[0..t] given prefix[t-1]
    if (t == 0) return w1[path[0] - 1];
    return D::mul(prefix[t - 1], steps[t - 1][static_cast<std::size_t>(path[t - 1] - 1) * ns + (path[t] - 1)]);
  };

  int t = 0;
  path[0] = start_pin.value_or(1);
  const int first_lo = start_pin.value_or(1), first_hi = start_pin.value_or(ns);
  while (true) {
    prefix[t] = extend(t);
    const bool leaf = (t == n - 1);
    const bool dead = D::is_zero(prefix[t]);
    if (leaf && !dead && (!end_pin || path[t] == *end_pin)) {
      if (out.zero_likelihood || D::lt(out.likelihood, prefix[t])) {
        out.likelihood = prefix[t];
        out.path = path;
        out.zero_likelihood = false;
      }
    }
    if (!leaf && !dead) {
      ++t;
      path[t] = 1;
      continue;
    }
    // advance
    while (t >= 0) {
      const int lo = (t == 0) ? first_lo : 1;
      const int hi = (t == 0) ? first_hi : ns;
      (void)lo;
      if (path[t] < hi) {
        ++path[t];
        break;
      }
      --t;
    }
    if (t < 0) break;
  }
  if (!out.zero_likelihood) {
    out.final_tie_count = 1;  // ties are resolved during enumeration
  }
  return out;
}

}  // namespace pmm
