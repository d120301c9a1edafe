#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pmm/dp.hpp"

namespace pmm {

// Node test at time t on observations x_{1:m}: state i is a node of order
// r = m-t when delta_t(i) * m_{t:m}[i][j] >= delta_t(k) * m_{t:m}[k][j] for
// every j, k. Strong nodes satisfy the strict version for k != i whenever
// the left side is nonzero. t = m uses the identity segment matrix.
struct NodeReport {
  int t = 0;
  int order = 0;
  std::vector<int> node_states;
  std::vector<int> strong_states;

  bool has(int state) const {
    for (int s : node_states)
      if (s == state) return true;
    return false;
  }
  bool has_strong(int state) const {
    for (int s : strong_states)
      if (s == state) return true;
    return false;
  }
};

template <class D>
NodeReport detect_node_from(const std::vector<typename D::Weight>& delta_col,
                            const SegMatrix<D>& seg, int t) {
  using W = typename D::Weight;
  const int ns = seg.ns;
  NodeReport rep;
  rep.t = t;
  rep.order = seg.b - seg.a;

  std::vector<W> score(static_cast<std::size_t>(ns) * ns);
  std::vector<W> colmax(ns, D::zero());
  for (int k = 1; k <= ns; ++k)
    for (int j = 1; j <= ns; ++j) {
      W v = D::mul(delta_col[k - 1], seg.at(k, j));
      if (colmax[j - 1] < v) colmax[j - 1] = v;
      score[static_cast<std::size_t>(k - 1) * ns + (j - 1)] = std::move(v);
    }
  for (int i = 1; i <= ns; ++i) {
    bool node = true;
    for (int j = 1; j <= ns && node; ++j) {
      node = !D::lt(score[static_cast<std::size_t>(i - 1) * ns + (j - 1)], colmax[j - 1]);
    }
    if (!node) continue;
    rep.node_states.push_back(i);
    bool strong = true;
    for (int j = 1; j <= ns && strong; ++j) {
      const W& lhs = score[static_cast<std::size_t>(i - 1) * ns + (j - 1)];
      if (D::is_zero(lhs)) continue;
      for (int k = 1; k <= ns && strong; ++k) {
        if (k == i) continue;
        strong = D::strictly_greater(lhs, score[static_cast<std::size_t>(k - 1) * ns + (j - 1)]);
      }
    }
    if (strong) rep.strong_states.push_back(i);
  }
  return rep;
}

template <class D>
NodeReport detect_node(const Model& model, const ObsSeq& obs, int t) {
  const int m = obs.size();
  if (t < 1 || t > m) throw ModelError("node time out of range");
  auto tab = delta_forward<D>(model, obs.slice(1, t));
  std::vector<typename D::Weight> col(model.num_states());
  for (int y = 1; y <= model.num_states(); ++y) col[y - 1] = tab.at(t, y);
  const auto seg = (t == m) ? SegMatrix<D>::identity(model.num_states(), t)
                            : segment_max<D>(model, obs, t, m);
  return detect_node_from<D>(col, seg, t);
}

// All node reports for t = 1..n with the segment running to the end of obs
// (order n-t at each t); shares one delta pass and right-to-left folds.
template <class D>
std::vector<NodeReport> detect_all_times(const Model& model, const ObsSeq& obs) {
  const int n = obs.size();
  const int ns = model.num_states();
  auto tab = delta_forward<D>(model, obs);
  std::vector<NodeReport> out(n);
  SegMatrix<D> seg = SegMatrix<D>::identity(ns, n);
  std::vector<typename D::Weight> col(ns);
  for (int t = n; t >= 1; --t) {
    for (int y = 1; y <= ns; ++y) col[y - 1] = tab.at(t, y);
    out[t - 1] = detect_node_from<D>(col, seg, t);
    if (t > 1) {
      seg = maxplus(step_segment<D>(model, obs, t), seg);
      seg.a = t - 1;
    }
  }
  return out;
}

// Node reports for every (t, r) with r <= max_order and t + r <= n; returns
// only hits (nonempty node state set).
template <class D>
std::vector<NodeReport> scan_nodes(const Model& model, const ObsSeq& obs, int max_order) {
  const int n = obs.size();
  const int ns = model.num_states();
  auto tab = delta_forward<D>(model, obs);
  std::vector<NodeReport> hits;
  std::vector<typename D::Weight> col(ns);
  for (int t = 1; t <= n; ++t) {
    for (int y = 1; y <= ns; ++y) col[y - 1] = tab.at(t, y);
    SegMatrix<D> seg = SegMatrix<D>::identity(ns, t);
    for (int r = 0; r <= max_order && t + r <= n; ++r) {
      if (r > 0) {
        seg = maxplus(seg, step_segment<D>(model, obs, t + r));
      }
      auto rep = detect_node_from<D>(col, seg, t);
      if (!rep.node_states.empty()) hits.push_back(std::move(rep));
    }
  }
  return hits;
}

// ---------------------------------------------------------------------------
// Barrier certification.

struct WitnessTriple {
  int i = 0, j = 0, k = 0;
  double log_margin = 0;  // log lhs - log rhs; +inf when rhs is zero and lhs is not
};

struct BarrierCertificate {
  std::vector<int> block;
  int split = 0;   // l
  int order = 0;   // Prop21: M - l; A-conditions: n_{2N+2} - n_{N+1}
  int target_state = 1;
  bool strict = false;
  enum class Method { Prop21, AConditions } method = Method::Prop21;
  std::vector<WitnessTriple> witnesses;
};

struct BarrierRefusal {
  WitnessTriple violating;
  std::string reason;
};

using BarrierCheck = std::variant<BarrierCertificate, BarrierRefusal>;

inline bool certified(const BarrierCheck& c) {
  return std::holds_alternative<BarrierCertificate>(c);
}

namespace detail {

template <class D>
double log_margin(const typename D::Weight& lhs, const typename D::Weight& rhs) {
  if (D::is_zero(rhs)) return D::is_zero(lhs) ? 0.0 : std::numeric_limits<double>::infinity();
  return D::to_log(lhs) - D::to_log(rhs);
}

}  // namespace detail

// Certifies that block b_{1:M} pins the path through target_state at offset
// l from the block start, i.e. everywhere the block ends at position m,
// time m - (M - l) is a target_state-node of order M - l. target_state != 1
// relabels states so the checked inequalities are the anchor-state ones.
template <class D>
BarrierCheck verify_barrier_prop21(const Model& model, const std::vector<int>& block, int split,
                                   int target_state = 1) {
  const int M = static_cast<int>(block.size());
  const int ns = model.num_states();
  if (M < 3) throw ModelError("barrier block must have length >= 3");
  if (split < 2 || split > M - 1) throw ModelError("split must lie in [2, M-1]");
  if (target_state < 1 || target_state > ns) throw ModelError("state out of range");
  const ObsSeq obs = ObsSeq::discrete(block);
  const auto left = segment_max<D>(model, obs, 1, split);
  const auto right = segment_max<D>(model, obs, split, M);

  const int one = target_state;
  BarrierCertificate cert;
  cert.block = block;
  cert.split = split;
  cert.order = M - split;
  cert.target_state = target_state;
  cert.method = BarrierCertificate::Method::Prop21;
  cert.strict = true;
  for (int i = 1; i <= ns; ++i) {
    for (int j = 1; j <= ns; ++j) {
      const auto lhs = D::mul(left.at(i, one), right.at(one, j));
      for (int k = 1; k <= ns; ++k) {
        const auto rhs = D::mul(left.at(i, k), right.at(k, j));
        if (D::lt(lhs, rhs)) {
          return BarrierRefusal{
              WitnessTriple{i, j, k, detail::log_margin<D>(lhs, rhs)},
              "p_i1(b_1:l) p_1j(b_l:M) < p_ik(b_1:l) p_kj(b_l:M) at (i,j,k)"};
        }
        if (k != one && !D::is_zero(lhs) && !D::strictly_greater(lhs, rhs)) cert.strict = false;
        cert.witnesses.push_back(WitnessTriple{i, j, k, detail::log_margin<D>(lhs, rhs)});
      }
    }
  }
  return cert;
}

// ---------------------------------------------------------------------------
// Sufficient-condition checker for barrier sets built from cyclic center
// parts: the center sections must dominate through the anchor state (A1,
// strict variant A1'), the flanks must be bounded and reach the anchor (A2),
// and the geometric slack must beat the flank ratio (A3).

struct AConditionsInput {
  std::vector<std::vector<int>> candidates;  // explicit blocks, length n_{2N+2}
  std::vector<int> indices;                  // n_1 < ... < n_{2N+2}, 1-based
  Rational epsilon;                          // in (0,1)
  Rational delta, Delta;                     // 0 < delta <= Delta
  int target_state = 1;
};

struct AConditionsReport {
  bool a1 = false, a1_strict = false, a2 = false, a3 = false, pass = false;
  double a3_value = 0;  // (Delta/delta) (1-eps)^N
  std::vector<std::string> failures;
  std::vector<BarrierCertificate> certificates;
};

template <class D>
AConditionsReport check_A_conditions(const Model& model, const AConditionsInput& in) {
  using W = typename D::Weight;
  const int ns = model.num_states();
  const auto& idx = in.indices;
  if (idx.size() < 6 || idx.size() % 2 != 0) {
    throw ModelError("need indices n_1..n_{2N+2} with N >= 2");
  }
  const int N = (static_cast<int>(idx.size()) - 2) / 2;
  for (std::size_t s = 1; s < idx.size(); ++s) {
    if (idx[s] <= idx[s - 1]) throw ModelError("indices must be strictly increasing");
  }
  if (idx.front() < 1) throw ModelError("indices are 1-based");
  if (!(in.epsilon > 0 && in.epsilon < 1)) throw ModelError("epsilon must lie in (0,1)");
  if (!(in.delta > 0 && in.delta <= in.Delta)) throw ModelError("need 0 < delta <= Delta");
  if (in.target_state < 1 || in.target_state > ns) throw ModelError("state out of range");

  const auto to_w = [](const Rational& r) -> W {
    if constexpr (std::is_same_v<D, ExactDomain>) {
      return r;
    } else {
      return r.is_zero() ? kLogZero : std::log(to_double(r));
    }
  };
  const W eps_c = to_w(1 - in.epsilon);
  const W delta_w = to_w(in.delta);
  const W Delta_w = to_w(in.Delta);
  const int one = in.target_state;

  AConditionsReport rep;
  rep.a1 = rep.a2 = true;
  bool row_strict_all = true, col_strict_all = true;

  for (std::size_t c = 0; c < in.candidates.size(); ++c) {
    const auto& cand = in.candidates[c];
    if (static_cast<int>(cand.size()) != idx.back()) {
      throw ModelError("candidate " + std::to_string(c + 1) + " length does not match n_{2N+2}");
    }
    const ObsSeq obs = ObsSeq::discrete(cand);
    const auto tag = [&](const std::string& what, int k) {
      return "candidate " + std::to_string(c + 1) + ", " + what + " section " + std::to_string(k);
    };

    // A1 / A1' on the 2N center sections
    for (int k = 1; k <= 2 * N; ++k) {
      const auto seg = segment_max<D>(model, obs, idx[k - 1], idx[k]);
      const W& p11 = seg.at(one, one);
      for (int i = 1; i <= ns; ++i) {
        if (D::lt(p11, seg.at(i, one))) {
          rep.a1 = false;
          rep.failures.push_back(tag("A1 row inequality fails at i=" + std::to_string(i), k));
        } else if (i != one && !D::strictly_greater(p11, seg.at(i, one))) {
          row_strict_all = false;
        }
        if (D::lt(p11, seg.at(one, i))) {
          rep.a1 = false;
          rep.failures.push_back(tag("A1 column inequality fails at i=" + std::to_string(i), k));
        } else if (i != one && !D::strictly_greater(p11, seg.at(one, i))) {
          col_strict_all = false;
        }
      }
      const W lhs = D::mul(p11, eps_c);
      for (int i = 1; i <= ns; ++i) {
        if (i == one) continue;
        for (int j = 1; j <= ns; ++j) {
          if (j == one) continue;
          if (!D::strictly_greater(lhs, seg.at(i, j))) {
            rep.a1 = false;
            rep.failures.push_back(
                tag("A1 center dominance fails at (i,j)=(" + std::to_string(i) + "," +
                        std::to_string(j) + ")",
                    k));
          }
        }
      }
    }

    // A2 on the two flanks
    const auto check_flank = [&](int a, int b, bool left_flank) {
      const auto seg = segment_max<D>(model, obs, a, b);
      for (int i = 1; i <= ns; ++i)
        for (int j = 1; j <= ns; ++j) {
          if (D::lt(Delta_w, seg.at(i, j))) {
            rep.a2 = false;
            rep.failures.push_back(tag("A2 upper bound fails", left_flank ? 0 : 2 * N + 1));
          }
        }
      const auto yp = y_plus<D>(seg);
      if (yp.pairs.empty()) {
        rep.a2 = false;
        rep.failures.push_back(tag("A2 empty endpoint support", left_flank ? 0 : 2 * N + 1));
        return;
      }
      if (left_flank) {
        for (int i : yp.proj1) {
          if (D::lt(seg.at(i, one), delta_w)) {
            rep.a2 = false;
            rep.failures.push_back(tag("A2 lower bound p_i1 fails at i=" + std::to_string(i), 0));
          }
        }
      } else {
        for (int j : yp.proj2) {
          if (D::lt(seg.at(one, j), delta_w)) {
            rep.a2 = false;
            rep.failures.push_back(
                tag("A2 lower bound p_1j fails at j=" + std::to_string(j), 2 * N + 1));
          }
        }
      }
    };
    check_flank(1, idx[0], true);
    check_flank(idx[2 * N], idx[2 * N + 1], false);
  }

  rep.a1_strict = rep.a1 && (row_strict_all || col_strict_all);

  const double ratio = to_double(in.Delta / in.delta);
  rep.a3_value = ratio * std::pow(1.0 - to_double(in.epsilon), N);
  rep.a3 = rep.a3_value < 1.0;
  if (!rep.a3) {
    rep.failures.push_back("A3 fails: (Delta/delta)(1-eps)^N = " + std::to_string(rep.a3_value));
  }

  rep.pass = rep.a1 && rep.a2 && rep.a3;
  if (rep.pass) {
    for (const auto& cand : in.candidates) {
      BarrierCertificate cert;
      cert.block = cand;
      cert.split = idx[N];  // n_{N+1}
      cert.order = idx[2 * N + 1] - idx[N];
      cert.target_state = in.target_state;
      cert.strict = rep.a1_strict;
      cert.method = BarrierCertificate::Method::AConditions;
      rep.certificates.push_back(std::move(cert));
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Cyclic center-part search for discrete models: words x_{1:n} with
// x_1 = x_n whose segment matrix is strictly dominated by the anchor entry.

struct CycleCandidate {
  std::vector<int> cycle;   // x_{1:n} with x_1 == x_n
  int anchor_state = 1;
  double margin_center = 0;  // 1 - max_{i,j != anchor} p_ij / p_aa
  double margin_row = 0;     // 1 - max_{i != anchor} p_i,a / p_aa
  double margin_col = 0;     // 1 - max_{j != anchor} p_a,j / p_aa
  std::vector<int> center_block;  // 2N copies of x_{1:n-1} plus closing x_n

  double margin() const { return std::min({margin_center, margin_row, margin_col}); }
};

template <class D>
std::vector<CycleCandidate> find_cyclic_center(const Model& model, int max_cycle_len, int N,
                                               bool relabel_anchors = false) {
  if (!model.discrete()) throw ModelError("cyclic center search requires a discrete model");
  if (max_cycle_len > 6) throw GuardError("max_cycle_len exceeds enumeration guard (6)");
  if (max_cycle_len < 2) throw ModelError("cycles need length >= 2");
  if (N < 1) throw ModelError("N must be positive");
  const int ns = model.num_states();
  const int nx = model.obs_space().symbol_count;

  std::vector<CycleCandidate> out;
  std::vector<int> word;
  const int max_anchor = relabel_anchors ? ns : 1;

  for (int len = 2; len <= max_cycle_len; ++len) {
    word.assign(len, 1);
    // enumerate words with word[len-1] == word[0]
    while (true) {
      word[len - 1] = word[0];
      const auto seg = segment_max<D>(model, ObsSeq::discrete(word));
      for (int anchor = 1; anchor <= max_anchor; ++anchor) {
        const auto& paa = seg.at(anchor, anchor);
        if (D::is_zero(paa)) continue;
        double worst_center = 0, worst_row = 0, worst_col = 0;
        bool strict = true;
        for (int i = 1; i <= ns && strict; ++i)
          for (int j = 1; j <= ns && strict; ++j) {
            if (i == anchor && j == anchor) continue;
            if (!D::strictly_greater(paa, seg.at(i, j))) {
              strict = false;
              break;
            }
            const double ratio =
                D::is_zero(seg.at(i, j)) ? 0.0 : std::exp(D::to_log(seg.at(i, j)) - D::to_log(paa));
            if (i != anchor && j != anchor) worst_center = std::max(worst_center, ratio);
            if (j == anchor) worst_row = std::max(worst_row, ratio);
            if (i == anchor) worst_col = std::max(worst_col, ratio);
          }
        if (!strict) continue;
        CycleCandidate cand;
        cand.cycle = word;
        cand.anchor_state = anchor;
        cand.margin_center = 1.0 - worst_center;
        cand.margin_row = 1.0 - worst_row;
        cand.margin_col = 1.0 - worst_col;
        cand.center_block.reserve(static_cast<std::size_t>(2 * N) * (len - 1) + 1);
        for (int rep = 0; rep < 2 * N; ++rep) {
          cand.center_block.insert(cand.center_block.end(), word.begin(), word.end() - 1);
        }
        cand.center_block.push_back(word[len - 1]);
        out.push_back(std::move(cand));
      }
      // next word over positions 0..len-2
      int pos = len - 2;
      while (pos >= 0 && word[pos] == nx) {
        word[pos] = 1;
        --pos;
      }
      if (pos < 0) break;
      ++word[pos];
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const CycleCandidate& a, const CycleCandidate& b) { return a.margin() > b.margin(); });
  return out;
}

// ---------------------------------------------------------------------------
// Randomized falsification: embeds the block after simulated prefixes and
// re-runs the node test at the certified time and order. A barrier claim can
// only be refuted this way, never proven.

struct FalsifyResult {
  bool counterexample_found = false;
  long long trial = -1;
  std::vector<int> prefix, suffix;
  NodeReport report;
};

FalsifyResult falsify_barrier(const Model& model, const std::vector<int>& block, int order,
                              int target_state, long long trials, std::uint64_t seed);

}  // namespace pmm
