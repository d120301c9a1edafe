#include "pmm/conditions.hpp"

#include <algorithm>
#include <cstdint>

namespace pmm {

namespace {

constexpr int kSubsetGuard = 12;
constexpr int kSupportGuard = 64;  // bitset row width for boolean powers

std::vector<std::uint64_t> support_rows(const std::vector<bool>& positive, int n) {
  std::vector<std::uint64_t> rows(n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (positive[static_cast<std::size_t>(i) * n + j]) rows[i] |= (1ull << j);
  return rows;
}

PrimitivityResult primitivity_support(const std::vector<bool>& positive, int n) {
  if (n > kSupportGuard) throw GuardError("matrix too large for primitivity check");
  if (n == 0) return {false, 0};
  const std::uint64_t full = (n == 64) ? ~0ull : ((1ull << n) - 1);
  const auto base = support_rows(positive, n);
  auto cur = base;
  const int bound = (n - 1) * (n - 1) + 1;
  for (int r = 1; r <= bound; ++r) {
    if (r > 1) {
      std::vector<std::uint64_t> next(n, 0);
      for (int i = 0; i < n; ++i) {
        std::uint64_t acc = 0;
        std::uint64_t row = cur[i];
        while (row) {
          const int j = std::countr_zero(row);
          row &= row - 1;
          acc |= base[j];
        }
        next[i] = acc;
      }
      cur = std::move(next);
    }
    bool all = true;
    for (int i = 0; i < n && all; ++i) all = (cur[i] & full) == full;
    if (all) return {true, r};
  }
  return {false, 0};
}

bool strongly_connected(const std::vector<bool>& positive, int n) {
  if (n == 0) return false;
  if (n > kSupportGuard) throw GuardError("matrix too large for reachability check");
  const auto rows = support_rows(positive, n);
  std::vector<std::uint64_t> rev(n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (rows[i] & (1ull << j)) rev[j] |= (1ull << i);
  const auto reach_all = [n](const std::vector<std::uint64_t>& adj) {
    std::uint64_t seen = 1;  // from node 0
    std::uint64_t frontier = 1;
    while (frontier) {
      std::uint64_t next = 0;
      std::uint64_t f = frontier;
      while (f) {
        const int i = std::countr_zero(f);
        f &= f - 1;
        next |= adj[i];
      }
      frontier = next & ~seen;
      seen |= next;
    }
    const std::uint64_t full = (n == 64) ? ~0ull : ((1ull << n) - 1);
    return (seen & full) == full;
  };
  return reach_all(rows) && reach_all(rev);
}

std::vector<bool> positivity(const std::vector<Rational>& m) {
  std::vector<bool> out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = !m[i].is_zero();
  return out;
}

}  // namespace

PrimitivityResult primitivity(const std::vector<std::vector<double>>& matrix) {
  const int n = static_cast<int>(matrix.size());
  std::vector<bool> pos(static_cast<std::size_t>(n) * n, false);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(matrix[i].size()) != n) throw ModelError("matrix must be square");
    for (int j = 0; j < n; ++j) {
      if (matrix[i][j] < 0) throw ModelError("matrix must be nonnegative");
      pos[static_cast<std::size_t>(i) * n + j] = matrix[i][j] > 0;
    }
  }
  return primitivity_support(pos, n);
}

PrimitivityResult primitivity(const std::vector<Rational>& matrix, int n) {
  if (static_cast<int>(matrix.size()) != n * n) throw ModelError("matrix must be square");
  return primitivity_support(positivity(matrix), n);
}

bool irreducible(const std::vector<Rational>& matrix, int n) {
  if (static_cast<int>(matrix.size()) != n * n) throw ModelError("matrix must be square");
  return strongly_connected(positivity(matrix), n);
}

// ---------------------------------------------------------------------------

HmmCorollaryReport check_hmm_corollary(const Model& model) {
  const auto& h = model.as_hmm();
  const int ns = h.num_states;
  const int nx = h.num_symbols;
  if (ns > kSubsetGuard) {
    throw GuardError("cluster enumeration guard: |Y| > " + std::to_string(kSubsetGuard));
  }

  HmmCorollaryReport rep;

  // column maxima p._j
  std::vector<Rational> colmax(ns, Rational(0));
  for (int j = 0; j < ns; ++j)
    for (int i = 0; i < ns; ++i)
      colmax[j] = std::max(colmax[j], h.transitions[static_cast<std::size_t>(i) * ns + j]);

  auto& ci = rep.condition_i;
  ci.score.assign(ns, std::vector<Rational>(nx));
  ci.witnesses.assign(ns, {});
  for (int j = 0; j < ns; ++j)
    for (int x = 0; x < nx; ++x)
      ci.score[j][x] = h.emissions[static_cast<std::size_t>(j) * nx + x] * colmax[j];
  ci.pass = true;
  for (int j = 0; j < ns; ++j) {
    for (int x = 0; x < nx; ++x) {
      Rational rival(0);
      for (int i = 0; i < ns; ++i)
        if (i != j) rival = std::max(rival, ci.score[i][x]);
      if (ci.score[j][x] > rival) ci.witnesses[j].push_back(x + 1);
    }
    if (ci.witnesses[j].empty()) ci.pass = false;
  }

  // emission supports and subset enumeration
  auto& cl = rep.clusters;
  std::vector<std::uint32_t> support_mask(nx, 0);  // per symbol: states emitting it
  cl.supports.assign(ns, {});
  for (int i = 0; i < ns; ++i)
    for (int x = 0; x < nx; ++x)
      if (!h.emissions[static_cast<std::size_t>(i) * nx + x].is_zero()) {
        cl.supports[i].push_back(x + 1);
        support_mask[x] |= (1u << i);
      }

  const std::uint32_t all_states = (ns == 32) ? ~0u : ((1u << ns) - 1);
  for (std::uint32_t c = 1; c <= all_states; ++c) {
    bool weak = false, inter_nonempty = false, inter_disjoint = true;
    for (int x = 0; x < nx; ++x) {
      const std::uint32_t m = support_mask[x];
      if ((m & c) == c) {  // x in the intersection of G_i, i in C
        inter_nonempty = true;
        if ((m & ~c) != 0) inter_disjoint = false;
        if (m == c) weak = true;  // also outside no G_i, i not in C
      }
    }
    std::vector<int> states;
    for (int i = 0; i < ns; ++i)
      if (c & (1u << i)) states.push_back(i + 1);
    if (inter_nonempty && inter_disjoint) cl.clusters.push_back(states);
    if (weak) {
      std::vector<Rational> sub(static_cast<std::size_t>(states.size()) * states.size());
      for (std::size_t a = 0; a < states.size(); ++a)
        for (std::size_t b = 0; b < states.size(); ++b)
          sub[a * states.size() + b] =
              h.transitions[static_cast<std::size_t>(states[a] - 1) * ns + (states[b] - 1)];
      const auto pr = primitivity(sub, static_cast<int>(states.size()));
      cl.weak_cluster_primitivity.push_back({states, pr.primitive, pr.exponent});
      cl.weak_clusters.push_back(std::move(states));
      if (pr.primitive) rep.has_primitive_weak_cluster = true;
    }
  }

  rep.irreducible = irreducible(h.transitions, ns);
  rep.pass = ci.pass && rep.has_primitive_weak_cluster && rep.irreducible;
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

// state space of the joint chain: cells reachable from the initial support
std::vector<bool> reachable_cells(const GenericDiscrete& g) {
  const int nz = g.num_symbols * g.num_states;
  std::vector<bool> seen(nz, false);
  std::vector<int> stack;
  for (int z = 0; z < nz; ++z)
    if (!g.initial[z].is_zero()) {
      seen[z] = true;
      stack.push_back(z);
    }
  while (!stack.empty()) {
    const int z = stack.back();
    stack.pop_back();
    for (int w = 0; w < nz; ++w)
      if (!seen[w] && !g.kernel[static_cast<std::size_t>(z) * nz + w].is_zero()) {
        seen[w] = true;
        stack.push_back(w);
      }
  }
  return seen;
}

}  // namespace

DiscreteCorollaryReport check_discrete_corollary(const Model& model, int max_word_len,
                                                 int max_cycle_len) {
  if (!model.discrete()) throw ModelError("discrete corollary requires a discrete model");
  if (max_word_len > 6 || max_cycle_len > 6) throw GuardError("search depth guard is 6");
  const int nx = model.obs_space().symbol_count;

  DiscreteCorollaryReport rep;

  // irreducibility + recurrence of the joint chain on its reachable cells
  const GenericDiscrete g = model.to_generic();
  const int nz = nx * g.num_states;
  const auto alive = reachable_cells(g);
  {
    std::vector<int> cells;
    for (int z = 0; z < nz; ++z)
      if (alive[z]) cells.push_back(z);
    std::vector<bool> sub(cells.size() * cells.size(), false);
    for (std::size_t a = 0; a < cells.size(); ++a)
      for (std::size_t b = 0; b < cells.size(); ++b)
        sub[a * cells.size() + b] =
            !g.kernel[static_cast<std::size_t>(cells[a]) * nz + cells[b]].is_zero();
    const int n = static_cast<int>(cells.size());
    if (n > kSupportGuard) throw GuardError("joint chain too large for reachability check");
    rep.irreducible_recurrent = n > 0 && strongly_connected(sub, n);
  }

  // (i): some word whose endpoint-pair support is a full rectangle
  std::vector<int> word;
  for (int q = 2; q <= max_word_len && !rep.condition_i; ++q) {
    word.assign(q, 1);
    while (true) {
      const auto seg = segment_max<LogDomain>(model, ObsSeq::discrete(word));
      const auto yp = y_plus<LogDomain>(seg);
      if (yp.full_rectangle()) {
        rep.condition_i = true;
        rep.subpositive_word = word;
        break;
      }
      int pos = q - 1;
      while (pos >= 0 && word[pos] == nx) {
        word[pos] = 1;
        --pos;
      }
      if (pos < 0) break;
      ++word[pos];
    }
  }

  // (ii): anchor cycle with strict center dominance and a strict row or
  // column orientation
  const auto candidates = model.exact_capable()
                              ? find_cyclic_center<ExactDomain>(model, max_cycle_len, 2, false)
                              : find_cyclic_center<LogDomain>(model, max_cycle_len, 2, false);

  // find_cyclic_center returns fully strict cycles; for the one-sided
  // variants re-scan all cycles with relaxed requirements
  const int ns = model.num_states();
  std::vector<int> cyc;
  for (int len = 2; len <= max_cycle_len && !rep.condition_ii; ++len) {
    cyc.assign(len, 1);
    while (true) {
      cyc[len - 1] = cyc[0];
      const auto consider = [&](auto domain_tag) {
        using D = decltype(domain_tag);
        const auto seg = segment_max<D>(model, ObsSeq::discrete(cyc));
        const auto& paa = seg.at(1, 1);
        if (D::is_zero(paa)) return false;
        bool center = true;
        for (int i = 2; i <= ns && center; ++i)
          for (int j = 2; j <= ns && center; ++j)
            center = D::strictly_greater(paa, seg.at(i, j));
        if (!center) return false;
        bool row_strict = true, row_ok = true, col_strict = true, col_ok = true;
        for (int i = 2; i <= ns; ++i) {
          if (D::lt(paa, seg.at(i, 1))) row_ok = false;
          if (!D::strictly_greater(paa, seg.at(i, 1))) row_strict = false;
          if (D::lt(paa, seg.at(1, i))) col_ok = false;
          if (!D::strictly_greater(paa, seg.at(1, i))) col_strict = false;
        }
        const bool ok = (row_strict && col_ok) || (row_ok && col_strict);
        if (!ok) return false;
        rep.row_strict = row_strict;
        rep.col_strict = col_strict;
        return true;
      };
      const bool hit = model.exact_capable() ? consider(ExactDomain{}) : consider(LogDomain{});
      if (hit) {
        rep.condition_ii = true;
        rep.anchor_reachable = alive[static_cast<std::size_t>(cyc[0] - 1) * g.num_states];
        break;
      }
      int pos = len - 2;
      while (pos >= 0 && cyc[pos] == nx) {
        cyc[pos] = 1;
        --pos;
      }
      if (pos < 0) break;
      ++cyc[pos];
    }
  }
  if (!candidates.empty()) rep.cycle = candidates.front();
  if (rep.condition_ii && !rep.cycle) {
    // one-sided cycle found but no fully strict one; report the scan witness
    CycleCandidate c;
    c.cycle = cyc;
    c.anchor_state = 1;
    rep.cycle = c;
  }

  rep.pass = rep.irreducible_recurrent && rep.condition_i && rep.condition_ii && rep.anchor_reachable;
  return rep;
}

// ---------------------------------------------------------------------------

GlmConditionReport check_glm_corollary(const Model& model) {
  const auto& m = model.as_glm();
  const int ns = m.num_states;
  const int d = m.dim;

  GlmConditionReport rep;

  const auto pr = primitivity(m.transitions, ns);
  rep.primitive = pr.primitive;
  rep.exponent = pr.exponent;

  const Rational& p11 = m.transitions[0];
  Rational best_other(0);
  for (int i = 1; i < ns; ++i)
    best_other = std::max(best_other, m.transitions[static_cast<std::size_t>(i) * ns]);
  rep.column_dominance = p11 >= best_other;
  rep.dominance_margin = to_double(p11 - best_other);

  const Eigen::MatrixXd IF1 = Eigen::MatrixXd::Identity(d, d) - m.coeff[0];
  Eigen::FullPivLU<Eigen::MatrixXd> lu(IF1);
  rep.fixed_point_ok = lu.isInvertible();
  if (rep.fixed_point_ok) rep.fixed_point = lu.solve(m.noise_mean[0]);

  // sqrt|Sigma_j| via Cholesky diagonals
  std::vector<double> sqrt_det(ns);
  std::vector<Eigen::MatrixXd> prec(ns);
  for (int j = 0; j < ns; ++j) {
    Eigen::LLT<Eigen::MatrixXd> llt(m.noise_cov[j]);
    double p = 1;
    for (int k = 0; k < d; ++k) p *= llt.matrixL()(k, k);
    sqrt_det[j] = p;
    prec[j] = llt.solve(Eigen::MatrixXd::Identity(d, d));
  }

  rep.hij_all_pass = rep.fixed_point_ok;
  for (int i = 1; i <= ns; ++i) {
    for (int j = 2; j <= ns; ++j) {
      GlmHijEntry e;
      e.i = i;
      e.j = j;
      const Rational& pij = m.transitions[static_cast<std::size_t>(i - 1) * ns + (j - 1)];
      if (pij.is_zero()) {
        e.empty = true;
        e.ratio = std::numeric_limits<double>::infinity();
        e.pass = true;
      } else {
        e.ratio = to_double(p11 / pij) * (sqrt_det[j - 1] / sqrt_det[0]);
        if (e.ratio > 1.0) {
          e.empty = true;
          e.pass = true;
        } else if (rep.fixed_point_ok) {
          const Eigen::VectorXd w =
              rep.fixed_point - m.coeff[j - 1] * rep.fixed_point - m.noise_mean[j - 1];
          e.quad_form = w.dot(prec[j - 1] * w);
          e.threshold = -2.0 * std::log(e.ratio);
          e.pass = e.quad_form > e.threshold;  // outside the closed set
        } else {
          e.pass = false;
        }
      }
      if (!e.pass) rep.hij_all_pass = false;
      rep.hij.push_back(e);
    }
  }

  double drift = 0;
  for (int i = 0; i < ns; ++i) {
    double row = 0;
    for (int j = 0; j < ns; ++j) {
      const double norm1 = m.coeff[j].cwiseAbs().colwise().sum().maxCoeff();
      row += to_double(m.transitions[static_cast<std::size_t>(i) * ns + j]) * norm1;
    }
    drift = std::max(drift, row);
  }
  rep.drift_value = drift;
  rep.drift_ok = drift < 1.0;
  rep.harris_certified = rep.drift_ok && irreducible(m.transitions, ns);
  rep.pass = rep.primitive && rep.column_dominance && rep.hij_all_pass && rep.drift_ok;
  return rep;
}

bool two_state_hmm_distinct_emissions(const Model& model) {
  const auto& h = model.as_hmm();
  if (h.num_states != 2) throw ModelError("check requires exactly two states");
  for (int x = 0; x < h.num_symbols; ++x) {
    if (h.emissions[x] != h.emissions[static_cast<std::size_t>(h.num_symbols) + x]) return true;
  }
  return false;
}

}  // namespace pmm
