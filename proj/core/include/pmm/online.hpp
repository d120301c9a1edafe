#pragma once

#include <deque>
#include <optional>
#include <vector>

#include "pmm/dp.hpp"
#include "pmm/node.hpp"

namespace pmm {

struct DecoderConfig {
  int order = 0;                   // r: the single window order scanned
  std::optional<int> separation;   // min gap between committed nodes; default r
  TieRule tie{};
  bool require_strong = false;
  std::optional<long long> max_buffer;  // observations buffered since the anchor
  enum class OverflowPolicy { Error, ForceCommit };
  OverflowPolicy overflow = OverflowPolicy::Error;
};

struct CommitRow {
  long long t = 0;
  int state = 0;
  bool forced = false;  // emitted by the overflow policy, not by a node
};

struct StreamDiagnostics {
  long long steps = 0;
  long long nodes_seen = 0;
  long long commits = 0;
  long long buffer_high_water = 0;
  long long committed_length = 0;
  double committed_log_likelihood = 0;
  bool zero_likelihood = false;
  bool forced_commits = false;
};

struct FlushResult {
  std::vector<CommitRow> provisional;  // best tail from the last committed node
  double total_log_likelihood = kLogZero;  // committed prefix ++ provisional tail
  StreamDiagnostics diagnostics;
};

// Piecewise streaming decoder: every push advances the max-product recursion
// one step, tests the node inequality at t = m - r in the sliding window,
// and on a hit solves the piece from the previous committed node (pinned on
// both ends) and emits it. Emitted rows are immutable.
class StreamDecoder {
 public:
  StreamDecoder(const Model& model, DecoderConfig config);

  std::vector<CommitRow> push(int symbol);
  std::vector<CommitRow> push(const Eigen::VectorXd& point);

  FlushResult flush() const;

  const StreamDiagnostics& diagnostics() const { return diag_; }
  long long time() const { return m_; }
  long long committed_length() const { return diag_.committed_length; }

 private:
  std::vector<CommitRow> advance();
  void fill_step(long long t, std::vector<double>& out) const;  // obs t-1 -> obs t
  ObsSeq buffer_slice(long long a, long long b) const;          // absolute times
  std::vector<CommitRow> commit_piece(long long t, int state, bool forced);

  const Model* model_;
  DecoderConfig config_;
  int ns_ = 0;
  int sep_ = 1;

  long long m_ = 0;  // current stream time
  std::vector<double> delta_;               // normalized log-delta at time m
  double delta_offset_ = 0;                 // cumulative normalization
  std::deque<std::vector<double>> delta_hist_;  // delta at times m-r .. m
  std::deque<std::vector<double>> step_hist_;   // step matrices covering the window

  // observation buffer from the anchor (last committed node) to m
  long long buffer_start_ = 1;
  std::deque<int> sym_buffer_;
  std::deque<Eigen::VectorXd> point_buffer_;

  long long anchor_time_ = 0;  // 0 = nothing committed yet
  int anchor_state_ = 0;
  double committed_ll_ = 0;

  StreamDiagnostics diag_;
};

}  // namespace pmm
