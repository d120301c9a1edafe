#include "pmm/online.hpp"

#include <algorithm>

namespace pmm {

StreamDecoder::StreamDecoder(const Model& model, DecoderConfig config)
    : model_(&model), config_(std::move(config)), ns_(model.num_states()) {
  if (config_.order < 0) throw ModelError("order must be nonnegative");
  const int sep = config_.separation.value_or(config_.order);
  if (sep < 0) throw ModelError("separation must be nonnegative");
  sep_ = std::max(1, sep);
  delta_.assign(ns_, kLogZero);
}

void StreamDecoder::fill_step(long long t, std::vector<double>& out) const {
  out.resize(static_cast<std::size_t>(ns_) * ns_);
  if (model_->discrete()) {
    const int xp = sym_buffer_[static_cast<std::size_t>(t - 1 - buffer_start_)];
    const int x = sym_buffer_[static_cast<std::size_t>(t - buffer_start_)];
    for (int i = 1; i <= ns_; ++i)
      for (int j = 1; j <= ns_; ++j)
        out[static_cast<std::size_t>(i - 1) * ns_ + (j - 1)] = model_->kernel_log(xp, i, x, j);
  } else {
    const auto& xp = point_buffer_[static_cast<std::size_t>(t - 1 - buffer_start_)];
    const auto& x = point_buffer_[static_cast<std::size_t>(t - buffer_start_)];
    for (int i = 1; i <= ns_; ++i)
      for (int j = 1; j <= ns_; ++j)
        out[static_cast<std::size_t>(i - 1) * ns_ + (j - 1)] = model_->kernel_log(xp, i, x, j);
  }
}

ObsSeq StreamDecoder::buffer_slice(long long a, long long b) const {
  const auto lo = static_cast<std::size_t>(a - buffer_start_);
  const auto hi = static_cast<std::size_t>(b - buffer_start_);
  if (model_->discrete()) {
    return ObsSeq::discrete(std::vector<int>(sym_buffer_.begin() + lo, sym_buffer_.begin() + hi + 1));
  }
  return ObsSeq::euclidean(
      std::vector<Eigen::VectorXd>(point_buffer_.begin() + lo, point_buffer_.begin() + hi + 1));
}

std::vector<CommitRow> StreamDecoder::push(int symbol) {
  if (!model_->discrete()) throw ModelError("model expects Euclidean observations");
  ++m_;
  sym_buffer_.push_back(symbol);
  return advance();
}

std::vector<CommitRow> StreamDecoder::push(const Eigen::VectorXd& point) {
  if (model_->discrete()) throw ModelError("model expects discrete observations");
  ++m_;
  point_buffer_.push_back(point);
  return advance();
}

std::vector<CommitRow> StreamDecoder::advance() {
  diag_.steps = m_;
  diag_.buffer_high_water =
      std::max(diag_.buffer_high_water,
               static_cast<long long>(model_->discrete() ? sym_buffer_.size() : point_buffer_.size()));

  // one delta step
  if (m_ == 1) {
    if (model_->discrete()) {
      for (int y = 1; y <= ns_; ++y) delta_[y - 1] = model_->initial_log(sym_buffer_.front(), y);
    } else {
      for (int y = 1; y <= ns_; ++y) delta_[y - 1] = model_->initial_log(point_buffer_.front(), y);
    }
  } else {
    std::vector<double> step;
    fill_step(m_, step);
    std::vector<double> next(ns_, kLogZero);
    for (int y = 1; y <= ns_; ++y) {
      double best = kLogZero;
      for (int yp = 1; yp <= ns_; ++yp) {
        best = std::max(best, delta_[yp - 1] + step[static_cast<std::size_t>(yp - 1) * ns_ + (y - 1)]);
      }
      next[y - 1] = best;
    }
    delta_ = std::move(next);
    step_hist_.push_back(std::move(step));
    if (static_cast<int>(step_hist_.size()) > config_.order) step_hist_.pop_front();
  }
  const double top = *std::max_element(delta_.begin(), delta_.end());
  if (top == kLogZero) {
    diag_.zero_likelihood = true;
    throw ZeroLikelihoodError("no positive-probability hidden path at time " + std::to_string(m_));
  }
  for (double& v : delta_) v -= top;
  delta_offset_ += top;
  delta_hist_.push_back(delta_);
  if (static_cast<int>(delta_hist_.size()) > config_.order + 1) delta_hist_.pop_front();

  std::vector<CommitRow> emitted;
  const long long t = m_ - config_.order;
  const bool window_ready = t >= 1 && static_cast<int>(delta_hist_.size()) == config_.order + 1;
  const bool gap_ok = anchor_time_ == 0 || t >= anchor_time_ + sep_;
  if (window_ready && t > anchor_time_ && gap_ok) {
    SegMatrix<LogDomain> seg = SegMatrix<LogDomain>::identity(ns_, static_cast<int>(t));
    for (const auto& s : step_hist_) {
      SegMatrix<LogDomain> stepm;
      stepm.ns = ns_;
      stepm.a = seg.b;
      stepm.b = seg.b + 1;
      stepm.m = s;
      seg = maxplus(seg, stepm);
    }
    const auto rep = detect_node_from<LogDomain>(delta_hist_.front(), seg, static_cast<int>(t));
    const auto& states = config_.require_strong ? rep.strong_states : rep.node_states;
    if (!states.empty()) {
      ++diag_.nodes_seen;
      emitted = commit_piece(t, states.front(), false);
    }
  }

  // overflow policy
  if (config_.max_buffer) {
    const long long size =
        static_cast<long long>(model_->discrete() ? sym_buffer_.size() : point_buffer_.size());
    if (size > *config_.max_buffer) {
      if (config_.overflow == DecoderConfig::OverflowPolicy::Error) {
        throw GuardError("decoder buffer exceeded max_buffer = " + std::to_string(*config_.max_buffer));
      }
      if (t > anchor_time_ && t >= 1 && window_ready) {
        int best = 1;
        for (int y = 2; y <= ns_; ++y) {
          if (delta_hist_.front()[y - 1] > delta_hist_.front()[best - 1]) best = y;
        }
        auto rows = commit_piece(t, best, true);
        emitted.insert(emitted.end(), rows.begin(), rows.end());
        diag_.forced_commits = true;
      }
    }
  }
  return emitted;
}

std::vector<CommitRow> StreamDecoder::commit_piece(long long t, int state, bool forced) {
  const long long a = anchor_time_ == 0 ? 1 : anchor_time_;
  const ObsSeq piece = buffer_slice(a, t);
  const std::optional<int> start =
      anchor_time_ == 0 ? std::nullopt : std::optional<int>(anchor_state_);
  const auto dec = constrained_path<LogDomain>(*model_, piece, start, state,
                                               /*include_initial=*/anchor_time_ == 0, config_.tie);
  if (dec.zero_likelihood) {
    diag_.zero_likelihood = true;
    throw ZeroLikelihoodError(
        "pinned piece has zero likelihood; committed nodes closer than the window order can be "
        "incompatible");
  }
  std::vector<CommitRow> rows;
  const long long first_emitted = anchor_time_ == 0 ? a : a + 1;
  for (long long u = first_emitted; u <= t; ++u) {
    rows.push_back(CommitRow{u, dec.path[static_cast<std::size_t>(u - a)], forced});
  }
  committed_ll_ += dec.likelihood;
  anchor_time_ = t;
  anchor_state_ = state;
  ++diag_.commits;
  diag_.committed_length = t;
  diag_.committed_log_likelihood = committed_ll_;

  // drop observations strictly before the new anchor
  while (buffer_start_ < t) {
    if (model_->discrete()) {
      sym_buffer_.pop_front();
    } else {
      point_buffer_.pop_front();
    }
    ++buffer_start_;
  }
  return rows;
}

FlushResult StreamDecoder::flush() const {
  FlushResult out;
  out.diagnostics = diag_;
  if (m_ == 0) return out;

  const long long a = anchor_time_ == 0 ? 1 : anchor_time_;
  const ObsSeq tail = buffer_slice(a, m_);
  const std::optional<int> start =
      anchor_time_ == 0 ? std::nullopt : std::optional<int>(anchor_state_);
  const auto dec = constrained_path<LogDomain>(*model_, tail, start, std::nullopt,
                                               /*include_initial=*/anchor_time_ == 0, config_.tie);
  if (dec.zero_likelihood) {
    out.total_log_likelihood = kLogZero;
    out.diagnostics.zero_likelihood = true;
    return out;
  }
  const long long first = anchor_time_ == 0 ? a : a + 1;
  for (long long u = first; u <= m_; ++u) {
    out.provisional.push_back(CommitRow{u, dec.path[static_cast<std::size_t>(u - a)], false});
  }
  out.total_log_likelihood = committed_ll_ + dec.likelihood;
  return out;
}

}  // namespace pmm
