#pragma once

#include <cassert>
#include <vector>

#include <Eigen/Dense>

#include "pmm/errors.hpp"

namespace pmm {

// Observation sequence over either a finite alphabet (1-based symbols) or
// R^d. Times are 1-based throughout the public API.
class ObsSeq {
 public:
  ObsSeq() = default;

  static ObsSeq discrete(std::vector<int> symbols) {
    ObsSeq s;
    s.discrete_ = true;
    s.symbols_ = std::move(symbols);
    return s;
  }
  static ObsSeq euclidean(std::vector<Eigen::VectorXd> points) {
    ObsSeq s;
    s.discrete_ = false;
    s.points_ = std::move(points);
    return s;
  }

  bool is_discrete() const { return discrete_; }
  int size() const {
    return static_cast<int>(discrete_ ? symbols_.size() : points_.size());
  }
  bool empty() const { return size() == 0; }

  int symbol(int t) const {
    assert(discrete_ && t >= 1 && t <= size());
    return symbols_[static_cast<std::size_t>(t - 1)];
  }
  const Eigen::VectorXd& point(int t) const {
    assert(!discrete_ && t >= 1 && t <= size());
    return points_[static_cast<std::size_t>(t - 1)];
  }

  const std::vector<int>& symbols() const { return symbols_; }
  const std::vector<Eigen::VectorXd>& points() const { return points_; }

  void push_back_symbol(int x) {
    assert(discrete_ || empty());
    discrete_ = true;
    symbols_.push_back(x);
  }
  void push_back_point(Eigen::VectorXd x) {
    assert(!discrete_ || empty());
    discrete_ = false;
    points_.push_back(std::move(x));
  }

  // closed 1-based range [a, b]
  ObsSeq slice(int a, int b) const {
    assert(1 <= a && a <= b && b <= size());
    if (discrete_) {
      return discrete(std::vector<int>(symbols_.begin() + (a - 1), symbols_.begin() + b));
    }
    return euclidean(std::vector<Eigen::VectorXd>(points_.begin() + (a - 1), points_.begin() + b));
  }

 private:
  bool discrete_ = true;
  std::vector<int> symbols_;
  std::vector<Eigen::VectorXd> points_;
};

// One simulated run: observations plus the hidden states that produced them.
struct Trajectory {
  ObsSeq observations;
  std::vector<int> hidden;  // 1-based state labels, same length
};

}  // namespace pmm
