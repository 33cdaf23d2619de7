#pragma once

#include <cstddef>
#include <vector>

#include "eprenorm/error.hpp"

namespace eprenorm {

/// Closed, uniformly spaced grid [lo, hi] with `points` nodes.
class LinearGrid {
 public:
  LinearGrid(double lo, double hi, std::size_t points) : lo_(lo), hi_(hi), points_(points) {
    if (points < 2) throw Error(ErrorCode::InvalidParameter, "grid needs at least 2 points");
    if (!(hi > lo)) throw Error(ErrorCode::InvalidParameter, "grid upper bound must exceed lower bound");
  }

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  std::size_t size() const noexcept { return points_; }
  double step() const noexcept { return (hi_ - lo_) / static_cast<double>(points_ - 1); }

  double operator[](std::size_t i) const noexcept {
    // pin the last node exactly to hi
    return i + 1 == points_ ? hi_ : lo_ + step() * static_cast<double>(i);
  }

  std::vector<double> values() const {
    std::vector<double> v(points_);
    for (std::size_t i = 0; i < points_; ++i) v[i] = (*this)[i];
    return v;
  }

 private:
  double lo_;
  double hi_;
  std::size_t points_;
};

}  // namespace eprenorm
