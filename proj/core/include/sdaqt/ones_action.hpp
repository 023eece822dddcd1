#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace sdaqt {

// Result of applying a matrix to the all-ones vector: A*1 = scalar*1 + tail,
// where tail is finitely supported (rows beyond tail.size() get exactly the
// scalar part).  Finite backends use scalar = 0 and a full-length tail.
struct OnesAction {
  double scalar = 0.0;
  std::vector<double> tail;

  double entry(std::size_t i) const {
    return scalar + (i < tail.size() ? tail[i] : 0.0);
  }

  double max_abs_tail() const {
    double m = 0.0;
    for (double t : tail) m = std::max(m, std::abs(t));
    return m;
  }

  // sup_i |(A*1)_i - target|; finite because the tail is finite.
  double deviation_from(double target) const {
    double m = std::abs(scalar - target);
    for (double t : tail) m = std::max(m, std::abs(scalar + t - target));
    return m;
  }

  OnesAction operator+(const OnesAction& o) const {
    OnesAction r;
    r.scalar = scalar + o.scalar;
    r.tail.resize(std::max(tail.size(), o.tail.size()), 0.0);
    for (std::size_t i = 0; i < tail.size(); ++i) r.tail[i] += tail[i];
    for (std::size_t i = 0; i < o.tail.size(); ++i) r.tail[i] += o.tail[i];
    return r;
  }

  OnesAction operator-(const OnesAction& o) const {
    OnesAction r;
    r.scalar = scalar - o.scalar;
    r.tail.resize(std::max(tail.size(), o.tail.size()), 0.0);
    for (std::size_t i = 0; i < tail.size(); ++i) r.tail[i] += tail[i];
    for (std::size_t i = 0; i < o.tail.size(); ++i) r.tail[i] -= o.tail[i];
    return r;
  }
};

}  // namespace sdaqt
