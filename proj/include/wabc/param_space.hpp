#pragma once

#include <limits>
#include <string>
#include <vector>

#include "wabc/types.hpp"

namespace wabc {

// Per-coordinate support; unbounded ends are +-infinity.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
};

struct ParamSpace {
  std::vector<std::string> names;
  std::vector<Interval> supports;

  int dim() const { return static_cast<int>(names.size()); }
  bool contains(const Vector& theta) const {
    if (theta.size() != dim()) return false;
    for (int i = 0; i < dim(); ++i)
      if (!(theta(i) >= supports[i].lo && theta(i) <= supports[i].hi))
        return false;
    return true;
  }
};

}  // namespace wabc
