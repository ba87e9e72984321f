#include "bufchem/interval_set.hpp"

#include <algorithm>

namespace bufchem {

IntervalSet::IntervalSet(std::vector<OpenInterval> pieces) {
  std::erase_if(pieces, [](const OpenInterval& p) { return !(p.hi > p.lo); });
  std::sort(pieces.begin(), pieces.end(),
            [](const OpenInterval& a, const OpenInterval& b) { return a.lo < b.lo; });
  for (const auto& p : pieces) {
    // touching open intervals stay separate: the shared endpoint is excluded
    if (!components_.empty() && p.lo < components_.back().hi) {
      components_.back().hi = std::max(components_.back().hi, p.hi);
    } else {
      components_.push_back(p);
    }
  }
}

bool IntervalSet::contains(double x) const noexcept {
  return std::any_of(components_.begin(), components_.end(),
                     [x](const OpenInterval& c) { return c.contains(x); });
}

}  // namespace bufchem
