#pragma once

#include <cstddef>
#include <vector>

namespace bufchem {

struct OpenInterval {
  double lo;
  double hi;

  bool contains(double x) const noexcept { return x > lo && x < hi; }
  double length() const noexcept { return hi - lo; }
};

/// Ordered, pairwise disjoint open intervals.
class IntervalSet {
 public:
  IntervalSet() = default;
  /// Sorts the input and merges overlapping pieces; empty pieces are dropped.
  explicit IntervalSet(std::vector<OpenInterval> pieces);

  const std::vector<OpenInterval>& components() const noexcept { return components_; }
  std::size_t size() const noexcept { return components_.size(); }
  bool empty() const noexcept { return components_.empty(); }
  bool contains(double x) const noexcept;

 private:
  std::vector<OpenInterval> components_;
};

}  // namespace bufchem
