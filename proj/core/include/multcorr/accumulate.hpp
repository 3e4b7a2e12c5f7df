#pragma once

#include <cmath>

namespace multcorr {

// Neumaier-compensated accumulator.  The logarithmic weights 1/n span many
// orders of magnitude inside a single window, and discrepancy measurements
// are asserted down to 1e-10, so plain summation is not good enough.
class NeumaierSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  // Fold another accumulator in; used by the ordered segment merge.
  void merge(const NeumaierSum& other) {
    add(other.sum_);
    add(other.comp_);
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace multcorr
