#pragma once

#include <cmath>

namespace fqlens {

/// Neumaier compensated accumulator.
///
/// Partial sums built over disjoint ranges can be combined with `merge`; the
/// result depends only on the order of `add`/`merge` calls, so a fixed
/// partition order gives bit-stable totals regardless of how many workers
/// produced the partials.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }

    void merge(const CompensatedSum& other) noexcept {
        add(other.sum_);
        comp_ += other.comp_;
    }

    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace fqlens
