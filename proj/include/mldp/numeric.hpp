#pragma once

#include <algorithm>
#include <cmath>

namespace mldp {

/// Compensated (Neumaier) accumulator. Merging two partial sums in a fixed
/// order gives run-to-run identical totals.
class NeumaierSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }

    void merge(const NeumaierSum& other) {
        add(other.sum_);
        add(other.comp_);
    }

    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Agreement of analytically equal quantities: relative 1e-12, absolute floor 1e-14.
/// Infinite values agree only with the same infinity.
inline bool approx_equal(double a, double b, double rel = 1e-12, double abs_floor = 1e-14) {
    if (std::isinf(a) || std::isinf(b)) return a == b;
    return std::abs(a - b) <= std::max(abs_floor, rel * std::max(std::abs(a), std::abs(b)));
}

}  // namespace mldp
