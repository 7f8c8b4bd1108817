#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mldp/error.hpp"
#include "mldp/tuple_index.hpp"

namespace mldp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Absolute tolerance for normalization and for each balance constraint.
inline constexpr double kStationaryTolerance = 1e-12;

/// Probability vector over A^k in lexicographic tuple order.
///
/// Holds the stationary law mu of a chain, empirical measures nu / theta /
/// zeta, singleton frequencies phi (k = 1), and the reduced (k-1)-marginals.
class KTupleDistribution {
public:
    KTupleDistribution(std::size_t n, std::size_t k, std::vector<double> p)
        : n_(n), k_(k), p_(std::move(p)) {
        if (n == 0) throw domain_error("alphabet size must be >= 1");
        if (k == 0) throw domain_error("tuple length must be >= 1");
        if (p_.size() != ipow(n, k))
            throw domain_error("distribution has " + std::to_string(p_.size()) + " entries, expected n^k = " +
                               std::to_string(ipow(n, k)));
        double sum = 0.0;
        for (double v : p_) {
            if (!(v >= 0.0) || !std::isfinite(v)) throw domain_error("distribution entries must be finite and >= 0");
            sum += v;
        }
        if (std::abs(sum - 1.0) > kStationaryTolerance)
            throw domain_error("distribution entries sum to " + format_real(sum) + ", expected 1");
    }

    static KTupleDistribution uniform(std::size_t n, std::size_t k) {
        const std::size_t m = ipow(n, k);
        return {n, k, std::vector<double>(m, 1.0 / static_cast<double>(m))};
    }

    static KTupleDistribution point_mass(std::size_t n, std::size_t k, std::size_t index) {
        std::vector<double> p(ipow(n, k), 0.0);
        p.at(index) = 1.0;
        return {n, k, std::move(p)};
    }

    std::size_t n() const noexcept { return n_; }
    std::size_t k() const noexcept { return k_; }
    std::size_t size() const noexcept { return p_.size(); }
    double operator[](std::size_t i) const { return p_[i]; }
    double at(std::span<const Symbol> tuple) const { return p_[flat_index(tuple, n_)]; }
    std::span<const double> values() const noexcept { return p_; }

    bool strictly_positive() const {
        return std::all_of(p_.begin(), p_.end(), [](double v) { return v > 0.0; });
    }

    friend bool operator==(const KTupleDistribution&, const KTupleDistribution&) = default;

private:
    std::size_t n_;
    std::size_t k_;
    std::vector<double> p_;
};

struct StationaryFlag {
    bool is_stationary = true;
    double max_violation = 0.0;
};

/// Sum over the last symbol: p-bar_i = sum_j p_{ij}.
inline KTupleDistribution marginalize(const KTupleDistribution& p) {
    if (p.k() < 2) throw domain_error("marginalize requires k >= 2");
    std::vector<double> q(ipow(p.n(), p.k() - 1), 0.0);
    for (std::size_t idx = 0; idx < p.size(); ++idx) q[prefix_index(idx, p.n())] += p[idx];
    return {p.n(), p.k() - 1, std::move(q)};
}

/// Sum over the first symbol: sum_j p_{ji}.
inline KTupleDistribution marginalize_first(const KTupleDistribution& p) {
    if (p.k() < 2) throw domain_error("marginalize requires k >= 2");
    std::vector<double> q(ipow(p.n(), p.k() - 1), 0.0);
    for (std::size_t idx = 0; idx < p.size(); ++idx) q[suffix_index(idx, p.n(), p.k())] += p[idx];
    return {p.n(), p.k() - 1, std::move(q)};
}

/// Largest |sum_j p_{ij} - sum_j p_{ji}| over i in A^(k-1), at this order and
/// recursively at every lower order. A k = 1 distribution carries no constraint.
inline StationaryFlag check_stationary(const KTupleDistribution& p, double tolerance = kStationaryTolerance) {
    StationaryFlag flag;
    KTupleDistribution cur = p;
    while (cur.k() >= 2) {
        const auto last = marginalize(cur);
        const auto first = marginalize_first(cur);
        for (std::size_t i = 0; i < last.size(); ++i)
            flag.max_violation = std::max(flag.max_violation, std::abs(last[i] - first[i]));
        cur = last;
    }
    flag.is_stationary = flag.max_violation <= tolerance;
    return flag;
}

inline double l1_distance(const KTupleDistribution& a, const KTupleDistribution& b) {
    if (a.n() != b.n() || a.k() != b.k()) throw domain_error("l1_distance: shape mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
    return d;
}

}  // namespace mldp
