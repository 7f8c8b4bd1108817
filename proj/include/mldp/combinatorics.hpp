#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>

#include "mldp/empirical.hpp"
#include "mldp/error.hpp"

namespace mldp {

__extension__ using UInt128 = unsigned __int128;

/// Largest argument for which factorials are kept as exact integers.
inline constexpr std::size_t kExactFactorialLimit = 20;

inline UInt128 exact_factorial(std::uint64_t m) {
    if (m > 33) throw domain_error("exact factorial overflows 128 bits");
    UInt128 r = 1;
    for (std::uint64_t i = 2; i <= m; ++i) r *= i;
    return r;
}

inline double log_factorial(std::uint64_t m) { return std::lgamma(static_cast<double>(m) + 1.0); }

/// Log-space bounds on the multinomial coefficient C^m_{m_1..m_n}:
/// (2m)^-(n-1) e^{m H} <= C <= e^{m H}, H the entropy of m_vec / m.
struct MultinomialBounds {
    double log_lower = 0.0;
    double log_exact = 0.0;
    double log_upper = 0.0;
    /// False when m < n, where the bound's hypothesis is not met.
    bool verified = true;

    bool holds(double slack = 1e-9) const { return log_lower <= log_exact + slack && log_exact <= log_upper + slack; }
};

inline MultinomialBounds multinomial_bounds(std::span<const Count> m_vec) {
    if (m_vec.empty()) throw domain_error("multinomial_bounds needs at least one category");
    const std::uint64_t m = std::accumulate(m_vec.begin(), m_vec.end(), std::uint64_t{0});
    const std::size_t n = m_vec.size();
    if (m == 0) throw domain_error("multinomial_bounds needs m >= 1");

    const double md = static_cast<double>(m);
    double mh = 0.0;  // m * H(m_vec / m) = m log m - sum m_i log m_i
    double log_exact = log_factorial(m);
    for (Count c : m_vec) {
        log_exact -= log_factorial(c);
        if (c > 0) mh -= static_cast<double>(c) * std::log(static_cast<double>(c) / md);
    }
    MultinomialBounds b;
    b.log_exact = log_exact;
    b.log_upper = mh;
    b.log_lower = mh - static_cast<double>(n - 1) * std::log(2.0 * md);
    b.verified = m >= n;
    return b;
}

}  // namespace mldp
