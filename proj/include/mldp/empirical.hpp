#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "mldp/distribution.hpp"
#include "mldp/error.hpp"
#include "mldp/sample_path.hpp"
#include "mldp/tuple_index.hpp"

namespace mldp {

using Count = std::uint32_t;

/// Integer k-tuple counts of a path; the probability vector is counts / total.
class EmpiricalMeasure {
public:
    EmpiricalMeasure(std::size_t n, std::size_t k, std::vector<Count> counts) : n_(n), k_(k), counts_(std::move(counts)) {
        if (n == 0 || k == 0) throw domain_error("empirical measure needs n >= 1 and k >= 1");
        if (counts_.size() != ipow(n, k)) throw domain_error("count vector must have n^k entries");
        total_ = std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
        if (total_ == 0) throw domain_error("empirical measure has no observations");
    }

    std::size_t n() const noexcept { return n_; }
    std::size_t k() const noexcept { return k_; }
    /// Sum of counts: l for the cyclic and singleton estimators, l - 1 for theta.
    std::uint64_t total() const noexcept { return total_; }
    std::span<const Count> counts() const noexcept { return counts_; }
    Count operator[](std::size_t i) const { return counts_[i]; }

    KTupleDistribution as_distribution() const {
        std::vector<double> p(counts_.size());
        const double denom = static_cast<double>(total_);
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = static_cast<double>(counts_[i]) / denom;
        return {n_, k_, std::move(p)};
    }

    friend bool operator==(const EmpiricalMeasure&, const EmpiricalMeasure&) = default;
    friend auto operator<=>(const EmpiricalMeasure& a, const EmpiricalMeasure& b) { return a.counts_ <=> b.counts_; }

private:
    std::size_t n_;
    std::size_t k_;
    std::vector<Count> counts_;
    std::uint64_t total_ = 0;
};

/// Sum over the last symbol, exactly.
inline EmpiricalMeasure reduce_counts(const EmpiricalMeasure& m) {
    if (m.k() < 2) throw domain_error("reduce_counts requires k >= 2");
    std::vector<Count> r(ipow(m.n(), m.k() - 1), 0);
    for (std::size_t idx = 0; idx < m.counts().size(); ++idx) r[prefix_index(idx, m.n())] += m[idx];
    return {m.n(), m.k() - 1, std::move(r)};
}

/// Exact integer balance: sum over the last symbol equals sum over the first,
/// at order k and every lower order.
inline bool counts_balanced(std::span<const Count> counts, std::size_t n, std::size_t k) {
    std::vector<Count> cur(counts.begin(), counts.end());
    for (std::size_t order = k; order >= 2; --order) {
        const std::size_t m = ipow(n, order - 1);
        std::vector<std::int64_t> diff(m, 0);
        std::vector<Count> last(m, 0);
        for (std::size_t idx = 0; idx < cur.size(); ++idx) {
            diff[prefix_index(idx, n)] += cur[idx];
            diff[suffix_index(idx, n, order)] -= cur[idx];
            last[prefix_index(idx, n)] += cur[idx];
        }
        for (auto d : diff)
            if (d != 0) return false;
        cur = std::move(last);
    }
    return true;
}

inline bool is_balanced(const EmpiricalMeasure& m) { return counts_balanced(m.counts(), m.n(), m.k()); }

/// phi_j = #{t : x_t = j} / l.
inline EmpiricalMeasure singleton_empirical(const SamplePath& x) {
    std::vector<Count> c(x.n(), 0);
    for (Symbol s : x.symbols()) ++c[s];
    return {x.n(), 1, std::move(c)};
}

/// theta: consecutive pairs of x with denominator l - 1 and no wrap-around.
inline EmpiricalMeasure doublet_empirical_raw(const SamplePath& x) {
    if (x.length() < 2) throw domain_error("doublet_empirical_raw requires l >= 2");
    const std::size_t n = x.n();
    std::vector<Count> c(n * n, 0);
    for (std::size_t t = 0; t + 1 < x.length(); ++t) ++c[x[t] * n + x[t + 1]];
    return {n, 2, std::move(c)};
}

namespace detail {

/// Fills `out` (size n^(s+1), zeroed here) with the cyclic window counts of x.
inline void cyclic_counts(std::span<const Symbol> x, std::size_t n, std::size_t s, std::vector<Count>& out) {
    const std::size_t l = x.size();
    std::fill(out.begin(), out.end(), Count{0});
    const std::size_t window_mod = ipow(n, s);
    std::size_t idx = 0;
    for (std::size_t t = 0; t < s; ++t) idx = idx * n + x[t % l];
    for (std::size_t t = 0; t < l; ++t) {
        idx = (idx % window_mod) * n + x[(t + s) % l];
        ++out[idx];
    }
}

}  // namespace detail

/// nu: (s+1)-tuple counts over the l windows of the periodic extension
/// x_1..x_l x_1..x_s, so every path gets exactly balanced counts.
inline EmpiricalMeasure cyclic_empirical(const SamplePath& x, std::size_t s) {
    if (s == 0) throw domain_error("cyclic_empirical requires s >= 1");
    std::vector<Count> c(ipow(x.n(), s + 1), 0);
    detail::cyclic_counts(x.symbols(), x.n(), s, c);
    return {x.n(), s + 1, std::move(c)};
}

/// S(i): successors of each symbol i, in order, along the path with its ghost
/// transition x_l -> x_1.
struct FollowerSets {
    std::vector<std::vector<Symbol>> sets;

    std::size_t n() const noexcept { return sets.size(); }
    std::size_t total() const {
        std::size_t t = 0;
        for (const auto& s : sets) t += s.size();
        return t;
    }
    friend bool operator==(const FollowerSets&, const FollowerSets&) = default;
};

inline FollowerSets follower_sets(const SamplePath& x) {
    FollowerSets f{std::vector<std::vector<Symbol>>(x.n())};
    for (std::size_t t = 0; t < x.length(); ++t) f.sets[x[t]].push_back(x.cyclic(t + 1));
    return f;
}

/// Replays the walk from `start`, consuming each S(v) in order. Fails when some
/// S(v) runs out early or the walk does not close at `start`.
inline std::optional<SamplePath> reconstruct_path(const FollowerSets& f, Symbol start) {
    const std::size_t n = f.n();
    if (start >= n) throw domain_error("start symbol out of range");
    const std::size_t l = f.total();
    if (l == 0) return std::nullopt;
    std::vector<std::size_t> cursor(n, 0);
    std::vector<Symbol> out;
    out.reserve(l);
    Symbol v = start;
    for (std::size_t step = 0; step < l; ++step) {
        out.push_back(v);
        if (cursor[v] >= f.sets[v].size()) return std::nullopt;
        const Symbol next = f.sets[v][cursor[v]++];
        if (next >= n) throw domain_error("follower symbol out of range");
        v = next;
    }
    if (v != start) return std::nullopt;
    return SamplePath(n, std::move(out));
}

}  // namespace mldp
