#pragma once

// Method of types for cyclic empirical measures: cardinality bounds on type
// classes, the achievability criterion for count vectors, and nearest
// achievable measures.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <span>
#include <string_view>
#include <vector>

#include "mldp/census.hpp"
#include "mldp/combinatorics.hpp"
#include "mldp/distribution.hpp"
#include "mldp/empirical.hpp"
#include "mldp/error.hpp"
#include "mldp/information.hpp"

namespace mldp {

enum class Verdict { pass, fail, unverified };

inline std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "PASS";
        case Verdict::fail: return "FAIL";
        case Verdict::unverified: return "UNVERIFIED";
    }
    return "FAIL";
}

/// Log of n^(s+1) log(l+1): the polynomial bound on |E(l, n, s+1)|.
inline double log_census_size_bound(std::size_t n, std::size_t s, std::size_t l) {
    return static_cast<double>(ipow(n, s + 1)) * std::log(static_cast<double>(l) + 1.0);
}

/// 2 (s+3) n^(s+1) / l: worst-case l1 distance from a stationary law to E(l, n, s+1).
inline double nearest_distance_bound(std::size_t n, std::size_t s, std::size_t l) {
    return 2.0 * static_cast<double>(s + 3) * static_cast<double>(ipow(n, s + 1)) / static_cast<double>(l);
}

// ---------------------------------------------------------------------------
// Permutation (follower-set) bounds
// ---------------------------------------------------------------------------

/// prod (lbar_i - 1)! / prod l_ij!  <=  |T|  <=  l prod lbar_i! / prod l_ij!
///
/// lbar are the node degrees over A^s; nodes of degree zero are omitted. The
/// exact integer form is kept for l <= 20, log-gamma is used throughout.
struct PermutationBounds {
    double log_lower = 0.0;
    double log_upper = 0.0;
    bool exact = false;
    UInt128 lower_numerator = 0;
    UInt128 upper_numerator = 0;
    UInt128 denominator = 1;

    bool lower_holds(std::uint64_t cardinality, double slack = 1e-9) const {
        if (exact) return lower_numerator <= static_cast<UInt128>(cardinality) * denominator;
        return log_lower <= std::log(static_cast<double>(cardinality)) + slack;
    }
    bool upper_holds(std::uint64_t cardinality, double slack = 1e-9) const {
        if (exact) return static_cast<UInt128>(cardinality) * denominator <= upper_numerator;
        return std::log(static_cast<double>(cardinality)) <= log_upper + slack;
    }
};

inline PermutationBounds permutation_bounds(const EmpiricalMeasure& zeta) {
    if (zeta.k() < 2) throw domain_error("permutation_bounds requires k >= 2");
    if (!is_balanced(zeta)) throw domain_error("permutation_bounds requires stationary counts");
    const auto degrees = reduce_counts(zeta);
    const std::uint64_t l = zeta.total();

    PermutationBounds b;
    b.exact = l <= kExactFactorialLimit;
    double log_den = 0.0;
    for (Count c : zeta.counts()) {
        log_den += log_factorial(c);
        if (b.exact) b.denominator *= exact_factorial(c);
    }
    double log_lower_num = 0.0;
    double log_upper_num = std::log(static_cast<double>(l));
    if (b.exact) {
        b.lower_numerator = 1;
        b.upper_numerator = l;
    }
    for (Count d : degrees.counts()) {
        if (d == 0) continue;
        log_lower_num += log_factorial(d - 1);
        log_upper_num += log_factorial(d);
        if (b.exact) {
            b.lower_numerator *= exact_factorial(d - 1);
            b.upper_numerator *= exact_factorial(d);
        }
    }
    b.log_lower = log_lower_num - log_den;
    b.log_upper = log_upper_num - log_den;
    return b;
}

// ---------------------------------------------------------------------------
// Achievability
// ---------------------------------------------------------------------------

/// zeta is the cyclic empirical measure of some path iff its counts are
/// balanced and the multigraph on A^s (l_{ij..k} edges from ij.. to j..k) has
/// a single strongly connected component containing every node of positive
/// degree.
inline bool is_achievable(const EmpiricalMeasure& zeta) {
    if (zeta.k() < 2) throw domain_error("is_achievable requires k >= 2");
    if (!is_balanced(zeta)) return false;
    const std::size_t n = zeta.n();
    const std::size_t k = zeta.k();
    const std::size_t nodes = ipow(n, k - 1);

    std::vector<std::vector<std::size_t>> fwd(nodes), rev(nodes);
    std::vector<bool> active(nodes, false);
    for (std::size_t idx = 0; idx < zeta.counts().size(); ++idx) {
        if (zeta[idx] == 0) continue;
        const std::size_t from = prefix_index(idx, n);
        const std::size_t to = suffix_index(idx, n, k);
        fwd[from].push_back(to);
        rev[to].push_back(from);
        active[from] = active[to] = true;
    }
    const auto root = static_cast<std::size_t>(std::find(active.begin(), active.end(), true) - active.begin());
    if (root == nodes) return false;

    // Kosaraju-style check: everything active reachable from root both ways.
    auto reaches_all = [&](const std::vector<std::vector<std::size_t>>& adj) {
        std::vector<bool> seen(nodes, false);
        std::deque<std::size_t> queue{root};
        seen[root] = true;
        while (!queue.empty()) {
            const auto v = queue.front();
            queue.pop_front();
            for (auto w : adj[v])
                if (!seen[w]) {
                    seen[w] = true;
                    queue.push_back(w);
                }
        }
        for (std::size_t v = 0; v < nodes; ++v)
            if (active[v] && !seen[v]) return false;
        return true;
    };
    return reaches_all(fwd) && reaches_all(rev);
}

// ---------------------------------------------------------------------------
// Type-class sandwich over a census
// ---------------------------------------------------------------------------

struct BoundsRow {
    std::vector<Count> counts;
    std::uint64_t cardinality = 0;
    double conditional_entropy = 0.0;
    double log_lower = 0.0;
    double log_cardinality = 0.0;
    double log_upper = 0.0;
    bool sandwich_ok = false;
    bool permutation_ok = false;
    bool achievable = false;
};

struct BoundsReport {
    std::size_t n = 0;
    std::size_t l = 0;
    std::size_t s = 0;
    /// The cardinality bounds are stated for l >= n.
    bool hypothesis_met = false;
    std::vector<BoundsRow> rows;

    std::size_t failures() const {
        return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const BoundsRow& r) {
            return !(r.sandwich_ok && r.permutation_ok && r.achievable);
        }));
    }
    Verdict verdict() const {
        if (failures() != 0) return Verdict::fail;
        return hypothesis_met ? Verdict::pass : Verdict::unverified;
    }
};

/// (2l)^(-n^(s+1)) e^{l H_c(zeta)} <= |T(zeta)| <= l e^{l H_c(zeta)} for every
/// class, compared in log space with `slack`; also checks the permutation
/// bounds and that every census key is achievable.
inline BoundsReport census_bounds_check(const TypeCensus& census, double slack = 1e-9) {
    BoundsReport report;
    report.n = census.n();
    report.l = census.l();
    report.s = census.s();
    report.hypothesis_met = census.l() >= census.n();
    const double l = static_cast<double>(census.l());
    const double poly = static_cast<double>(ipow(census.n(), census.s() + 1)) * std::log(2.0 * l);

    report.rows.reserve(census.size());
    for (const auto& e : census.entries()) {
        const auto zeta = census.measure(e);
        BoundsRow row;
        row.counts = e.counts;
        row.cardinality = e.cardinality;
        row.conditional_entropy = conditional_entropy(zeta.as_distribution());
        row.log_cardinality = std::log(static_cast<double>(e.cardinality));
        row.log_lower = l * row.conditional_entropy - poly;
        row.log_upper = std::log(l) + l * row.conditional_entropy;
        row.sandwich_ok = row.log_lower <= row.log_cardinality + slack && row.log_cardinality <= row.log_upper + slack;
        const auto perm = permutation_bounds(zeta);
        row.permutation_ok = perm.lower_holds(e.cardinality, slack) && perm.upper_holds(e.cardinality, slack);
        row.achievable = is_achievable(zeta);
        report.rows.push_back(std::move(row));
    }
    return report;
}

// ---------------------------------------------------------------------------
// Nearest achievable measure
// ---------------------------------------------------------------------------

struct NearestEmpirical {
    EmpiricalMeasure measure;
    double distance;
    double bound;
};

/// Exact l1 minimizer of |psi - zeta| over the census keys. Distances within
/// 1e-12 count as ties and resolve to the lexicographically smaller counts.
inline NearestEmpirical nearest_empirical(const KTupleDistribution& psi, const TypeCensus& census) {
    if (psi.n() != census.n() || psi.k() != census.k()) throw domain_error("nearest_empirical: shape mismatch");
    if (census.size() == 0) throw domain_error("nearest_empirical: empty census");
    const double l = static_cast<double>(census.l());
    const CensusEntry* best = nullptr;
    double best_d = kInfinity;
    for (const auto& e : census.entries()) {
        double d = 0.0;
        for (std::size_t i = 0; i < psi.size(); ++i) d += std::abs(psi[i] - static_cast<double>(e.counts[i]) / l);
        if (d < best_d - 1e-12) {
            best_d = d;
            best = &e;
        }
    }
    return {census.measure(*best), best_d, nearest_distance_bound(census.n(), census.s(), census.l())};
}

inline NearestEmpirical nearest_empirical(const KTupleDistribution& psi, std::size_t l,
                                          const EnumerationOptions& options = {}) {
    if (psi.k() < 2) throw domain_error("nearest_empirical requires k >= 2");
    const auto flag = check_stationary(psi);
    if (!flag.is_stationary) throw validation_error("nearest_empirical requires a stationary psi", flag.max_violation);
    return nearest_empirical(psi, enumerate_census(l, psi.n(), psi.k() - 1, options));
}

}  // namespace mldp
