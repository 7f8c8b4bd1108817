#pragma once

// Exhaustive type-class census: every path in A^l is mapped to its cyclic
// empirical measure and paths are grouped by exact integer counts.
//
// Enumeration is split into n^p prefix partitions, where p depends only on
// (n, l). Workers take partitions in any order; partial results are merged in
// prefix order afterwards, so the census (including floating-point class
// probabilities) does not depend on the worker count.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "mldp/empirical.hpp"
#include "mldp/error.hpp"
#include "mldp/markov_model.hpp"
#include "mldp/numeric.hpp"
#include "mldp/tuple_index.hpp"

namespace mldp {

inline constexpr std::uint64_t kDefaultEnumerationBudget = 100'000'000;

struct EnumerationOptions {
    /// Maximum n^l * l path-steps.
    std::uint64_t budget = kDefaultEnumerationBudget;
    /// 0 means std::thread::hardware_concurrency().
    unsigned workers = 0;
};

struct CensusEntry {
    std::vector<Count> counts;
    std::uint64_t cardinality = 0;
    /// Pr{nu(X_1^l) = zeta} under the model; only set for weighted censuses.
    std::optional<double> probability;

    friend bool operator==(const CensusEntry&, const CensusEntry&) = default;
};

/// Map from each zeta in E(l, n, s+1) to |T(zeta, l, s+1)|, sorted
/// lexicographically by count vector.
class TypeCensus {
public:
    TypeCensus(std::size_t n, std::size_t l, std::size_t s, std::vector<CensusEntry> entries)
        : n_(n), l_(l), s_(s), entries_(std::move(entries)) {}

    std::size_t n() const noexcept { return n_; }
    std::size_t l() const noexcept { return l_; }
    std::size_t s() const noexcept { return s_; }
    std::size_t k() const noexcept { return s_ + 1; }
    std::size_t size() const noexcept { return entries_.size(); }
    const std::vector<CensusEntry>& entries() const noexcept { return entries_; }
    bool weighted() const { return !entries_.empty() && entries_.front().probability.has_value(); }

    const CensusEntry* find(std::span<const Count> counts) const {
        auto it = std::lower_bound(entries_.begin(), entries_.end(), counts, [](const CensusEntry& e, std::span<const Count> c) {
            return std::lexicographical_compare(e.counts.begin(), e.counts.end(), c.begin(), c.end());
        });
        if (it == entries_.end() || !std::equal(it->counts.begin(), it->counts.end(), counts.begin(), counts.end()))
            return nullptr;
        return &*it;
    }

    bool contains(std::span<const Count> counts) const { return find(counts) != nullptr; }

    EmpiricalMeasure measure(const CensusEntry& e) const { return {n_, k(), e.counts}; }

    /// Sum of all class cardinalities; equals n^l for a complete census.
    std::uint64_t total_paths() const {
        std::uint64_t t = 0;
        for (const auto& e : entries_) t += e.cardinality;
        return t;
    }

    friend bool operator==(const TypeCensus&, const TypeCensus&) = default;

private:
    std::size_t n_;
    std::size_t l_;
    std::size_t s_;
    std::vector<CensusEntry> entries_;
};

/// n^l * l, saturating at uint64 max.
inline std::uint64_t enumeration_cost(std::size_t n, std::size_t l) {
    constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t paths = 1;
    for (std::size_t t = 0; t < l; ++t) {
        if (paths > kMax / n) return kMax;
        paths *= n;
    }
    if (l != 0 && paths > kMax / l) return kMax;
    return paths * l;
}

namespace detail {

struct ClassAccumulator {
    std::uint64_t cardinality = 0;
    NeumaierSum probability;
};

using PartialCensus = std::map<std::vector<Count>, ClassAccumulator>;

/// Prefix length for partitioning: enough partitions to spread work, fixed by (n, l).
inline std::size_t partition_prefix_length(std::size_t n, std::size_t l) {
    if (n <= 1) return 0;
    std::size_t p = 0;
    std::size_t parts = 1;
    while (p < l && parts < 256) {
        parts *= n;
        ++p;
    }
    return p;
}

inline void enumerate_partition(std::size_t n, std::size_t l, std::size_t s, std::size_t prefix_len,
                                std::size_t prefix, const MarkovModel* model, PartialCensus& out) {
    std::vector<Symbol> path(l, 0);
    auto prefix_digits = tuple_of(prefix, n, prefix_len);
    std::copy(prefix_digits.begin(), prefix_digits.end(), path.begin());
    std::vector<Count> counts(ipow(n, s + 1), 0);
    while (true) {
        detail::cyclic_counts(path, n, s, counts);
        auto& acc = out[counts];
        ++acc.cardinality;
        if (model != nullptr) acc.probability.add(std::exp(detail::path_log_probability(*model, path)));

        // Odometer over the free suffix positions.
        std::size_t pos = l;
        while (pos > prefix_len) {
            --pos;
            if (++path[pos] < n) break;
            path[pos] = 0;
            if (pos == prefix_len) return;
        }
        if (pos == prefix_len && l == prefix_len) return;
    }
}

inline TypeCensus run_census(std::size_t n, std::size_t l, std::size_t s, const MarkovModel* model,
                             const EnumerationOptions& options) {
    if (n == 0) throw domain_error("alphabet size must be >= 1");
    if (l == 0) throw domain_error("path length must be >= 1");
    if (s == 0) throw domain_error("memory s must be >= 1");
    const std::uint64_t cost = enumeration_cost(n, l);
    if (cost > options.budget) throw budget_exceeded(cost, options.budget);

    const std::size_t prefix_len = partition_prefix_length(n, l);
    const std::size_t partitions = ipow(n, prefix_len);
    std::vector<PartialCensus> partial(partitions);

    unsigned workers = options.workers != 0 ? options.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, partitions));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        try {
            for (std::size_t p = next.fetch_add(1); p < partitions; p = next.fetch_add(1))
                enumerate_partition(n, l, s, prefix_len, p, model, partial[p]);
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);

    PartialCensus merged;
    for (auto& part : partial) {
        for (auto& [key, acc] : part) {
            auto& dst = merged[key];
            dst.cardinality += acc.cardinality;
            dst.probability.merge(acc.probability);
        }
        part.clear();
    }

    std::vector<CensusEntry> entries;
    entries.reserve(merged.size());
    for (auto& [key, acc] : merged) {
        CensusEntry e{key, acc.cardinality, std::nullopt};
        if (model != nullptr) e.probability = acc.probability.value();
        entries.push_back(std::move(e));
    }
    return {n, l, s, std::move(entries)};
}

}  // namespace detail

/// E(l, n, s+1) with exact type-class cardinalities, by visiting all n^l paths.
inline TypeCensus enumerate_census(std::size_t l, std::size_t n, std::size_t s, const EnumerationOptions& options = {}) {
    return detail::run_census(n, l, s, nullptr, options);
}

/// As enumerate_census, additionally accumulating each class probability
/// sum_{x in T(zeta)} Pr{X_1^l = x} under `model` (s taken from the model).
inline TypeCensus enumerate_weighted_census(const MarkovModel& model, std::size_t l,
                                            const EnumerationOptions& options = {}) {
    if (l < model.s()) throw domain_error("path length must be >= s");
    return detail::run_census(model.n(), l, model.s(), &model, options);
}

}  // namespace mldp
