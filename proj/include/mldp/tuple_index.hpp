#pragma once

// Canonical indexing of A^k: symbols are 0..n-1 and the tuple (i_1..i_k)
// maps to sum_t i_t * n^(k-t), i.e. lexicographic order with symbol 0 first.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "mldp/error.hpp"

namespace mldp {

using Symbol = std::uint32_t;

/// Finite symbol set {0, ..., n-1}.
class Alphabet {
public:
    explicit Alphabet(std::size_t n) : n_(n) {
        if (n == 0) throw domain_error("alphabet size must be >= 1");
    }

    std::size_t size() const noexcept { return n_; }
    bool contains(Symbol s) const noexcept { return s < n_; }

    friend bool operator==(const Alphabet&, const Alphabet&) = default;

private:
    std::size_t n_;
};

/// n^k, throwing on overflow of std::size_t.
inline std::size_t ipow(std::size_t n, std::size_t k) {
    std::size_t r = 1;
    for (std::size_t t = 0; t < k; ++t) {
        if (n != 0 && r > std::numeric_limits<std::size_t>::max() / n)
            throw domain_error("n^k overflows");
        r *= n;
    }
    return r;
}

inline std::size_t flat_index(std::span<const Symbol> tuple, std::size_t n) {
    std::size_t idx = 0;
    for (Symbol s : tuple) {
        if (s >= n)
            throw domain_error("symbol " + std::to_string(s) + " out of range for alphabet of size " +
                               std::to_string(n));
        idx = idx * n + s;
    }
    return idx;
}

inline std::size_t flat_index(std::initializer_list<Symbol> tuple, std::size_t n) {
    return flat_index(std::span<const Symbol>(tuple.begin(), tuple.size()), n);
}

/// Inverse of flat_index for tuples of length k.
inline std::vector<Symbol> tuple_of(std::size_t index, std::size_t n, std::size_t k) {
    if (index >= ipow(n, k)) throw domain_error("tuple index out of range");
    std::vector<Symbol> t(k);
    for (std::size_t pos = k; pos-- > 0;) {
        t[pos] = static_cast<Symbol>(index % n);
        index /= n;
    }
    return t;
}

// Prefix (drop last symbol) and suffix (drop first symbol) of a k-tuple index.
inline std::size_t prefix_index(std::size_t index, std::size_t n) { return index / n; }
inline std::size_t suffix_index(std::size_t index, std::size_t n, std::size_t k) {
    return index % ipow(n, k - 1);
}

}  // namespace mldp
