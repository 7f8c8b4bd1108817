#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mldp/error.hpp"
#include "mldp/tuple_index.hpp"

namespace mldp {

/// Finite symbol sequence x_1^l over {0..n-1}, l >= 1.
class SamplePath {
public:
    SamplePath(std::size_t n, std::vector<Symbol> symbols) : n_(n), x_(std::move(symbols)) {
        if (n == 0) throw domain_error("alphabet size must be >= 1");
        if (x_.empty()) throw domain_error("sample path must have length >= 1");
        for (Symbol s : x_)
            if (s >= n) throw domain_error("path symbol " + std::to_string(s) + " out of range");
    }

    /// Letters 'a', 'b', ... map to 0, 1, ...; handy for the worked examples.
    static SamplePath from_letters(std::size_t n, std::string_view letters) {
        std::vector<Symbol> x;
        x.reserve(letters.size());
        for (char c : letters) {
            if (c < 'a' || c > 'z') throw domain_error("expected lowercase letters");
            x.push_back(static_cast<Symbol>(c - 'a'));
        }
        return {n, std::move(x)};
    }

    std::size_t n() const noexcept { return n_; }
    std::size_t length() const noexcept { return x_.size(); }
    Symbol operator[](std::size_t t) const { return x_[t]; }
    std::span<const Symbol> symbols() const noexcept { return x_; }

    /// x~_t for the cyclic (ghost-augmented) extension, 0-based and wrapping.
    Symbol cyclic(std::size_t t) const { return x_[t % x_.size()]; }

    std::string to_letters() const {
        std::string s;
        for (Symbol v : x_) s.push_back(static_cast<char>('a' + v));
        return s;
    }

    friend bool operator==(const SamplePath&, const SamplePath&) = default;

private:
    std::size_t n_;
    std::vector<Symbol> x_;
};

}  // namespace mldp
