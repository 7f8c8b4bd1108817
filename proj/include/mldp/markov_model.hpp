#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "mldp/distribution.hpp"
#include "mldp/error.hpp"
#include "mldp/sample_path.hpp"
#include "mldp/tuple_index.hpp"

namespace mldp {

/// Stationary s-step Markov chain described by its (s+1)-tuple law mu.
///
/// mu_bar is the s-marginal and rows[i] the conditional law of the next
/// symbol given context i in A^s. Contexts with mu_bar_i = 0 keep their index
/// but carry no row.
class MarkovModel {
public:
    std::size_t n() const noexcept { return mu_.n(); }
    std::size_t s() const noexcept { return mu_.k() - 1; }
    const KTupleDistribution& mu() const noexcept { return mu_; }
    const KTupleDistribution& mu_bar() const noexcept { return mu_bar_; }

    bool has_row(std::size_t context) const { return rows_.at(context).has_value(); }
    std::span<const double> row(std::size_t context) const {
        const auto& r = rows_.at(context);
        if (!r) throw domain_error("context has zero stationary mass and no transition row");
        return *r;
    }
    double transition(std::size_t context, Symbol next) const {
        const auto& r = rows_.at(context);
        return r ? (*r)[next] : 0.0;
    }

    bool strictly_positive() const { return mu_.strictly_positive(); }

    friend MarkovModel build_model(const KTupleDistribution& mu);

private:
    MarkovModel(KTupleDistribution mu, KTupleDistribution mu_bar, std::vector<std::optional<std::vector<double>>> rows)
        : mu_(std::move(mu)), mu_bar_(std::move(mu_bar)), rows_(std::move(rows)) {}

    KTupleDistribution mu_;
    KTupleDistribution mu_bar_;
    std::vector<std::optional<std::vector<double>>> rows_;
};

/// a_{ij} = mu_{ij} / mu_bar_i, and the s-step analogue mu_{i j k} / mu_bar_{i j}.
inline MarkovModel build_model(const KTupleDistribution& mu) {
    if (mu.k() < 2) throw domain_error("a Markov model needs an (s+1)-tuple law with s >= 1");
    const auto flag = check_stationary(mu);
    if (!flag.is_stationary) throw validation_error("mu is not stationary", flag.max_violation);

    auto mu_bar = marginalize(mu);
    const std::size_t n = mu.n();
    std::vector<std::optional<std::vector<double>>> rows(mu_bar.size());
    for (std::size_t ctx = 0; ctx < mu_bar.size(); ++ctx) {
        if (mu_bar[ctx] <= 0.0) continue;
        std::vector<double> r(n);
        for (std::size_t j = 0; j < n; ++j) r[j] = mu[ctx * n + j] / mu_bar[ctx];
        rows[ctx] = std::move(r);
    }
    return MarkovModel(mu, std::move(mu_bar), std::move(rows));
}

/// Max |(mu_bar P)_i - mu_bar_i| for the lifted one-step chain on A^s.
inline double lifted_stationarity_residual(const MarkovModel& model) {
    const std::size_t n = model.n();
    const auto& mb = model.mu_bar();
    std::vector<double> next(mb.size(), 0.0);
    for (std::size_t ctx = 0; ctx < mb.size(); ++ctx) {
        if (!model.has_row(ctx)) continue;
        const auto r = model.row(ctx);
        const std::size_t shifted = suffix_index(ctx * n, n, model.s() + 1);
        for (std::size_t j = 0; j < n; ++j) next[shifted + j] += mb[ctx] * r[j];
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < mb.size(); ++i) worst = std::max(worst, std::abs(next[i] - mb[i]));
    return worst;
}

namespace detail {

inline double path_log_probability(const MarkovModel& model, std::span<const Symbol> x) {
    const std::size_t n = model.n();
    const std::size_t s = model.s();
    std::size_t ctx = 0;
    for (std::size_t t = 0; t < s; ++t) ctx = ctx * n + x[t];
    const double head = model.mu_bar()[ctx];
    if (head <= 0.0) return -kInfinity;
    double logp = std::log(head);
    const std::size_t ctx_mod = ipow(n, s - 1);
    for (std::size_t t = s; t < x.size(); ++t) {
        const double a = model.transition(ctx, x[t]);
        if (a <= 0.0) return -kInfinity;
        logp += std::log(a);
        ctx = (ctx % ctx_mod) * n + x[t];
    }
    return logp;
}

}  // namespace detail

/// log Pr{X_1^l = x} = log mu_bar(x_1^s) + sum_{t>s} log(mu(x_{t-s}^t) / mu_bar(x_{t-s}^{t-1})).
/// Returns -infinity for a zero-probability path.
inline double exact_path_probability(const MarkovModel& model, const SamplePath& x) {
    if (x.n() != model.n()) throw domain_error("path alphabet does not match model");
    if (x.length() < model.s()) throw domain_error("path length must be >= s");
    return detail::path_log_probability(model, x.symbols());
}

/// Reproducible generator for path sampling: 64-bit Mersenne Twister with
/// doubles formed from the top 53 bits. Both steps are fully specified, so a
/// seed yields the same path on every platform.
class PathRng {
public:
    explicit PathRng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Inverse-CDF draw from nonnegative weights (need not be normalized).
    std::size_t categorical(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        const double target = uniform() * total;
        double acc = 0.0;
        std::size_t last_positive = 0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (weights[i] <= 0.0) continue;
            last_positive = i;
            acc += weights[i];
            if (target < acc) return i;
        }
        return last_positive;
    }

private:
    std::mt19937_64 engine_;
};

/// Initial s-block from mu_bar, then one symbol at a time from the rows.
inline SamplePath sample_path(const MarkovModel& model, std::size_t l, std::uint64_t seed) {
    const std::size_t n = model.n();
    const std::size_t s = model.s();
    if (l < s) throw domain_error("sample length must be >= s");
    PathRng rng(seed);
    std::vector<Symbol> x;
    x.reserve(l);
    std::size_t ctx = rng.categorical(model.mu_bar().values());
    for (Symbol sym : tuple_of(ctx, n, s)) x.push_back(sym);
    const std::size_t ctx_mod = ipow(n, s - 1);
    while (x.size() < l) {
        const auto next = static_cast<Symbol>(rng.categorical(model.row(ctx)));
        x.push_back(next);
        ctx = (ctx % ctx_mod) * n + next;
    }
    return {n, std::move(x)};
}

}  // namespace mldp
