#pragma once

// Entropy and divergence functionals, all in nats with 0 log 0 = 0.
// +infinity is the IEEE infinity and is returned only where domination fails.

#include <cmath>
#include <stdexcept>
#include <string>

#include "mldp/distribution.hpp"
#include "mldp/markov_model.hpp"
#include "mldp/numeric.hpp"
#include "mldp/sample_path.hpp"

namespace mldp {

namespace detail {

inline void require_same_shape(const KTupleDistribution& a, const KTupleDistribution& b, const char* op) {
    if (a.n() != b.n() || a.k() != b.k()) throw domain_error(std::string(op) + ": shape mismatch");
}

inline void require_stationary(const KTupleDistribution& p, const char* op) {
    if (p.k() < 2) throw domain_error(std::string(op) + " requires k >= 2");
    const auto flag = check_stationary(p);
    if (!flag.is_stationary)
        throw domain_error(std::string(op) + " requires a stationary distribution (max_violation=" +
                           format_real(flag.max_violation) + ")");
}

}  // namespace detail

inline double entropy(const KTupleDistribution& p) {
    double h = 0.0;
    for (double v : p.values())
        if (v > 0.0) h -= v * std::log(v);
    return h;
}

/// D(nu || mu); +infinity iff some mu_i = 0 < nu_i.
inline double relative_entropy(const KTupleDistribution& nu, const KTupleDistribution& mu) {
    detail::require_same_shape(nu, mu, "relative_entropy");
    double d = 0.0;
    for (std::size_t i = 0; i < nu.size(); ++i) {
        if (nu[i] <= 0.0) continue;
        if (mu[i] <= 0.0) return kInfinity;
        d += nu[i] * std::log(nu[i] / mu[i]);
    }
    return d;
}

/// Cross-entropy J(nu, mu) = sum nu_i log(1/mu_i), so that D = J - H.
inline double loss_J(const KTupleDistribution& nu, const KTupleDistribution& mu) {
    detail::require_same_shape(nu, mu, "loss_J");
    double j = 0.0;
    for (std::size_t i = 0; i < nu.size(); ++i) {
        if (nu[i] <= 0.0) continue;
        if (mu[i] <= 0.0) return kInfinity;
        j -= nu[i] * std::log(mu[i]);
    }
    return j;
}

/// H_c(p) = H(p) - H(p-bar) for a stationary p with k >= 2.
inline double conditional_entropy(const KTupleDistribution& p) {
    detail::require_stationary(p, "conditional_entropy");
    return entropy(p) - entropy(marginalize(p));
}

/// D_c(nu || mu) = D(nu || mu) - D(nu-bar || mu-bar).
///
/// When D(nu || mu) is infinite the result is +infinity, including the case
/// where D(nu-bar || mu-bar) is infinite as well.
inline double conditional_relative_entropy(const KTupleDistribution& nu, const KTupleDistribution& mu) {
    detail::require_same_shape(nu, mu, "conditional_relative_entropy");
    detail::require_stationary(nu, "conditional_relative_entropy");
    detail::require_stationary(mu, "conditional_relative_entropy");
    const double full = relative_entropy(nu, mu);
    if (std::isinf(full)) return kInfinity;
    return full - relative_entropy(marginalize(nu), marginalize(mu));
}

/// Row form of D_c: sum_i nu-bar_i sum_j c_ij log(c_ij / a_ij) with c, a the
/// conditional rows of nu and mu over contexts i in A^(k-1). Only the shapes
/// are checked, so this also evaluates non-stationary arguments.
inline double conditional_relative_entropy_rows(const KTupleDistribution& nu, const KTupleDistribution& mu) {
    detail::require_same_shape(nu, mu, "conditional_relative_entropy_rows");
    if (nu.k() < 2) throw domain_error("conditional_relative_entropy_rows requires k >= 2");
    const std::size_t n = nu.n();
    const auto nu_bar = marginalize(nu);
    const auto mu_bar = marginalize(mu);
    double total = 0.0;
    for (std::size_t ctx = 0; ctx < nu_bar.size(); ++ctx) {
        if (nu_bar[ctx] <= 0.0) continue;
        double inner = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double nij = nu[ctx * n + j];
            if (nij <= 0.0) continue;
            const double mij = mu[ctx * n + j];
            if (mij <= 0.0) return kInfinity;
            const double c = nij / nu_bar[ctx];
            const double a = mij / mu_bar[ctx];
            inner += c * std::log(c / a);
        }
        total += nu_bar[ctx] * inner;
    }
    return total;
}

/// Entropy rate of the chain: H(mu) - H(mu-bar), cross-checked against the
/// average row entropy sum_i mu-bar_i H(row_i).
inline double process_entropy(const MarkovModel& model) {
    const double difference = entropy(model.mu()) - entropy(model.mu_bar());
    double row_form = 0.0;
    for (std::size_t ctx = 0; ctx < model.mu_bar().size(); ++ctx) {
        if (!model.has_row(ctx)) continue;
        double h = 0.0;
        for (double a : model.row(ctx))
            if (a > 0.0) h -= a * std::log(a);
        row_form += model.mu_bar()[ctx] * h;
    }
    if (!approx_equal(difference, row_form))
        throw std::logic_error("process entropy forms disagree: " + format_real(difference) + " vs " +
                               format_real(row_form));
    return difference;
}

/// h_l(x) = -(1/l) log Pr{X_1^l = x}; +infinity for a zero-probability path.
inline double smb_statistic(const MarkovModel& model, const SamplePath& x) {
    const double logp = exact_path_probability(model, x);
    if (std::isinf(logp)) return kInfinity;
    return -logp / static_cast<double>(x.length());
}

}  // namespace mldp
