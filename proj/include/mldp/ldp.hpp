#pragma once

// Finite-l large-deviation quantities for cyclic empirical measures: the
// per-path likelihood sandwich, exact class log-probabilities delta(l, zeta),
// the conditional-relative-entropy rate functions, and event probabilities.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "mldp/census.hpp"
#include "mldp/distribution.hpp"
#include "mldp/empirical.hpp"
#include "mldp/error.hpp"
#include "mldp/information.hpp"
#include "mldp/markov_model.hpp"
#include "mldp/numeric.hpp"
#include "mldp/types_method.hpp"

namespace mldp {

/// Path-independent constants with c_lower <= log A <= c_upper, where A is the
/// boundary factor left over when the path likelihood is rewritten over the
/// cyclic windows:
///   c_lower = (s+1) log min(mu_bar) - s log max(mu)
///   c_upper = (s+1) log max(mu_bar) - s log min(mu)
struct SandwichConstants {
    double c_lower = 0.0;
    double c_upper = 0.0;

    double magnitude() const { return std::max(std::abs(c_lower), std::abs(c_upper)); }
};

inline void require_positive_model(const MarkovModel& model) {
    if (!model.strictly_positive())
        throw hypothesis_error("model must be strictly positive on A^(s+1) for sandwich and rate checks");
}

inline SandwichConstants sandwich_constants(const MarkovModel& model) {
    require_positive_model(model);
    const auto mb = model.mu_bar().values();
    const auto mu = model.mu().values();
    const auto [a_lo, a_hi] = std::minmax_element(mb.begin(), mb.end());
    const auto [b_lo, b_hi] = std::minmax_element(mu.begin(), mu.end());
    const double s = static_cast<double>(model.s());
    return {(s + 1.0) * std::log(*a_lo) - s * std::log(*b_hi), (s + 1.0) * std::log(*a_hi) - s * std::log(*b_lo)};
}

struct LikelihoodSandwich {
    double lower = 0.0;
    double exact = 0.0;
    double upper = 0.0;

    bool holds(double slack = 1e-9) const {
        const double tol = slack * std::max(1.0, std::abs(exact));
        return lower <= exact + tol && exact <= upper + tol;
    }
};

/// -l [J(nu, mu) - J(nu_bar, mu_bar)] + {c_lower, c_upper} around the exact
/// log-likelihood, nu the cyclic empirical measure of x.
inline LikelihoodSandwich likelihood_sandwich(const MarkovModel& model, const SamplePath& x) {
    const auto c = sandwich_constants(model);
    if (x.length() < model.s() + 1) throw domain_error("likelihood_sandwich requires l >= s + 1");
    const auto nu = cyclic_empirical(x, model.s()).as_distribution();
    const double l = static_cast<double>(x.length());
    const double centre = -l * (loss_J(nu, model.mu()) - loss_J(marginalize(nu), model.mu_bar()));
    return {centre + c.c_lower, exact_path_probability(model, x), centre + c.c_upper};
}

/// (n^(s+1) log(2l) + max(|c_lower|, |c_upper|) + log l) / l: explicit bound on
/// |delta(l, zeta) + D_c(zeta || mu)| for every class at length l.
inline double rate_envelope(std::size_t n, std::size_t s, std::size_t l, const SandwichConstants& c) {
    const double ld = static_cast<double>(l);
    return (static_cast<double>(ipow(n, s + 1)) * std::log(2.0 * ld) + c.magnitude() + std::log(ld)) / ld;
}

// ---------------------------------------------------------------------------
// Rate functions
// ---------------------------------------------------------------------------

/// D_c(nu || mu) for stationary laws on A^(s+1) and a strictly positive mu.
/// Evaluated as D(nu||mu) - D(nu_bar||mu_bar) and confirmed against the row form.
inline double rate_ktuple(const KTupleDistribution& nu, const KTupleDistribution& mu) {
    if (!mu.strictly_positive()) throw hypothesis_error("rate function requires mu > 0");
    const double difference = conditional_relative_entropy(nu, mu);
    const double rows = conditional_relative_entropy_rows(nu, mu);
    if (!approx_equal(difference, rows))
        throw std::logic_error("rate forms disagree: " + format_real(difference) + " vs " + format_real(rows));
    return difference;
}

/// Rate function for the stationary doublet estimator (k = 2).
inline double rate_doublet(const KTupleDistribution& nu, const KTupleDistribution& mu) {
    if (nu.k() != 2 || mu.k() != 2) throw domain_error("rate_doublet requires doublet distributions");
    return rate_ktuple(nu, mu);
}

/// Rate function for the raw doublet estimator theta: +infinity off the
/// stationary set, the row form sum_i theta_bar_i sum_j b_ij log(b_ij / a_ij) on it.
inline double rate_theta(const KTupleDistribution& theta, const KTupleDistribution& mu) {
    if (theta.k() != 2 || mu.k() != 2) throw domain_error("rate_theta requires doublet distributions");
    if (!mu.strictly_positive()) throw hypothesis_error("rate function requires mu > 0");
    if (!check_stationary(theta).is_stationary) return kInfinity;
    return conditional_relative_entropy_rows(theta, mu);
}

// ---------------------------------------------------------------------------
// Exact class probabilities
// ---------------------------------------------------------------------------

/// delta(l, zeta) = (1/l) log Pr{nu(X_1^l) = zeta} from a weighted census entry.
inline double class_delta(const TypeCensus& census, const CensusEntry& e) {
    if (!e.probability) throw domain_error("census carries no class probabilities");
    if (*e.probability <= 0.0) return -kInfinity;
    return std::log(*e.probability) / static_cast<double>(census.l());
}

/// delta(l, zeta) by exhaustive enumeration; -infinity when zeta is not achievable.
inline double delta_exact(const MarkovModel& model, const EmpiricalMeasure& zeta, const EnumerationOptions& options = {}) {
    if (zeta.n() != model.n() || zeta.k() != model.s() + 1) throw domain_error("delta_exact: shape mismatch");
    if (!is_achievable(zeta)) return -kInfinity;
    const auto census = enumerate_weighted_census(model, zeta.total(), options);
    const auto* e = census.find(zeta.counts());
    if (e == nullptr) return -kInfinity;
    return class_delta(census, *e);
}

struct RateRow {
    std::size_t l = 0;
    std::vector<Count> counts;
    double delta = 0.0;
    /// -D_c(zeta || mu)
    double rate = 0.0;
    double error_bound = 0.0;
    bool pass = false;
};

/// Compares delta(l, zeta) with -D_c(zeta || mu) against rate_envelope.
inline RateRow delta_vs_rate(const MarkovModel& model, const TypeCensus& census, const CensusEntry& e) {
    const auto c = sandwich_constants(model);
    RateRow row;
    row.l = census.l();
    row.counts = e.counts;
    row.delta = class_delta(census, e);
    row.rate = -rate_ktuple(census.measure(e).as_distribution(), model.mu());
    row.error_bound = rate_envelope(model.n(), model.s(), census.l(), c);
    row.pass = std::isfinite(row.delta) && std::abs(row.delta - row.rate) <= row.error_bound;
    return row;
}

inline RateRow delta_vs_rate(const MarkovModel& model, const EmpiricalMeasure& zeta, const EnumerationOptions& options = {}) {
    const auto census = enumerate_weighted_census(model, zeta.total(), options);
    const auto* e = census.find(zeta.counts());
    if (e == nullptr) throw domain_error("delta_vs_rate: zeta is not achievable at this length");
    return delta_vs_rate(model, census, *e);
}

/// All classes of a weighted census.
inline std::vector<RateRow> rate_report(const MarkovModel& model, const TypeCensus& census) {
    std::vector<RateRow> rows;
    rows.reserve(census.size());
    for (const auto& e : census.entries()) rows.push_back(delta_vs_rate(model, census, e));
    return rows;
}

// ---------------------------------------------------------------------------
// Events
// ---------------------------------------------------------------------------

/// { nu : ||nu - centre||_1 <= radius }
struct L1Ball {
    std::vector<double> centre;
    double radius = 0.0;
};

/// { nu : <c, nu> >= b }
struct HalfSpace {
    std::vector<double> coefficients;
    double threshold = 0.0;
};

/// Explicit finite set of measures, matched entrywise within 1e-12.
struct ClassList {
    std::vector<std::vector<double>> members;
};

/// Membership comparisons carry an absolute slack of 1e-12 so that boundary
/// points given as decimals (e.g. 0.9 = 9/10) are included.
class EventSet {
public:
    using Form = std::variant<L1Ball, HalfSpace, ClassList>;
    static constexpr double kSlack = 1e-12;

    explicit EventSet(Form form) : form_(std::move(form)) {}

    const Form& form() const noexcept { return form_; }

    bool contains(const KTupleDistribution& nu) const {
        const auto p = nu.values();
        return std::visit(
            [&](const auto& f) -> bool {
                using F = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<F, L1Ball>) {
                    check_size(f.centre.size(), p.size());
                    double d = 0.0;
                    for (std::size_t i = 0; i < p.size(); ++i) d += std::abs(p[i] - f.centre[i]);
                    return d <= f.radius + kSlack;
                } else if constexpr (std::is_same_v<F, HalfSpace>) {
                    check_size(f.coefficients.size(), p.size());
                    double v = 0.0;
                    for (std::size_t i = 0; i < p.size(); ++i) v += f.coefficients[i] * p[i];
                    return v >= f.threshold - kSlack;
                } else {
                    for (const auto& m : f.members) {
                        check_size(m.size(), p.size());
                        bool same = true;
                        for (std::size_t i = 0; i < p.size() && same; ++i) same = std::abs(p[i] - m[i]) <= kSlack;
                        if (same) return true;
                    }
                    return false;
                }
            },
            form_);
    }

private:
    static void check_size(std::size_t got, std::size_t want) {
        if (got != want) throw domain_error("event dimension does not match the measure");
    }

    Form form_;
};

struct EventRow {
    std::size_t l = 0;
    /// (1/l) log Pr{nu(X_1^l) in Gamma}
    double exact = 0.0;
    /// -min D_c(zeta || mu) over census classes in Gamma
    double rate_proxy = 0.0;
    double envelope = 0.0;
    /// envelope + n^(s+1) log(l+1) / l: allowed |exact - rate_proxy|
    double tolerance = 0.0;
    std::size_t classes_in_event = 0;
    bool pass = false;
};

inline EventRow ldp_event_row(const MarkovModel& model, const EventSet& gamma, const TypeCensus& census) {
    const auto c = sandwich_constants(model);
    EventRow row;
    row.l = census.l();
    row.envelope = rate_envelope(model.n(), model.s(), census.l(), c);
    row.tolerance = row.envelope + log_census_size_bound(model.n(), model.s(), census.l()) / static_cast<double>(census.l());

    NeumaierSum prob;
    double min_rate = kInfinity;
    for (const auto& e : census.entries()) {
        const auto zeta = census.measure(e).as_distribution();
        if (!gamma.contains(zeta)) continue;
        ++row.classes_in_event;
        prob.add(e.probability.value());
        min_rate = std::min(min_rate, rate_ktuple(zeta, model.mu()));
    }
    if (row.classes_in_event == 0) {
        row.exact = -kInfinity;
        row.rate_proxy = -kInfinity;
        row.pass = true;
        return row;
    }
    const double p = prob.value();
    row.exact = p > 0.0 ? std::log(p) / static_cast<double>(census.l()) : -kInfinity;
    row.rate_proxy = -min_rate;
    row.pass = std::isfinite(row.exact) && std::abs(row.exact - row.rate_proxy) <= row.tolerance;
    return row;
}

/// Exact event probabilities along a schedule of lengths, each from a full
/// weighted census.
inline std::vector<EventRow> ldp_event_check(const MarkovModel& model, const EventSet& gamma,
                                             const std::vector<std::size_t>& l_schedule,
                                             const EnumerationOptions& options = {}) {
    require_positive_model(model);
    std::vector<EventRow> rows;
    rows.reserve(l_schedule.size());
    for (std::size_t l : l_schedule) rows.push_back(ldp_event_row(model, gamma, enumerate_weighted_census(model, l, options)));
    return rows;
}

}  // namespace mldp
