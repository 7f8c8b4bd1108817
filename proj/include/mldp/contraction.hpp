#pragma once

// Rate function of the singleton frequencies phi of a one-step chain, computed
// two independent ways:
//
//  * variational: sup_{u > 0} sum_i phi_i log(u_i / (A u)_i), maximized by
//    damped Newton in w = log u (a concave problem) with w fixed to 0 on the
//    first support coordinate;
//  * constrained: min D_c(nu || mu) over stationary nu with marginal phi,
//    solved by alternating row/column scaling (iterative proportional
//    fitting) of the kernel phi_i a_ij.
//
// Coordinates with phi_i = 0 are dropped: the problem is solved on the face of
// the support of phi, where the optimal u vanishes off the support.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mldp/distribution.hpp"
#include "mldp/error.hpp"
#include "mldp/information.hpp"
#include "mldp/markov_model.hpp"

namespace mldp {

struct SolverOptions {
    /// Convergence threshold on the optimality residual (infinity norm).
    double tolerance = 1e-10;
    std::size_t max_iterations = 100'000;
};

struct VariationalSolution {
    /// Optimal u, scaled so the first coordinate in the support of phi is 1.
    std::vector<double> u_star;
    double value = 0.0;
    /// b_ij = m_ij u_j / (M u)_i, row-major n x n.
    std::vector<double> b_matrix;
    /// nu*_ij = phi_i b_ij
    KTupleDistribution nu_star;
    /// max_i |phi_i - sum_j phi_j b_ji|
    double residual = 0.0;
    std::size_t iterations = 0;
};

struct ConstrainedSolution {
    double value = 0.0;
    KTupleDistribution argmin;
    /// The same optimum as [min D(nu || mu) s.t. nu_bar = phi] - D(phi || mu_bar),
    /// from a separate scaling run against mu itself.
    double value_from_full_divergence = 0.0;
    double marginal_violation = 0.0;
    std::size_t iterations = 0;
};

namespace detail {

inline void require_contraction_inputs(const KTupleDistribution& phi, const MarkovModel& model) {
    if (model.s() != 1) throw domain_error("singleton rate functions are implemented for one-step chains");
    if (phi.k() != 1 || phi.n() != model.n()) throw domain_error("phi must be a distribution on the model alphabet");
    if (!model.strictly_positive()) throw hypothesis_error("singleton rate functions require a strictly positive model");
}

inline std::vector<double> transition_matrix(const MarkovModel& model) {
    const std::size_t n = model.n();
    std::vector<double> a(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a[i * n + j] = model.transition(i, static_cast<Symbol>(j));
    return a;
}

inline std::vector<double> transpose(std::span<const double> m, std::size_t n) {
    std::vector<double> t(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) t[j * n + i] = m[i * n + j];
    return t;
}

inline std::vector<std::size_t> support_of(const KTupleDistribution& phi) {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < phi.size(); ++i)
        if (phi[i] > 0.0) s.push_back(i);
    return s;
}

/// Evaluation of f(w) = sum_i phi_i (w_i - log sum_j m_ij e^{w_j}) on the
/// support, with the matrix b_ij = m_ij e^{w_j} / sum_k m_ik e^{w_k}.
struct LogRatioState {
    double value = 0.0;
    std::vector<double> gradient;  // phi_k - sum_i phi_i b_ik
    std::vector<double> b;         // m x m
    double residual = 0.0;
};

inline LogRatioState evaluate_log_ratio(std::span<const double> phi, std::span<const double> m_sub,
                                        std::span<const double> w) {
    const std::size_t m = phi.size();
    LogRatioState st;
    st.gradient.assign(phi.begin(), phi.end());
    st.b.assign(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        double peak = -kInfinity;
        for (std::size_t j = 0; j < m; ++j)
            if (m_sub[i * m + j] > 0.0) peak = std::max(peak, w[j]);
        double total = 0.0;
        for (std::size_t j = 0; j < m; ++j)
            if (m_sub[i * m + j] > 0.0) total += m_sub[i * m + j] * std::exp(w[j] - peak);
        const double log_row = peak + std::log(total);
        st.value += phi[i] * (w[i] - log_row);
        for (std::size_t j = 0; j < m; ++j) {
            const double bij = m_sub[i * m + j] > 0.0 ? m_sub[i * m + j] * std::exp(w[j] - log_row) : 0.0;
            st.b[i * m + j] = bij;
            st.gradient[j] -= phi[i] * bij;
        }
    }
    for (double g : st.gradient) st.residual = std::max(st.residual, std::abs(g));
    return st;
}

struct LogRatioOptimum {
    std::vector<double> w;
    LogRatioState state;
    std::size_t iterations = 0;
};

inline LogRatioOptimum maximize_log_ratio(std::span<const double> phi, std::span<const double> m_sub,
                                          const SolverOptions& options) {
    const std::size_t m = phi.size();
    std::vector<double> w(m, 0.0);
    auto st = evaluate_log_ratio(phi, m_sub, w);
    std::size_t it = 0;
    for (; it < options.max_iterations && st.residual > options.tolerance; ++it) {
        // Free coordinates are 1..m-1; Hessian of f is -sum_i phi_i (diag(b_i) - b_i b_i^T).
        const auto free = static_cast<Eigen::Index>(m - 1);
        Eigen::MatrixXd neg_h = Eigen::MatrixXd::Zero(free, free);
        Eigen::VectorXd grad(free);
        for (Eigen::Index a = 0; a < free; ++a) grad(a) = st.gradient[static_cast<std::size_t>(a) + 1];
        for (std::size_t i = 0; i < m; ++i) {
            for (Eigen::Index a = 0; a < free; ++a) {
                const double bia = st.b[i * m + static_cast<std::size_t>(a) + 1];
                neg_h(a, a) += phi[i] * bia;
                for (Eigen::Index c = 0; c < free; ++c)
                    neg_h(a, c) -= phi[i] * bia * st.b[i * m + static_cast<std::size_t>(c) + 1];
            }
        }
        Eigen::VectorXd dir = grad;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(neg_h);
        if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
            Eigen::VectorXd newton = ldlt.solve(grad);
            if (newton.allFinite() && newton.dot(grad) > 0.0) dir = newton;
        }
        const double slope = dir.dot(grad);

        double step = 1.0;
        bool accepted = false;
        std::vector<double> trial(m, 0.0);
        for (int halvings = 0; halvings < 60; ++halvings, step *= 0.5) {
            for (Eigen::Index a = 0; a < free; ++a)
                trial[static_cast<std::size_t>(a) + 1] = w[static_cast<std::size_t>(a) + 1] + step * dir(a);
            auto next = evaluate_log_ratio(phi, m_sub, trial);
            const bool armijo = next.value >= st.value + 1e-4 * step * slope;
            // Near the optimum f is flat to rounding; accept a residual decrease instead.
            const bool flat = next.residual < st.residual &&
                              next.value >= st.value - 1e-14 * std::max(1.0, std::abs(st.value));
            if (armijo || flat) {
                w = trial;
                st = std::move(next);
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }
    if (st.residual > options.tolerance) {
        std::vector<double> u(m);
        for (std::size_t i = 0; i < m; ++i) u[i] = std::exp(w[i]);
        throw convergence_error("variational solver did not converge after " + std::to_string(it) + " iterations",
                                std::move(u), st.residual);
    }
    return {std::move(w), std::move(st), it};
}

/// Shared driver: maximize sum phi_i log(u_i / (M u)_i) for a nonnegative
/// matrix M and assemble the full-dimensional solution.
inline VariationalSolution solve_variational(const KTupleDistribution& phi, std::span<const double> matrix,
                                             const SolverOptions& options) {
    const std::size_t n = phi.n();
    const auto support = support_of(phi);
    const std::size_t m = support.size();
    std::vector<double> phi_sub(m), m_sub(m * m);
    for (std::size_t a = 0; a < m; ++a) {
        phi_sub[a] = phi[support[a]];
        for (std::size_t c = 0; c < m; ++c) m_sub[a * m + c] = matrix[support[a] * n + support[c]];
    }
    auto opt = maximize_log_ratio(phi_sub, m_sub, options);

    std::vector<double> u(n, 0.0);
    for (std::size_t a = 0; a < m; ++a) u[support[a]] = std::exp(opt.w[a]);

    std::vector<double> b(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double mu_i = 0.0;
        for (std::size_t j = 0; j < n; ++j) mu_i += matrix[i * n + j] * u[j];
        if (mu_i <= 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) b[i * n + j] = matrix[i * n + j] * u[j] / mu_i;
    }
    std::vector<double> nu(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) nu[i * n + j] = phi[i] * b[i * n + j];

    return {std::move(u), opt.state.value, std::move(b), KTupleDistribution(n, 2, std::move(nu)), opt.state.residual,
            opt.iterations};
}

/// Alternating scaling: finds nu = diag(x) K diag(y) with row and column sums
/// phi, the minimizer of sum nu log(nu / K) under those constraints.
struct ScalingResult {
    std::vector<double> nu;
    double violation = 0.0;
    std::size_t iterations = 0;
};

inline ScalingResult scale_to_marginals(std::span<const double> phi, std::span<const double> kernel,
                                        const SolverOptions& options) {
    const std::size_t m = phi.size();
    std::vector<double> x(m, 1.0), y(m, 1.0);
    ScalingResult r;
    const double target = std::min(options.tolerance, 1e-13);
    for (r.iterations = 0; r.iterations < options.max_iterations; ++r.iterations) {
        for (std::size_t i = 0; i < m; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < m; ++j) s += kernel[i * m + j] * y[j];
            x[i] = phi[i] / s;
        }
        for (std::size_t j = 0; j < m; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < m; ++i) s += x[i] * kernel[i * m + j];
            y[j] = phi[j] / s;
        }
        r.violation = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < m; ++j) s += x[i] * kernel[i * m + j] * y[j];
            r.violation = std::max(r.violation, std::abs(s - phi[i]));
        }
        if (r.violation <= target) break;
    }
    if (r.violation > target)
        throw convergence_error("marginal scaling did not converge", std::vector<double>(x), r.violation);
    r.nu.resize(m * m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) r.nu[i * m + j] = x[i] * kernel[i * m + j] * y[j];
    return r;
}

}  // namespace detail

/// g(u) = sum_i phi_i log(u_i / (A u)_i); terms with phi_i = 0 are dropped.
inline double g_objective(const KTupleDistribution& phi, const MarkovModel& model, std::span<const double> u) {
    if (model.s() != 1) throw domain_error("g_objective is defined for one-step chains");
    const std::size_t n = model.n();
    if (phi.k() != 1 || phi.n() != n || u.size() != n) throw domain_error("g_objective: shape mismatch");
    for (double v : u)
        if (!(v > 0.0)) throw domain_error("g_objective requires u > 0 entrywise");
    double g = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (phi[i] <= 0.0) continue;
        double au = 0.0;
        for (std::size_t j = 0; j < n; ++j) au += model.transition(i, static_cast<Symbol>(j)) * u[j];
        g += phi[i] * std::log(u[i] / au);
    }
    return g;
}

/// sup_{u > 0} g(u) together with the optimal u, the stochastic matrix b and
/// the stationary doublet law nu* = phi_i b_ij that attains the constrained minimum.
inline VariationalSolution singleton_rate_variational(const KTupleDistribution& phi, const MarkovModel& model,
                                                      const SolverOptions& options = {}) {
    detail::require_contraction_inputs(phi, model);
    return detail::solve_variational(phi, detail::transition_matrix(model), options);
}

/// The supremum with (u A)_i in place of (A u)_i.
inline VariationalSolution donsker_varadhan_row_form(const KTupleDistribution& phi, const MarkovModel& model,
                                                     const SolverOptions& options = {}) {
    detail::require_contraction_inputs(phi, model);
    return detail::solve_variational(phi, detail::transpose(detail::transition_matrix(model), model.n()), options);
}

/// inf D_c(nu || mu) over stationary nu with marginal phi.
inline ConstrainedSolution singleton_rate_constrained(const KTupleDistribution& phi, const MarkovModel& model,
                                                      const SolverOptions& options = {}) {
    detail::require_contraction_inputs(phi, model);
    const std::size_t n = model.n();
    const auto support = detail::support_of(phi);
    const std::size_t m = support.size();
    std::vector<double> phi_sub(m), kernel(m * m), mu_kernel(m * m);
    for (std::size_t a = 0; a < m; ++a) {
        phi_sub[a] = phi[support[a]];
        for (std::size_t c = 0; c < m; ++c) {
            kernel[a * m + c] = phi_sub[a] * model.transition(support[a], static_cast<Symbol>(support[c]));
            mu_kernel[a * m + c] = model.mu()[support[a] * n + support[c]];
        }
    }

    auto embed = [&](const std::vector<double>& sub) {
        std::vector<double> full(n * n, 0.0);
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t c = 0; c < m; ++c) full[support[a] * n + support[c]] = sub[a * m + c];
        return full;
    };

    const auto scaled = detail::scale_to_marginals(phi_sub, kernel, options);
    double value = 0.0;
    for (std::size_t idx = 0; idx < m * m; ++idx)
        if (scaled.nu[idx] > 0.0) value += scaled.nu[idx] * std::log(scaled.nu[idx] / kernel[idx]);

    const auto full_scaled = detail::scale_to_marginals(phi_sub, mu_kernel, options);
    KTupleDistribution nu_full(n, 2, embed(full_scaled.nu));
    const double via_full = relative_entropy(nu_full, model.mu()) - relative_entropy(phi, model.mu_bar());
    if (std::abs(via_full - value) > 1e-8)
        throw std::logic_error("constrained optimum disagrees with its full-divergence decomposition: " +
                               format_real(value) + " vs " + format_real(via_full));

    return {value, KTupleDistribution(n, 2, embed(scaled.nu)), via_full, scaled.violation, scaled.iterations};
}

/// sum_ij nu_ij c_i and sum_ij nu_ij c_j; equal whenever nu is stationary.
struct HandyIdentity {
    double by_first = 0.0;
    double by_second = 0.0;
    bool holds = false;
};

inline HandyIdentity handy_identity(const KTupleDistribution& nu, std::span<const double> c) {
    if (nu.k() != 2 || c.size() != nu.n()) throw domain_error("handy_identity: shape mismatch");
    const std::size_t n = nu.n();
    HandyIdentity h;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            h.by_first += nu[i * n + j] * c[i];
            h.by_second += nu[i * n + j] * c[j];
        }
    h.holds = approx_equal(h.by_first, h.by_second);
    return h;
}

inline bool handy_identity_check(const KTupleDistribution& nu, std::span<const double> c) {
    return handy_identity(nu, c).holds;
}

}  // namespace mldp
