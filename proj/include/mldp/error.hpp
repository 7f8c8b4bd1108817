#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace mldp {

/// A double as text with 17 significant digits.
inline std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Argument outside the mathematical domain of an operation (bad symbol,
/// wrong tuple order, l < s, ...).
class domain_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A distribution that should be stationary is not.
class validation_error : public std::runtime_error {
public:
    validation_error(const std::string& what, double max_violation)
        : std::runtime_error(what + " (max_violation=" + format_real(max_violation) + ")"),
          max_violation_(max_violation) {}

    double max_violation() const noexcept { return max_violation_; }

private:
    double max_violation_;
};

/// A required hypothesis (strict positivity, l >= n, ...) does not hold.
class hypothesis_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Exhaustive enumeration would exceed the configured path-step budget.
class budget_exceeded : public std::runtime_error {
public:
    budget_exceeded(std::uint64_t required, std::uint64_t budget)
        : std::runtime_error("enumeration budget exceeded: requires " + std::to_string(required) +
                             " path-steps, budget is " + std::to_string(budget)),
          required_(required),
          budget_(budget) {}

    std::uint64_t required() const noexcept { return required_; }
    std::uint64_t budget() const noexcept { return budget_; }

private:
    std::uint64_t required_;
    std::uint64_t budget_;
};

/// Iterative solver hit its cap; carries the best iterate seen.
class convergence_error : public std::runtime_error {
public:
    convergence_error(const std::string& what, std::vector<double> best_iterate, double residual)
        : std::runtime_error(what + " (residual=" + format_real(residual) + ")"),
          best_iterate_(std::move(best_iterate)),
          residual_(residual) {}

    const std::vector<double>& best_iterate() const noexcept { return best_iterate_; }
    double residual() const noexcept { return residual_; }

private:
    std::vector<double> best_iterate_;
    double residual_;
};

}  // namespace mldp
