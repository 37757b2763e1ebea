#pragma once

#include <stdexcept>
#include <string>

namespace lforge {

/// Violated precondition: bad sizes, out-of-range indices, infeasible budgets.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An iterative solver failed to reach its tolerance within the iteration cap.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& message, double achieved_residual, int iterations)
        : std::runtime_error(message),
          achieved_residual_(achieved_residual),
          iterations_(iterations) {}

    /// Relative residual at the point the solver gave up.
    double achieved_residual() const noexcept { return achieved_residual_; }
    int iterations() const noexcept { return iterations_; }

private:
    double achieved_residual_;
    int iterations_;
};

}  // namespace lforge
