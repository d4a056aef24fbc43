#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cqed {

/// Invalid or unsafe configuration (bad parameter, unknown key, truncation too small).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical routine failed (non-convergence, loss of unitarity, defective decomposition).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Requested level/label lies outside what the truncated model can represent.
class RangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Argument outside the mathematical domain of a closed-form expression.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Root-finder gave up; carries the residual vector at the last iterate.
class FitError : public NumericError {
public:
    FitError(const std::string& what, std::vector<double> residuals)
        : NumericError(what), residuals_(std::move(residuals)) {}

    const std::vector<double>& residuals() const noexcept { return residuals_; }

private:
    std::vector<double> residuals_;
};

}  // namespace cqed
