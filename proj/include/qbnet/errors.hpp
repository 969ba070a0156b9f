#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace qbnet {

/// Raised when a network or parameter bundle breaks one of its invariants.
/// Carries every violation found, not just the first.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(std::vector<std::string> violations);

    [[nodiscard]] const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    std::vector<std::string> violations_;
};

/// Base class for failures of the numerical machinery (singular systems,
/// unstable dynamics, integrator breakdown).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SingularSystemError : public NumericError {
public:
    SingularSystemError(const std::string& what, double condition_estimate)
        : NumericError(what), condition_estimate_(condition_estimate) {}

    [[nodiscard]] double condition_estimate() const noexcept { return condition_estimate_; }

private:
    double condition_estimate_;
};

class UnstableSystemError : public NumericError {
public:
    UnstableSystemError(const std::string& what, double spectral_abscissa)
        : NumericError(what), spectral_abscissa_(spectral_abscissa) {}

    [[nodiscard]] double spectral_abscissa() const noexcept { return spectral_abscissa_; }

private:
    double spectral_abscissa_;
};

/// A vanishing continued-fraction denominator in the directional chain solver.
class ResonantDivergenceError : public NumericError {
public:
    using NumericError::NumericError;
};

}  // namespace qbnet
