#pragma once

#include "qbnet/network.hpp"

#include <Eigen/Dense>

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qbnet {

using cvec = Eigen::VectorXcd;
using cmat = Eigen::MatrixXcd;

/// First-moment dynamics d(alpha)/dt = M alpha + d of a validated network.
///
/// For a coupling (s -> t, g, theta) row t gains -i g e^{i theta} at column s
/// and row s gains -i g e^{-i theta} at column t. The diagonal holds
/// -i detuning - decay/2, and a drive xi on mode m puts -i xi into d[m].
/// By construction M + M^dagger = -diag(decay_rates).
struct LinearSystem {
    cmat matrix;
    cvec drive;
    std::vector<std::string> ids;
    Eigen::VectorXd decay_rates;

    [[nodiscard]] Eigen::Index size() const noexcept { return matrix.rows(); }
    /// Row/column of a mode; throws std::out_of_range for an unknown id.
    [[nodiscard]] Eigen::Index index(std::string_view id) const;
};

struct SteadyState {
    cvec amplitudes;
    double residual = 0.0;
    double condition_estimate = 0.0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<cvec> amplitudes;
};

struct Stability {
    bool stable = false;
    double spectral_abscissa = 0.0;
};

enum class Propagator {
    automatic,           // matrix exponential, integrator when M is singular
    matrix_exponential,
    adaptive_integrator,
};

struct IntegratorOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
};

/// Condition estimate above which a steady state is refused.
inline constexpr double max_steady_condition = 1e12;

/// Throws ValidationError if the spec is invalid.
[[nodiscard]] LinearSystem assemble(const NetworkSpec& spec);

/// Solves M alpha = -d. Throws SingularSystemError when the condition
/// estimate of M exceeds max_steady_condition.
[[nodiscard]] SteadyState steady_state(const LinearSystem& sys);

/// alpha(t) = alpha_ss + exp(M t)(alpha(0) - alpha_ss) on the given grid.
/// Times must be finite, non-negative and strictly increasing.
[[nodiscard]] Trajectory evolve(const LinearSystem& sys, const cvec& initial, std::span<const double> times,
                                Propagator method = Propagator::automatic,
                                const IntegratorOptions& options = {});

[[nodiscard]] Stability is_stable(const LinearSystem& sys);

/// Matrix exponential by Pade scaling and squaring (degrees 3..13).
[[nodiscard]] cmat expm(const cmat& a);

}  // namespace qbnet
