#pragma once

#include "qbnet/network.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qbnet {

/// Squared magnitudes of the effective forward/backward link coefficients.
/// `ratio` is +infinity when the backward path is fully cancelled.
struct IsolationResult {
    double theta = 0.0;
    double forward_t = 0.0;
    double backward_t = 0.0;
    double ratio = 0.0;

    [[nodiscard]] bool ratio_infinite() const;
};

/// Matched triangle: forward 2 g^2 (1 - sin theta), backward 2 g^2 (1 + sin theta).
[[nodiscard]] IsolationResult isolation(double theta, double g_b, double big_gamma);
/// Arbitrary intermediate couplings.
[[nodiscard]] IsolationResult isolation(double theta, double g_b, double g1, double g2, double big_gamma);

/// True iff the forward link dominates, i.e. theta in (-pi, 0).
[[nodiscard]] bool window_check(double theta);

/// Full-network drive-relocation probe on a single c-a-b triangle with
/// matched couplings and equal decay gamma on c and b.
struct ProbeResult {
    double forward_energy = 0.0;   // |b|^2 with the drive on c
    double backward_energy = 0.0;  // |c|^2 with the drive on b
};
[[nodiscard]] ProbeResult isolation_probe(double theta, double g_b, double gamma, double big_gamma,
                                          complex xi = {1.0, 0.0});

/// Steady target energy over a uniform phase grid, one axis per direct
/// coupling. Values are row-major with the last axis fastest.
struct PhaseLandscape {
    std::vector<double> grid;
    int axes = 0;
    std::string target;
    std::vector<double> values;
    /// All grid tuples within tie_tolerance (relative) of the maximum.
    std::vector<std::vector<double>> argmax;

    [[nodiscard]] double at(std::span<const std::size_t> index) const;
};

/// Relative tolerance for reporting tied maxima.
inline constexpr double landscape_tie_tolerance = 1e-9;

/// `points` values -pi + 2 pi (j + 1) / points, j = 0..points-1, covering (-pi, pi].
[[nodiscard]] std::vector<double> phase_grid(int points);

/// Requires variant custom or r1, and points >= 21. params.thetas is ignored.
[[nodiscard]] PhaseLandscape phase_landscape(const TopologyParams& params, std::string_view target, int points);

}  // namespace qbnet
