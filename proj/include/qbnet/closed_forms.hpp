#pragma once

#include "qbnet/network.hpp"
#include "qbnet/optimize.hpp"

#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace qbnet {

/// Directional link between an upstream mode u and a downstream mode v after
/// eliminating the intermediate mode of an AB triangle at steady state:
///
///   dv/dt ⊃ forward_amp * u,   du/dt ⊃ backward_amp * v,
///
/// and each end picks up an extra amplitude damping (added to decay/2).
struct EffectiveLink {
    complex forward_amp;
    complex backward_amp;
    double induced_decay_upstream = 0.0;
    double induced_decay_downstream = 0.0;
};

/// Tridiagonal chain c = x_0, b_1 = x_1, ..., b_N = x_N with
///   0 = -(decay_k / 2) x_k + forward[k-1] x_{k-1} + backward[k] x_{k+1} (- i xi on x_0).
/// `forward` and `backward` have N entries (link k joins x_{k-1} and x_k);
/// `decay` has N + 1 entries holding effective energy decay rates.
struct ChainLinkCoeffs {
    std::vector<complex> forward;
    std::vector<complex> backward;
    std::vector<double> decay;
};

/// General triangle elimination. Throws std::domain_error for Gamma <= 0.
[[nodiscard]] EffectiveLink effective_link(double theta, double g_b, double g1, double g2, double big_gamma);

/// Matched triangle (g1 = g2 = sqrt(g_b Gamma / 2)); Gamma drops out, so the
/// isolation at theta = -pi/2 is exact.
[[nodiscard]] EffectiveLink matched_link(double theta, double g_b);

/// Direct link without an intermediate mode.
[[nodiscard]] EffectiveLink direct_link(double theta, double g_b);

/// Effective chain of a cascaded scenario (any variant; matched intermediates).
[[nodiscard]] ChainLinkCoeffs chain_coeffs(const TopologyParams& params);

/// Steady amplitudes (c, b_1, ..., b_N) of an effective chain by backward
/// continued-fraction folding and forward substitution.
/// Throws ResonantDivergenceError if a folded denominator vanishes.
[[nodiscard]] std::vector<complex> directional_chain_steady(const ChainLinkCoeffs& coeffs, complex xi);

/// Terminal-battery energy of a cascaded scenario via the chain recursion.
[[nodiscard]] double cascaded_chain_energy(const TopologyParams& params);

/// Reciprocal (r1) cascaded terminal energy with uniform decay gamma.
[[nodiscard]] double cascaded_r1_energy(int n, double g_b, double gamma, double xi);

/// [2^{2N+1} g^N xi / ((2g + gamma)^2 (4g + gamma)^{N-1})]^2.
[[nodiscard]] double cascaded_nr_energy(int n, double g_b, double gamma, double xi);

/// 16 g^2 xi^2 / (gamma_k^2 (gamma_c + 4 g^2 sum_j 1/gamma_j)^2); k is 1-based.
[[nodiscard]] double parallel_r1_energy(int n, double g_b, double gamma_c, std::span<const double> gamma_b,
                                        double xi, int k);

/// 64 xi^2 g^2 / ((2g + gamma_k)^2 (2 N g + gamma_c)^2).
[[nodiscard]] double parallel_nr_energy(int n, double g_b, double gamma_c, double gamma_b_k, double xi);

/// [N + sqrt(N (8 + N))] gamma / 8, the maximiser of cascaded_nr_energy for odd N.
[[nodiscard]] double g_opt_odd(int n, double gamma);

/// Weak-coupling G_{N1} approximation at x = g_b / gamma.
[[nodiscard]] double gain_approx(Family family, int n, double x);

/// g_b -> 0 limits (G_{N1}, G_{N2}).
[[nodiscard]] std::pair<double, double> gain_bounds(Family family, int n);

/// Maximises energy(g_b) for g_b / gamma in [1e-4, 10]: log scan then golden
/// section to 1e-10 relative.
[[nodiscard]] Maximum maximize_over_coupling(const std::function<double(double)>& energy, double gamma);

struct LogFit {
    double k = 0.0;
    std::vector<int> ns;
    std::vector<double> gb_opt_nr;
    std::vector<double> gb_opt_r1;
    std::vector<double> ratios;
};

/// Fits E_max^nr / E_max^r1 = 1 + k ln N over the given odd N (at least 3).
[[nodiscard]] LogFit logfit_ratio(std::span<const int> odd_ns, double gamma = 0.1, double xi = 1.0);

}  // namespace qbnet
