#include "qbnet/closed_forms.hpp"

#include "qbnet/errors.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qbnet {

namespace {

constexpr complex I{0.0, 1.0};
constexpr std::size_t kCouplingScanPoints = 801;
constexpr double kCouplingRelTol = 1e-10;

void require_positive(double x, const char* what) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw std::domain_error(std::string(what) + " must be positive and finite");
    }
}

}  // namespace

EffectiveLink effective_link(double theta, double g_b, double g1, double g2, double big_gamma) {
    require_positive(big_gamma, "effective_link: Gamma");
    const complex phasor = unit_phasor(theta);
    const double indirect = 2.0 * g1 * g2 / big_gamma;
    return {-I * g_b * phasor - indirect, -I * g_b * std::conj(phasor) - indirect, 2.0 * g1 * g1 / big_gamma,
            2.0 * g2 * g2 / big_gamma};
}

EffectiveLink matched_link(double theta, double g_b) {
    const complex phasor = unit_phasor(theta);
    return {-I * g_b * phasor - g_b, -I * g_b * std::conj(phasor) - g_b, g_b, g_b};
}

EffectiveLink direct_link(double theta, double g_b) {
    const complex phasor = unit_phasor(theta);
    return {-I * g_b * phasor, -I * g_b * std::conj(phasor), 0.0, 0.0};
}

ChainLinkCoeffs chain_coeffs(const TopologyParams& params) {
    if (params.family != Family::cascaded) {
        throw ValidationError({"family: chain coefficients need a cascaded scenario"});
    }
    if (auto violations = validate(params); !violations.empty()) {
        throw ValidationError(std::move(violations));
    }
    const auto phases = direct_phases(params);
    const auto n = static_cast<std::size_t>(params.n);
    ChainLinkCoeffs coeffs;
    coeffs.decay.resize(n + 1);
    coeffs.decay[0] = params.gamma_c;
    for (std::size_t k = 0; k < n; ++k) {
        coeffs.decay[k + 1] = params.gamma_b[k];
    }
    for (std::size_t k = 0; k < n; ++k) {
        const EffectiveLink link =
            params.variant == Variant::r1 ? direct_link(phases[k], params.g_b) : matched_link(phases[k], params.g_b);
        coeffs.forward.push_back(link.forward_amp);
        coeffs.backward.push_back(link.backward_amp);
        // Amplitude damping contributes twice its value to the energy rate.
        coeffs.decay[k] += 2.0 * link.induced_decay_upstream;
        coeffs.decay[k + 1] += 2.0 * link.induced_decay_downstream;
    }
    return coeffs;
}

std::vector<complex> directional_chain_steady(const ChainLinkCoeffs& coeffs, complex xi) {
    const std::size_t n = coeffs.forward.size();
    if (coeffs.backward.size() != n || coeffs.decay.size() != n + 1) {
        throw std::invalid_argument("directional_chain_steady: inconsistent coefficient lengths");
    }
    // chi_k folds everything downstream of mode k into an effective damping.
    std::vector<complex> chi(n + 1);
    chi[n] = coeffs.decay[n] / 2.0;
    for (std::size_t k = n; k-- > 0;) {
        if (chi[k + 1] == complex{0.0, 0.0}) {
            throw ResonantDivergenceError("directional_chain_steady: vanishing continued-fraction denominator at mode " +
                                          std::to_string(k + 1));
        }
        chi[k] = coeffs.decay[k] / 2.0 - coeffs.backward[k] * coeffs.forward[k] / chi[k + 1];
    }
    if (chi[0] == complex{0.0, 0.0}) {
        throw ResonantDivergenceError("directional_chain_steady: vanishing continued-fraction denominator at mode 0");
    }
    std::vector<complex> amps(n + 1);
    amps[0] = -I * xi / chi[0];
    for (std::size_t k = 1; k <= n; ++k) {
        amps[k] = coeffs.forward[k - 1] * amps[k - 1] / chi[k];
    }
    return amps;
}

double cascaded_chain_energy(const TopologyParams& params) {
    const auto amps = directional_chain_steady(chain_coeffs(params), params.xi);
    return std::norm(amps.back());
}

double cascaded_r1_energy(int n, double g_b, double gamma, double xi) {
    return cascaded_chain_energy(TopologyParams::uniform(Family::cascaded, Variant::r1, n, g_b, gamma, 0.0, xi));
}

double cascaded_nr_energy(int n, double g_b, double gamma, double xi) {
    require_positive(gamma, "cascaded_nr_energy: gamma");
    if (n < 1) {
        throw std::domain_error("cascaded_nr_energy: N must be >= 1");
    }
    const double amp = std::pow(2.0, 2 * n + 1) * std::pow(g_b, n) * xi /
                       ((2 * g_b + gamma) * (2 * g_b + gamma) * std::pow(4 * g_b + gamma, n - 1));
    return amp * amp;
}

double parallel_r1_energy(int n, double g_b, double gamma_c, std::span<const double> gamma_b, double xi, int k) {
    if (n < 1 || gamma_b.size() != static_cast<std::size_t>(n) || k < 1 || k > n) {
        throw std::domain_error("parallel_r1_energy: need N >= 1, N decay rates and 1 <= k <= N");
    }
    require_positive(gamma_c, "parallel_r1_energy: gamma_c");
    double inverse_sum = 0.0;
    for (const double g : gamma_b) {
        require_positive(g, "parallel_r1_energy: gamma_b");
        inverse_sum += 1.0 / g;
    }
    const double gk = gamma_b[static_cast<std::size_t>(k - 1)];
    const double den = gk * (gamma_c + 4.0 * g_b * g_b * inverse_sum);
    return 16.0 * g_b * g_b * xi * xi / (den * den);
}

double parallel_nr_energy(int n, double g_b, double gamma_c, double gamma_b_k, double xi) {
    if (n < 1) {
        throw std::domain_error("parallel_nr_energy: N must be >= 1");
    }
    require_positive(gamma_c, "parallel_nr_energy: gamma_c");
    require_positive(gamma_b_k, "parallel_nr_energy: gamma_b");
    const double den = (2 * g_b + gamma_b_k) * (2 * n * g_b + gamma_c);
    return 64.0 * xi * xi * g_b * g_b / (den * den);
}

double g_opt_odd(int n, double gamma) {
    if (n < 1 || n % 2 == 0) {
        throw std::domain_error("g_opt_odd: N must be an odd integer >= 1");
    }
    const double nn = n;
    return (nn + std::sqrt(nn * (8.0 + nn))) * gamma / 8.0;
}

double gain_approx(Family family, int n, double x) {
    if (family == Family::cascaded) {
        const double r = std::pow(2.0, n) / (4.0 * n * x + 1.0);
        return r * r;
    }
    const double r = 2.0 / ((2.0 * n + 2.0) * x + 1.0);
    return r * r;
}

std::pair<double, double> gain_bounds(Family family, int n) {
    if (n < 1) {
        throw std::domain_error("gain_bounds: N must be >= 1");
    }
    if (family == Family::cascaded) {
        return {std::pow(2.0, 2 * n), std::pow(2.0, n)};
    }
    return {4.0, 2.0};
}

Maximum maximize_over_coupling(const std::function<double(double)>& energy, double gamma) {
    require_positive(gamma, "maximize_over_coupling: gamma");
    auto of_ratio = [&](double x) { return energy(x * gamma); };
    Maximum m = log_scan_maximize(of_ratio, 1e-4, 10.0, kCouplingScanPoints, kCouplingRelTol);
    m.argmax *= gamma;
    return m;
}

LogFit logfit_ratio(std::span<const int> odd_ns, double gamma, double xi) {
    if (odd_ns.size() < 3) {
        throw std::domain_error("logfit_ratio: need at least three odd N");
    }
    LogFit fit;
    double num = 0.0;
    double den = 0.0;
    for (const int n : odd_ns) {
        if (n < 1 || n % 2 == 0) {
            throw std::domain_error("logfit_ratio: N must be odd and >= 1");
        }
        const Maximum nr = maximize_over_coupling([&](double g) { return cascaded_nr_energy(n, g, gamma, xi); }, gamma);
        const Maximum r1 = maximize_over_coupling([&](double g) { return cascaded_r1_energy(n, g, gamma, xi); }, gamma);
        const double ratio = nr.value / r1.value;
        fit.ns.push_back(n);
        fit.gb_opt_nr.push_back(nr.argmax);
        fit.gb_opt_r1.push_back(r1.argmax);
        fit.ratios.push_back(ratio);
        const double ln = std::log(static_cast<double>(n));
        num += ln * (ratio - 1.0);
        den += ln * ln;
    }
    if (!(den > 0.0)) {
        throw std::domain_error("logfit_ratio: need at least one N > 1");
    }
    fit.k = num / den;
    return fit;
}

}  // namespace qbnet
