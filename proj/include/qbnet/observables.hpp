#pragma once

#include "qbnet/dynamics.hpp"
#include "qbnet/network.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qbnet {

/// E(t)/omega = |alpha_mode(t)|^2 on a time grid.
struct EnergyCurve {
    std::string mode;
    std::vector<double> times;
    std::vector<double> energy;
};

/// P(t) = E(t)/t on a grid of strictly positive times.
struct PowerCurve {
    std::string mode;
    std::vector<double> times;
    std::vector<double> power;
};

struct MaxPower {
    double t_star = 0.0;
    double p_max = 0.0;
};

/// Gains of the nonreciprocal variant over the two reciprocal ones for one
/// battery. Ratios are empty when their denominator underflows.
struct GainEntry {
    std::string target;
    double e_nr = 0.0;
    double e_r1 = 0.0;
    double e_r2 = 0.0;
    std::optional<double> g1;
    std::optional<double> g2;
    std::optional<MaxPower> p_nr;
    std::optional<MaxPower> p_r1;
    std::optional<MaxPower> p_r2;
    std::optional<double> eta1;
    std::optional<double> eta2;
};

struct GainReport {
    TopologyParams scenario;
    std::vector<GainEntry> entries;

    /// Entry for a given battery id; throws std::out_of_range if absent.
    [[nodiscard]] const GainEntry& at(std::string_view target) const;
};

/// Denominators below this are treated as zero when forming ratios.
inline constexpr double ratio_floor = 1e-300;

[[nodiscard]] std::optional<double> safe_ratio(double num, double den);

/// Terminal battery b_N for cascaded scenarios, used as the default target.
[[nodiscard]] std::string default_target(const TopologyParams& params);
/// Targets reported by gain_report: {b_N} for cascaded, {b_1..b_N} for parallel.
[[nodiscard]] std::vector<std::string> report_targets(const TopologyParams& params);

[[nodiscard]] double steady_energy(const LinearSystem& sys, std::string_view target);
/// Throws UnstableSystemError for a non-Hurwitz network.
[[nodiscard]] double steady_energy(const TopologyParams& params, std::string_view target);

[[nodiscard]] EnergyCurve energy_curve(const LinearSystem& sys, std::string_view target,
                                       std::span<const double> times);
/// Charging from vacuum.
[[nodiscard]] EnergyCurve energy_curve(const TopologyParams& params, std::string_view target,
                                       std::span<const double> times);

[[nodiscard]] PowerCurve power_curve(const LinearSystem& sys, std::string_view target,
                                     std::span<const double> times);
[[nodiscard]] PowerCurve power_curve(const TopologyParams& params, std::string_view target,
                                     std::span<const double> times);

/// Maximum of P(t) over (0, 50 t_relax], t_relax = 1/|spectral abscissa|:
/// 2000-point log scan, then golden section to 1e-8 relative in t.
[[nodiscard]] MaxPower max_power(const LinearSystem& sys, std::string_view target);
[[nodiscard]] MaxPower max_power(const TopologyParams& params, std::string_view target);

/// Evaluates r1, r2 and nr variants of `base` (its variant field is ignored).
[[nodiscard]] GainReport gain_report(const TopologyParams& base, bool include_power);

}  // namespace qbnet
