#include "qbnet/observables.hpp"

#include "qbnet/errors.hpp"
#include "qbnet/optimize.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qbnet {

namespace {

constexpr std::size_t kPowerScanPoints = 2000;
constexpr double kPowerRelTol = 1e-8;
constexpr double kHorizonRelaxTimes = 50.0;
constexpr double kScanStartRelaxTimes = 1e-6;

LinearSystem stable_system(const TopologyParams& params) {
    LinearSystem sys = assemble(build_network(params));
    const Stability st = is_stable(sys);
    if (!st.stable) {
        std::ostringstream msg;
        msg << "network is not stable (spectral abscissa " << st.spectral_abscissa << ")";
        throw UnstableSystemError(msg.str(), st.spectral_abscissa);
    }
    return sys;
}

}  // namespace

const GainEntry& GainReport::at(std::string_view target) const {
    for (const auto& e : entries) {
        if (e.target == target) {
            return e;
        }
    }
    throw std::out_of_range("gain report has no entry for '" + std::string(target) + "'");
}

std::optional<double> safe_ratio(double num, double den) {
    if (!(std::abs(den) >= ratio_floor)) {
        return std::nullopt;
    }
    const double r = num / den;
    if (!std::isfinite(r)) {
        return std::nullopt;
    }
    return r;
}

std::string default_target(const TopologyParams& params) { return battery_id(params.n); }

std::vector<std::string> report_targets(const TopologyParams& params) {
    if (params.family == Family::cascaded) {
        return {battery_id(params.n)};
    }
    std::vector<std::string> out;
    for (int k = 1; k <= params.n; ++k) {
        out.push_back(battery_id(k));
    }
    return out;
}

double steady_energy(const LinearSystem& sys, std::string_view target) {
    const auto idx = sys.index(target);
    return std::norm(steady_state(sys).amplitudes[idx]);
}

double steady_energy(const TopologyParams& params, std::string_view target) {
    return steady_energy(stable_system(params), target);
}

EnergyCurve energy_curve(const LinearSystem& sys, std::string_view target, std::span<const double> times) {
    const auto idx = sys.index(target);
    const Trajectory traj = evolve(sys, cvec::Zero(sys.size()), times);
    EnergyCurve curve;
    curve.mode = std::string(target);
    curve.times = traj.times;
    curve.energy.reserve(traj.amplitudes.size());
    for (const auto& a : traj.amplitudes) {
        curve.energy.push_back(std::norm(a[idx]));
    }
    return curve;
}

EnergyCurve energy_curve(const TopologyParams& params, std::string_view target, std::span<const double> times) {
    return energy_curve(assemble(build_network(params)), target, times);
}

PowerCurve power_curve(const LinearSystem& sys, std::string_view target, std::span<const double> times) {
    for (const double t : times) {
        if (!(t > 0.0)) {
            throw std::domain_error("power_curve: times must be strictly positive");
        }
    }
    const EnergyCurve e = energy_curve(sys, target, times);
    PowerCurve p;
    p.mode = e.mode;
    p.times = e.times;
    p.power.reserve(e.energy.size());
    for (std::size_t i = 0; i < e.times.size(); ++i) {
        p.power.push_back(e.energy[i] / e.times[i]);
    }
    return p;
}

PowerCurve power_curve(const TopologyParams& params, std::string_view target, std::span<const double> times) {
    return power_curve(assemble(build_network(params)), target, times);
}

MaxPower max_power(const LinearSystem& sys, std::string_view target) {
    const auto idx = sys.index(target);
    const Stability st = is_stable(sys);
    if (!st.stable) {
        std::ostringstream msg;
        msg << "max_power: network is not stable (spectral abscissa " << st.spectral_abscissa << ")";
        throw UnstableSystemError(msg.str(), st.spectral_abscissa);
    }
    const double t_relax = 1.0 / std::abs(st.spectral_abscissa);
    const cvec steady = steady_state(sys).amplitudes;

    // From vacuum: alpha(t) = (I - exp(M t)) alpha_ss.
    auto power = [&](double t) {
        const cmat prop = expm(sys.matrix * t);
        const complex a = steady[idx] - (prop.row(idx) * steady)(0);
        return std::norm(a) / t;
    };
    const Maximum m = log_scan_maximize(power, kScanStartRelaxTimes * t_relax, kHorizonRelaxTimes * t_relax,
                                        kPowerScanPoints, kPowerRelTol);
    return {m.argmax, m.value};
}

MaxPower max_power(const TopologyParams& params, std::string_view target) {
    return max_power(stable_system(params), target);
}

GainReport gain_report(const TopologyParams& base, bool include_power) {
    GainReport report;
    report.scenario = base;
    const LinearSystem nr = stable_system(base.with_variant(Variant::nr));
    const LinearSystem r1 = stable_system(base.with_variant(Variant::r1));
    const LinearSystem r2 = stable_system(base.with_variant(Variant::r2));
    const cvec ss_nr = steady_state(nr).amplitudes;
    const cvec ss_r1 = steady_state(r1).amplitudes;
    const cvec ss_r2 = steady_state(r2).amplitudes;

    for (const auto& target : report_targets(base)) {
        GainEntry e;
        e.target = target;
        e.e_nr = std::norm(ss_nr[nr.index(target)]);
        e.e_r1 = std::norm(ss_r1[r1.index(target)]);
        e.e_r2 = std::norm(ss_r2[r2.index(target)]);
        e.g1 = safe_ratio(e.e_nr, e.e_r1);
        e.g2 = safe_ratio(e.e_nr, e.e_r2);
        if (include_power) {
            e.p_nr = max_power(nr, target);
            e.p_r1 = max_power(r1, target);
            e.p_r2 = max_power(r2, target);
            e.eta1 = safe_ratio(e.p_nr->p_max, e.p_r1->p_max);
            e.eta2 = safe_ratio(e.p_nr->p_max, e.p_r2->p_max);
        }
        report.entries.push_back(std::move(e));
    }
    return report;
}

}  // namespace qbnet
