#include "qbnet/network.hpp"

#include "qbnet/errors.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace qbnet {

namespace {

constexpr double pi = std::numbers::pi;

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& item : items) {
        if (!out.empty()) {
            out += "; ";
        }
        out += item;
    }
    return out;
}

bool finite_nonnegative(double x) { return std::isfinite(x) && x >= 0.0; }

void throw_if_invalid(const TopologyParams& params) {
    if (auto violations = validate(params); !violations.empty()) {
        throw ValidationError(std::move(violations));
    }
}

double wrap_phase(double theta) {
    if (theta > -pi && theta <= pi) {
        return theta;
    }
    double wrapped = std::remainder(theta, 2 * pi);
    return wrapped <= -pi ? wrapped + 2 * pi : wrapped;
}

ModeSpec make_mode(std::string id, ModeRole role, double decay) {
    return ModeSpec{std::move(id), role, decay, 0.0};
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> violations)
    : std::invalid_argument("validation failed: " + join(violations)), violations_(std::move(violations)) {}

const ModeSpec* NetworkSpec::find_mode(std::string_view id) const {
    for (const auto& mode : modes) {
        if (mode.id == id) {
            return &mode;
        }
    }
    return nullptr;
}

TopologyParams TopologyParams::uniform(Family family, Variant variant, int n, double g_b, double gamma,
                                       double big_gamma, complex xi) {
    TopologyParams p;
    p.family = family;
    p.variant = variant;
    p.n = n;
    p.g_b = g_b;
    p.gamma_c = gamma;
    p.gamma_b.assign(static_cast<std::size_t>(std::max(n, 0)), gamma);
    p.big_gamma = big_gamma;
    p.xi = xi;
    return p;
}

TopologyParams TopologyParams::with_variant(Variant v) const {
    TopologyParams p = *this;
    p.variant = v;
    return p;
}

std::string_view to_string(ModeRole role) {
    switch (role) {
        case ModeRole::charger: return "charger";
        case ModeRole::battery: return "battery";
        case ModeRole::intermediate: return "intermediate";
    }
    return "?";
}

std::string_view to_string(Family family) {
    return family == Family::cascaded ? "cascaded" : "parallel";
}

std::string_view to_string(Variant variant) {
    switch (variant) {
        case Variant::r1: return "r1";
        case Variant::r2: return "r2";
        case Variant::nr: return "nr";
        case Variant::custom: return "custom";
    }
    return "?";
}

ModeRole parse_role(std::string_view text) {
    if (text == "charger") return ModeRole::charger;
    if (text == "battery") return ModeRole::battery;
    if (text == "intermediate") return ModeRole::intermediate;
    throw std::invalid_argument("unknown mode role '" + std::string(text) + "'");
}

Family parse_family(std::string_view text) {
    if (text == "cascaded") return Family::cascaded;
    if (text == "parallel") return Family::parallel;
    throw std::invalid_argument("unknown family '" + std::string(text) + "' (expected cascaded|parallel)");
}

Variant parse_variant(std::string_view text) {
    if (text == "r1") return Variant::r1;
    if (text == "r2") return Variant::r2;
    if (text == "nr") return Variant::nr;
    if (text == "custom") return Variant::custom;
    throw std::invalid_argument("unknown variant '" + std::string(text) + "' (expected r1|r2|nr|custom)");
}

std::string battery_id(int k) { return "b" + std::to_string(k); }
std::string intermediate_id(int k) { return "a" + std::to_string(k); }

complex unit_phasor(double theta) {
    if (theta == 0.0) return {1.0, 0.0};
    if (theta == pi / 2) return {0.0, 1.0};
    if (theta == -pi / 2) return {0.0, -1.0};
    if (theta == pi || theta == -pi) return {-1.0, 0.0};
    return std::polar(1.0, theta);
}

double matched_coupling(double g_b, double big_gamma) {
    if (!(big_gamma > 0.0) || !std::isfinite(big_gamma)) {
        throw std::domain_error("matched_coupling: Gamma must be positive and finite");
    }
    if (!finite_nonnegative(g_b)) {
        throw std::domain_error("matched_coupling: g_b must be non-negative and finite");
    }
    return std::sqrt(g_b * big_gamma / 2.0);
}

std::vector<double> direct_phases(const TopologyParams& params) {
    const auto n = static_cast<std::size_t>(std::max(params.n, 0));
    switch (params.variant) {
        case Variant::r2: return std::vector<double>(n, 0.0);
        case Variant::nr: return std::vector<double>(n, -pi / 2);
        case Variant::r1:
            return params.thetas.empty() ? std::vector<double>(n, 0.0) : params.thetas;
        case Variant::custom: return params.thetas;
    }
    return {};
}

std::vector<std::string> validate(const TopologyParams& params) {
    std::vector<std::string> out;
    if (params.n < 1) {
        out.push_back("n: battery count must be >= 1 (got " + std::to_string(params.n) + ")");
    }
    if (!finite_nonnegative(params.g_b)) out.push_back("g_b: must be finite and >= 0");
    if (!finite_nonnegative(params.gamma_c)) out.push_back("gamma_c: must be finite and >= 0");
    if (params.n >= 1 && params.gamma_b.size() != static_cast<std::size_t>(params.n)) {
        out.push_back("gamma_b: expected " + std::to_string(params.n) + " entries, got " +
                      std::to_string(params.gamma_b.size()));
    }
    for (std::size_t k = 0; k < params.gamma_b.size(); ++k) {
        if (!finite_nonnegative(params.gamma_b[k])) {
            out.push_back("gamma_b[" + std::to_string(k) + "]: must be finite and >= 0");
        }
    }
    if (!std::isfinite(params.xi.real()) || !std::isfinite(params.xi.imag())) {
        out.push_back("xi: must be finite");
    }
    const bool needs_intermediates = params.variant != Variant::r1;
    if (needs_intermediates && (!(params.big_gamma > 0.0) || !std::isfinite(params.big_gamma))) {
        out.push_back("big_gamma: intermediate decay must be finite and > 0 for variant " +
                      std::string(to_string(params.variant)));
    } else if (!finite_nonnegative(params.big_gamma)) {
        out.push_back("big_gamma: must be finite and >= 0");
    }
    const bool needs_thetas = params.variant == Variant::custom;
    if ((needs_thetas || !params.thetas.empty()) && params.n >= 1 &&
        params.thetas.size() != static_cast<std::size_t>(params.n)) {
        out.push_back("thetas: expected " + std::to_string(params.n) + " entries, got " +
                      std::to_string(params.thetas.size()));
    }
    for (std::size_t k = 0; k < params.thetas.size(); ++k) {
        if (!std::isfinite(params.thetas[k])) {
            out.push_back("thetas[" + std::to_string(k) + "]: must be finite");
        }
    }
    return out;
}

std::vector<std::string> validate(const NetworkSpec& spec) {
    std::vector<std::string> out;
    if (spec.modes.empty()) {
        out.emplace_back("network: at least one mode is required");
    }
    std::set<std::string> ids;
    for (const auto& mode : spec.modes) {
        if (mode.id.empty()) {
            out.emplace_back("mode: empty id");
        } else if (!ids.insert(mode.id).second) {
            out.push_back("mode '" + mode.id + "': duplicate id");
        }
        if (!finite_nonnegative(mode.decay_rate)) {
            out.push_back("mode '" + mode.id + "': decay_rate must be finite and >= 0");
        }
        if (!std::isfinite(mode.detuning)) {
            out.push_back("mode '" + mode.id + "': detuning must be finite");
        }
    }
    std::set<std::pair<std::string, std::string>> pairs;
    for (const auto& c : spec.couplings) {
        const std::string label = "coupling " + c.source + "->" + c.target;
        if (!ids.contains(c.source)) out.push_back(label + ": unknown source mode '" + c.source + "'");
        if (!ids.contains(c.target)) out.push_back(label + ": unknown target mode '" + c.target + "'");
        if (c.source == c.target) out.push_back(label + ": source and target coincide");
        if (!finite_nonnegative(c.strength)) out.push_back(label + ": strength must be finite and >= 0");
        if (!std::isfinite(c.phase) || c.phase <= -pi || c.phase > pi) {
            out.push_back(label + ": phase must lie in (-pi, pi]");
        }
        auto key = std::minmax(c.source, c.target);
        if (!pairs.emplace(key.first, key.second).second) {
            out.push_back(label + ": mode pair coupled more than once");
        }
    }
    for (const auto& d : spec.drives) {
        if (!ids.contains(d.mode)) out.push_back("drive on '" + d.mode + "': unknown mode");
        if (!std::isfinite(d.amplitude.real()) || !std::isfinite(d.amplitude.imag())) {
            out.push_back("drive on '" + d.mode + "': amplitude must be finite");
        }
    }
    return out;
}

NetworkSpec build_cascaded(const TopologyParams& params) {
    if (params.family != Family::cascaded) {
        throw ValidationError({"family: build_cascaded requires family=cascaded"});
    }
    throw_if_invalid(params);
    const auto phases = direct_phases(params);
    const bool intermediates = params.variant != Variant::r1;
    const double g_ind = intermediates ? matched_coupling(params.g_b, params.big_gamma) : 0.0;

    NetworkSpec spec;
    spec.modes.push_back(make_mode(std::string(charger_id), ModeRole::charger, params.gamma_c));
    for (int k = 1; k <= params.n; ++k) {
        if (intermediates) {
            spec.modes.push_back(make_mode(intermediate_id(k), ModeRole::intermediate, params.big_gamma));
        }
        spec.modes.push_back(make_mode(battery_id(k), ModeRole::battery, params.gamma_b[k - 1]));
    }
    for (int k = 1; k <= params.n; ++k) {
        const std::string upstream = k == 1 ? std::string(charger_id) : battery_id(k - 1);
        spec.couplings.push_back({upstream, battery_id(k), params.g_b, wrap_phase(phases[k - 1])});
        if (intermediates) {
            spec.couplings.push_back({upstream, intermediate_id(k), g_ind, 0.0});
            spec.couplings.push_back({intermediate_id(k), battery_id(k), g_ind, 0.0});
        }
    }
    spec.drives.push_back({std::string(charger_id), params.xi});
    return spec;
}

NetworkSpec build_parallel(const TopologyParams& params) {
    if (params.family != Family::parallel) {
        throw ValidationError({"family: build_parallel requires family=parallel"});
    }
    throw_if_invalid(params);
    const auto phases = direct_phases(params);
    const bool intermediates = params.variant != Variant::r1;
    const double g_ind = intermediates ? matched_coupling(params.g_b, params.big_gamma) : 0.0;

    NetworkSpec spec;
    spec.modes.push_back(make_mode(std::string(charger_id), ModeRole::charger, params.gamma_c));
    for (int k = 1; k <= params.n; ++k) {
        if (intermediates) {
            spec.modes.push_back(make_mode(intermediate_id(k), ModeRole::intermediate, params.big_gamma));
        }
        spec.modes.push_back(make_mode(battery_id(k), ModeRole::battery, params.gamma_b[k - 1]));
    }
    for (int k = 1; k <= params.n; ++k) {
        spec.couplings.push_back({std::string(charger_id), battery_id(k), params.g_b, wrap_phase(phases[k - 1])});
        if (intermediates) {
            spec.couplings.push_back({std::string(charger_id), intermediate_id(k), g_ind, 0.0});
            spec.couplings.push_back({intermediate_id(k), battery_id(k), g_ind, 0.0});
        }
    }
    spec.drives.push_back({std::string(charger_id), params.xi});
    return spec;
}

NetworkSpec build_network(const TopologyParams& params) {
    return params.family == Family::cascaded ? build_cascaded(params) : build_parallel(params);
}

}  // namespace qbnet
