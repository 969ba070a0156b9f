#include "qbnet/nonreciprocity.hpp"

#include "qbnet/closed_forms.hpp"
#include "qbnet/dynamics.hpp"
#include "qbnet/observables.hpp"
#include "qbnet/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace qbnet {

namespace {

constexpr double pi = std::numbers::pi;
constexpr std::size_t kMaxLandscapePoints = 4'000'000;

IsolationResult from_link(double theta, const EffectiveLink& link) {
    IsolationResult r;
    r.theta = theta;
    r.forward_t = std::norm(link.forward_amp);
    r.backward_t = std::norm(link.backward_amp);
    r.ratio = r.backward_t > 0.0 ? r.forward_t / r.backward_t : std::numeric_limits<double>::infinity();
    return r;
}

NetworkSpec triangle(double theta, double g_b, double gamma, double big_gamma) {
    const double g = matched_coupling(g_b, big_gamma);
    NetworkSpec spec;
    spec.modes = {{"c", ModeRole::charger, gamma, 0.0},
                  {"a", ModeRole::intermediate, big_gamma, 0.0},
                  {"b", ModeRole::battery, gamma, 0.0}};
    spec.couplings = {{"c", "b", g_b, theta}, {"c", "a", g, 0.0}, {"a", "b", g, 0.0}};
    return spec;
}

}  // namespace

bool IsolationResult::ratio_infinite() const { return std::isinf(ratio); }

IsolationResult isolation(double theta, double g_b, double big_gamma) {
    if (!(big_gamma > 0.0)) {
        throw std::domain_error("isolation: Gamma must be positive");
    }
    return from_link(theta, matched_link(theta, g_b));
}

IsolationResult isolation(double theta, double g_b, double g1, double g2, double big_gamma) {
    return from_link(theta, effective_link(theta, g_b, g1, g2, big_gamma));
}

bool window_check(double theta) {
    const IsolationResult r = isolation(theta, 1.0, 1.0);
    return r.forward_t > r.backward_t;
}

ProbeResult isolation_probe(double theta, double g_b, double gamma, double big_gamma, complex xi) {
    NetworkSpec forward = triangle(theta, g_b, gamma, big_gamma);
    forward.drives = {{"c", xi}};
    NetworkSpec backward = triangle(theta, g_b, gamma, big_gamma);
    backward.drives = {{"b", xi}};
    const LinearSystem fwd = assemble(forward);
    const LinearSystem bwd = assemble(backward);
    return {std::norm(steady_state(fwd).amplitudes[fwd.index("b")]),
            std::norm(steady_state(bwd).amplitudes[bwd.index("c")])};
}

double PhaseLandscape::at(std::span<const std::size_t> index) const {
    if (index.size() != static_cast<std::size_t>(axes)) {
        throw std::invalid_argument("PhaseLandscape::at: wrong number of indices");
    }
    std::size_t flat = 0;
    for (const auto i : index) {
        flat = flat * grid.size() + i;
    }
    return values.at(flat);
}

std::vector<double> phase_grid(int points) {
    if (points < 1) {
        throw std::invalid_argument("phase_grid: need at least one point");
    }
    std::vector<double> grid(static_cast<std::size_t>(points));
    for (int j = 0; j < points; ++j) {
        grid[static_cast<std::size_t>(j)] = j + 1 == points ? pi : -pi + 2.0 * pi * (j + 1) / points;
    }
    return grid;
}

PhaseLandscape phase_landscape(const TopologyParams& params, std::string_view target, int points) {
    if (params.variant != Variant::custom && params.variant != Variant::r1) {
        throw std::invalid_argument("phase_landscape: variant must be custom (or r1)");
    }
    if (points < 21) {
        throw std::invalid_argument("phase_landscape: need at least 21 grid points per axis");
    }
    PhaseLandscape land;
    land.grid = phase_grid(points);
    land.axes = params.n;
    land.target = std::string(target);

    std::size_t total = 1;
    for (int a = 0; a < params.n; ++a) {
        total *= land.grid.size();
        if (total > kMaxLandscapePoints) {
            throw std::invalid_argument("phase_landscape: grid too large");
        }
    }
    land.values.assign(total, 0.0);

    auto tuple_of = [&](std::size_t flat) {
        std::vector<double> thetas(static_cast<std::size_t>(params.n));
        for (std::size_t a = thetas.size(); a-- > 0;) {
            thetas[a] = land.grid[flat % land.grid.size()];
            flat /= land.grid.size();
        }
        return thetas;
    };

    parallel_for(total, [&](std::size_t i) {
        TopologyParams p = params;
        p.thetas = tuple_of(i);
        land.values[i] = steady_energy(p, target);
    });

    const double best = *std::max_element(land.values.begin(), land.values.end());
    for (std::size_t i = 0; i < total; ++i) {
        if (land.values[i] >= best * (1.0 - landscape_tie_tolerance)) {
            land.argmax.push_back(tuple_of(i));
        }
    }
    return land;
}

}  // namespace qbnet
