// Acceptance suite: each criterion prints one PASS/FAIL line with the
// measured figure of merit. Exit status is nonzero if any criterion fails.

#include "qbnet/closed_forms.hpp"
#include "qbnet/dynamics.hpp"
#include "qbnet/network.hpp"
#include "qbnet/nonreciprocity.hpp"
#include "qbnet/observables.hpp"
#include "qbnet/optimize.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

using namespace qbnet;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
    bool pass = true;
    std::string detail;
};

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// 1. Full cascaded nr network vs its closed form.
Outcome cascaded_exactness() {
    const double gamma = 0.1;
    double worst = 0.0;
    for (int n = 1; n <= 6; ++n) {
        for (double x : {0.01, 0.1, 1.0}) {
            for (double big : {1.0, 10.0}) {
                const auto p = TopologyParams::uniform(Family::cascaded, Variant::nr, n, x * gamma, gamma, big * gamma);
                const double dense = steady_energy(p, battery_id(n));
                worst = std::max(worst, rel_err(dense, cascaded_nr_energy(n, x * gamma, gamma, 1.0)));
            }
        }
    }
    return {worst <= 1e-10, "max rel err " + fmt("%.2e", worst)};
}

// 2. Full parallel nr network with heterogeneous battery decay vs its closed form.
Outcome parallel_exactness() {
    const std::array<double, 3> rates{0.05, 0.1, 0.2};
    double worst = 0.0;
    for (int n = 1; n <= 4; ++n) {
        auto p = TopologyParams::uniform(Family::parallel, Variant::nr, n, 0.01, 0.1, 0.1);
        for (int k = 0; k < n; ++k) p.gamma_b[static_cast<std::size_t>(k)] = rates[static_cast<std::size_t>(k) % 3];
        const auto sys = assemble(build_network(p));
        for (int k = 1; k <= n; ++k) {
            const double dense = steady_energy(sys, battery_id(k));
            const double closed = parallel_nr_energy(n, p.g_b, p.gamma_c, p.gamma_b[static_cast<std::size_t>(k - 1)], 1.0);
            worst = std::max(worst, rel_err(dense, closed));
        }
    }
    return {worst <= 1e-10, "max rel err " + fmt("%.2e", worst)};
}

// 3. Directional chain elimination vs dense solve, every mode of every chain.
Outcome chain_oracle() {
    double worst = 0.0;
    for (auto v : {Variant::r1, Variant::r2, Variant::nr}) {
        for (int n = 1; n <= 10; ++n) {
            for (double g : {0.001, 0.02, 0.3}) {
                const auto p = TopologyParams::uniform(Family::cascaded, v, n, g, 0.1, 0.1);
                const auto chain = directional_chain_steady(chain_coeffs(p), p.xi);
                const auto sys = assemble(build_network(p));
                const auto dense = steady_state(sys).amplitudes;
                for (int k = 0; k <= n; ++k) {
                    const std::string id = k == 0 ? std::string(charger_id) : battery_id(k);
                    const double e_dense = std::norm(dense(sys.index(id)));
                    worst = std::max(worst, rel_err(std::norm(chain[static_cast<std::size_t>(k)]), e_dense));
                }
            }
        }
    }
    return {worst <= 1e-12, "max rel err " + fmt("%.2e", worst)};
}

// 4. Gain limits in the weak-coupling regime.
Outcome gain_limits() {
    const double gamma = 0.1;
    double worst1 = 0.0, worst2 = 0.0;
    for (auto fam : {Family::cascaded, Family::parallel}) {
        for (int n = 1; n <= 5; ++n) {
            const auto [b1, b2] = gain_bounds(fam, n);
            const auto rep = gain_report(TopologyParams::uniform(fam, Variant::nr, n, 1e-6 * gamma, gamma, gamma), false);
            for (const auto& e : rep.entries) {
                worst1 = std::max(worst1, e.g1 ? rel_err(*e.g1, b1) : 1.0);
                worst2 = std::max(worst2, e.g2 ? rel_err(*e.g2, b2) : 1.0);
            }
        }
    }
    return {worst1 <= 1e-3 && worst2 <= 5e-3,
            "G1 max rel dev " + fmt("%.2e", worst1) + ", G2 max rel dev " + fmt("%.2e", worst2)};
}

// 5. Ordering of energies and gains in the weak regime.
Outcome weak_ordering() {
    const double gamma = 0.1;
    int bad_order = 0, bad_gain = 0, points = 0;
    double first_gain_violation = 1.0;
    for (int n : {3, 4}) {
        for (int j = 0; j <= 400; ++j) {
            const double x = 0.001 + (0.12 - 0.001) * j / 401.0;  // stays below 0.12
            const auto rep = gain_report(TopologyParams::uniform(Family::cascaded, Variant::nr, n, x * gamma, gamma, gamma), false);
            const auto& e = rep.entries.front();
            if (x >= 0.005 && x <= 0.1) {
                ++points;
                if (!(e.e_nr > e.e_r2 && e.e_r2 > e.e_r1)) ++bad_order;
            }
            if (!(e.g1 && e.g2 && *e.g1 > *e.g2)) {
                ++bad_gain;
                first_gain_violation = std::min(first_gain_violation, x);
            }
        }
    }
    return {bad_order == 0 && bad_gain == 0, std::to_string(points) + " ordering points, " +
                                                  std::to_string(bad_order) + " order violations, " +
                                                  std::to_string(bad_gain) + " gain violations" +
                                                  (bad_gain ? " (G1 <= G2 from g_b/gamma " + fmt("%.4f", first_gain_violation) + ")" : "")};
}

// 6. Numeric optimum of the nr energy vs the closed-form coupling.
Outcome optimal_coupling() {
    const double gamma = 0.1;
    double worst = 0.0;
    for (int n : {1, 3, 5, 7}) {
        const auto m = maximize_over_coupling([&](double g) { return cascaded_nr_energy(n, g, gamma, 1.0); }, gamma);
        worst = std::max(worst, rel_err(m.argmax, g_opt_odd(n, gamma)));
    }
    const auto nr1 = maximize_over_coupling([&](double g) { return cascaded_nr_energy(1, g, gamma, 1.0); }, gamma);
    const auto r11 = maximize_over_coupling([&](double g) { return cascaded_r1_energy(1, g, gamma, 1.0); }, gamma);
    const double e1 = std::max(rel_err(nr1.value, 100.0), rel_err(r11.value, 100.0));
    return {worst <= 1e-6 && e1 <= 1e-10,
            "argmax max rel err " + fmt("%.2e", worst) + ", N=1 maxima rel err " + fmt("%.2e", e1)};
}

// 7. Logarithmic growth of the optimum ratio.
Outcome log_fit() {
    const std::vector<int> ns{1, 3, 5, 7, 9, 11, 13, 15};
    const auto fit = logfit_ratio(ns);
    bool ok = fit.ratios.front() >= 1.0 - 1e-10;
    for (std::size_t i = 1; i < fit.ratios.size(); ++i) ok = ok && fit.ratios[i] > fit.ratios[i - 1];
    ok = ok && fit.k >= 0.05 && fit.k <= 0.075;
    return {ok, "k = " + fmt("%.5f", fit.k) + ", ratio(N=15) = " + fmt("%.4f", fit.ratios.back())};
}

// 8. Power gains in the long-lived battery regime.
Outcome power_gains() {
    const double gamma = 5e-4, big = 1.0;
    auto eta = [&](Family fam, double x) {
        const auto rep = gain_report(TopologyParams::uniform(fam, Variant::nr, 4, x * gamma, gamma, big), true);
        const auto& e = rep.entries.front();
        return std::pair{e.eta1.value_or(0.0), e.eta2.value_or(0.0)};
    };
    const double c41 = eta(Family::cascaded, 1e-3).first;
    const double p41 = eta(Family::parallel, 1e-3).first;
    double c42_lo = 1e300, c42_hi = 0.0, p42_lo = 1e300, p42_hi = 0.0;
    for (int j = 0; j < 10; ++j) {
        const double x = 0.01 + (0.1 - 0.01) * j / 9.0;
        const double c = eta(Family::cascaded, x).second;
        const double p = eta(Family::parallel, x).second;
        c42_lo = std::min(c42_lo, c);
        c42_hi = std::max(c42_hi, c);
        p42_lo = std::min(p42_lo, p);
        p42_hi = std::max(p42_hi, p);
    }
    const bool ok = rel_err(c41, 256.0) <= 0.1 && rel_err(p41, 4.0) <= 0.1 && c42_lo >= 16 * 0.8 &&
                    c42_hi <= 16 * 1.2 && p42_lo >= 2 * 0.8 && p42_hi <= 2 * 1.2;
    return {ok, "cascaded eta41 " + fmt("%.2f", c41) + ", eta42 in [" + fmt("%.3f", c42_lo) + ", " +
                    fmt("%.3f", c42_hi) + "]; parallel eta41 " + fmt("%.3f", p41) + ", eta42 in [" +
                    fmt("%.3f", p42_lo) + ", " + fmt("%.3f", p42_hi) + "]"};
}

// 9. Argmax of the 41 x 41 phase landscapes.
Outcome landscapes() {
    const double cell = 2 * pi / 41;
    auto near = [&](const std::vector<double>& a, double t1, double t2) {
        return std::abs(a[0] - t1) <= cell + 1e-12 && std::abs(a[1] - t2) <= cell + 1e-12;
    };
    const auto casc = phase_landscape(TopologyParams::uniform(Family::cascaded, Variant::custom, 2, 0.01, 0.1, 0.1), "b2", 41);
    bool ok_c = !casc.argmax.empty();
    for (const auto& a : casc.argmax) ok_c = ok_c && near(a, -pi / 2, -pi / 2);

    const auto par = phase_landscape(TopologyParams::uniform(Family::parallel, Variant::custom, 2, 0.01, 0.1, 0.1), "b2", 41);
    bool ok_p = !par.argmax.empty();
    for (const auto& a : par.argmax) ok_p = ok_p && (near(a, pi / 2, -pi / 2) || near(a, -pi / 2, -pi / 2));
    return {ok_c && ok_p, "cascaded argmax (" + fmt("%.4f", casc.argmax.front()[0]) + ", " +
                              fmt("%.4f", casc.argmax.front()[1]) + "), parallel " +
                              std::to_string(par.argmax.size()) + " tied argmax, first (" +
                              fmt("%.4f", par.argmax.front()[0]) + ", " + fmt("%.4f", par.argmax.front()[1]) + ")"};
}

// 10. Isolation of the matched triangle.
Outcome isolation_check() {
    const auto iso = isolation_probe(-pi / 2, 0.01, 0.1, 0.1);
    const double leak = iso.backward_energy / iso.forward_energy;
    double worst = 0.0;
    for (int j = 0; j < 25; ++j) {
        const double th = -pi + (j + 0.5) * 2 * pi / 25;
        const auto p = isolation_probe(th, 0.01, 0.1, 0.1);
        const double formula = (1 - std::sin(th)) / (1 + std::sin(th));
        worst = std::max(worst, rel_err(p.forward_energy / p.backward_energy, formula));
    }
    return {leak <= 1e-12 && worst <= 1e-8,
            "backward/forward " + fmt("%.2e", leak) + ", ratio formula max rel err " + fmt("%.2e", worst)};
}

// 11. Parallel N=4 charging dynamics.
Outcome dynamics_check() {
    const double gamma = 0.1;
    const auto nr = TopologyParams::uniform(Family::parallel, Variant::nr, 4, gamma / 100, gamma, gamma);
    std::vector<double> times(2001);
    for (std::size_t i = 0; i < times.size(); ++i) times[i] = static_cast<double>(i);

    double worst = 0.0;
    for (auto v : {Variant::nr, Variant::r1, Variant::r2}) {
        const auto sys = assemble(build_network(nr.with_variant(v)));
        const cvec vac = cvec::Zero(sys.size());
        const auto a = evolve(sys, vac, times, Propagator::matrix_exponential);
        const auto b = evolve(sys, vac, times, Propagator::adaptive_integrator);
        double scale = 0.0;
        for (const auto& x : a.amplitudes) scale = std::max(scale, x.norm());
        for (std::size_t i = 0; i < times.size(); ++i) {
            worst = std::max(worst, (a.amplitudes[i] - b.amplitudes[i]).norm() / scale);
        }
    }

    const double threshold = 0.9 * steady_energy(nr.with_variant(Variant::r1), "b4");
    auto first_crossing = [&](Variant v) {
        const auto e = energy_curve(nr.with_variant(v), "b4", times);
        for (std::size_t i = 0; i < times.size(); ++i) {
            if (e.energy[i] >= threshold) return times[i];
        }
        return std::numeric_limits<double>::infinity();
    };
    const double t_nr = first_crossing(Variant::nr);
    const double t_r1 = first_crossing(Variant::r1);
    return {worst <= 1e-8 && t_nr < t_r1, "propagator vs integrator max rel diff " + fmt("%.2e", worst) +
                                              ", 90% time nr " + fmt("%.0f", t_nr) + " vs r1 " + fmt("%.0f", t_r1)};
}

// Interior maximum on a log grid: some point beats both ends by a margin.
bool has_interior_max(const std::function<double(double)>& f, double lo, double hi, int points, int* decreasing) {
    std::vector<double> v(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) v[static_cast<std::size_t>(i)] = f(lo * std::pow(hi / lo, double(i) / (points - 1)));
    *decreasing = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] < v[i - 1] * (1 - 1e-12)) ++*decreasing;
    }
    const auto it = std::max_element(v.begin(), v.end());
    return it != v.begin() && it + 1 != v.end() && *it > v.back() * (1 + 1e-6);
}

// 12. Structural invariants.
Outcome invariants() {
    std::mt19937_64 rng(20260101);
    std::uniform_real_distribution<double> rate(0.01, 0.5), coupling(0.001, 0.5), phase(-pi, pi);
    int herm_bad = 0, hurwitz_bad = 0, phase_bad = 0, gamma_bad = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const auto fam = trial % 2 ? Family::parallel : Family::cascaded;
        const int n = 1 + trial % 5;
        auto p = TopologyParams::uniform(fam, Variant::custom, n, coupling(rng), rate(rng), rate(rng));
        p.gamma_c = rate(rng);
        for (auto& g : p.gamma_b) g = rate(rng);
        p.thetas.resize(static_cast<std::size_t>(n));
        for (auto& t : p.thetas) t = phase(rng);
        const auto sys = assemble(build_network(p));
        cmat h = sys.matrix + sys.matrix.adjoint();
        for (Eigen::Index i = 0; i < h.rows(); ++i) h(i, i) += sys.decay_rates[static_cast<std::size_t>(i)];
        if (h.norm() > 1e-14) ++herm_bad;
        if (!is_stable(sys).stable) ++hurwitz_bad;

        // r1 energies do not depend on the direct phases.
        auto r1 = p.with_variant(Variant::r1);
        r1.thetas.clear();
        const double base = steady_energy(r1, battery_id(n));
        r1.thetas = p.thetas;
        if (rel_err(steady_energy(r1, battery_id(n)), base) > 1e-10) ++phase_bad;

        // Matched nr energies do not depend on the intermediate decay.
        auto nr = p.with_variant(Variant::nr);
        const double e0 = steady_energy(nr, battery_id(n));
        nr.big_gamma *= 7.3;
        if (rel_err(steady_energy(nr, battery_id(n)), e0) > 1e-10) ++gamma_bad;
    }

    // Odd N reciprocal chains peak inside the coupling range; even N rise monotonically.
    const double gamma = 0.1;
    int parity_bad = 0;
    std::string parity;
    for (int n = 1; n <= 6; ++n) {
        int dec_r1 = 0, dec_nr = 0;
        const bool r1_peak = has_interior_max([&](double x) { return cascaded_r1_energy(n, x * gamma, gamma, 1.0); },
                                              1e-3, 10.0, 2000, &dec_r1);
        const bool nr_peak = has_interior_max([&](double x) { return cascaded_nr_energy(n, x * gamma, gamma, 1.0); },
                                              1e-3, 10.0, 2000, &dec_nr);
        const bool odd = n % 2 == 1;
        if (odd ? !r1_peak : (r1_peak || dec_r1 != 0)) ++parity_bad;
        if (!nr_peak) ++parity_bad;
    }
    const bool ok = herm_bad + hurwitz_bad + phase_bad + gamma_bad + parity_bad == 0;
    return {ok, "violations: hermitian " + std::to_string(herm_bad) + ", hurwitz " + std::to_string(hurwitz_bad) +
                    ", r1 phase " + std::to_string(phase_bad) + ", big_gamma " + std::to_string(gamma_bad) +
                    ", parity " + std::to_string(parity_bad)};
}

}  // namespace

int main() {
    const std::array<std::pair<const char*, Outcome (*)()>, 12> criteria{{
        {"cascaded nr closed form", cascaded_exactness},
        {"parallel nr closed form", parallel_exactness},
        {"chain elimination oracle", chain_oracle},
        {"weak-coupling gain limits", gain_limits},
        {"weak-regime ordering", weak_ordering},
        {"optimal coupling", optimal_coupling},
        {"log fit of optimum ratio", log_fit},
        {"power gains", power_gains},
        {"phase landscape argmax", landscapes},
        {"isolation", isolation_check},
        {"charging dynamics", dynamics_check},
        {"invariant suite", invariants},
    }};
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("%s %2zu %-28s %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
