#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace qbnet {

struct Maximum {
    double argmax = 0.0;
    double value = 0.0;
};

/// Golden-section search for a maximum of f on [lo, hi]; stops once the
/// bracket width falls below rel_tol * |midpoint|.
inline Maximum golden_section_maximize(const std::function<double(double)>& f, double lo, double hi,
                                       double rel_tol) {
    constexpr double inv_phi = 0.6180339887498948482;
    double a = lo;
    double b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int iter = 0; iter < 500 && (b - a) > rel_tol * std::abs(0.5 * (a + b)); ++iter) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    return f1 >= f2 ? Maximum{x1, f1} : Maximum{x2, f2};
}

/// Evaluates f on `points` logarithmically spaced values in [lo, hi] (lo > 0),
/// then refines the best sample by golden section between its neighbours.
inline Maximum log_scan_maximize(const std::function<double(double)>& f, double lo, double hi, std::size_t points,
                                 double rel_tol) {
    if (!(lo > 0.0) || !(hi > lo) || points < 3) {
        throw std::invalid_argument("log_scan_maximize: need 0 < lo < hi and at least 3 points");
    }
    std::vector<double> xs(points);
    const double log_lo = std::log(lo);
    const double step = (std::log(hi) - log_lo) / static_cast<double>(points - 1);
    std::size_t best = 0;
    double best_value = -INFINITY;
    for (std::size_t i = 0; i < points; ++i) {
        xs[i] = i + 1 == points ? hi : std::exp(log_lo + step * static_cast<double>(i));
        const double v = f(xs[i]);
        if (v > best_value) {
            best_value = v;
            best = i;
        }
    }
    const double a = xs[best == 0 ? 0 : best - 1];
    const double b = xs[best + 1 == points ? best : best + 1];
    Maximum refined = golden_section_maximize(f, a, b, rel_tol);
    if (refined.value < best_value) {
        return {xs[best], best_value};
    }
    return refined;
}

}  // namespace qbnet
