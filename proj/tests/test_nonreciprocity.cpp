#include "doctest.h"

#include "qbnet/nonreciprocity.hpp"
#include "qbnet/observables.hpp"

#include <array>
#include <cmath>
#include <numbers>

using namespace qbnet;

constexpr double pi = std::numbers::pi;

TEST_CASE("isolation ratio of the matched triangle") {
    const auto full = isolation(-pi / 2, 0.01, 0.1);
    CHECK(full.backward_t == 0.0);
    CHECK(full.ratio_infinite());
    CHECK(full.forward_t == doctest::Approx(4 * 0.01 * 0.01));

    const auto mirror = isolation(pi / 2, 0.01, 0.1);
    CHECK(mirror.forward_t == 0.0);
    CHECK(mirror.ratio == 0.0);

    for (double th : {-2.5, -pi / 6, -0.1, 0.0, 0.4, 2.9}) {
        const auto r = isolation(th, 0.02, 0.3);
        CHECK(r.forward_t == doctest::Approx(2 * 0.0004 * (1 - std::sin(th))).epsilon(1e-12));
        CHECK(r.backward_t == doctest::Approx(2 * 0.0004 * (1 + std::sin(th))).epsilon(1e-12));
        CHECK_FALSE(r.ratio_infinite());
    }
    CHECK(isolation(-pi / 6, 0.02, 0.3).ratio == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("unmatched couplings break the cancellation") {
    const auto r = isolation(-pi / 2, 0.01, 0.03, 0.02, 0.1);
    CHECK(r.backward_t > 0.0);
    CHECK(r.forward_t > r.backward_t);
    CHECK_THROWS_AS((void)isolation(0.0, 0.01, 0.0), std::domain_error);
}

TEST_CASE("window check") {
    CHECK(window_check(-pi / 2));
    CHECK(window_check(-3.0));
    CHECK_FALSE(window_check(0.0));
    CHECK_FALSE(window_check(pi));
    CHECK_FALSE(window_check(1.0));
}

TEST_CASE("drive relocation probe") {
    const auto iso = isolation_probe(-pi / 2, 0.01, 0.1, 0.1);
    CHECK(iso.forward_energy > 0.0);
    CHECK(iso.backward_energy <= 1e-12 * iso.forward_energy);

    const auto p = isolation_probe(-pi / 6, 0.01, 0.1, 0.5);
    CHECK(p.forward_energy / p.backward_energy == doctest::Approx(3.0).epsilon(1e-9));

    const auto rec = isolation_probe(0.0, 0.01, 0.1, 0.1);
    CHECK(rec.forward_energy == doctest::Approx(rec.backward_energy).epsilon(1e-12));
}

TEST_CASE("phase grid") {
    const auto g = phase_grid(21);
    REQUIRE(g.size() == 21);
    CHECK(g.back() == pi);
    CHECK(g.front() > -pi);
    CHECK(g[1] - g[0] == doctest::Approx(2 * pi / 21));
}

TEST_CASE("phase landscape") {
    auto p = TopologyParams::uniform(Family::cascaded, Variant::custom, 1, 0.01, 0.1, 0.1);
    const auto land = phase_landscape(p, "b1", 40);
    CHECK(land.axes == 1);
    CHECK(land.values.size() == 40);
    REQUIRE(land.argmax.size() == 1);
    CHECK(std::abs(land.argmax[0][0] + pi / 2) <= 2 * pi / 40 + 1e-12);
    const std::array<std::size_t, 1> idx{9};  // theta = -pi/2
    CHECK(land.at(idx) == doctest::Approx(steady_energy([&] {
        auto q = p;
        q.thetas = {-pi / 2};
        return q;
    }(), "b1")));

    auto r1 = TopologyParams::uniform(Family::cascaded, Variant::r1, 2, 0.01, 0.1, 0.1);
    const auto flat = phase_landscape(r1, "b2", 21);
    CHECK(flat.values.size() == 21 * 21);
    double lo = flat.values[0], hi = flat.values[0];
    for (double v : flat.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK((hi - lo) <= 1e-12 * hi);
    CHECK(flat.argmax.size() == flat.values.size());  // every point ties

    CHECK_THROWS((void)phase_landscape(p, "b1", 10));
    CHECK_THROWS((void)phase_landscape(p.with_variant(Variant::nr), "b1", 21));
}
