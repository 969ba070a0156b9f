#include "doctest.h"

#include "qbnet/errors.hpp"
#include "qbnet/network.hpp"

#include <cmath>
#include <numbers>

using namespace qbnet;

namespace {

const CouplingSpec* find_coupling(const NetworkSpec& spec, const std::string& s, const std::string& t) {
    for (const auto& c : spec.couplings) {
        if (c.source == s && c.target == t) return &c;
    }
    return nullptr;
}

}  // namespace

TEST_CASE("ids and parsing round-trip") {
    CHECK(battery_id(3) == "b3");
    CHECK(intermediate_id(1) == "a1");
    for (auto v : {Variant::r1, Variant::r2, Variant::nr, Variant::custom}) CHECK(parse_variant(to_string(v)) == v);
    for (auto f : {Family::cascaded, Family::parallel}) CHECK(parse_family(to_string(f)) == f);
    for (auto r : {ModeRole::charger, ModeRole::battery, ModeRole::intermediate}) CHECK(parse_role(to_string(r)) == r);
    CHECK_THROWS_AS((void)parse_variant("r3"), std::invalid_argument);
    CHECK_THROWS_AS((void)parse_family(""), std::invalid_argument);
}

TEST_CASE("unit phasor is exact at quarter turns") {
    CHECK(unit_phasor(-std::numbers::pi / 2) == complex(0.0, -1.0));
    CHECK(unit_phasor(std::numbers::pi / 2) == complex(0.0, 1.0));
    CHECK(unit_phasor(std::numbers::pi) == complex(-1.0, 0.0));
    CHECK(unit_phasor(0.0) == complex(1.0, 0.0));
}

TEST_CASE("matched coupling") {
    CHECK(matched_coupling(0.02, 0.1) == doctest::Approx(std::sqrt(0.001)).epsilon(1e-15));
    CHECK_THROWS_AS((void)matched_coupling(0.02, 0.0), std::domain_error);
}

TEST_CASE("cascaded nr builder layout") {
    const auto p = TopologyParams::uniform(Family::cascaded, Variant::nr, 2, 0.01, 0.1, 0.2);
    const auto spec = build_network(p);
    REQUIRE(spec.modes.size() == 5);
    CHECK(spec.modes[0].id == "c");
    CHECK(spec.modes[1].id == "a1");
    CHECK(spec.modes[2].id == "b1");
    CHECK(spec.modes[4].id == "b2");
    CHECK(spec.couplings.size() == 6);
    const auto* direct = find_coupling(spec, "b1", "b2");
    REQUIRE(direct != nullptr);
    CHECK(direct->strength == 0.01);
    CHECK(direct->phase == doctest::Approx(-std::numbers::pi / 2));
    const auto* up = find_coupling(spec, "b1", "a2");
    REQUIRE(up != nullptr);
    CHECK(up->strength == doctest::Approx(std::sqrt(0.01 * 0.2 / 2)));
    CHECK(up->phase == 0.0);
    REQUIRE(spec.drives.size() == 1);
    CHECK(spec.drives[0].mode == "c");
    CHECK(validate(spec).empty());
}

TEST_CASE("r1 has no intermediates; parallel is a star") {
    auto p = TopologyParams::uniform(Family::cascaded, Variant::r1, 3, 0.01, 0.1, 0.1);
    const auto r1 = build_network(p);
    CHECK(r1.modes.size() == 4);
    CHECK(r1.couplings.size() == 3);

    p = TopologyParams::uniform(Family::parallel, Variant::r2, 3, 0.01, 0.1, 0.1);
    const auto par = build_network(p);
    CHECK(par.modes.size() == 7);
    for (int k = 1; k <= 3; ++k) {
        CHECK(find_coupling(par, "c", battery_id(k)) != nullptr);
        CHECK(find_coupling(par, "c", intermediate_id(k)) != nullptr);
        CHECK(find_coupling(par, intermediate_id(k), battery_id(k)) != nullptr);
    }
    CHECK(validate(par).empty());
}

TEST_CASE("nr and r2 differ only in direct phases") {
    const auto nr = build_network(TopologyParams::uniform(Family::cascaded, Variant::nr, 3, 0.02, 0.1, 0.1));
    const auto r2 = build_network(TopologyParams::uniform(Family::cascaded, Variant::r2, 3, 0.02, 0.1, 0.1));
    REQUIRE(nr.couplings.size() == r2.couplings.size());
    for (std::size_t i = 0; i < nr.couplings.size(); ++i) {
        CHECK(nr.couplings[i].source == r2.couplings[i].source);
        CHECK(nr.couplings[i].strength == r2.couplings[i].strength);
    }
}

TEST_CASE("custom phases are wrapped into (-pi, pi]") {
    auto p = TopologyParams::uniform(Family::cascaded, Variant::custom, 1, 0.01, 0.1, 0.1);
    p.thetas = {3 * std::numbers::pi / 2};
    const auto spec = build_network(p);
    CHECK(validate(spec).empty());
    CHECK(find_coupling(spec, "c", "b1")->phase == doctest::Approx(-std::numbers::pi / 2));
}

TEST_CASE("topology validation collects violations") {
    TopologyParams p;
    p.n = 0;
    CHECK_FALSE(validate(p).empty());

    p = TopologyParams::uniform(Family::cascaded, Variant::nr, 2, -1.0, 0.1, 0.0);
    const auto v = validate(p);
    CHECK(v.size() >= 2);
    CHECK_THROWS_AS((void)build_network(p), ValidationError);

    p = TopologyParams::uniform(Family::cascaded, Variant::custom, 2, 0.01, 0.1, 0.1);
    CHECK_FALSE(validate(p).empty());  // thetas missing
    p.thetas = {0.1, 0.2};
    CHECK(validate(p).empty());

    p = TopologyParams::uniform(Family::cascaded, Variant::r1, 2, 0.01, 0.1, 0.0);
    CHECK(validate(p).empty());  // big_gamma unused without intermediates
}

TEST_CASE("network validation") {
    NetworkSpec s;
    CHECK_FALSE(validate(s).empty());

    s.modes = {{"x", ModeRole::charger, 0.1, 0.0}, {"x", ModeRole::battery, -0.1, 0.0}};
    s.couplings = {{"x", "y", 0.1, 0.0}, {"x", "x", 0.1, 0.0}, {"x", "x", 0.1, 4.0}};
    s.drives = {{"z", {1.0, 0.0}}};
    const auto v = validate(s);
    auto has = [&](const std::string& needle) {
        for (const auto& m : v) {
            if (m.find(needle) != std::string::npos) return true;
        }
        return false;
    };
    CHECK(has("duplicate id"));
    CHECK(has("unknown target mode 'y'"));
    CHECK(has("z"));
    CHECK(v.size() >= 5);

    try {
        throw ValidationError(v);
    } catch (const ValidationError& e) {
        CHECK(e.violations().size() == v.size());
        CHECK(std::string(e.what()).find("; ") != std::string::npos);
    }
}
