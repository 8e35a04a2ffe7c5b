#include <doctest.h>

#include "rotorlab/errors.hpp"
#include "rotorlab/propulsion.hpp"

#include <cmath>

using namespace rotorlab;

TEST_CASE("blade geometry: table stations evaluate exactly") {
    const BladeGeometry g = BladeGeometry::default_rotor();
    const ChordTwist at14 = blade_geometry_at(g, 14.0);
    CHECK(at14.chord_cm == doctest::Approx(5.7));
    CHECK(at14.twist_deg == doctest::Approx(23.2));

    const ChordTwist at45 = blade_geometry_at(g, 45.0);
    CHECK(at45.chord_cm == doctest::Approx(3.9));
    CHECK(at45.twist_deg == doctest::Approx(2.6));
}

TEST_CASE("blade geometry: linear interpolation between stations") {
    const BladeGeometry g = BladeGeometry::default_rotor();
    // midpoint of the 14 and 20 cm stations
    const ChordTwist at17 = blade_geometry_at(g, 17.0);
    CHECK(at17.chord_cm == doctest::Approx(5.7).epsilon(1e-12));
    CHECK(at17.twist_deg == doctest::Approx(0.5 * (23.2 + 18.7)).epsilon(1e-12));
}

TEST_CASE("blade geometry: out-of-span and invariant violations") {
    const BladeGeometry g = BladeGeometry::default_rotor();
    CHECK_THROWS_AS(blade_geometry_at(g, 5.0), std::out_of_range);
    CHECK_THROWS_AS(blade_geometry_at(g, 60.0), std::out_of_range);

    BladeGeometry bad = g;
    bad.stations[2].x_cm = bad.stations[1].x_cm; // not strictly increasing
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    BladeGeometry chopped = g;
    chopped.stations.pop_back();
    CHECK_THROWS_AS(chopped.validate(), std::invalid_argument);
}

TEST_CASE("bem: zero rpm produces nothing") {
    const BladeGeometry g = BladeGeometry::default_rotor();
    const BemResult r = bem_performance(g, {0.0, 10.0, 0.0});
    CHECK(r.thrust_n == 0.0);
    CHECK(r.power_w == 0.0);
}

TEST_CASE("bem: hover design point brackets the takeoff weight") {
    const BladeGeometry g = BladeGeometry::default_rotor();
    const BemResult hover = bem_performance(g, {1500.0, 10.0, 0.0});
    // momentum-theory sanity bracket around MTOW * g = 44.1 N
    CHECK(hover.thrust_n >= 35.0);
    CHECK(hover.thrust_n <= 55.0);
    CHECK(hover.power_w > 0.0);
    CHECK(hover.efficiency > 0.3);
    CHECK(hover.efficiency < 1.0);
}

TEST_CASE("bem: thrust increases with rpm at fixed pitch") {
    const BladeGeometry g = BladeGeometry::default_rotor();
    for (double pitch : {10.0, 23.0, 30.0}) {
        double prev = -1e9;
        for (double rpm = 400.0; rpm <= 1600.0; rpm += 100.0) {
            const BemResult r = bem_performance(g, {rpm, pitch, 0.0});
            CHECK(r.thrust_n > prev);
            prev = r.thrust_n;
        }
    }
}

TEST_CASE("bem: cruise shaft power is below hover shaft power") {
    const BladeGeometry g = BladeGeometry::default_rotor();
    const BemResult hover = bem_performance(g, {1500.0, 10.0, 0.0});
    const BemResult cruise = bem_performance(g, {910.0, 30.0, 21.5});
    CHECK(cruise.power_w < hover.power_w);
    CHECK(cruise.thrust_n > 0.0);
}

TEST_CASE("bem: propulsive efficiency below 1 whenever thrust and speed are positive") {
    const BladeGeometry g = BladeGeometry::default_rotor();
    for (double rpm : {700.0, 910.0, 1140.0}) {
        for (double pitch : {23.0, 30.0, 40.0}) {
            for (double v : {12.0, 18.0, 24.0}) {
                const BemResult r = bem_performance(g, {rpm, pitch, v});
                if (r.thrust_n > 0.0 && r.power_w > 0.0) {
                    CHECK(r.efficiency <= 1.0);
                }
            }
        }
    }
}

TEST_CASE("coefficients: density cancels exactly") {
    const BladeGeometry g = BladeGeometry::default_rotor();
    const OperatingPoint op{1140.0, 23.0, 0.0};
    const PropCoefficients c1 = thrust_power_coefficients(g, op, 1.225);
    const PropCoefficients c2 = thrust_power_coefficients(g, op, 2.45);
    CHECK(c1.ct == doctest::Approx(c2.ct).epsilon(1e-9));
    CHECK(c1.cp == doctest::Approx(c2.cp).epsilon(1e-9));
}

TEST_CASE("coefficients: built-in twist lifts at zero collective, drag costs power") {
    const BladeGeometry g = BladeGeometry::default_rotor();
    const PropCoefficients c = thrust_power_coefficients(g, {1000.0, 0.0, 0.0});
    CHECK(c.ct > 0.0);
    CHECK(c.cp > 0.0);

    // profile drag keeps power positive even with the blade unloaded
    const PropCoefficients flat = thrust_power_coefficients(g, {1000.0, -8.0, 0.0});
    CHECK(flat.cp > 0.0);
}

TEST_CASE("bem sweep covers the grid") {
    const BladeGeometry g = BladeGeometry::default_rotor();
    const auto sweep = bem_sweep(g, {800.0, 1200.0}, {10.0, 23.0}, {0.0, 15.0});
    CHECK(sweep.size() == 8);
}

TEST_CASE("bem: exhausted iterations report the failing annulus") {
    const BladeGeometry g = BladeGeometry::default_rotor();
    BemSettings strangled;
    strangled.max_iterations = 1;
    try {
        bem_performance(g, {1500.0, 10.0, 0.0}, 1.225, strangled);
        FAIL("expected iteration-divergence");
    } catch (const NumericError& e) {
        CHECK(std::string(e.what()).find("iteration-divergence") != std::string::npos);
        CHECK(std::string(e.what()).find("annulus") != std::string::npos);
    }
}
