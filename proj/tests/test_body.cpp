#include <doctest.h>

#include "rotorlab/body.hpp"
#include "rotorlab/errors.hpp"

#include <cmath>

using namespace rotorlab;

namespace {

CoupledVehicle reference_vehicle() {
    CoupledVehicle v; // header defaults are the shipped configuration
    return v;
}

CoupledVehicle symmetric_vehicle() {
    CoupledVehicle v = reference_vehicle();
    const double avg = 0.5 * (v.body.ixx_kgm2 + v.body.iyy_kgm2);
    v.body.ixx_kgm2 = avg;
    v.body.iyy_kgm2 = avg;
    return v;
}

double peak_abs_p(const std::vector<RateSample>& trace) {
    double m = 0.0;
    for (const auto& s : trace) m = std::max(m, std::abs(s.p));
    return m;
}

double peak_abs_q(const std::vector<RateSample>& trace) {
    double m = 0.0;
    for (const auto& s : trace) m = std::max(m, std::abs(s.q));
    return m;
}

constexpr double kDt = 1.0 / 2048.0;

} // namespace

TEST_CASE("step_coupled: zero command leaves everything but the azimuth untouched") {
    const CoupledVehicle v = reference_vehicle();
    CoupledState s = initial_hover_state(v);
    const CoupledState next = step_coupled(s, v, CyclicCommand{}, kDt);
    CHECK(next.p == 0.0);
    CHECK(next.q == 0.0);
    CHECK(next.r == 0.0);
    CHECK(next.beta[0] == 0.0);
    CHECK(next.beta[1] == 0.0);
    CHECK(next.attitude.w == 1.0);
    CHECK(next.psi == doctest::Approx(s.psi + kDt * s.omega).epsilon(1e-14));
}

TEST_CASE("step_coupled: resolution guard") {
    const CoupledVehicle v = reference_vehicle();
    CoupledState s = initial_hover_state(v);
    CHECK_THROWS_AS(step_coupled(s, v, CyclicCommand{}, 0.01), std::invalid_argument);
}

TEST_CASE("torque-free body conserves rotational kinetic energy") {
    CoupledVehicle v = reference_vehicle();
    v.rotor.hinge_spring_nm_per_rad = 0.0;
    v.thrust_n = 0.0;
    v.couple_rotor = false; // hub moments and the bearing reaction off
    CoupledState s = initial_hover_state(v);
    s.p = 0.8;
    s.q = -0.3;
    s.r = 0.5;

    const double e0 = rotational_kinetic_energy(s, v.body);
    const double dt = 1e-3;
    for (int i = 0; i < 10000; ++i) { // 10 s tumble
        s = step_coupled(s, v, CyclicCommand{}, dt);
    }
    const double e1 = rotational_kinetic_energy(s, v.body);
    CHECK(std::abs(e1 - e0) / e0 < 1e-6);
}

TEST_CASE("attitude quaternion stays unit norm") {
    const CoupledVehicle v = reference_vehicle();
    CoupledState s = initial_hover_state(v);
    s.p = 0.4;
    s.q = 0.9;
    CyclicCommand cmd;
    cmd.delta_q = 0.1;
    for (int i = 0; i < 5000; ++i) {
        s = step_coupled(s, v, cmd, kDt);
        CHECK(std::abs(s.attitude.norm() - 1.0) < 1e-9);
    }
}

TEST_CASE("coupled stepping is deterministic bit for bit") {
    const CoupledVehicle v = reference_vehicle();
    const auto a = doublet_response(v, Axis::Pitch, 0.1, 1.0, kDt, 0.5);
    const auto b = doublet_response(v, Axis::Pitch, 0.1, 1.0, kDt, 0.5);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].p == b[i].p);
        CHECK(a[i].q == b[i].q);
        CHECK(a[i].r == b[i].r);
    }
}

TEST_CASE("doublet_response: zero amplitude is identically zero") {
    const CoupledVehicle v = reference_vehicle();
    const auto trace = doublet_response(v, Axis::Pitch, 0.0, 1.0, kDt, 0.5);
    for (const auto& s : trace) {
        CHECK(s.p == 0.0);
        CHECK(s.q == 0.0);
    }
}

TEST_CASE("pitch doublet on an asymmetric body couples into roll") {
    const CoupledVehicle v = reference_vehicle(); // Iyy >> Ixx by default
    const auto trace = doublet_response(v, Axis::Pitch, 0.1, 1.0, kDt, 1.0);
    CHECK(peak_abs_q(trace) > 0.0);
    CHECK(peak_abs_p(trace) > 0.05 * peak_abs_q(trace));
}

TEST_CASE("inertia asymmetry drives the cross-axis peak: factor 2 between configs") {
    CoupledVehicle asym = reference_vehicle();
    asym.body.ixx_kgm2 = 0.12;
    asym.body.iyy_kgm2 = 0.60;
    asym.body.izz_kgm2 = 0.66;
    REQUIRE(asym.body.iyy_kgm2 / asym.body.ixx_kgm2 >= 4.0);
    CoupledVehicle sym = asym;
    sym.body.ixx_kgm2 = asym.body.iyy_kgm2;

    const auto t_asym = doublet_response(asym, Axis::Pitch, 0.1, 1.0, kDt, 1.5);
    const auto t_sym = doublet_response(sym, Axis::Pitch, 0.1, 1.0, kDt, 1.5);

    const double cross_asym = peak_abs_p(t_asym);
    const double cross_sym = peak_abs_p(t_sym);
    const double hi = std::max(cross_asym, cross_sym);
    const double lo = std::min(cross_asym, cross_sym);
    CHECK(hi >= 2.0 * lo);
}

TEST_CASE("axis relabeling symmetry: quarter-turn about the shaft") {
    // rotating the whole problem 90 degrees about z maps (p,q) -> (q,-p),
    // swaps the transverse inertias and sends a pitch doublet to a negative
    // roll doublet; the responses must map exactly the same way
    const CoupledVehicle v1 = reference_vehicle();
    CoupledVehicle v2 = v1;
    v2.body.ixx_kgm2 = v1.body.iyy_kgm2;
    v2.body.iyy_kgm2 = v1.body.ixx_kgm2;

    const double amp = 0.12;
    const auto t1 = doublet_response(v1, Axis::Pitch, amp, 1.0, kDt, 1.0);
    // blade-0 sits at -pi/2 when the whole problem is rotated by +90 deg
    const auto t2 = doublet_response(v2, Axis::Roll, -amp, 1.0, kDt, 1.0, -0.5 * kPi);

    REQUIRE(t1.size() == t2.size());
    double max_err = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < t1.size(); ++i) {
        max_err = std::max(max_err, std::abs(t2[i].p - t1[i].q));
        max_err = std::max(max_err, std::abs(t2[i].q + t1[i].p));
        scale = std::max({scale, std::abs(t1[i].p), std::abs(t1[i].q)});
    }
    CHECK(max_err < 1e-6 * std::max(scale, 1.0));
}

TEST_CASE("symmetric body: peak ratio is stable when both inertias double") {
    // holds when the body responds slowly against the rotor, so that the
    // rate dynamics scale as 1/I and doubling both transverse inertias only
    // halves and time-dilates the response; the settle window scales along
    CoupledVehicle a = symmetric_vehicle();
    a.body.ixx_kgm2 = a.body.iyy_kgm2 = 1.8;
    a.body.izz_kgm2 = 2.0;
    CoupledVehicle b = a;
    b.body.ixx_kgm2 *= 2.0;
    b.body.iyy_kgm2 *= 2.0;

    const double doublet_s = 0.2;
    const auto ta = doublet_response(a, Axis::Pitch, 0.1, doublet_s, kDt, 30.0);
    const auto tb = doublet_response(b, Axis::Pitch, 0.1, doublet_s, kDt, 60.0);

    const double ratio_a = peak_abs_p(ta) / peak_abs_q(ta);
    const double ratio_b = peak_abs_p(tb) / peak_abs_q(tb);
    CHECK(ratio_a == doctest::Approx(ratio_b).epsilon(0.15));
}

TEST_CASE("an unstable configuration reports a non-finite state") {
    CoupledVehicle v = reference_vehicle();
    v.rotor.hinge_spring_nm_per_rad = 2.5e5; // flap frequency beyond the RK4 stability edge
    CoupledState s = initial_hover_state(v);
    CyclicCommand cmd;
    cmd.delta_q = 0.1;
    CHECK_THROWS_AS(
        [&] {
            for (int i = 0; i < 20000; ++i) s = step_coupled(s, v, cmd, 5e-4);
        }(),
        NumericError);
}

TEST_CASE("tip-path-plane tilt reflects a pure differential flap") {
    CoupledState s;
    s.omega = 150.0;
    s.psi = 0.0;
    s.beta[0] = 0.03;
    s.beta[1] = -0.03;
    const TppTilt t = tip_path_tilt(s);
    CHECK(t.tilt_cos == doctest::Approx(0.03).epsilon(1e-12));
    CHECK(t.tilt_sin == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(t.cone == doctest::Approx(0.0).epsilon(1e-12));
}
