#include <doctest.h>

#include "rotorlab/control.hpp"
#include "rotorlab/errors.hpp"
#include "rotorlab/rng.hpp"

#include <cmath>

using namespace rotorlab;

TEST_CASE("servo mixing: published substitutions") {
    const ServoTriplet z = mix_servos(0.0, 0.0);
    CHECK(z.s1 == 0.0);
    CHECK(z.s2 == 0.0);
    CHECK(z.s3 == 0.0);

    const ServoTriplet roll = mix_servos(1.0, 0.0);
    CHECK(roll.s1 == doctest::Approx(0.70711).epsilon(1e-5));
    CHECK(roll.s2 == doctest::Approx(-0.70711).epsilon(1e-5));
    CHECK(roll.s3 == 0.0);

    const ServoTriplet pitch = mix_servos(0.0, 1.0);
    CHECK(pitch.s1 == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(pitch.s2 == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(pitch.s3 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("servo mixing: null sum and round trip over random commands") {
    Rng rng(7);
    for (int i = 0; i < 1000; ++i) {
        const double dp = rng.uniform(-1.0, 1.0);
        const double dq = rng.uniform(-1.0, 1.0);
        const ServoTriplet s = mix_servos(dp, dq);
        CHECK(std::abs(s.s1 + s.s2 + s.s3) < 1e-12);

        const UnmixResult u = unmix_servos(s.s1, s.s2, s.s3);
        CHECK(std::abs(u.delta_p - dp) < 1e-12);
        CHECK(std::abs(u.delta_q - dq) < 1e-12);
        CHECK(u.residual < 1e-12);
    }
}

TEST_CASE("servo mixing is linear") {
    Rng rng(11);
    for (int i = 0; i < 100; ++i) {
        const double a = rng.uniform(-2.0, 2.0), b = rng.uniform(-2.0, 2.0);
        const double p1 = rng.uniform(-1.0, 1.0), q1 = rng.uniform(-1.0, 1.0);
        const double p2 = rng.uniform(-1.0, 1.0), q2 = rng.uniform(-1.0, 1.0);
        const ServoTriplet lhs = mix_servos(a * p1 + b * p2, a * q1 + b * q2);
        const ServoTriplet m1 = mix_servos(p1, q1);
        const ServoTriplet m2 = mix_servos(p2, q2);
        CHECK(lhs.s1 == doctest::Approx(a * m1.s1 + b * m2.s1).epsilon(1e-12));
        CHECK(lhs.s2 == doctest::Approx(a * m1.s2 + b * m2.s2).epsilon(1e-12));
        CHECK(lhs.s3 == doctest::Approx(a * m1.s3 + b * m2.s3).epsilon(1e-12));
    }
}

TEST_CASE("unmix flags triplets outside the mixing image") {
    // membership oracle: the image is the plane s1 + s2 + s3 = 0, so the
    // residual is |s1 + s2 + s3| / sqrt(3)
    const UnmixResult bad = unmix_servos(1.0, 1.0, 0.0);
    CHECK(bad.residual == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-12));

    const UnmixResult s3only = unmix_servos(0.0, 0.0, 1.0);
    CHECK(s3only.residual == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
    CHECK(s3only.residual > 0.0);
}

TEST_CASE("collective linkage: default calibration") {
    const CollectiveLinkage link = CollectiveLinkage::identity_default();
    CHECK(link.pitch_deg(-1.0) == doctest::Approx(-40.0));
    CHECK(link.pitch_deg(1.0) == doctest::Approx(40.0));
    CHECK(link.pitch_deg(0.0) == doctest::Approx(0.0));
    CHECK_THROWS_AS(link.pitch_deg(1.5), std::out_of_range);
}

TEST_CASE("collective linkage: [0,1] identity map reaches the midpoint at 0.5") {
    const CollectiveLinkage link({{0.0, -40.0}, {1.0, 40.0}});
    CHECK(link.pitch_deg(0.5) == doctest::Approx(0.0)); // midpoint of the range
}

TEST_CASE("collective linkage: monotonicity holds for a nonlinear table") {
    const CollectiveLinkage link(
        {{-1.0, -40.0}, {-0.5, -26.0}, {0.0, -4.0}, {0.4, 14.0}, {1.0, 40.0}});
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
        double a = rng.uniform(-1.0, 1.0);
        double b = rng.uniform(-1.0, 1.0);
        if (a > b) std::swap(a, b);
        if (a == b) continue;
        CHECK(link.pitch_deg(a) < link.pitch_deg(b));
    }
    CHECK_THROWS_AS(CollectiveLinkage({{0.0, 1.0}, {1.0, 0.5}, {2.0, 2.0}}),
                    std::invalid_argument);
}

TEST_CASE("rate control: zero input gives zero output") {
    const RateModel m = RateModel::reference_fixture();
    const CyclicPair out = rate_control(0.0, 0.0, 0.0, 0.0, m);
    CHECK(out.delta_x == 0.0);
    CHECK(out.delta_y == 0.0);
}

TEST_CASE("rate control: kc = 0 with identity effectiveness is pure proportional") {
    RateModel m;
    m.fp = {0.0, 1.0, 0.0, 0.0, 0.0};
    m.fq = {0.0, 0.0, 1.0, 0.0, 0.0};
    m.kc = 0.0;
    m.kp = 1.0;
    m.kq = 1.0;
    const CyclicPair out = rate_control(0.3, -0.7, 2.0, 1.0, m);
    CHECK(out.delta_x == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(out.delta_y == doctest::Approx(-0.7).epsilon(1e-14));
}

TEST_CASE("rate control: reference coefficients, pure roll-rate feedforward") {
    // independent arithmetic oracle:
    //   bracket = [0, 0.5 * 7.4479], G = [0.0032 0.0011; -0.0044 0.0073]
    //   det = 0.0032*0.0073 + 0.0011*0.0044 = 2.82e-5
    //   dx = -0.0011 * 3.72395 / det, dy = 0.0032 * 3.72395 / det
    const RateModel m = RateModel::reference_fixture(0.5, 1.0, 1.0);
    const CyclicPair out = rate_control(0.0, 0.0, 1.0, 0.0, m);
    const double det = 0.0032 * 0.0073 - 0.0011 * (-0.0044);
    const double v = 0.5 * 7.4479;
    CHECK(out.delta_x == doctest::Approx(-0.0011 * v / det).epsilon(1e-12));
    CHECK(out.delta_y == doctest::Approx(0.0032 * v / det).epsilon(1e-12));
}

TEST_CASE("rate control refuses a singular effectiveness matrix") {
    RateModel m;
    m.fp = {0.0, 1.0, 1.0, 0.0, 0.0};
    m.fq = {0.0, 1.0, 1.0, 0.0, 0.0};
    m.kc = 0.0;
    CHECK_THROWS_AS(rate_control(1.0, 0.0, 0.0, 0.0, m), NumericError);
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
}

TEST_CASE("reference fixture carries the published values") {
    const RateModel m = RateModel::reference_fixture();
    CHECK(m.fp.c_o == doctest::Approx(-2.4661));
    CHECK(m.fp.c_dx == doctest::Approx(0.0032));
    CHECK(m.fp.c_dy == doctest::Approx(0.0011));
    CHECK(m.fp.c_p == doctest::Approx(-0.5703));
    CHECK(m.fp.c_q == doctest::Approx(-3.4308));
    CHECK(m.fq.c_o == doctest::Approx(-2.8847));
    CHECK(m.fq.c_dx == doctest::Approx(-0.0044));
    CHECK(m.fq.c_dy == doctest::Approx(0.0073));
    CHECK(m.fq.c_p == doctest::Approx(7.4479));
    CHECK(m.fq.c_q == doctest::Approx(-3.4487));
    CHECK(std::abs(m.effectiveness().det()) > 1e-12);
}

TEST_CASE("identification-derived model opposes the fitted cross terms") {
    RateAxisFit fp{0.0, 1.0, 0.0, -0.5, -3.0};
    RateAxisFit fq{0.0, 0.0, 1.0, 7.0, -3.0};
    const RateModel m = RateModel::from_identification(fp, fq, 0.5, 2.0, 2.0);
    CHECK(m.gain_qp == doctest::Approx(3.0));
    CHECK(m.gain_pq == doctest::Approx(-7.0));
}

TEST_CASE("rate control with kc = 0 reduces to G-inverse of the proportional errors") {
    Rng rng(31);
    for (int i = 0; i < 50; ++i) {
        RateModel m;
        m.fp = {rng.uniform(-3, 3), rng.uniform(0.5, 2.0), rng.uniform(-0.5, 0.5),
                rng.uniform(-2, 2), rng.uniform(-4, 4)};
        m.fq = {rng.uniform(-3, 3), rng.uniform(-0.5, 0.5), rng.uniform(0.5, 2.0),
                rng.uniform(-4, 4), rng.uniform(-2, 2)};
        m.kc = 0.0;
        m.kp = rng.uniform(0.5, 10.0);
        m.kq = rng.uniform(0.5, 10.0);
        m.gain_qp = rng.uniform(-5, 5); // irrelevant at kc = 0
        m.gain_pq = rng.uniform(-5, 5);

        const double p_err = rng.uniform(-2, 2), q_err = rng.uniform(-2, 2);
        const double p = rng.uniform(-2, 2), q = rng.uniform(-2, 2);
        const CyclicPair out = rate_control(p_err, q_err, p, q, m);

        const Mat2 g = m.effectiveness();
        const double det = g.det();
        const double vx = m.kp * p_err, vy = m.kq * q_err;
        CHECK(out.delta_x == doctest::Approx((g.d * vx - g.b * vy) / det).epsilon(1e-13));
        CHECK(out.delta_y == doctest::Approx((-g.c * vx + g.a * vy) / det).epsilon(1e-13));
    }
}
