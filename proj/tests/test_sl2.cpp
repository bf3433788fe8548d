#include <cmath>
#include <numbers>

#include "doctest.h"
#include "gen.hpp"
#include "oracle/frozen_values.hpp"
#include "qpf/sl2/cocycle.hpp"

using namespace qpf;
using namespace qpf::sl2;

namespace {

Mat2 random_sl2(Rng& rng) {
    // Product of a rotation, a diagonal and a shear: covers every conjugacy type.
    Mat2 r = rotation_matrix(rng.uniform(0.0, 2.0));
    Mat2 d = diagonal_matrix(std::exp(rng.uniform(-1.5, 1.5)));
    Mat2 s{1.0, rng.uniform(-2.0, 2.0), 0.0, 1.0};
    return r * d * s;
}

CardinalityOptions quick(std::uint64_t seed = 1) {
    CardinalityOptions o;
    o.fibers = 256;
    o.bins = 2048;
    o.burnin = 2000;
    o.iters = 400000;
    o.seed = seed;
    o.threads = 4;
    return o;
}

}  // namespace

TEST_CASE("projective action examples") {
    for (double x : {0.0, 0.1, 0.37, 0.5, 0.99}) CHECK(projective_action(Mat2{}, x) == doctest::Approx(x).epsilon(1e-15));
    for (double phi : {0.1, 0.5, 0.75, 1.3})
        for (double x : {0.0, 0.2, 0.8}) CHECK(circ_dist(projective_action(rotation_matrix(phi), x), x + phi) < 1e-12);
    auto D = diagonal_matrix(2.0);
    CHECK(projective_action(D, 0.0) == 0.0);
    CHECK(circ_dist(projective_action(D, 0.5), 0.5) < 1e-15);
    // 0 attracts: nearby points move closer; 1/2 repels.
    CHECK(circ_dist(projective_action(D, 0.05), 0.0) < 0.05);
    CHECK(circ_dist(projective_action(D, 0.45), 0.5) > 0.05);
    double x = 0.3;
    for (int i = 0; i < 60; ++i) x = projective_action(D, x);
    CHECK(circ_dist(x, 0.0) < 1e-12);
}

TEST_CASE("cocycle systems carry the projective action") {
    auto sys = cocycle_qpf(rotation_cocycle(0.5));
    CHECK(circ_dist(sys.lift(0.3, 0.1), 0.6) < 1e-12);
    CHECK(sys.lift(0.3, 0.0) >= 0.0);
    CHECK(sys.lift(0.3, 0.0) < 1.0);
    auto h = cocycle_qpf(harper_cocycle(0.0, 2.0));
    Mat2 A = harper_cocycle(0.0, 2.0).at(0.2);
    CHECK(A.det() == doctest::Approx(1.0));
    CHECK(circ_dist(h.lift(0.2, 0.4), projective_action(A, 0.4)) < 1e-12);
    CHECK_THROWS_AS(family_from_string("bogus"), ConfigError);
    CHECK(family_from_string("harper") == Family::Harper);
}

TEST_CASE("Lyapunov exponents") {
    auto d = lyapunov(diagonal_cocycle(2.0), 100000, 0.0);
    CHECK(std::fabs(d.exponent - oracle::kLog2) < 1e-6);
    CHECK(d.det_drift < 1e-9);
    auto r = lyapunov(rotation_cocycle(0.3), 100000, 0.0);
    CHECK(std::fabs(r.exponent) < 1e-6);
    auto h1 = lyapunov(harper_cocycle(0.0, 2.0), 100000, 0.1);
    auto h2 = lyapunov(harper_cocycle(0.0, 2.0), 100000, 0.6);
    CHECK(h1.exponent > 0.0);
    // Supercritical almost Mathieu: the exponent is log(lambda) on the spectrum and above it off it.
    CHECK(h1.exponent == doctest::Approx(h2.exponent).epsilon(1e-2));
    CHECK_THROWS_AS(lyapunov(diagonal_cocycle(2.0), 999, 0.0), PreconditionError);
}

TEST_CASE("determinant drift stays small over a million steps") {
    auto h = lyapunov(harper_cocycle(0.5, 1.5), 1000000, 0.3);
    CHECK(h.det_drift <= 1e-9);
}

TEST_CASE("fiber cardinality verdicts") {
    auto hyp = minimal_fiber_cardinality(diagonal_cocycle(2.0), quick());
    CHECK(hyp.modal == 1);
    CHECK(hyp.fraction_with(1) == 1.0);
    CHECK(hyp.verdict == Verdict::GraphLike);
    CHECK_FALSE(hyp.flagged);

    auto quarter = minimal_fiber_cardinality(rotation_cocycle(0.5), quick());
    CHECK(quarter.modal == 2);
    CHECK(quarter.fraction_with(2) >= 0.99);
    CHECK(quarter.verdict == Verdict::TwoPoint);

    auto irr = minimal_fiber_cardinality(rotation_cocycle(core::kSilverRho), quick());
    CHECK(irr.verdict == Verdict::WholeTorus);

    auto bad = quick();
    bad.cluster_tol = 1;
    CHECK_THROWS_AS(minimal_fiber_cardinality(diagonal_cocycle(2.0), bad), PreconditionError);
}

TEST_CASE("Harper verdict agrees across seeds") {
    auto a = minimal_fiber_cardinality(harper_cocycle(0.0, 2.0), quick(1));
    auto b = minimal_fiber_cardinality(harper_cocycle(0.0, 2.0), quick(2));
    CHECK(a.verdict == b.verdict);
    MESSAGE("harper verdict: " << to_string(a.verdict) << ", modal " << a.modal << " at " << a.modal_fraction);
}

TEST_CASE("triple map examples") {
    auto id = triple_map(0.1, 0.3, 0.6, 0.1, 0.3, 0.6);
    CHECK(std::fabs(std::fabs(id.A.a) - 1.0) < 1e-12);
    CHECK(std::fabs(id.A.b) < 1e-12);
    CHECK(std::fabs(id.A.c) < 1e-12);
    CHECK(std::fabs(std::fabs(id.A.d) - 1.0) < 1e-12);

    auto t = triple_map(0.0, 0.25, 0.5, 0.0, 0.375, 0.5);
    CHECK(t.residual <= 1e-10);
    CHECK(t.A.a == doctest::Approx(oracle::kTripleMat[0]).epsilon(1e-12));
    CHECK(std::fabs(t.A.b - oracle::kTripleMat[1]) < 1e-12);
    CHECK(std::fabs(t.A.c - oracle::kTripleMat[2]) < 1e-12);
    CHECK(t.A.d == doctest::Approx(oracle::kTripleMat[3]).epsilon(1e-12));

    CHECK_THROWS_AS(triple_map(0.1, 0.1, 0.5, 0.0, 0.2, 0.4), DegenerateTriple);
    CHECK_THROWS_AS(triple_map(0.1, 0.3, 0.5, 0.0, 0.2, 0.2), DegenerateTriple);
    CHECK_THROWS_AS(triple_map(0.1, 0.3, 0.5, 0.5, 0.3, 0.1), DegenerateTriple);
}

TEST_CASE("property: homomorphism, orientation and degree one") {
    gen::for_all(51, 200, [](Rng& rng) {
        Mat2 A = random_sl2(rng), B = random_sl2(rng);
        CHECK(std::fabs(A.det() - 1.0) < 1e-12);
        double x = rng.uniform();
        CHECK(circ_dist(projective_action(A * B, x), projective_action(A, projective_action(B, x))) < 1e-12);
        // The lift is increasing and advances by exactly one over a full turn.
        double prev = projective_lift(A, 0.0);
        for (int k = 1; k <= 64; ++k) {
            double cur = projective_lift(A, k / 64.0);
            CHECK(cur > prev);
            prev = cur;
        }
        CHECK(std::fabs(projective_lift(A, 1.0) - projective_lift(A, 0.0) - 1.0) < 1e-12);
    });
}

TEST_CASE("property: triple map inverts evaluation on triples") {
    gen::for_all(53, 200, [](Rng& rng) {
        Mat2 A = random_sl2(rng);
        double a = rng.uniform();
        double z = mod1(a + rng.uniform(0.05, 0.45)), b = mod1(a + rng.uniform(0.5, 0.95));
        auto m = triple_map(a, z, b, projective_action(A, a), projective_action(A, z), projective_action(A, b));
        CHECK(m.residual <= 1e-9);
        // Same projective map: agrees with A on a fourth point, and equals +-A.
        double w = rng.uniform();
        CHECK(circ_dist(projective_action(m.A, w), projective_action(A, w)) < 1e-9);
        double s = (m.A.a * A.a + m.A.b * A.b + m.A.c * A.c + m.A.d * A.d) > 0 ? 1.0 : -1.0;
        CHECK(std::fabs(m.A.a - s * A.a) + std::fabs(m.A.b - s * A.b) + std::fabs(m.A.c - s * A.c) +
                  std::fabs(m.A.d - s * A.d) <
              1e-8);
    });
}
