#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "gen.hpp"
#include "oracle/frozen_values.hpp"
#include "qpf/core/dynamics.hpp"

using namespace qpf;
using namespace qpf::core;

namespace {
QpfSystem skew_mean_03() { return make_skew_rotation(kGoldenOmega, tent_wave(0.25, 0.1)); }

// phi = c + psi(theta + omega) - psi(theta) with psi = 0.05 (2 tent - 1), exactly PL.
double psi(double t) { return 0.05 * (2.0 * (1.0 - std::fabs(2.0 * mod1(t) - 1.0)) - 1.0); }

QpfSystem coboundary_skew(double c) {
    std::vector<double> ts = {0.0, 0.5, mod1(-kGoldenOmega), mod1(0.5 - kGoldenOmega)};
    std::sort(ts.begin(), ts.end());
    PeriodicPL phi;
    for (double t : ts) {
        phi.t.push_back(t);
        phi.v.push_back(c + psi(t + kGoldenOmega) - psi(t));
    }
    return make_skew_rotation(kGoldenOmega, phi);
}
}  // namespace

TEST_CASE("compose_fiber examples") {
    auto tr = make_translation(kGoldenOmega, 0.25);
    CHECK(compose_fiber(tr, 0.0, 4, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(compose_fiber(tr, 0.3, 0, 0.37) == 0.37);
    auto sk = make_skew_rotation(kGoldenOmega, tent_wave(0.3, 0.1));
    CHECK(compose_fiber(sk, 0.0, 0, 0.37) == 0.37);
    CHECK(std::fabs(compose_fiber(sk, 0.0, 10, 0.0) - oracle::kSkewSum10) < 1e-12);
}

TEST_CASE("rotation_number examples") {
    auto id = make_translation(kGoldenOmega, 0.0);
    CHECK(rotation_number(id, 0.1, 0.2, 77).rho == 0.0);
    auto tr = make_translation(kGoldenOmega, 0.25);
    CHECK(rotation_number(tr, 0.0, 0.0, 1000).rho == 0.25);
    const std::int64_t N = 100000;
    auto r = rotation_number(skew_mean_03(), 0.0, 0.0, N);
    CHECK(std::fabs(r.rho - 0.3) <= 10.0 / N);
    for (std::int64_t n : {1000, 10000, 100000})
        CHECK(std::fabs(rotation_number(skew_mean_03(), 0.0, 0.0, n).rho - 0.3) <= oracle::kRotErrorConst / n);
    CHECK(r.cauchy_gap < 1e-3);
}

TEST_CASE("deviations") {
    auto tr = make_translation(kGoldenOmega, kSilverRho);
    auto d = deviations(tr, 0.2, 0.0, 500, mod1(kSilverRho));
    for (double v : d.devs) CHECK(v == 0.0);
    auto cb = coboundary_skew(0.3);
    auto dc = deviations(cb, 0.1, 0.4, 10000, 0.3);
    CHECK(dc.sup_growth.back() <= 0.1 + 1e-9);
    for (std::size_t i = 1; i < dc.sup_growth.size(); ++i) CHECK(dc.sup_growth[i] >= dc.sup_growth[i - 1]);
}

TEST_CASE("classifier") {
    auto tr = make_translation(kGoldenOmega, kSilverRho);
    auto rt = classify_rho_boundedness(tr, 1000, 8);
    CHECK(rt.verdict == Boundedness::BoundedSuspected);
    for (double g : rt.growth) CHECK(g < 1e-9);
    auto rc = classify_rho_boundedness(coboundary_skew(0.3), 2000, 8);
    CHECK(rc.verdict == Boundedness::BoundedSuspected);
    auto rs = classify_rho_boundedness(make_skew_rotation(kGoldenOmega, tent_wave(0.3, 0.1)), 2000, 8);
    MESSAGE("tent-wave skew verdict: " << to_string(rs.verdict) << " ratio " << rs.ratio);
    CHECK(rs.growth.size() == 2000);
    CHECK_THROWS_AS(classify_rho_boundedness(tr, 10, 2), PreconditionError);
}

TEST_CASE("table fiber map normalizes and interpolates") {
    std::vector<double> vals;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j <= 8; ++j) vals.push_back(2.0 + 0.1 * i + j / 8.0);
    auto sys = make_system(kGoldenOmega, SystemKind::Sampled, std::make_shared<TableFiberMap>(4, 8, vals));
    CHECK(sys.lift(0.0, 0.0) == doctest::Approx(0.0));
    CHECK(sys.lift(0.125, 0.5) == doctest::Approx(0.55));
    CHECK(sys.lift_inverse(0.125, 0.55) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("property: degree one, monotone, cocycle identity") {
    std::vector<QpfSystem> systems = {make_translation(kGoldenOmega, kSilverRho), skew_mean_03(),
                                      make_skew_rotation(kGoldenOmega, tent_wave(0.9, 0.3))};
    gen::for_all(11, 200, [&](Rng& rng) {
        const auto& sys = systems[static_cast<std::size_t>(rng.below(3))];
        double theta = rng.uniform(), x = rng.uniform(-3, 3), x2 = x + rng.uniform(1e-6, 0.9);
        std::int64_t n = rng.below(41) - 20, m = rng.below(21) - 10;
        double fx = compose_fiber(sys, theta, n, x);
        CHECK(compose_fiber(sys, theta, n, x + 1) == doctest::Approx(fx + 1).epsilon(1e-12));
        CHECK(compose_fiber(sys, theta, n, x2) > fx);
        double lhs = compose_fiber(sys, theta, m + n, x);
        double rhs = compose_fiber(sys, theta + static_cast<double>(n) * sys.omega, m, fx);
        CHECK(std::fabs(lhs - rhs) < 1e-12);
        double f0 = sys.lift(theta, 0.0);
        CHECK(f0 >= 0.0);
        CHECK(f0 < 1.0);
    });
}
