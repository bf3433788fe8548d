#include <cmath>

#include "doctest.h"
#include "gen.hpp"
#include "oracle/frozen_values.hpp"
#include "qpf/blowup/verify.hpp"

using namespace qpf;
using namespace qpf::blowup;
using curves::ExactBase;
using curves::make_q;

namespace {

const ExactBase& base() {
    static const ExactBase R = ExactBase::default_translation();
    return R;
}

curves::FlattenOptions crossing_options() {
    curves::FlattenOptions opt;
    auto arc = [](long a, long b) { return curves::make_arc(make_q(a, 100), make_q(b, 100)); };
    opt.crossings = {{arc(2, 10), arc(11, 20), 0}, {arc(35, 43), arc(44, 53), 0}, {arc(70, 78), arc(79, 88), 0}};
    return opt;
}

// Low tent flattened to depth 16 with three engineered crossings.
const curves::FlattenResult& flat16() {
    static const curves::FlattenResult r =
        curves::flatten_to_depth(base(), PLGraph::tent(make_q(1, 10), make_q(1, 20)), 16, crossing_options());
    return r;
}

const CurveFamily& family8() {
    static const CurveFamily f = CurveFamily::orbit(base(), flat16().curve, 8, &flat16().certificate);
    return f;
}

std::shared_ptr<const Pipeline> small_pipeline(BumpKind kind = BumpKind::Urysohn) {
    PipelineConfig cfg;
    cfg.weights = make_weights(WeightMode::Quadratic, 4, 8, 0.5);
    cfg.fibers = 256;
    cfg.knots = 512;
    cfg.bumps = kind;
    return Pipeline::build(family8(), base(), cfg);
}

const Pipeline& pipe() {
    static const auto p = small_pipeline();
    return *p;
}

MeasureSpec simple_spec(int lo, std::vector<double> mass, int anchor = 0) {
    MeasureSpec s;
    s.lo = lo;
    s.hi = lo + static_cast<int>(mass.size()) - 1;
    s.anchor = anchor;
    s.beta = 1.0;
    for (double m : mass) s.beta -= m;
    s.mass = std::move(mass);
    return s;
}

// Gamma_1 rests on Gamma_0 = 0 over [1/5, 2/5] (arriving from below) and [3/5, 4/5] (from above).
CurveFamily overlap_pair() {
    PLGraph g1({{make_q(0, 1), make_q(-1, 20)},
                {make_q(1, 5), Q(0)},
                {make_q(2, 5), Q(0)},
                {make_q(1, 2), make_q(1, 20)},
                {make_q(3, 5), Q(0)},
                {make_q(4, 5), Q(0)}});
    return CurveFamily::explicit_curves(0, {PLGraph::constant(Q(0)), g1});
}

}  // namespace

TEST_CASE("make_weights examples") {
    auto w = make_weights(WeightMode::Quadratic, 4, 8, 0.5);
    CHECK(w.beta_exact == curves::parse_q(oracle::kBetaK4N8));
    CHECK(w.beta == doctest::Approx(oracle::kBetaK4N8d).epsilon(1e-15));
    CHECK(w.ratio == doctest::Approx(oracle::kRatioK4N8).epsilon(1e-14));
    CHECK(w.h_floor() == doctest::Approx(oracle::kHFloorK4N8).epsilon(1e-13));
    CHECK(w.ratio_at == -1);
    double sum = 0.0;
    for (int n = -8; n <= 8; ++n) sum += w.at(n);
    CHECK(sum < 1.0);
    CHECK(w.at(3) == doctest::Approx(1.0 / 49.0));

    CHECK_THROWS_AS(make_weights(WeightMode::Quadratic, 1, 1000, 0.5), WeightsInvalid);
    auto h = make_weights(WeightMode::Hoelder, 4, 8, 0.5, 1.0 / 3.0, 1.5);
    CHECK(h.beta > 0.0);
    CHECK(h.ratio < 1.0);
    CHECK_THROWS_AS(make_weights(WeightMode::Hoelder, 4, 8, 0.5, 1.0 / 3.0, 2.5), WeightsInvalid);
    CHECK_THROWS_AS(make_weights(WeightMode::Hoelder, 4, 8, 0.5, 0.6, 1.2), WeightsInvalid);
    CHECK_THROWS_AS(make_weights(WeightMode::Quadratic, 4, 8, 0.0), WeightsInvalid);
}

TEST_CASE("measure and projection examples") {
    SUBCASE("single constant curve with half the mass") {
        auto fam = CurveFamily::explicit_curves(0, {PLGraph::constant(Q(0))});
        auto m = build_fiber_measure(fam, simple_spec(0, {0.5}), make_q(1, 3));
        CHECK(m.cdf(0.0) == doctest::Approx(0.5));
        CHECK(m.cdf(0.5) == doctest::Approx(0.75));
        for (double x : {0.0, 0.2, 0.5, 0.7, 0.99}) {
            double expect = x <= 0.5 ? 0.0 : 2.0 * x - 1.0;
            CHECK(circ_dist(m.project(x), expect) < 1e-15);
        }
        auto [lo, hi] = m.preimage(0.0);
        CHECK(hi - lo == doctest::Approx(0.5).epsilon(1e-15));
        auto [a, b] = m.preimage(0.5);
        CHECK(a == b);
    }
    SUBCASE("no curves gives Lebesgue and the identity") {
        auto fam = CurveFamily::explicit_curves(0, {});
        MeasureSpec s;
        auto m = build_fiber_measure(fam, s, make_q(2, 7));
        for (double x : {0.0, 0.3, 0.77}) {
            CHECK(m.project(x) == doctest::Approx(x));
            CHECK(m.cdf(x) == doctest::Approx(x));
        }
    }
    SUBCASE("quadratic window over the translation base has unit mass") {
        auto spec = window_spec(make_weights(WeightMode::Quadratic, 4, 8, 0.5));
        for (long i = 0; i < 50; ++i) {
            auto m = build_fiber_measure(family8(), spec, make_q(i * 37 + 1, 1999));
            double total = m.bottom + m.top + m.beta;
            for (std::size_t g = 1; g < m.groups.size(); ++g) total += m.groups[g].mass();
            CHECK(std::fabs(total - 1.0) < 1e-14);
            CHECK(m.cdf(1.0 - 1e-16) == doctest::Approx(1.0).epsilon(1e-14));
            CHECK(m.atoms() == 17);
        }
    }
    SUBCASE("anchor annulus") {
        auto spec = window_spec(make_weights(WeightMode::Quadratic, 4, 8, 0.5));
        auto m = build_fiber_measure(family8(), spec, make_q(5, 11));
        CHECK(m.bottom >= spec.at(0));
        CHECK(m.project(0.5 * spec.at(0)) == doctest::Approx(m.anchor_pos));
    }
}

TEST_CASE("flat overlaps split atoms linearly") {
    auto fam = overlap_pair();
    // Halfway along the first arc Gamma_1 has moved half of its mass from below to above.
    CHECK(fam.below_fraction(0, 1, make_q(3, 10)) == doctest::Approx(0.5));
    CHECK(fam.below_fraction(0, 1, make_q(1, 5)) == doctest::Approx(1.0));
    CHECK(fam.below_fraction(0, 1, make_q(2, 5)) == doctest::Approx(0.0));
    CHECK(fam.below_fraction(0, 1, make_q(7, 10)) == doctest::Approx(0.5));
    CHECK(fam.below_fraction(1, 0, make_q(3, 10)) == doctest::Approx(0.5));
    auto spec = simple_spec(0, {0.1, 0.2});
    auto m = build_fiber_measure(fam, spec, make_q(3, 10));
    CHECK(m.groups.size() == 1);
    CHECK(m.interpolated_groups() == 1);
    CHECK(m.top == doctest::Approx(0.1));
    CHECK(m.bottom == doctest::Approx(0.2));

    // Isolated meetings are rejected unless waived.
    PLGraph crossing({{Q(0), make_q(-1, 10)}, {make_q(1, 2), make_q(1, 10)}});
    CHECK_THROWS_AS(CurveFamily::explicit_curves(0, {PLGraph::constant(Q(0)), crossing}), PreconditionError);
    CHECK_NOTHROW(CurveFamily::explicit_curves(0, {PLGraph::constant(Q(0)), crossing}, true));
}

TEST_CASE("orbit family needs a certificate or a waiver") {
    auto g = flat16().curve;
    CHECK_THROWS_AS(CurveFamily::orbit(base(), g, 8, nullptr), PreconditionError);
    CHECK_THROWS_AS(CurveFamily::orbit(base(), g, 9, &flat16().certificate), PreconditionError);
    auto tampered = flat16().certificate;
    tampered.front() = "{}";
    CHECK_THROWS_AS(CurveFamily::orbit(base(), g, 8, &tampered), PreconditionError);
    CHECK_NOTHROW(CurveFamily::orbit(base(), g, 9, nullptr, true));
}

TEST_CASE("conjugating rotation") {
    auto fam = CurveFamily::explicit_curves(0, {PLGraph::constant(Q(0)), PLGraph::constant(make_q(1, 2))});
    auto s0 = simple_spec(0, {0.1, 0.1}, 0), s1 = simple_spec(0, {0.1, 0.1}, 1);
    std::vector<FiberMeasure> a, b, c;
    for (long i = 0; i < 8; ++i) {
        a.push_back(build_fiber_measure(fam, s0, make_q(i, 8)));
        b.push_back(build_fiber_measure(fam, s1, make_q(i, 8)));
        c.push_back(build_fiber_measure(fam, simple_spec(0, {0.1, 0.2}, 0), make_q(i, 8)));
    }
    auto same = find_conjugating_rotation(a, a);
    for (double al : same.alpha) CHECK(std::fabs(al) < 1e-15);
    auto rot = find_conjugating_rotation(a, b);
    for (double al : rot.alpha) CHECK(circ_dist(al, 0.5) < 1e-12);
    CHECK(rot.residual < 1e-12);
    CHECK_THROWS_AS(find_conjugating_rotation(a, c), NotSameMeasure);

    // Anchor change on the quadratic family.
    auto w = make_weights(WeightMode::Quadratic, 4, 8, 0.5);
    std::vector<FiberMeasure> p0, p3;
    for (long i = 0; i < 16; ++i) {
        p0.push_back(build_fiber_measure(family8(), window_spec(w, 0), make_q(i, 16)));
        p3.push_back(build_fiber_measure(family8(), window_spec(w, 3), make_q(i, 16)));
    }
    auto r3 = find_conjugating_rotation(p0, p3);
    for (std::size_t i = 0; i < 16; ++i)
        CHECK(circ_dist(r3.alpha[i], p3[i].lower_of(0) - p0[i].lower_of(0)) < 1e-12);
}

TEST_CASE("atlas examples") {
    SUBCASE("single curve gives the annulus") {
        auto fam = CurveFamily::explicit_curves(0, {PLGraph::constant(make_q(1, 3))});
        auto spec = simple_spec(0, {0.2});
        auto m = build_fiber_measure(fam, spec, make_q(1, 7));
        auto a = build_fiber_atlas(m, spec, 0.5);
        REQUIRE(a.components(0) == 1);
        CHECK(a.u(0)[0].lo == doctest::Approx(0.0));
        CHECK(a.u(0)[0].hi == doctest::Approx(0.2));
        CHECK(a.v_leb(0) == doctest::Approx(0.1));
        CHECK(a.margin[0] == doctest::Approx(0.05));
        auto b = build_bumps(a, spec, BumpKind::Urysohn, 0.5, 1.0);
        CHECK(b.integral(0) >= 0.1 - 1e-15);
        CHECK(b.integral(0) <= 0.2);
        CHECK(b.value(a, 0, 0.1) == 1.0);
        CHECK(b.value(a, 0, 0.025) == doctest::Approx(0.5));
        CHECK(b.value(a, 0, 0.3) == 0.0);
        CHECK(b.value(a, 0, -0.01) == 0.0);
        auto h = build_bumps(a, spec, BumpKind::Hoelder, 0.5, 1.0 / 3.0);
        CHECK(h.holder_constant(0) <= std::pow(2.0 / (0.5 * 0.2), 1.0 / 3.0) * (1 + 1e-12));
        CHECK(h.integral(0) >= 0.1);
        CHECK(h.integral(0) <= 0.2);
        CHECK_THROWS_AS(build_fiber_atlas(m, spec, 0.0), CoverFailure);
    }
    SUBCASE("two disjoint curves") {
        auto fam = CurveFamily::explicit_curves(0, {PLGraph::constant(Q(0)), PLGraph::constant(make_q(1, 2))});
        auto spec = simple_spec(0, {0.1, 0.15});
        auto m = build_fiber_measure(fam, spec, make_q(2, 5));
        auto a = build_fiber_atlas(m, spec, 0.5);
        CHECK(a.components(0) == 1);
        CHECK(a.components(1) == 1);
        auto audit = audit_fiber_atlas(a, m, spec, 0.5, 1e-12);
        CHECK(audit.ok(1e-12));
    }
    SUBCASE("engineered overlap pair") {
        auto fam = overlap_pair();
        auto spec = simple_spec(0, {0.1, 0.2});
        int max_components = 0;
        for (long i = 0; i < 200; ++i) {
            auto m = build_fiber_measure(fam, spec, make_q(i, 200));
            auto a = build_fiber_atlas(m, spec, 0.5);
            auto audit = audit_fiber_atlas(a, m, spec, 0.5, 1e-12);
            CHECK_MESSAGE(audit.ok(1e-12), audit.first_violation);
            max_components = std::max(max_components, a.components(1));
        }
        CHECK(max_components <= 3);
        CHECK(max_components >= 2);  // Gamma_1 straddles U_0 inside the overlap arcs
    }
}

TEST_CASE("density examples") {
    const Pipeline& p = pipe();
    auto d = density_report(p);
    CHECK(d.min_h_grid >= d.h_floor);
    CHECK(d.min_h_pieces >= d.h_floor);
    CHECK(d.h_floor == doctest::Approx(0.28));
    CHECK(d.max_mass_error < 1e-12);
    CHECK(d.max_layer_error < 1e-12);
    CHECK(d.max_layer_error_grid < 10.0 / p.config().knots);
}

TEST_CASE("general nu agrees with the h route") {
    const Pipeline& p = pipe();
    auto c = compare_nu_routes(p, 8);
    CHECK(c.fibers == 32);
    CHECK(c.max_layer_diff < 1e-12);
    CHECK(c.max_cdf_diff_off_atlas < 1e-12);
    CHECK(c.min_general_density >= 0.0);

    // Without atoms the general construction is Lebesgue.
    FiberAtlas empty;
    empty.start = 0.0;
    BumpFamily nob;
    auto w = make_weights(WeightMode::Quadratic, 4, 1, 0.5);
    empty.lo = 0;
    empty.hi = -1;
    auto nu = build_density(empty, nob, w, DensityRoute::General);
    CHECK(nu.total == doctest::Approx(1.0));
    CHECK(nu.cum(0.3) == doctest::Approx(0.3));
    CHECK(nu.inv_lift(2.25) == doctest::Approx(2.25));
}

TEST_CASE("transported fiber maps") {
    const Pipeline& p = pipe();
    auto t = transport_check(p, 8, 20000, 1000);
    CHECK(t.max_ks <= 3.0 / p.config().knots);
    CHECK(t.max_pair_error < 1e-10);
    CHECK(t.f_graph_error < 1e-12);
    auto sys = p.system();
    CHECK(sys.kind == core::SystemKind::BlowupBuilt);
    Rng rng(7);
    for (int k = 0; k < 200; ++k) {
        double th = rng.uniform(), x = rng.uniform(), y = x + 1e-3 * rng.uniform();
        double fx = sys.lift(th, x), fy = sys.lift(th, y);
        CHECK(fy >= fx);
        CHECK(sys.lift(th, x + 1.0) == doctest::Approx(fx + 1.0).epsilon(1e-12));
        CHECK(sys.lift_inverse(th, fx) == doctest::Approx(x).epsilon(1e-9));
    }
    CHECK(core::continuity_modulus(sys, p.fibers(), 64) < 0.25);
}

TEST_CASE("semi-conjugacy residual and truncation defect") {
    const Pipeline& p = pipe();
    auto r = verify_semiconjugacy(p);
    CHECK(r.sup <= r.bound);
    CHECK(r.shifted_sup <= 2.0 * r.cell);
    CHECK(r.atom_image_error < 1e-10);
    auto tv = total_variation_law(p);
    CHECK(tv.expected == doctest::Approx(2.0 / 144.0));
    CHECK(tv.generic_fraction > 0.95);
}

TEST_CASE("projection contract on audited fibers") {
    auto a = audit_projection(pipe(), 16, 20000);
    CHECK(a.max_ks <= 0.005);
    CHECK(a.max_atom_width_error <= 1e-10);
}

TEST_CASE("non-minimality and transitivity probes") {
    const Pipeline& p = pipe();
    auto r = verify_nonminimality(p, flat16().crossings);
    CHECK(r.witness);
    CHECK(r.annulus_hi - r.annulus_lo >= r.required - 1e-9);
    REQUIRE(!r.pairs.empty());
    // The coarse 256-fiber grid blurs the narrowest overlap pieces; the full grid finds all.
    CHECK(r.found_fraction >= 0.75);
    for (const auto& pr : r.pairs)
        if (pr.hit > 0) CHECK(pr.hit <= pr.m);
    // A thin target far from anything certified, with a short horizon.
    ProbePair far;
    far.theta_u = 0.1;
    far.theta_v = 0.6;
    far.x_u = {0.01, 0.02};
    far.x_v = {0.5, 0.5001};
    CHECK(probe_hitting_time(p, far, 3) == -1);
}

TEST_CASE("hoelder configuration") {
    auto p = small_pipeline(BumpKind::Hoelder);
    auto h = hoelder_report(*p, 8);
    auto w = p->weights();
    double expect = 0.0;
    for (int n = -8; n <= 8; ++n) expect = std::max(expect, std::pow((4.0 * std::abs(n) + 2.0) / (0.5 * w.at(n)), 1.0 / 3.0));
    CHECK(h.max_constant == doctest::Approx(expect));
    CHECK(h.max_quotient_ratio <= 1.0 + 1e-9);
    auto d = density_report(*p);
    CHECK(d.min_h_pieces >= d.h_floor);
    CHECK(d.max_layer_error < 1e-10);
    CHECK(verify_semiconjugacy(*p).sup <= verify_semiconjugacy(*p).bound);
}

TEST_CASE("property: mass, inversion and atlas on random fibers") {
    auto w = make_weights(WeightMode::Quadratic, 4, 8, 0.5);
    auto spec = window_spec(w);
    gen::for_all(31, 60, [&](Rng& rng) {
        Q theta = make_q(static_cast<long>(rng.below(1000003)), 1000003);
        auto m = build_fiber_measure(family8(), spec, theta);
        double total = m.bottom + m.top + m.beta;
        for (std::size_t g = 1; g < m.groups.size(); ++g) total += m.groups[g].mass();
        CHECK(std::fabs(total - 1.0) < 1e-12);
        for (int k = 0; k < 170; ++k) {
            // F(y) = cumulative mass from the anchor; Q(c) = quantile at domain coordinate c - top.
            double y = rng.uniform();
            double c = m.cdf(y);
            CHECK(std::fabs(m.quantile(c - m.top) - y) < 1e-12);
            double u = rng.uniform();
            double q = m.quantile(u - m.top);
            CHECK(m.cdf(q) >= u - 1e-12);
            bool atom = q == 0.0;
            for (std::size_t g = 1; g < m.groups.size(); ++g) atom = atom || m.groups[g].pos == q;
            if (!atom) CHECK(std::fabs(m.cdf(q) - u) < 1e-12);
        }
        auto a = build_fiber_atlas(m, spec, w.eps);
        auto audit = audit_fiber_atlas(a, m, spec, w.eps, 1e-10);
        CHECK_MESSAGE(audit.ok(1e-10), audit.first_violation);
        auto b = build_bumps(a, spec, BumpKind::Urysohn, w.eps, 1.0);
        auto nu = build_density(a, b, w, DensityRoute::H);
        CHECK(nu.min_density() >= w.h_floor());
        for (int k = 0; k < 20; ++k) {
            double c = rng.uniform();
            CHECK(nu.cum(nu.inv(c)) == doctest::Approx(c).epsilon(1e-12));
        }
    });
}

TEST_CASE("property: random explicit families keep atlas invariants") {
    gen::for_all(47, 25, [&](Rng& rng) {
        std::vector<PLGraph> curves;
        int count = 2 + static_cast<int>(rng.below(3));
        for (int c = 0; c < count; ++c)
            curves.push_back(PLGraph::constant(make_q(static_cast<long>(rng.below(4)), 4)));
        auto fam = CurveFamily::explicit_curves(0, curves);
        std::vector<double> mass;
        for (int c = 0; c < count; ++c) mass.push_back(0.05 + 0.05 * rng.uniform());
        auto spec = simple_spec(0, mass);
        auto m = build_fiber_measure(fam, spec, make_q(static_cast<long>(rng.below(97)), 97));
        auto a = build_fiber_atlas(m, spec, 0.5);
        auto audit = audit_fiber_atlas(a, m, spec, 0.5, 1e-12);
        CHECK_MESSAGE(audit.ok(1e-12), audit.first_violation);
        for (int n = 0; n < count; ++n) {
            auto [lo, hi] = m.preimage(fam.curve(n).eval_d(0.0) + 0.0);
            CHECK(hi - lo >= spec.at(n) - 1e-12);
        }
    });
}
