// Acceptance suite: one PASS/FAIL line per criterion at the stated tolerances.
// Usage: acceptance [qpf-binary manifests-dir scratch-dir]
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "qpf/blowup/verify.hpp"
#include "qpf/minsets/fiberset.hpp"
#include "qpf/sl2/cocycle.hpp"

using namespace qpf;
using curves::ExactBase;
using curves::make_q;
using curves::PLGraph;
using curves::Q;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

unsigned threads() { return std::max(1u, std::thread::hardware_concurrency()); }

const ExactBase& base() {
    static const ExactBase R = ExactBase::default_translation();
    return R;
}

// Low tent with three engineered crossings, flattened once to depth 32 and shared.
const curves::FlattenResult& flat32() {
    static const curves::FlattenResult r = [] {
        curves::FlattenOptions opt;
        auto arc = [](long a, long b) { return curves::make_arc(make_q(a, 100), make_q(b, 100)); };
        opt.crossings = {{arc(2, 10), arc(11, 20), 0}, {arc(35, 43), arc(44, 53), 0}, {arc(70, 78), arc(79, 88), 0}};
        return curves::flatten_to_depth(base(), PLGraph::tent(make_q(1, 10), make_q(1, 20)), 32, opt);
    }();
    return r;
}

std::map<int, double> build_seconds;

std::shared_ptr<const blowup::Pipeline> pipeline(int N) {
    static std::map<int, std::shared_ptr<const blowup::Pipeline>> cache;
    auto it = cache.find(N);
    if (it != cache.end()) return it->second;
    auto fam = blowup::CurveFamily::orbit(base(), flat32().curve, N, &flat32().certificate);
    blowup::PipelineConfig cfg;
    cfg.weights = blowup::make_weights(blowup::WeightMode::Quadratic, 4, N, 0.5);
    cfg.fibers = 4096;
    cfg.knots = 4096;
    cfg.threads = threads();
    auto t = Clock::now();
    cache[N] = blowup::Pipeline::build(fam, base(), cfg);
    build_seconds[N] = since(t);
    return cache[N];
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double x) {
    std::ostringstream os;
    os << std::setprecision(6) << x;
    return os.str();
}

// ---------------------------------------------------------------------------

Outcome flatness() {
    const auto& R = base();
    auto tent = PLGraph::tent(make_q(1, 20), make_q(9, 10));
    auto t = Clock::now();
    auto r = curves::flatten_to_depth(R, tent, 4);
    double secs = since(t);
    bool arcs_ok = true;
    std::string counts;
    for (long k = 1; k <= 4; ++k) {
        auto x = curves::intersection_projection(r.curve, curves::image_curve(R, r.curve, k));
        arcs_ok = arcs_ok && x.degenerate_count() == 0;
        counts += (k > 1 ? "," : "") + std::to_string(x.count());
    }
    std::string why;
    bool cert = curves::validate_certificate(R, r.curve, r.certificate, &why);
    // Within one depth, each sweep lowers the degenerate count.
    bool decreasing = true;
    std::map<long, long> last;
    for (const auto& line : r.certificate) {
        auto j = nlohmann::json::parse(line);
        if (j["event"] != "surgery") continue;
        long d = j["depth"], before = j["degenerate_before"], after = j["degenerate_after"];
        if (after >= before) decreasing = false;
        if (last.count(d) && before >= last[d]) decreasing = false;
        last[d] = before;
    }
    Outcome o;
    o.pass = secs < 60.0 && arcs_ok && cert && decreasing && r.surgeries > 0;
    o.detail = "time " + fmt(secs) + " s, surgeries " + std::to_string(r.surgeries) + ", components k=1..4: " + counts +
               ", non-degenerate " + (arcs_ok ? "yes" : "no") + ", certificate " + (cert ? "valid" : "invalid: " + why) +
               ", sweeps decreasing " + (decreasing ? "yes" : "no");
    return o;
}

Q rand_q(Rng& rng, long den) { return make_q(static_cast<long>(rng.below(den)), den); }

PLGraph random_curve(Rng& rng, int pieces, long den, const Q& amp) {
    std::vector<std::pair<Q, Q>> pts;
    for (int i = 0; i < pieces; ++i) {
        Q t = make_q(i, pieces) + rand_q(rng, den) / (pieces * 2);
        pts.emplace_back(t, rand_q(rng, den) * amp);
    }
    return PLGraph(std::move(pts));
}

Outcome perturbation_law() {
    const auto& R = base();
    int fixtures = 0, violations = 0;
    for (int i = 0; i < 200 && fixtures < 24; ++i) {
        Rng rng(77 * 1000003ull + static_cast<std::uint64_t>(i));
        long n = 1 + static_cast<long>(rng.below(3));
        auto g = random_curve(rng, 3 + static_cast<int>(rng.below(3)), 97, Q(9, 10));
        std::vector<curves::CircIntervalSet> X;
        for (long k = 1; k <= n; ++k) X.push_back(curves::intersection_projection(g, curves::image_curve(R, g, k)));
        Q t = rand_q(rng, 1000);
        for (const auto& a : X.back().arcs())
            if (a.degenerate()) {
                t = a.a;
                break;
            }
        Q dmax(1, 20);
        for (const auto& x : X)
            if (x.min_gap() / 2 < dmax) dmax = x.min_gap() / 2;
        curves::PerturbationBox box;
        try {
            box = curves::find_perturbation_box(R, g, curves::Point{t, g.eval(t)}, n, dmax, Q(1, 20));
        } catch (const BoxNotFound&) {
            continue;
        }
        auto res = curves::apply_perturbation(R, g, box);
        ++fixtures;
        for (long k = 1; k <= n; ++k) {
            const auto& xk = X[static_cast<std::size_t>(k - 1)];
            auto xp = curves::intersection_projection(res.curve, curves::image_curve(R, res.curve, k));
            // X'_k = X_k united with the pieces J_{i,k} of X'_k inside the modified arcs.
            auto u = xk;
            for (const auto& m : res.modified) u = u.unite(xp.intersect(m));
            bool ok = u == xp && (k == n || xp.count() == xk.count());
            if (!ok) ++violations;
        }
    }
    Outcome o;
    o.pass = fixtures >= 20 && violations == 0;
    o.detail = std::to_string(fixtures) + " box fixtures, " + std::to_string(violations) + " violations (exact)";
    return o;
}

Outcome projection_contract() {
    auto pa = blowup::audit_projection(*pipeline(8), 64, 100000, 1);
    Outcome o;
    o.pass = pa.fibers == 64 && pa.max_ks <= 0.005 && pa.max_atom_width_error <= 1e-10;
    o.detail = "fibers " + std::to_string(pa.fibers) + ", max KS " + fmt(pa.max_ks) + " (<= 0.005), atom width error " +
               fmt(pa.max_atom_width_error) + " (<= 1e-10)";
    return o;
}

Outcome atlas_audit() {
    auto p = pipeline(8);
    auto t = Clock::now();
    auto au = blowup::audit_atlas(*p, 1e-9);
    double secs = build_seconds[8] + since(t);
    Outcome o;
    bool all = au.fibers >= 4096;
    o.pass = all && au.ok(1e-9) && secs < 300.0;
    o.detail = "fibers audited " + std::to_string(au.fibers) + ", disjoint " + (au.disjoint ? "yes" : "no") +
               ", max |Leb(U_n) - a_n| " + fmt(au.max_leb_error) + ", components excess " +
               std::to_string(au.max_components_excess) + ", min Leb(V)/((1-eps)a_n) " + fmt(au.min_v_ratio) +
               ", build+audit " + fmt(secs) + " s" + (au.first_violation.empty() ? "" : ", " + au.first_violation);
    return o;
}

Outcome density_bounds() {
    auto p = pipeline(8);
    auto dr = blowup::density_report(*p);
    double cell = 1.0 / p->config().knots;
    Outcome o;
    o.pass = dr.min_h_grid >= 0.28 && dr.max_layer_error_grid <= 10.0 * cell;
    o.detail = "min h on grid " + fmt(dr.min_h_grid) + " (>= 0.28), layer error " +
               fmt(dr.max_layer_error_grid / cell) + " cells (<= 10)";
    return o;
}

Outcome residual_law() {
    std::vector<blowup::ResidualReport> rs;
    for (int N : {4, 8, 16}) rs.push_back(blowup::verify_semiconjugacy(*pipeline(N)));
    bool decreasing = rs[0].sup > rs[1].sup && rs[1].sup > rs[2].sup;
    bool shifted = true;
    for (const auto& r : rs) shifted = shifted && r.shifted_sup <= 2.0 * r.cell;
    Outcome o;
    o.pass = rs[1].sup <= rs[1].bound && decreasing && shifted;
    o.detail = "sup residual N=4,8,16: " + fmt(rs[0].sup) + ", " + fmt(rs[1].sup) + ", " + fmt(rs[2].sup) +
               "; bound at N=8 " + fmt(rs[1].bound) + "; shifted max " +
               fmt(std::max({rs[0].shifted_sup, rs[1].shifted_sup, rs[2].shifted_sup})) + " (<= 2 cells = " +
               fmt(2.0 * rs[1].cell) + ")";
    return o;
}

Outcome nonminimality() {
    auto p = pipeline(8);
    auto nm = blowup::verify_nonminimality(*p, flat32().crossings, 64);
    double height = nm.annulus_hi - nm.annulus_lo;
    Outcome o;
    o.pass = height >= nm.required - 1e-9 && !nm.pairs.empty() && nm.found_fraction >= 0.9;
    o.detail = "annulus height " + fmt(height) + " (>= a_0 = " + fmt(nm.required) + "), hitting times " +
               std::to_string(nm.found) + "/" + std::to_string(nm.pairs.size()) + " pairs";
    return o;
}

Outcome minimal_set_structure() {
    auto p = pipeline(8);
    auto sys = p->system();
    minsets::OrbitOptions oo;  // burn-in 1e5, 1e7 iterations, 4096 x 4096
    auto K = minsets::approximate_minimal_set(sys, oo);
    minsets::Avoid avoid(K.fibers());
    for (std::size_t i = 0; i < K.fibers(); ++i) {
        const auto& a = p->g0(i).atlas;
        for (int n = a.lo; n <= a.hi; ++n)
            for (const auto& arc : a.u(n)) avoid[i].push_back({arc.lo, arc.hi});
    }
    minsets::StructureOptions so;
    so.beta = p->weights().beta;
    so.avoid = &avoid;
    auto sd = minsets::structure_diagnostics(K, so, threads());
    auto cc = minsets::fiber_component_count(K, 0, threads());
    Outcome o;
    o.pass = sd.vertical_segments && sd.measure_ok;
    o.detail = "components " + std::to_string(sd.components) + ", max horizontal extent " +
               std::to_string(sd.max_extent) + " cells (<= 1), max fiber measure " + fmt(sd.max_fiber_measure) +
               " (<= beta + 2 bins = " + fmt(*so.beta + 2.0 / static_cast<double>(K.bins())) + "), atlas bins hit " +
               std::to_string(sd.avoid_violations) + ", modal c " + std::to_string(cc.modal) +
               (sd.ambiguous ? ", open question: " + sd.question : "");
    return o;
}

Outcome sl2_probes() {
    auto ly = sl2::lyapunov(sl2::diagonal_cocycle(2.0), 1000000, 0.0);
    auto quarter = sl2::minimal_fiber_cardinality(sl2::rotation_cocycle(0.5));
    sl2::CardinalityOptions a, b;
    a.seed = 1;
    b.seed = 2;
    auto h1 = sl2::minimal_fiber_cardinality(sl2::harper_cocycle(0.0, 2.0), a);
    auto h2 = sl2::minimal_fiber_cardinality(sl2::harper_cocycle(0.0, 2.0), b);
    auto h1b = sl2::minimal_fiber_cardinality(sl2::harper_cocycle(0.0, 2.0), a);
    bool reproducible = h1.histogram == h1b.histogram && h1.verdict == h1b.verdict;
    Outcome o;
    o.pass = std::fabs(ly.exponent - std::log(2.0)) <= 1e-4 && quarter.fraction_with(2) >= 0.99 && reproducible &&
             h1.verdict == h2.verdict;
    o.detail = "Lyapunov diag(2,1/2) " + fmt(ly.exponent) + " (log 2 +- 1e-4), quarter-turn cardinality 2 on " +
               fmt(100.0 * quarter.fraction_with(2)) + "% of fibers, Harper verdicts " + sl2::to_string(h1.verdict) +
               " / " + sl2::to_string(h2.verdict) + (h1.flagged ? " (flagged)" : "") +
               (reproducible ? ", rerun identical" : ", rerun differs");
    return o;
}

bool same_dir(const fs::path& a, const fs::path& b, std::string& diff) {
    for (const auto& e : fs::directory_iterator(a)) {
        auto name = e.path().filename();
        if (name == "run.log") continue;
        std::ifstream fa(e.path(), std::ios::binary), fb(b / name, std::ios::binary);
        std::string sa((std::istreambuf_iterator<char>(fa)), {}), sb((std::istreambuf_iterator<char>(fb)), {});
        if (!fb || sa != sb) {
            diff = name.string();
            return false;
        }
    }
    return true;
}

Outcome determinism(const std::vector<std::string>& args) {
    Outcome o;
    if (args.size() < 3) {
        o.detail = "needs the qpf binary, the manifest directory and a scratch directory";
        return o;
    }
    const std::string qpf = args[0], man = args[1];
    const fs::path work = args[2];
    fs::remove_all(work);
    fs::create_directories(work);
    const std::vector<std::pair<std::string, std::string>> runs = {
        {"curve", "curve_constant"}, {"curve", "curve_tent"},      {"blowup", "small"},
        {"analyze", "small"},        {"analyze", "translation"},   {"cocycle", "cocycle_quarter"},
        {"cocycle", "cocycle_harper"}};
    int identical = 0;
    std::string failures;
    for (const auto& [cmd, m] : runs) {
        bool ok = true;
        for (const char* rep : {"a", "b"}) {
            std::string cmdline = qpf + " " + cmd + " --manifest " + man + "/" + m + ".ini --out " +
                                  (work / (cmd + "_" + m + "_" + rep)).string() + " --emit-svg > /dev/null";
            if (std::system(cmdline.c_str()) != 0) ok = false;
        }
        std::string diff;
        if (ok && same_dir(work / (cmd + "_" + m + "_a"), work / (cmd + "_" + m + "_b"), diff))
            ++identical;
        else
            failures += " " + cmd + "/" + m + (diff.empty() ? "" : ":" + diff);
    }
    o.pass = identical == static_cast<int>(runs.size());
    o.detail = std::to_string(identical) + "/" + std::to_string(runs.size()) + " commands byte-identical" +
               (failures.empty() ? "" : "; differing:" + failures);
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"flatness certification", flatness},
        {"perturbation-lemma law", perturbation_law},
        {"projection contract", projection_contract},
        {"atlas audit", atlas_audit},
        {"density bounds", density_bounds},
        {"semi-conjugacy residual", residual_law},
        {"non-minimality and transitivity probes", nonminimality},
        {"minimal-set structure", minimal_set_structure},
        {"SL(2,R) probes", sl2_probes},
        {"determinism", [&] { return determinism(args); }},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        auto t = Clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        if (!o.pass) ++failed;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first
                  << "): " << o.detail << " [" << fmt(since(t)) << " s]" << std::endl;
    }
    std::cout << criteria.size() - static_cast<std::size_t>(failed) << "/" << criteria.size() << " criteria passed"
              << std::endl;
    return failed == 0 ? 0 : 1;
}
