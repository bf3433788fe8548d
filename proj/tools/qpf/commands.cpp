#include "commands.hpp"

#include <bit>
#include <chrono>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "qpf/curves/rational.hpp"
#include "qpf/minsets/fiberset.hpp"
#include "qpf/parallel.hpp"
#include "svg.hpp"

namespace qpf::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;
using curves::Q;

RunLog::RunLog(const std::string& dir) {
    fs::create_directories(dir);
    out_.open(fs::path(dir) / "run.log", std::ios::app);
}

void RunLog::operator()(const std::string& msg) {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    out_ << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ") << ' ' << msg << '\n';
    out_.flush();
}

namespace {

fs::path out_path(const Manifest& m, const std::string& name) { return fs::path(m.out) / name; }

void write_text(const fs::path& p, const std::string& s) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw ConfigError("cannot write '" + p.string() + "'");
    os << s;
}

void write_lines(const fs::path& p, const std::vector<std::string>& lines) {
    std::string s;
    for (const auto& l : lines) s += l + '\n';
    write_text(p, s);
}

void write_jsonl(const fs::path& p, const std::vector<json>& rows) {
    std::vector<std::string> lines;
    for (const auto& r : rows) lines.push_back(r.dump());
    write_lines(p, lines);
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PreconditionError("cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Shortest round-trip decimal form, identical across runs.
std::string num(double x) {
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

// Little-endian table: uint64 rows, uint64 columns, then float64 values row by row.
void write_table(const fs::path& p, std::uint64_t rows, std::uint64_t cols, const std::vector<double>& v) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw ConfigError("cannot write '" + p.string() + "'");
    auto put = [&](std::uint64_t u) {
        if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap64(u);
        os.write(reinterpret_cast<const char*>(&u), 8);
    };
    put(rows);
    put(cols);
    for (double d : v) put(std::bit_cast<std::uint64_t>(d));
}

// Endpoints, as in the certificate.
json arc_json(const curves::CircArc& a) {
    return json::array({curves::to_string(a.a), curves::to_string(a.a + a.len)});
}

json witness_json(const curves::CrossingWitness& w) {
    return {{"I", arc_json(w.I)}, {"J", arc_json(w.J)}, {"m", w.m}, {"verified", w.verified}};
}

}  // namespace

std::vector<curves::CrossingWitness> certificate_crossings(const std::vector<std::string>& certificate) {
    std::vector<curves::CrossingWitness> out;
    for (const auto& line : certificate) {
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || j.value("event", "") != "crossing" || !j.value("verified", false)) continue;
        curves::CrossingWitness w;
        w.I = curves::make_arc(curves::parse_q(j["I"][0]), curves::parse_q(j["I"][1]));
        w.J = curves::make_arc(curves::parse_q(j["J"][0]), curves::parse_q(j["J"][1]));
        w.m = j["m"];
        w.verified = true;
        out.push_back(w);
    }
    return out;
}

CurveData obtain_curve(const Manifest& m, const curves::ExactBase& R, long min_depth, RunLog& log) {
    CurveData c;
    if (m.curve_source == "file") {
        c.curve = curves::PLGraph::from_text(read_text(m.curve_file));
        if (!m.certificate_file.empty() && fs::exists(m.certificate_file)) {
            std::istringstream is(read_text(m.certificate_file));
            for (std::string line; std::getline(is, line);)
                if (!line.empty()) c.certificate.push_back(line);
            c.has_certificate = true;
            c.crossings = certificate_crossings(c.certificate);
        }
        log("curve read from " + m.curve_file + (c.has_certificate ? " with certificate" : " without certificate"));
        return c;
    }
    long depth = std::max(m.depth, min_depth);
    curves::FlattenOptions opt;
    opt.crossings = m.crossings;
    log("flattening to depth " + std::to_string(depth));
    c.flatten = curves::flatten_to_depth(R, m.initial_curve(), depth, opt);
    c.flattened = true;
    c.curve = c.flatten.curve;
    c.certificate = c.flatten.certificate;
    c.has_certificate = true;
    c.crossings = c.flatten.crossings;
    log("flattened with " + std::to_string(c.flatten.surgeries) + " surgeries");
    return c;
}

std::shared_ptr<const blowup::Pipeline> build_pipeline(const Manifest& m, const curves::ExactBase& R,
                                                       const CurveData& c, int N, RunLog& log) {
    auto fam = blowup::CurveFamily::orbit(R, c.curve, N, c.has_certificate ? &c.certificate : nullptr, m.waive);
    blowup::PipelineConfig cfg;
    cfg.weights = m.weights(N);
    cfg.fibers = m.fibers;
    cfg.knots = m.knots;
    cfg.bumps = m.bumps == "hoelder" ? blowup::BumpKind::Hoelder : blowup::BumpKind::Urysohn;
    cfg.hoelder_alpha = m.hoelder_alpha;
    cfg.threads = m.threads;
    log("building pipeline N=" + std::to_string(N) + " fibers=" + std::to_string(m.fibers));
    auto p = blowup::Pipeline::build(fam, R, cfg);
    log("pipeline built");
    return p;
}

int cmd_curve(const Manifest& m) {
    RunLog log(m.out);
    log("curve: start");
    auto R = m.base();
    auto c = obtain_curve(m, R, m.depth, log);
    std::string why;
    bool valid = c.has_certificate && curves::validate_certificate(R, c.curve, c.certificate, &why);
    if (!c.has_certificate) why = "no certificate";
    write_text(out_path(m, "curve.txt"), c.curve.to_text());
    write_lines(out_path(m, "certificate.jsonl"), c.certificate);

    std::vector<std::string> surgery;
    for (const auto& line : c.certificate) {
        auto ev = json::parse(line, nullptr, false).value("event", "");
        if (ev == "surgery" || ev == "induction" || ev == "crossing_inserted" || ev == "stalled") surgery.push_back(line);
    }
    write_lines(out_path(m, "surgery.jsonl"), surgery);

    json rep = {{"command", "curve"}, {"breakpoints", c.curve.size()}, {"valid", valid}, {"why", why}};
    if (c.flattened) {
        rep["depth"] = static_cast<long>(c.flatten.components.size());
        rep["surgeries"] = c.flatten.surgeries;
        json comps = json::array(), cr = json::array();
        for (std::size_t k = 0; k < c.flatten.components.size(); ++k)
            comps.push_back({{"k", k + 1},
                             {"arcs", c.flatten.components[k].arcs().size()},
                             {"degenerate", c.flatten.components[k].degenerate_count()}});
        for (const auto& w : c.flatten.crossings) cr.push_back(witness_json(w));
        rep["components"] = comps;
        rep["crossings"] = cr;
    }
    write_jsonl(out_path(m, "curve_report.jsonl"), {rep});
    if (m.emit_svg) svg_curves(out_path(m, "curve.svg").string(), R, c.curve, std::min<long>(m.depth, 4));
    log(std::string("curve: done, certificate ") + (valid ? "valid" : "invalid: " + why));
    std::cout << "curve: " << c.curve.size() << " breakpoints, certificate " << (valid ? "valid" : "INVALID (" + why + ")")
              << '\n';
    return valid ? 0 : 4;
}

namespace {

struct BlowupChecks {
    std::vector<json> rows;
    std::vector<std::string> failed;
};

void emit_tables(const Manifest& m, const blowup::Pipeline& p) {
    const std::size_t F = p.fibers();
    const int T = m.table_knots;
    const std::size_t cols = static_cast<std::size_t>(T) + 1;
    std::vector<double> mu(F * cols), pi(F * cols), h(F * cols), nu(F * cols), f(F * cols);
    parallel_for(F, m.threads, [&](std::size_t i) {
        const auto& g0 = p.g0(i);
        const auto& nu1 = p.g1(i).nu;
        double c0 = nu1.cum_lift(0.0);
        for (std::size_t j = 0; j < cols; ++j) {
            double x = static_cast<double>(j) / T;
            std::size_t k = i * cols + j;
            mu[k] = g0.mu.cdf(std::min(x, std::nextafter(1.0, 0.0)));
            pi[k] = g0.mu.project(x);
            h[k] = nu1.density(nu1.start + mod1(x - nu1.start));
            nu[k] = nu1.cum_lift(x) - c0;
            f[k] = p.f_lift(i, x);
        }
    });
    write_table(out_path(m, "mu_cdf.bin"), F, cols, mu);
    write_table(out_path(m, "pi.bin"), F, cols, pi);
    write_table(out_path(m, "h.bin"), F, cols, h);
    write_table(out_path(m, "nu_cdf.bin"), F, cols, nu);
    write_table(out_path(m, "f.bin"), F, cols, f);

    std::vector<json> atlas;
    for (std::size_t i = 0; i < F; ++i) {
        const auto& a = p.g0(i).atlas;
        json layers = json::array();
        for (int n = a.lo; n <= a.hi; ++n) {
            json arcs = json::array();
            for (const auto& arc : a.u(n)) arcs.push_back({arc.lo, arc.hi});
            layers.push_back({{"n", n}, {"U", arcs}, {"margin", a.margin[static_cast<std::size_t>(n - a.lo)]}});
        }
        atlas.push_back({{"fiber", i}, {"theta", p.theta0(i)}, {"layers", layers}});
    }
    write_jsonl(out_path(m, "atlas.jsonl"), atlas);
}

BlowupChecks run_audits(const Manifest& m, const blowup::Pipeline& p, const CurveData& c, RunLog& log) {
    BlowupChecks out;
    const auto& w = p.weights();
    out.rows.push_back({{"report", "weights"}, {"k", w.k}, {"N", w.N}, {"eps", w.eps}, {"beta", w.beta},
                        {"ratio", w.ratio}, {"h_floor", w.h_floor()}, {"a", w.a}});

    auto au = blowup::audit_atlas(p);
    bool atlas_ok = au.ok(1e-9);
    out.rows.push_back({{"report", "atlas"}, {"fibers", au.fibers}, {"max_leb_error", au.max_leb_error},
                        {"min_v_ratio", au.min_v_ratio}, {"max_components_excess", au.max_components_excess},
                        {"disjoint", au.disjoint}, {"inside_plateaus", au.inside_plateaus},
                        {"first_violation", au.first_violation}, {"ok", atlas_ok}});
    if (!atlas_ok) out.failed.push_back("atlas");
    log("atlas audited");

    auto dr = blowup::density_report(p);
    double cell = 1.0 / p.config().knots;
    bool density_ok = dr.min_h_grid >= dr.h_floor && dr.max_layer_error_grid <= 10.0 * cell;
    out.rows.push_back({{"report", "density"}, {"min_h_grid", dr.min_h_grid}, {"min_h_pieces", dr.min_h_pieces},
                        {"h_floor", dr.h_floor}, {"max_layer_error", dr.max_layer_error},
                        {"max_layer_error_grid", dr.max_layer_error_grid}, {"max_mass_error", dr.max_mass_error},
                        {"ok", density_ok}});
    if (!density_ok) out.failed.push_back("density");

    auto rr = blowup::verify_semiconjugacy(p);
    bool residual_ok = rr.sup <= rr.bound && rr.shifted_sup <= 2.0 * rr.cell;
    out.rows.push_back({{"report", "residual"}, {"cell", rr.cell}, {"bound", rr.bound}, {"sup", rr.sup},
                        {"shifted_sup", rr.shifted_sup}, {"atom_image_error", rr.atom_image_error},
                        {"ok", residual_ok}});
    if (!residual_ok) out.failed.push_back("residual");
    {
        std::ostringstream csv;
        csv << "fiber,theta,residual,shifted_residual\n";
        for (std::size_t i = 0; i < rr.per_fiber.size(); ++i)
            csv << i << ',' << num(p.theta0(i)) << ',' << num(rr.per_fiber[i]) << ','
                << num(rr.shifted_per_fiber[i]) << '\n';
        write_text(out_path(m, "residual.csv"), csv.str());
    }
    log("residual verified");

    auto tv = blowup::total_variation_law(p);
    out.rows.push_back({{"report", "total_variation"}, {"expected", tv.expected},
                        {"generic_fraction", tv.generic_fraction}, {"max_generic_deviation", tv.max_generic_deviation}});

    auto pa = blowup::audit_projection(p, m.audit_fibers, m.projection_samples, m.seed);
    out.rows.push_back({{"report", "projection"}, {"fibers", pa.fibers}, {"samples", pa.samples},
                        {"max_ks", pa.max_ks}, {"max_atom_width_error", pa.max_atom_width_error}});

    auto tr = blowup::transport_check(p, 16, m.projection_samples, 1000, m.seed + 1);
    out.rows.push_back({{"report", "transport"}, {"fibers", tr.fibers}, {"max_ks", tr.max_ks},
                        {"max_pair_error", tr.max_pair_error}, {"f_graph_error", tr.f_graph_error}});

    auto nm = blowup::verify_nonminimality(p, c.crossings, m.probe_n_max);
    json pairs = json::array();
    for (const auto& pr : nm.pairs)
        pairs.push_back({{"theta_u", pr.theta_u}, {"theta_v", pr.theta_v}, {"m", pr.m}, {"hit", pr.hit}});
    out.rows.push_back({{"report", "nonminimality"}, {"annulus_lo", nm.annulus_lo}, {"annulus_hi", nm.annulus_hi},
                        {"required", nm.required}, {"witness", nm.witness}, {"pairs", pairs}, {"found", nm.found},
                        {"inconclusive", nm.inconclusive}, {"found_fraction", nm.found_fraction}});
    log("probes done");

    out.rows.push_back({{"report", "continuity"},
                        {"modulus", core::continuity_modulus(p.system(), p.fibers(), 256)}});
    return out;
}

}  // namespace

int cmd_blowup(const Manifest& m) {
    RunLog log(m.out);
    log("blowup: start");
    auto R = m.base();
    int n_max = m.N;
    for (int n : m.sweep) n_max = std::max(n_max, n);
    auto c = obtain_curve(m, R, 2L * n_max, log);
    auto p = build_pipeline(m, R, c, m.N, log);

    auto checks = run_audits(m, *p, c, log);
    emit_tables(m, *p);
    if (m.emit_svg) {
        svg_atlas(out_path(m, "atlas.svg").string(), *p, std::max<std::size_t>(1, p->fibers() / 256));
        svg_curves(out_path(m, "curve.svg").string(), R, c.curve, 2);
    }

    if (!m.sweep.empty()) {
        std::ostringstream csv;
        csv << "N,residual,bound,cell\n";
        double prev = 1e300;
        bool decreasing = true;
        for (int n : m.sweep) {
            auto q = build_pipeline(m, R, c, n, log);
            auto rr = blowup::verify_semiconjugacy(*q);
            csv << n << ',' << num(rr.sup) << ',' << num(rr.bound) << ',' << num(rr.cell) << '\n';
            decreasing = decreasing && rr.sup < prev;
            prev = rr.sup;
        }
        write_text(out_path(m, "decay.csv"), csv.str());
        checks.rows.push_back({{"report", "decay"}, {"sweep", m.sweep}, {"strictly_decreasing", decreasing}});
    }

    checks.rows.push_back({{"report", "verdict"}, {"ok", checks.failed.empty()}, {"failed", checks.failed}});
    write_jsonl(out_path(m, "reports.jsonl"), checks.rows);
    log("blowup: done");
    for (const auto& r : checks.rows) std::cout << r.dump() << '\n';
    return checks.failed.empty() ? 0 : 4;
}

int cmd_cocycle(const Manifest& m) {
    RunLog log(m.out);
    log("cocycle: start");
    auto c = m.cocycle();
    auto ly = sl2::lyapunov(c, m.lyapunov_steps, 0.0);
    sl2::CardinalityOptions opt;
    opt.fibers = m.cocycle_fibers;
    opt.bins = m.cocycle_bins;
    opt.burnin = m.cocycle_burnin;
    opt.iters = m.cocycle_iters;
    opt.seed = m.seed;
    opt.cluster_tol = m.cluster_tol;
    opt.threads = m.threads;
    auto card = sl2::minimal_fiber_cardinality(c, opt);
    json hist = json::object();
    std::ostringstream csv;
    csv << "count,fibers\n";
    for (const auto& [k, n] : card.histogram) {
        hist[std::to_string(k)] = n;
        csv << k << ',' << n << '\n';
    }
    std::vector<json> rows = {
        {{"report", "cocycle"}, {"family", sl2::to_string(c.family)}, {"omega", c.omega}, {"lambda", c.lambda},
         {"energy", c.energy}, {"phi", c.phi}},
        {{"report", "lyapunov"}, {"steps", m.lyapunov_steps}, {"exponent", ly.exponent}, {"det_drift", ly.det_drift}},
        {{"report", "cardinality"}, {"histogram", hist}, {"sampled", card.sampled}, {"modal", card.modal},
         {"modal_fraction", card.modal_fraction}, {"full_fraction", card.full_fraction},
         {"max_centre_jump", card.max_centre_jump}, {"cluster_tol", card.cluster_tol},
         {"verdict", sl2::to_string(card.verdict)}, {"flagged", card.flagged}},
    };
    write_jsonl(out_path(m, "cocycle.jsonl"), rows);
    write_text(out_path(m, "histogram.csv"), csv.str());
    log("cocycle: done");
    for (const auto& r : rows) std::cout << r.dump() << '\n';
    if (card.flagged) std::cout << "note: one-point verdict observed; no linear example of this kind is known\n";
    return 0;
}

int cmd_analyze(const Manifest& m) {
    if (m.target == "cocycle") return cmd_cocycle(m);
    RunLog log(m.out);
    log("analyze: start, target " + m.target);
    auto R = m.base();
    core::QpfSystem sys;
    std::shared_ptr<const blowup::Pipeline> p;
    CurveData c;
    if (m.target == "blowup") {
        c = obtain_curve(m, R, 2L * m.N, log);
        p = build_pipeline(m, R, c, m.N, log);
        sys = p->system();
    } else {
        if ((m.target == "skew") != (m.base_kind == "skew"))
            throw ConfigError("[run] target = " + m.target + " does not match [base] kind = " + m.base_kind);
        sys = R.to_system();
    }
    std::vector<json> rows;

    auto rot = core::rotation_number(sys, 0.0, 0.0, m.rotation_iters);
    json rj = {{"report", "rotation"}, {"rho", rot.rho}, {"cauchy_gap", rot.cauchy_gap}, {"iters", m.rotation_iters}};
    if (R.kind == curves::ExactBase::Kind::Translation && m.target != "blowup") {
        rj["rho_exact"] = curves::to_string(R.rho);
        rj["error"] = std::fabs(rot.rho - curves::to_d(R.rho));
    }
    rows.push_back(rj);
    auto bd = core::classify_rho_boundedness(sys, m.rotation_iters, m.deviation_samples);
    rows.push_back({{"report", "boundedness"}, {"verdict", core::to_string(bd.verdict)}, {"rho", bd.rho},
                    {"sup_full", bd.sup_full}, {"sup_half", bd.sup_half}, {"ratio", bd.ratio},
                    {"threshold", bd.threshold}});
    log("rotation analysed");

    minsets::OrbitOptions oo;
    oo.burnin = m.burnin;
    oo.iters = m.iters;
    oo.seed = m.seed;
    oo.fibers = m.orbit_fibers;
    oo.bins = m.bins;
    auto K = minsets::approximate_minimal_set(sys, oo);
    log("orbit binned");
    write_text(out_path(m, "fiberset.rle"), K.to_rle());
    auto cc = minsets::fiber_component_count(K, 0, m.threads);
    {
        std::ostringstream csv;
        csv << "fiber,count\n";
        for (std::size_t f = 0; f < cc.per_fiber.size(); ++f) csv << f << ',' << cc.per_fiber[f] << '\n';
        write_text(out_path(m, "counts.csv"), csv.str());
    }
    rows.push_back({{"report", "components"}, {"c_min", cc.c_min}, {"fraction_at_min", cc.fraction_at_min},
                    {"modal", cc.modal}, {"modal_fraction", cc.modal_fraction}});

    minsets::StructureOptions so;
    so.seed = m.seed;
    minsets::Avoid avoid;
    if (p) {
        so.beta = p->weights().beta;
        if (K.fibers() == p->fibers()) {
            avoid.resize(K.fibers());
            for (std::size_t i = 0; i < K.fibers(); ++i) {
                const auto& a = p->g0(i).atlas;
                for (int n = a.lo; n <= a.hi; ++n)
                    for (const auto& arc : a.u(n)) avoid[i].push_back({arc.lo, arc.hi});
            }
            so.avoid = &avoid;
        }
    }
    auto sd = minsets::structure_diagnostics(K, so, m.threads);
    json sj = {{"report", "structure"},
               {"components", sd.components},
               {"max_extent", sd.max_extent},
               {"vertical_segments", sd.vertical_segments},
               {"strip_like", sd.strip_like},
               {"rect_used", sd.rect_used},
               {"rect_skipped", sd.rect_skipped},
               {"rect_with_interval", sd.rect_with_interval},
               {"interior_free_fraction", sd.interior_free_fraction},
               {"max_fiber_measure", sd.max_fiber_measure},
               {"measure_ok", sd.measure_ok},
               {"avoid_checked", so.avoid != nullptr},
               {"avoid_violations", sd.avoid_violations},
               {"ambiguous", sd.ambiguous}};
    if (so.beta) sj["beta"] = *so.beta;
    if (sd.ambiguous) sj["question"] = sd.question;
    rows.push_back(sj);
    auto inv = minsets::invariance_defect(K, sys, m.threads);
    rows.push_back({{"report", "invariance"}, {"missed_bins", inv.first}, {"allowance", inv.second},
                    {"ok", static_cast<double>(inv.first) <= inv.second}});
    write_jsonl(out_path(m, "analysis.jsonl"), rows);
    if (m.emit_svg) {
        svg_fiberset(out_path(m, "fiberset.svg").string(), K);
        if (p) svg_atlas(out_path(m, "atlas.svg").string(), *p, std::max<std::size_t>(1, p->fibers() / 256));
    }
    log("analyze: done");
    for (const auto& r : rows) std::cout << r.dump() << '\n';
    return 0;
}

}  // namespace qpf::cli
