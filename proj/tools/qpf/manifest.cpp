#include "manifest.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "qpf/curves/rational.hpp"

namespace qpf::cli {

namespace pt = boost::property_tree;
using curves::Q;

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> k = {
        {"base", {"kind", "omega", "rho", "phi_offset", "phi_amplitude"}},
        {"curve",
         {"shape", "offset", "amplitude", "depth", "crossings", "source", "file", "certificate", "waive"}},
        {"weights", {"mode", "k", "N", "eps", "alpha", "s", "bumps", "hoelder_alpha", "sweep"}},
        {"grids", {"fibers", "knots", "table_knots", "audit_fibers", "orbit_fibers", "bins"}},
        {"run",
         {"seed", "threads", "out", "target", "rotation_iters", "burnin", "iters", "lyapunov_steps",
          "projection_samples", "deviation_samples", "probe_n_max", "cluster_tol", "emit_svg"}},
        {"cocycle",
         {"family", "lambda", "energy", "phi", "a", "b", "c", "d", "omega", "fibers", "bins", "iters", "burnin"}},
    };
    return k;
}

std::string where(const std::string& sec, const std::string& key) { return "[" + sec + "] " + key; }

double to_double(const std::string& sec, const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double d = 0.0;
    try {
        d = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size() || !std::isfinite(d))
        throw ConfigError(where(sec, key) + ": expected a number, got '" + v + "'");
    return d;
}

// Integers may be written as 1e7; the value must be integral and within [lo, hi].
std::int64_t to_int(const std::string& sec, const std::string& key, const std::string& v, double lo, double hi) {
    double d = to_double(sec, key, v);
    if (d != std::floor(d) || d < lo || d > hi)
        throw ConfigError(where(sec, key) + ": expected an integer in [" + std::to_string(static_cast<long long>(lo)) +
                          ", " + std::to_string(static_cast<long long>(hi)) + "], got '" + v + "'");
    return static_cast<std::int64_t>(d);
}

bool to_bool(const std::string& sec, const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(where(sec, key) + ": expected true or false, got '" + v + "'");
}

std::string one_of(const std::string& sec, const std::string& key, const std::string& v,
                   std::initializer_list<const char*> allowed) {
    for (const char* a : allowed)
        if (v == a) return v;
    std::string list;
    for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
    throw ConfigError(where(sec, key) + ": '" + v + "' is not one of " + list);
}

Q to_q(const std::string& sec, const std::string& key, const std::string& v) {
    if (v == "golden") return curves::golden_conjugate_q(curves::default_tolerance());
    if (v == "silver") return curves::silver_q(curves::default_tolerance());
    try {
        return curves::parse_q(v);
    } catch (const std::exception&) {
        throw ConfigError(where(sec, key) + ": expected golden, silver or a rational, got '" + v + "'");
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, sep)) out.push_back(item);
    return out;
}

// "a b c d, ..." : arcs [a, b] and [c, d] per request.
std::vector<curves::CrossingRequest> to_crossings(const std::string& v) {
    std::vector<curves::CrossingRequest> out;
    for (const auto& req : split(v, ',')) {
        std::istringstream is(req);
        std::vector<std::string> f;
        std::string t;
        while (is >> t) f.push_back(t);
        if (f.empty()) continue;
        if (f.size() != 4) throw ConfigError("[curve] crossings: each request needs four endpoints, got '" + req + "'");
        Q q[4];
        for (int i = 0; i < 4; ++i) q[i] = to_q("curve", "crossings", f[static_cast<std::size_t>(i)]);
        out.push_back({curves::make_arc(q[0], q[1]), curves::make_arc(q[2], q[3]), 0});
    }
    return out;
}

std::vector<int> to_int_list(const std::string& sec, const std::string& key, const std::string& v) {
    std::vector<int> out;
    for (auto& item : split(v, ',')) {
        std::istringstream is(item);
        std::string t;
        if (is >> t) out.push_back(static_cast<int>(to_int(sec, key, t, 1, 64)));
    }
    return out;
}

}  // namespace

Manifest parse_manifest(const std::string& text) {
    pt::ptree tree;
    try {
        std::istringstream is(text);
        pt::ini_parser::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("manifest: ") + e.what());
    }
    Manifest m;
    m.crossings = to_crossings("2/100 10/100 11/100 20/100, 35/100 43/100 44/100 53/100, 70/100 78/100 79/100 88/100");

    for (const auto& [sec, body] : tree) {
        auto ks = known_keys().find(sec);
        if (ks == known_keys().end()) {
            if (body.empty() && !body.data().empty())
                throw ConfigError("manifest: key '" + sec + "' outside any section");
            throw ConfigError("manifest: unknown section [" + sec + "]");
        }
        for (const auto& [key, node] : body)
            if (!ks->second.count(key)) throw ConfigError("manifest: unknown key " + where(sec, key));
    }
    auto get = [&](const char* sec, const char* key) -> const std::string* {
        auto s = tree.get_child_optional(sec);
        if (!s) return nullptr;
        auto it = s->find(key);
        return it == s->not_found() ? nullptr : &it->second.data();
    };
    constexpr double big = 9.0e15;

    if (auto v = get("base", "kind")) m.base_kind = one_of("base", "kind", *v, {"translation", "skew"});
    if (auto v = get("base", "omega")) m.omega = *v;
    if (auto v = get("base", "rho")) m.rho = *v;
    if (auto v = get("base", "phi_offset")) m.phi_offset = *v;
    if (auto v = get("base", "phi_amplitude")) m.phi_amplitude = *v;

    if (auto v = get("curve", "shape")) m.curve_shape = one_of("curve", "shape", *v, {"tent", "constant"});
    if (auto v = get("curve", "offset")) m.curve_offset = *v;
    if (auto v = get("curve", "amplitude")) m.curve_amplitude = *v;
    if (auto v = get("curve", "depth")) m.depth = static_cast<long>(to_int("curve", "depth", *v, 1, 256));
    if (auto v = get("curve", "crossings")) m.crossings = to_crossings(*v);
    if (auto v = get("curve", "source")) m.curve_source = one_of("curve", "source", *v, {"flatten", "file"});
    if (auto v = get("curve", "file")) m.curve_file = *v;
    if (auto v = get("curve", "certificate")) m.certificate_file = *v;
    if (auto v = get("curve", "waive")) m.waive = to_bool("curve", "waive", *v);

    if (auto v = get("weights", "mode")) m.weight_mode = one_of("weights", "mode", *v, {"quadratic", "hoelder"});
    if (auto v = get("weights", "k")) m.k = static_cast<int>(to_int("weights", "k", *v, 1, 1e6));
    if (auto v = get("weights", "N")) m.N = static_cast<int>(to_int("weights", "N", *v, 1, 64));
    if (auto v = get("weights", "eps")) m.eps = to_double("weights", "eps", *v);
    if (auto v = get("weights", "alpha")) m.alpha = to_double("weights", "alpha", *v);
    if (auto v = get("weights", "s")) m.s = to_double("weights", "s", *v);
    if (auto v = get("weights", "bumps")) m.bumps = one_of("weights", "bumps", *v, {"urysohn", "hoelder"});
    if (auto v = get("weights", "hoelder_alpha")) m.hoelder_alpha = to_double("weights", "hoelder_alpha", *v);
    if (auto v = get("weights", "sweep")) m.sweep = to_int_list("weights", "sweep", *v);

    if (auto v = get("grids", "fibers")) m.fibers = static_cast<int>(to_int("grids", "fibers", *v, 2, 1 << 20));
    if (auto v = get("grids", "knots")) m.knots = static_cast<int>(to_int("grids", "knots", *v, 2, 1 << 20));
    if (auto v = get("grids", "table_knots"))
        m.table_knots = static_cast<int>(to_int("grids", "table_knots", *v, 2, 1 << 16));
    if (auto v = get("grids", "audit_fibers"))
        m.audit_fibers = static_cast<int>(to_int("grids", "audit_fibers", *v, 1, 1 << 16));
    if (auto v = get("grids", "orbit_fibers"))
        m.orbit_fibers = static_cast<std::size_t>(to_int("grids", "orbit_fibers", *v, 1, 1 << 20));
    if (auto v = get("grids", "bins")) m.bins = static_cast<std::size_t>(to_int("grids", "bins", *v, 1, 1 << 20));

    if (auto v = get("run", "seed")) m.seed = static_cast<std::uint64_t>(to_int("run", "seed", *v, 0, big));
    if (auto v = get("run", "threads")) m.threads = static_cast<unsigned>(to_int("run", "threads", *v, 1, 1024));
    if (auto v = get("run", "out")) m.out = *v;
    if (auto v = get("run", "target"))
        m.target = one_of("run", "target", *v, {"translation", "skew", "blowup", "cocycle"});
    if (auto v = get("run", "rotation_iters")) m.rotation_iters = to_int("run", "rotation_iters", *v, 2, big);
    if (auto v = get("run", "burnin")) m.burnin = to_int("run", "burnin", *v, 0, big);
    if (auto v = get("run", "iters")) m.iters = to_int("run", "iters", *v, 1, big);
    if (auto v = get("run", "lyapunov_steps")) m.lyapunov_steps = to_int("run", "lyapunov_steps", *v, 1, big);
    if (auto v = get("run", "projection_samples"))
        m.projection_samples = to_int("run", "projection_samples", *v, 1, big);
    if (auto v = get("run", "deviation_samples"))
        m.deviation_samples = static_cast<int>(to_int("run", "deviation_samples", *v, 1, 1e6));
    if (auto v = get("run", "probe_n_max")) m.probe_n_max = static_cast<long>(to_int("run", "probe_n_max", *v, 1, 1e6));
    if (auto v = get("run", "cluster_tol"))
        m.cluster_tol = static_cast<std::size_t>(to_int("run", "cluster_tol", *v, 0, 1e6));
    if (auto v = get("run", "emit_svg")) m.emit_svg = to_bool("run", "emit_svg", *v);

    if (auto v = get("cocycle", "family")) {
        try {
            m.family = sl2::family_from_string(*v);
        } catch (const ConfigError& e) {
            throw ConfigError(where("cocycle", "family") + ": " + e.what());
        }
    }
    if (auto v = get("cocycle", "lambda")) m.lambda = to_double("cocycle", "lambda", *v);
    if (auto v = get("cocycle", "energy")) m.energy = to_double("cocycle", "energy", *v);
    if (auto v = get("cocycle", "phi")) m.phi = to_double("cocycle", "phi", *v);
    if (auto v = get("cocycle", "a")) m.ma = to_double("cocycle", "a", *v);
    if (auto v = get("cocycle", "b")) m.mb = to_double("cocycle", "b", *v);
    if (auto v = get("cocycle", "c")) m.mc = to_double("cocycle", "c", *v);
    if (auto v = get("cocycle", "d")) m.md = to_double("cocycle", "d", *v);
    if (auto v = get("cocycle", "omega")) m.cocycle_omega = *v;
    if (auto v = get("cocycle", "fibers"))
        m.cocycle_fibers = static_cast<std::size_t>(to_int("cocycle", "fibers", *v, 1, 1 << 20));
    if (auto v = get("cocycle", "bins"))
        m.cocycle_bins = static_cast<std::size_t>(to_int("cocycle", "bins", *v, 1, 1 << 20));
    if (auto v = get("cocycle", "iters")) m.cocycle_iters = to_int("cocycle", "iters", *v, 1, big);
    if (auto v = get("cocycle", "burnin")) m.cocycle_burnin = to_int("cocycle", "burnin", *v, 0, big);

    // Cross-field checks that need no computation.
    (void)m.base();
    (void)m.initial_curve();
    (void)m.omega_value();
    (void)m.cocycle();
    if (m.curve_source == "file" && m.curve_file.empty())
        throw ConfigError("[curve] source = file needs [curve] file");
    if (!(m.eps > 0.0 && m.eps < 1.0)) throw ConfigError("[weights] eps must lie in (0, 1)");
    if (!(m.hoelder_alpha > 0.0 && m.hoelder_alpha <= 1.0)) throw ConfigError("[weights] hoelder_alpha must lie in (0, 1]");
    return m;
}

Manifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read manifest '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_manifest(ss.str());
}

curves::ExactBase Manifest::base() const {
    Q w = to_q("base", "omega", omega);
    if (base_kind == "translation") return curves::ExactBase::translation(w, to_q("base", "rho", rho));
    return curves::ExactBase::skew_rotation(
        w, curves::PLGraph::tent(to_q("base", "phi_offset", phi_offset), to_q("base", "phi_amplitude", phi_amplitude)));
}

curves::PLGraph Manifest::initial_curve() const {
    Q off = to_q("curve", "offset", curve_offset);
    if (curve_shape == "constant") return curves::PLGraph::constant(off);
    return curves::PLGraph::tent(off, to_q("curve", "amplitude", curve_amplitude));
}

blowup::WeightScheme Manifest::weights(int n_override) const {
    auto mode = weight_mode == "hoelder" ? blowup::WeightMode::Hoelder : blowup::WeightMode::Quadratic;
    return blowup::make_weights(mode, k, n_override > 0 ? n_override : N, eps, alpha, s);
}

double Manifest::omega_value() const { return curves::to_d(to_q("base", "omega", omega)); }

sl2::Cocycle Manifest::cocycle() const {
    double w = curves::to_d(to_q("cocycle", "omega", cocycle_omega));
    switch (family) {
        case sl2::Family::Constant:
            try {
                return sl2::constant_cocycle({ma, mb, mc, md}, w);
            } catch (const PreconditionError&) {
                throw ConfigError("[cocycle] a, b, c, d must have determinant 1");
            }
        case sl2::Family::Rotation: return sl2::rotation_cocycle(phi, w);
        case sl2::Family::Diagonal: return sl2::diagonal_cocycle(lambda, w);
        case sl2::Family::Harper: return sl2::harper_cocycle(energy, lambda, w);
    }
    return {};
}

}  // namespace qpf::cli
