#include "qpf/blowup/atlas.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "qpf/common.hpp"

namespace qpf::blowup {

namespace {

// Removes the free-coordinate range [p, q] from the free arcs and returns it as domain arcs.
std::vector<Arc> carve(std::vector<Arc>& free, double p, double q) {
    std::vector<Arc> taken, rest;
    double pos = 0.0;
    for (const Arc& f : free) {
        double len = f.len();
        double s = std::max(p, pos), e = std::min(q, pos + len);
        if (e > s) {
            Arc t{f.lo + (s - pos), f.lo + (e - pos)};
            if (!taken.empty() && std::fabs(taken.back().hi - t.lo) < 1e-15)
                taken.back().hi = t.hi;
            else
                taken.push_back(t);
            if (s > pos) rest.push_back({f.lo, t.lo});
            if (e < pos + len) rest.push_back({t.hi, f.hi});
        } else {
            rest.push_back(f);
        }
        pos += len;
    }
    free = std::move(rest);
    return taken;
}

// margin m with sum_c max(0, len_c - 2m) = target, 0 < target < sum len_c.
double solve_margin(std::vector<double> lens, double target) {
    std::sort(lens.rbegin(), lens.rend());
    double S = 0.0;
    for (std::size_t k = 1; k <= lens.size(); ++k) {
        S += lens[k - 1];
        double m = (S - target) / (2.0 * static_cast<double>(k));
        double next = k < lens.size() ? lens[k] : 0.0;
        if (m >= next / 2.0 && m <= lens[k - 1] / 2.0) return m;
    }
    return 0.0;
}

const Arc* arc_containing(const std::vector<Arc>& arcs, double x) {
    auto it = std::upper_bound(arcs.begin(), arcs.end(), x, [](double v, const Arc& a) { return v < a.lo; });
    if (it == arcs.begin()) return nullptr;
    --it;
    return (x > it->lo && x < it->hi) ? &*it : nullptr;
}

}  // namespace

double FiberAtlas::leb(int n) const {
    double s = 0.0;
    for (const Arc& a : u(n)) s += a.len();
    return s;
}

double FiberAtlas::v_leb(int n) const {
    double m = margin[static_cast<std::size_t>(n - lo)], s = 0.0;
    for (const Arc& a : u(n)) s += std::max(0.0, a.len() - 2.0 * m);
    return s;
}

int FiberAtlas::owner(double lifted) const {
    for (int n = lo; n <= hi; ++n)
        if (arc_containing(u(n), lifted)) return n;
    return lo - 1;
}

FiberAtlas build_fiber_atlas(const FiberMeasure& m, const MeasureSpec& spec, double eps) {
    if (!(eps > 0.0)) throw CoverFailure("eps must be positive; achieved V fraction would be 1 with V = closure(U)");
    FiberAtlas a;
    a.lo = spec.lo;
    a.hi = spec.hi;
    a.start = -m.top;
    a.U.resize(spec.mass.size());
    a.margin.assign(spec.mass.size(), 0.0);
    for (const AtomGroup& g : m.groups) {
        std::vector<Arc> free{{g.lo, g.hi}};
        std::size_t k = g.members.size();
        for (std::size_t i = 0; i < k; ++i) {
            double off = 0.0;
            for (std::size_t j = i + 1; j < k; ++j) off += spec.at(g.members[j]) * g.below[i * k + j];
            int n = g.members[i];
            a.U[static_cast<std::size_t>(n - a.lo)] = carve(free, off, off + spec.at(n));
        }
    }
    for (int n = a.lo; n <= a.hi; ++n) {
        std::vector<double> lens;
        for (const Arc& c : a.u(n)) lens.push_back(c.len());
        a.margin[static_cast<std::size_t>(n - a.lo)] = solve_margin(lens, (1.0 - eps) * spec.at(n));
    }
    return a;
}

bool AtlasAudit::ok(double leb_tol) const {
    return disjoint && inside_plateaus && max_leb_error <= leb_tol && max_components_excess <= 0 &&
           min_v_ratio >= 1.0 - 1e-12;
}

void AtlasAudit::merge(const AtlasAudit& o) {
    if (first_violation.empty()) first_violation = o.first_violation;
    fibers += o.fibers;
    max_leb_error = std::max(max_leb_error, o.max_leb_error);
    min_v_ratio = std::min(min_v_ratio, o.min_v_ratio);
    max_components_excess = std::max(max_components_excess, o.max_components_excess);
    disjoint = disjoint && o.disjoint;
    inside_plateaus = inside_plateaus && o.inside_plateaus;
}

AtlasAudit audit_fiber_atlas(const FiberAtlas& a, const FiberMeasure& m, const MeasureSpec& spec, double eps,
                             double leb_tol) {
    AtlasAudit r;
    r.fibers = 1;
    auto note = [&](int n, const std::string& what) {
        if (r.first_violation.empty())
            r.first_violation = "theta=" + std::to_string(m.theta_d) + " n=" + std::to_string(n) + ": " + what;
    };
    std::vector<Arc> all;
    for (int n = a.lo; n <= a.hi; ++n) {
        double err = std::fabs(a.leb(n) - spec.at(n));
        r.max_leb_error = std::max(r.max_leb_error, err);
        if (err > leb_tol) note(n, "Leb(U) off by " + std::to_string(err));
        int excess = a.components(n) - (2 * std::abs(n) + 1);
        r.max_components_excess = std::max(r.max_components_excess, excess);
        if (excess > 0) note(n, std::to_string(a.components(n)) + " components");
        double vr = a.v_leb(n) / ((1.0 - eps) * spec.at(n));
        r.min_v_ratio = std::min(r.min_v_ratio, vr);
        if (vr < 1.0 - 1e-12) note(n, "Leb(V) below (1-eps) a_n");
        const AtomGroup* g = m.group_of(n);
        for (const Arc& c : a.u(n)) {
            if (c.lo < g->lo - 1e-15 || c.hi > g->hi + 1e-15) {
                r.inside_plateaus = false;
                note(n, "U leaves the plateau of its curve");
            }
            all.push_back(c);
        }
    }
    std::sort(all.begin(), all.end(), [](const Arc& x, const Arc& y) { return x.lo < y.lo; });
    for (std::size_t i = 1; i < all.size(); ++i)
        if (all[i].lo < all[i - 1].hi - 1e-15) {
            r.disjoint = false;
            note(a.lo, "U arcs overlap");
        }
    return r;
}

double BumpFamily::value(const FiberAtlas& a, int n, double lifted) const {
    const Arc* c = arc_containing(a.u(n), lifted);
    if (!c) return 0.0;
    double d = std::min(lifted - c->lo, c->hi - lifted);
    std::size_t i = static_cast<std::size_t>(n - lo);
    if (kind == BumpKind::Urysohn) return std::min(1.0, d / a.margin[i]);
    return std::min(1.0, std::pow(K[i] * d, alpha));
}

double BumpFamily::holder_constant(int n) const {
    return std::pow(K[static_cast<std::size_t>(n - lo)], alpha);
}

BumpFamily build_bumps(const FiberAtlas& a, const MeasureSpec& spec, BumpKind kind, double eps, double alpha) {
    BumpFamily f;
    f.kind = kind;
    f.alpha = kind == BumpKind::Urysohn ? 1.0 : alpha;
    f.eps = eps;
    f.lo = a.lo;
    for (int n = a.lo; n <= a.hi; ++n) {
        double an = spec.at(n);
        double K = (4.0 * std::abs(n) + 2.0) / (eps * an);
        double m = a.margin[static_cast<std::size_t>(n - a.lo)];
        double b = 0.0;
        for (const Arc& c : a.u(n)) {
            double l = c.len();
            if (kind == BumpKind::Urysohn) {
                b += l >= 2.0 * m ? l - m : l * l / (4.0 * m);
            } else {
                double t = 1.0 / K;
                if (l / 2.0 <= t)
                    b += 2.0 * std::pow(K, f.alpha) * std::pow(l / 2.0, f.alpha + 1.0) / (f.alpha + 1.0);
                else
                    b += l - 2.0 * t * f.alpha / (f.alpha + 1.0);
            }
        }
        if (b < (1.0 - eps) * an * (1.0 - 1e-12) || b > an * (1.0 + 1e-12))
            throw BumpBoundViolation("b_" + std::to_string(n) + " = " + std::to_string(b) + " outside [(1-eps)a_n, a_n]");
        f.K.push_back(K);
        f.b.push_back(b);
    }
    return f;
}

}  // namespace qpf::blowup
