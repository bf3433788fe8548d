#include "qpf/curves/geometry.hpp"

#include <algorithm>

#include "qpf/common.hpp"

namespace qpf::curves {

Q ExactBase::displacement(const Q& theta, long q) const {
    if (kind == Kind::Translation) return rho * q;
    Q s = 0;
    if (q > 0)
        for (long j = 0; j < q; ++j) s += phi.eval(theta + omega * j);
    else
        for (long j = 1; j <= -q; ++j) s -= phi.eval(theta - omega * j);
    return s;
}

core::QpfSystem ExactBase::to_system() const {
    if (kind == Kind::Translation) return core::make_translation(to_d(omega), to_d(rho));
    core::PeriodicPL p;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        p.t.push_back(to_d(phi.ts()[i]));
        p.v.push_back(to_d(phi.vs()[i]));
    }
    return core::make_skew_rotation(to_d(omega), std::move(p));
}

ExactBase ExactBase::translation(const Q& omega, const Q& rho) {
    ExactBase b;
    b.kind = Kind::Translation;
    b.omega = omega;
    b.rho = rho;
    return b;
}

ExactBase ExactBase::skew_rotation(const Q& omega, PLGraph phi) {
    if (phi.degree() != 0) throw PreconditionError("skew displacement must have degree zero");
    ExactBase b;
    b.kind = Kind::SkewRotation;
    b.omega = omega;
    b.phi = std::move(phi);
    return b;
}

ExactBase ExactBase::default_translation() {
    Q tol = default_tolerance();
    return translation(golden_conjugate_q(tol), silver_q(tol));
}

PLGraph image_curve(const ExactBase& R, const PLGraph& g, long n) {
    if (n > R.max_depth || -n > R.max_depth)
        throw PreconditionError("image depth " + std::to_string(n) + " exceeds max depth " +
                                std::to_string(R.max_depth));
    if (n == 0) return g;
    Q shift = R.omega * n;
    if (R.kind == ExactBase::Kind::Translation) return g.shifted(shift, R.rho * n);
    // gamma_n(theta) = gamma(theta - n omega) + S_n(theta - n omega)
    std::vector<Q> thetas;
    for (const auto& t : g.ts()) thetas.push_back(frac_q(t + shift));
    for (const auto& t : R.phi.ts()) {
        if (n > 0)
            for (long j = 0; j < n; ++j) thetas.push_back(frac_q(t - R.omega * j + shift));
        else
            for (long j = 1; j <= -n; ++j) thetas.push_back(frac_q(t + R.omega * j + shift));
    }
    std::sort(thetas.begin(), thetas.end());
    thetas.erase(std::unique(thetas.begin(), thetas.end()), thetas.end());
    std::vector<std::pair<Q, Q>> pts;
    pts.reserve(thetas.size());
    for (const auto& th : thetas) {
        Q src = th - shift;
        pts.emplace_back(th, g.eval(src) + R.displacement(src, n));
    }
    PLGraph out(std::move(pts), g.degree());
    out.set_approximate(g.approximate());
    return out;
}

namespace {

std::vector<Q> cut_points(const PLGraph& g, const PLGraph& h) {
    std::vector<Q> cuts;
    cuts.reserve(g.size() + h.size() + 1);
    cuts.push_back(Q(0));
    cuts.insert(cuts.end(), g.ts().begin(), g.ts().end());
    cuts.insert(cuts.end(), h.ts().begin(), h.ts().end());
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    return cuts;
}

Q diff_at(const PLGraph& g, const PLGraph& h, const Q& t) { return h.eval(t) - g.eval(t); }

}  // namespace

CircIntervalSet intersection_projection(const PLGraph& g, const PLGraph& h) {
    auto cuts = cut_points(g, h);
    std::vector<CircArc> arcs;
    Q dprev = diff_at(g, h, cuts[0]);
    for (std::size_t i = 0; i < cuts.size(); ++i) {
        const Q& a = cuts[i];
        Q e = i + 1 < cuts.size() ? cuts[i + 1] : Q(1);
        Q da = dprev;
        Q de = diff_at(g, h, e);
        dprev = de;
        if (da == de) {
            if (is_integer(da)) arcs.push_back(CircArc{a, e - a});
            continue;
        }
        Q lo = std::min(da, de), hi = std::max(da, de);
        Q m = floor_q(lo);
        if (m < lo) m += 1;
        for (; m <= hi; m += 1) {
            Q t = a + (e - a) * (m - da) / (de - da);
            arcs.push_back(CircArc{frac_q(t), Q(0)});
        }
    }
    return CircIntervalSet::from_arcs(std::move(arcs));
}

FlatReport is_flat_intersection(const PLGraph& g, const PLGraph& h) {
    FlatReport r;
    r.components = intersection_projection(g, h);
    r.flat = r.components.degenerate_count() == 0;
    return r;
}

bool crosses_over(const PLGraph& g, const PLGraph& h, const CircArc& arc) {
    if (arc.len <= 0) throw PreconditionError("crosses_over needs a non-degenerate arc");
    Q lo = diff_at(g, h, arc.a), hi = lo;
    auto consider = [&](const Q& t) {
        Q d = diff_at(g, h, t);
        if (d < lo) lo = d;
        if (d > hi) hi = d;
    };
    consider(arc.a + arc.len);
    for (const auto& t : cut_points(g, h)) {
        Q off = frac_q(t - arc.a);
        if (off > 0 && off < arc.len) consider(arc.a + off);
    }
    Q m = floor_q(lo) + 1;  // smallest integer strictly above lo
    return m < hi;
}

std::vector<ContactSides> contact_sides(const PLGraph& g, const PLGraph& h, const CircIntervalSet& set) {
    std::vector<ContactSides> out;
    if (set.full()) return out;
    auto cuts = cut_points(g, h);
    auto side_at = [&](const Q& from, const Q& mid) {
        Q m = diff_at(g, h, from);
        Q d = diff_at(g, h, mid) - m;
        return d > 0 ? 1 : (d < 0 ? -1 : 0);
    };
    for (const auto& arc : set.arcs()) {
        ContactSides cs;
        // nearest cut strictly before the arc start
        Q best_before = 1, best_after = 1;
        Q end = arc.a + arc.len;
        for (const auto& c : cuts) {
            Q back = frac_q(arc.a - c);
            if (back > 0 && back < best_before) best_before = back;
            Q fwd = frac_q(c - end);
            if (fwd > 0 && fwd < best_after) best_after = fwd;
        }
        cs.before = side_at(arc.a, arc.a - best_before / 2);
        cs.after = side_at(end, end + best_after / 2);
        out.push_back(cs);
    }
    return out;
}

}  // namespace qpf::curves
