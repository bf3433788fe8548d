#include "qpf/blowup/density.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qpf/common.hpp"

namespace qpf::blowup {

double DensityPiece::g(double u) const {
    double L = u1 - u0;
    switch (shape) {
        case GShape::Linear:
            return L > 0.0 ? g0 + (g1 - g0) * (u - u0) / L : g0;
        case GShape::PowUp:
            return std::pow(K * std::max(0.0, u - u0), alpha);
        case GShape::PowDown:
            return std::pow(K * std::max(0.0, u1 - u), alpha);
    }
    return 0.0;
}

double DensityPiece::integral(double d) const {
    double L = u1 - u0;
    d = std::clamp(d, 0.0, L);
    double gi = 0.0;
    switch (shape) {
        case GShape::Linear:
            gi = L > 0.0 ? g0 * d + (g1 - g0) * d * d / (2.0 * L) : 0.0;
            break;
        case GShape::PowUp:
            gi = std::pow(K, alpha) * std::pow(d, alpha + 1.0) / (alpha + 1.0);
            break;
        case GShape::PowDown:
            gi = std::pow(K, alpha) * (std::pow(L, alpha + 1.0) - std::pow(L - d, alpha + 1.0)) / (alpha + 1.0);
            break;
    }
    return base * d + coef * gi;
}

double DensityPiece::solve(double c) const {
    double L = u1 - u0;
    if (c <= 0.0) return 0.0;
    if (shape == GShape::Linear && L > 0.0) {
        double B = base + coef * g0;
        double A = coef * (g1 - g0) / (2.0 * L);
        double disc = std::max(0.0, B * B + 4.0 * A * c);
        double den = B + std::sqrt(disc);
        double d = den > 0.0 ? 2.0 * c / den : L;
        return std::clamp(d, 0.0, L);
    }
    double lo = 0.0, hi = L;
    for (int it = 0; it < 80 && hi - lo > 1e-17; ++it) {
        double mid = 0.5 * (lo + hi);
        (integral(mid) < c ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

void FiberDensity::finish() {
    cum0.clear();
    total = 0.0;
    for (const auto& p : pieces) {
        cum0.push_back(total);
        total += p.integral(p.u1 - p.u0);
    }
}

namespace {
std::size_t piece_at(const std::vector<DensityPiece>& ps, double u) {
    auto it = std::upper_bound(ps.begin(), ps.end(), u, [](double v, const DensityPiece& p) { return v < p.u0; });
    return it == ps.begin() ? 0 : static_cast<std::size_t>(it - ps.begin()) - 1;
}
}  // namespace

double FiberDensity::density(double lifted) const {
    return pieces[piece_at(pieces, lifted)].density(lifted);
}

double FiberDensity::cum(double lifted) const {
    if (lifted <= start) return 0.0;
    if (lifted >= start + 1.0) return total;
    std::size_t i = piece_at(pieces, lifted);
    return cum0[i] + pieces[i].integral(lifted - pieces[i].u0);
}

double FiberDensity::inv(double c) const {
    if (c <= 0.0) return start;
    if (c >= total) return start + 1.0;
    auto it = std::upper_bound(cum0.begin(), cum0.end(), c);
    std::size_t i = static_cast<std::size_t>(it - cum0.begin()) - 1;
    return pieces[i].u0 + pieces[i].solve(c - cum0[i]);
}

double FiberDensity::cum_lift(double u) const {
    double k = std::floor(u - start);
    return k * total + cum(u - k);
}

double FiberDensity::inv_lift(double c) const {
    double k = std::floor(c / total);
    return k + inv(c - k * total);
}

double FiberDensity::min_density() const {
    double m = 1e300;
    for (const auto& p : pieces) m = std::min({m, p.density(p.u0), p.density(p.u1)});
    return m;
}

double FiberDensity::max_density() const {
    double m = -1e300;
    for (const auto& p : pieces) m = std::max({m, p.density(p.u0), p.density(p.u1)});
    return m;
}

FiberDensity build_density(const FiberAtlas& a, const BumpFamily& b, const WeightScheme& w, DensityRoute route) {
    struct Tagged {
        Arc arc;
        int n;
    };
    std::vector<Tagged> arcs;
    for (int n = a.lo; n <= a.hi; ++n)
        for (const Arc& c : a.u(n)) arcs.push_back({c, n});
    std::sort(arcs.begin(), arcs.end(), [](const Tagged& x, const Tagged& y) { return x.arc.lo < y.arc.lo; });

    FiberDensity d;
    d.start = a.start;
    double cur = a.start;
    auto flat = [&](double u0, double u1) {
        if (u1 > u0) d.pieces.push_back({u0, u1, 1.0, 0.0, GShape::Linear, 0.0, 0.0, 0.0, 1.0});
    };
    for (const Tagged& t : arcs) {
        flat(cur, t.arc.lo);
        int n = t.n;
        double base, coef;
        double bn = b.integral(n);
        if (route == DensityRoute::H) {
            base = 1.0;
            coef = n > -w.N ? -(w.at(n) - w.at(n - 1)) / bn : 0.0;
        } else {
            base = 0.0;
            coef = (n > -w.N ? w.at(n - 1) : w.at(n)) / bn;
        }
        double l = t.arc.lo, r = t.arc.hi, L = r - l, mid = 0.5 * (l + r);
        auto lin = [&](double u0, double u1, double g0, double g1) {
            if (u1 > u0) d.pieces.push_back({u0, u1, base, coef, GShape::Linear, g0, g1, 0.0, 1.0});
        };
        auto pw = [&](double u0, double u1, GShape s, double K) {
            if (u1 > u0) d.pieces.push_back({u0, u1, base, coef, s, 0.0, 0.0, K, b.alpha});
        };
        if (b.kind == BumpKind::Urysohn) {
            double m = a.margin[static_cast<std::size_t>(n - a.lo)];
            if (L >= 2.0 * m) {
                lin(l, l + m, 0.0, 1.0);
                lin(l + m, r - m, 1.0, 1.0);
                lin(r - m, r, 1.0, 0.0);
            } else {
                double peak = L / (2.0 * m);
                lin(l, mid, 0.0, peak);
                lin(mid, r, peak, 0.0);
            }
        } else {
            double K = b.K[static_cast<std::size_t>(n - b.lo)];
            double tt = 1.0 / K;
            if (L / 2.0 <= tt) {
                pw(l, mid, GShape::PowUp, K);
                pw(mid, r, GShape::PowDown, K);
            } else {
                pw(l, l + tt, GShape::PowUp, K);
                lin(l + tt, r - tt, 1.0, 1.0);
                pw(r - tt, r, GShape::PowDown, K);
            }
        }
        cur = r;
    }
    flat(cur, a.start + 1.0);
    d.finish();

    for (const auto& p : d.pieces)
        if (std::max(p.density(p.u0), p.density(0.5 * (p.u0 + p.u1))) <= 0.0 && p.density(p.u1) <= 0.0)
            throw SupportGap("density vanishes on [" + std::to_string(p.u0) + ", " + std::to_string(p.u1) + "]");
    if (route == DensityRoute::H && d.min_density() <= 0.0)
        throw DensityNonpositive("min h = " + std::to_string(d.min_density()));
    return d;
}

}  // namespace qpf::blowup
