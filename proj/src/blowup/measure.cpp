#include "qpf/blowup/measure.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "qpf/common.hpp"
#include "qpf/curves/surgery.hpp"

namespace qpf::blowup {

using curves::CircArc;
using curves::CircIntervalSet;
using curves::ContactSides;

namespace {

long certificate_depth(const std::vector<std::string>& cert) {
    for (const auto& line : cert) {
        auto j = nlohmann::json::parse(line, nullptr, false);
        if (!j.is_discarded() && j.value("event", "") == "header") return j.value("depth", 0L);
    }
    return 0;
}

std::vector<std::pair<CircArc, ContactSides>> zip_sides(const CircIntervalSet& X,
                                                        const std::vector<ContactSides>& sides) {
    std::vector<std::pair<CircArc, ContactSides>> out;
    for (std::size_t i = 0; i < X.arcs().size(); ++i) out.emplace_back(X.arcs()[i], sides[i]);
    return out;
}

}  // namespace

CurveFamily CurveFamily::orbit(const curves::ExactBase& R, const PLGraph& gamma, int N,
                               const std::vector<std::string>* certificate, bool waive) {
    if (N < 1) throw PreconditionError("orbit family needs N >= 1");
    if (!waive) {
        if (!certificate) throw PreconditionError("no flatness certificate supplied and no waiver given");
        std::string why;
        if (!curves::validate_certificate(R, gamma, *certificate, &why))
            throw PreconditionError("flatness certificate rejected: " + why);
        long d = certificate_depth(*certificate);
        if (d < 2L * N)
            throw PreconditionError("certificate depth " + std::to_string(d) + " < 2N = " + std::to_string(2 * N));
    }
    curves::ExactBase Rm = R;
    Rm.max_depth = std::max<long>(Rm.max_depth, 2L * N + 2);
    CurveFamily fam;
    fam.lo_ = -N;
    fam.waived_ = waive;
    for (int n = -N; n <= N + 1; ++n) fam.curves_.push_back(curves::image_curve(Rm, gamma, n));

    // Gamma_i cap Gamma_j is R^i(Gamma cap R^{j-i} Gamma); translate the k-th overlap set.
    const PLGraph& g0 = gamma;
    for (int k = 1; k <= 2 * N + 1; ++k) {
        PLGraph gk = curves::image_curve(Rm, gamma, k);
        CircIntervalSet X = curves::intersection_projection(g0, gk);
        auto sides = curves::contact_sides(g0, gk, X);
        for (int i = -N; i + k <= N + 1; ++i) {
            PairData pd;
            Q shift = curves::frac_q(R.omega * i);
            pd.X = X.translate(shift);
            if (X.full()) {
                pd.X = X;
            } else {
                for (std::size_t a = 0; a < X.arcs().size(); ++a) {
                    CircArc arc = X.arcs()[a];
                    arc.a = curves::frac_q(arc.a + shift);
                    pd.arcs.emplace_back(arc, sides[a]);
                }
            }
            fam.pairs_.emplace(std::make_pair(i, i + k), std::move(pd));
        }
    }
    return fam;
}

CurveFamily CurveFamily::explicit_curves(int lo, std::vector<PLGraph> curves_in, bool waive) {
    CurveFamily fam;
    fam.lo_ = lo;
    fam.waived_ = waive;
    fam.curves_ = std::move(curves_in);
    for (int i = fam.lo(); i <= fam.hi(); ++i) {
        for (int j = i + 1; j <= fam.hi(); ++j) {
            PairData pd;
            pd.X = curves::intersection_projection(fam.curve(i), fam.curve(j));
            if (!waive && !pd.X.full() && pd.X.degenerate_count() > 0)
                throw PreconditionError("curves " + std::to_string(i) + " and " + std::to_string(j) +
                                        " meet in isolated points");
            if (!pd.X.full()) pd.arcs = zip_sides(pd.X, curves::contact_sides(fam.curve(i), fam.curve(j), pd.X));
            fam.pairs_.emplace(std::make_pair(i, j), std::move(pd));
        }
    }
    return fam;
}

const CurveFamily::PairData& CurveFamily::pair(int i, int j) const {
    auto it = pairs_.find({i, j});
    if (it == pairs_.end())
        throw PreconditionError("no overlap data for curves " + std::to_string(i) + ", " + std::to_string(j));
    return it->second;
}

const CircIntervalSet& CurveFamily::overlap(int i, int j) const {
    return i < j ? pair(i, j).X : pair(j, i).X;
}

double CurveFamily::below_fraction(int i, int j, const Q& theta) const {
    if (i == j) return 0.0;
    if (i > j) return 1.0 - below_fraction(j, i, theta);
    const PairData& pd = pair(i, j);
    if (pd.X.full()) return 0.0;  // identical curves: the higher index sits above
    for (const auto& [arc, sides] : pd.arcs) {
        if (!arc.contains(theta)) continue;
        double t = 0.5;
        if (!arc.degenerate()) t = curves::to_d(curves::frac_q(theta - arc.a) / arc.len);
        return (1.0 - t) * (sides.before == -1 ? 1.0 : 0.0) + t * (sides.after == -1 ? 1.0 : 0.0);
    }
    throw Error(ErrorKind::Invariant, "LiftAmbiguous",
                "curves " + std::to_string(i) + " and " + std::to_string(j) + " do not coincide at theta");
}

MeasureSpec window_spec(const WeightScheme& w, int anchor) {
    MeasureSpec s;
    s.lo = -w.N;
    s.hi = w.N;
    s.anchor = anchor;
    s.beta = w.beta;
    for (int n = s.lo; n <= s.hi; ++n) s.mass.push_back(w.at(n));
    return s;
}

MeasureSpec pushed_spec(const WeightScheme& w, int anchor) {
    MeasureSpec s;
    s.lo = -w.N + 1;
    s.hi = w.N + 1;
    s.anchor = anchor;
    s.beta = w.beta;
    for (int n = s.lo; n <= s.hi; ++n) s.mass.push_back(w.at(n - 1));
    return s;
}

double FiberMeasure::lift_domain(double x) const {
    double u = mod1(x);
    return u >= 1.0 - top ? u - 1.0 : u;
}

double FiberMeasure::cdf(double y) const {
    double c = bottom + top + beta * y;
    for (std::size_t g = 1; g < groups.size(); ++g)
        if (groups[g].pos <= y) c += groups[g].mass();
    return std::min(c, 1.0);
}

double FiberMeasure::quantile(double u) const {
    if (ku_.empty()) return mod1(u);
    u = std::clamp(u, ku_.front(), ku_.back());
    auto it = std::upper_bound(ku_.begin(), ku_.end(), u);
    if (it == ku_.end()) return ky_.back();
    std::size_t i = static_cast<std::size_t>(it - ku_.begin());
    if (i == 0) return ky_.front();
    double du = ku_[i] - ku_[i - 1];
    if (du <= 0.0) return ky_[i];
    return ky_[i - 1] + (ky_[i] - ky_[i - 1]) * (u - ku_[i - 1]) / du;
}

double FiberMeasure::project(double x) const { return mod1(anchor_pos + quantile(lift_domain(x))); }

std::pair<double, double> FiberMeasure::preimage(double y) const {
    constexpr double tol = 1e-13;
    double z = mod1(y - anchor_pos);
    if (!groups.empty() && (z < tol || z > 1.0 - tol)) return {groups[0].lo, groups[0].hi};
    double u = bottom + beta * z;
    for (std::size_t g = 1; g < groups.size(); ++g) {
        if (std::fabs(groups[g].pos - z) < tol) return {groups[g].lo, groups[g].hi};
        if (groups[g].pos < z) u += groups[g].mass();
    }
    return {u, u};
}

const AtomGroup* FiberMeasure::group_of(int n) const {
    for (const auto& g : groups)
        if (std::find(g.members.begin(), g.members.end(), n) != g.members.end()) return &g;
    throw PreconditionError("curve " + std::to_string(n) + " carries no atom on this fiber");
}

int FiberMeasure::interpolated_groups() const {
    return static_cast<int>(std::count_if(groups.begin(), groups.end(), [](const AtomGroup& g) { return g.interpolated; }));
}

std::size_t FiberMeasure::atoms() const {
    std::size_t n = 0;
    for (const auto& g : groups) n += g.members.size();
    return n;
}

FiberMeasure build_fiber_measure(const CurveFamily& fam, const MeasureSpec& spec, const Q& theta) {
    FiberMeasure m;
    m.theta = theta;
    m.theta_d = curves::to_d(theta);
    m.beta = spec.beta;
    if (spec.lo > spec.hi) return m;  // Lebesgue only
    if (spec.anchor < spec.lo || spec.anchor > spec.hi)
        throw PreconditionError("anchor curve outside the measure's index range");

    Q base = fam.curve(spec.anchor).eval(theta);
    m.anchor_pos = curves::to_d(curves::frac_q(base));
    std::vector<std::pair<Q, int>> pos;
    for (int n = spec.lo; n <= spec.hi; ++n) pos.emplace_back(curves::frac_q(fam.curve(n).eval(theta) - base), n);
    std::sort(pos.begin(), pos.end(), [](const auto& x, const auto& y) {
        if (x.first != y.first) return x.first < y.first;
        return allocation_rank(x.second) < allocation_rank(y.second);
    });

    for (std::size_t i = 0; i < pos.size();) {
        std::size_t j = i;
        AtomGroup g;
        g.pos = curves::to_d(pos[i].first);
        while (j < pos.size() && pos[j].first == pos[i].first) g.members.push_back(pos[j++].second);
        std::sort(g.members.begin(), g.members.end(),
                  [](int x, int y) { return allocation_rank(x) < allocation_rank(y); });
        std::size_t k = g.members.size();
        g.below.assign(k * k, 0.0);
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = 0; b < k; ++b) {
                if (a == b) continue;
                double s = fam.below_fraction(g.members[a], g.members[b], theta);
                g.below[a * k + b] = s;
                if (s > 0.0 && s < 1.0) g.interpolated = true;
            }
        m.groups.push_back(std::move(g));
        i = j;
    }

    // Anchor group first (position 0 sorts first).
    AtomGroup& ag = m.groups.front();
    std::size_t k = ag.members.size();
    std::size_t ai = static_cast<std::size_t>(
        std::find(ag.members.begin(), ag.members.end(), spec.anchor) - ag.members.begin());
    m.bottom = spec.at(spec.anchor);
    for (std::size_t b = 0; b < k; ++b) {
        if (b == ai) continue;
        double s = ag.below[ai * k + b];
        m.top += s * spec.at(ag.members[b]);
        m.bottom += (1.0 - s) * spec.at(ag.members[b]);
    }
    ag.lo = -m.top;
    ag.hi = m.bottom;

    double run = m.bottom;
    double prev = 0.0;
    m.ku_ = {-m.top, m.bottom};
    m.ky_ = {0.0, 0.0};
    for (std::size_t g = 1; g < m.groups.size(); ++g) {
        AtomGroup& gr = m.groups[g];
        run += spec.beta * (gr.pos - prev);
        prev = gr.pos;
        double mass = 0.0;
        for (int n : gr.members) mass += spec.at(n);
        gr.lo = run;
        gr.hi = run + mass;
        run = gr.hi;
        m.ku_.insert(m.ku_.end(), {gr.lo, gr.hi});
        m.ky_.insert(m.ky_.end(), {gr.pos, gr.pos});
    }
    m.ku_.push_back(1.0 - m.top);
    m.ky_.push_back(1.0);
    return m;
}

ConjugatingRotation find_conjugating_rotation(const std::vector<FiberMeasure>& pi,
                                              const std::vector<FiberMeasure>& pi2, double tol, int samples) {
    if (pi.size() != pi2.size()) throw PreconditionError("projections live on different fiber grids");
    ConjugatingRotation out;
    out.alpha.resize(pi.size());
    for (std::size_t f = 0; f < pi.size(); ++f) {
        const FiberMeasure& a = pi[f];
        const FiberMeasure& b = pi2[f];
        // A height away from every atom of the first projection.
        std::vector<double> ps{0.0};
        for (std::size_t g = 1; g < a.groups.size(); ++g) ps.push_back(a.groups[g].pos);
        ps.push_back(1.0);
        double best = -1.0, y = 0.5;
        for (std::size_t i = 1; i < ps.size(); ++i)
            if (ps[i] - ps[i - 1] > best) {
                best = ps[i] - ps[i - 1];
                y = 0.5 * (ps[i] + ps[i - 1]);
            }
        y = mod1(a.anchor_pos + y);
        double al = circ_diff(b.preimage(y).first, a.preimage(y).first);
        out.alpha[f] = al;
        for (int s = 0; s < samples; ++s) {
            double x = (s + 0.5) / samples;
            out.residual = std::max(out.residual, circ_dist(a.project(x), b.project(x + al)));
        }
    }
    if (out.residual > tol)
        throw NotSameMeasure("conjugacy residual " + std::to_string(out.residual) + " exceeds " + std::to_string(tol));
    return out;
}

}  // namespace qpf::blowup
