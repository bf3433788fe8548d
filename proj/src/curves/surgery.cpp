#include "qpf/curves/surgery.hpp"

#include <algorithm>
#include <set>

#include "json.hpp"
#include "qpf/common.hpp"

namespace qpf::curves {

using nlohmann::json;

long Itinerary::r() const {
    return static_cast<long>(std::count_if(times.begin(), times.end(), [](long t) { return t < 0; }));
}
long Itinerary::s() const {
    return static_cast<long>(std::count_if(times.begin(), times.end(), [](long t) { return t > 0; }));
}
bool Itinerary::contains(long k) const { return std::binary_search(times.begin(), times.end(), k); }

const PLGraph& CurveOrbit::image(long k) {
    if (k == 0) return g_;
    auto it = cache_.find(k);
    if (it != cache_.end()) return it->second;
    return cache_.emplace(k, image_curve(R_, g_, k)).first->second;
}

Q resolution_floor() { return Q(1, 1000000000); }

Q EpsSchedule::at(long n) const {
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), 2, static_cast<unsigned long>(n));
    Q e = eps0 / Q(p);
    return e < eps_min ? eps_min : e;
}

namespace {

Q ceil_q(const Q& v) { return -floor_q(-v); }
Q qmin(const Q& a, const Q& b) { return b < a ? b : a; }
Q qmax(const Q& a, const Q& b) { return b > a ? b : a; }
Q qmin(const std::vector<Q>& v) { return *std::min_element(v.begin(), v.end()); }

Point step(const ExactBase& R, const Point& p, int dir) {
    if (dir > 0) return {frac_q(p.theta + R.omega), p.x + R.displacement(p.theta, 1)};
    return {frac_q(p.theta - R.omega), p.x + R.displacement(p.theta, -1)};
}

bool on_curve(const PLGraph& g, const Point& p) { return is_integer(g.eval(p.theta) - p.x); }

json qj(const Q& q) { return to_string(q); }

json arcs_json(const CircIntervalSet& s) {
    json a = json::array();
    if (s.full()) {
        a.push_back({qj(Q(0)), qj(Q(1))});
        return a;
    }
    for (const auto& x : s.arcs()) a.push_back({qj(x.a), qj(x.end())});
    return a;
}

// Items 1 and 3 of the box definition; the itinerary is taken as given.
BoxCheck check_items_1_3(const ExactBase& R, CurveOrbit& orb, const PerturbationBox& b) {
    long lo = b.window_lo(), hi = b.window_hi();
    for (long d = 1; d <= hi - lo; ++d) {
        Q f = frac_q(R.omega * d);
        if (f <= b.delta || 1 - f <= b.delta) return {false, "iterates of I overlap at distance " + std::to_string(d)};
    }
    for (long k = lo; k <= hi; ++k) {
        const PLGraph& img = orb.image(-k);
        auto [vlo, vhi] = img.range_over(b.theta, b.delta);
        if (b.itinerary.contains(k)) {
            Q c = img.eval(b.theta) - b.x;
            if (!is_integer(c)) return {false, "anchor not on R^-k Gamma for k=" + std::to_string(k)};
            if (vlo - c < b.x - b.eta || vhi - c > b.x + b.eta)
                return {false, "R^-k Gamma leaves the box for itinerary time k=" + std::to_string(k)};
        } else {
            Q j = ceil_q(vlo - b.x - b.eta);
            if (!(b.x - b.eta + j > vhi)) return {false, "R^-k Gamma meets the box for k=" + std::to_string(k)};
        }
    }
    return {};
}

Q path_value(const std::vector<std::pair<Q, Q>>& path, const Q& u) {
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const auto& [u0, v0] = path[i];
        const auto& [u1, v1] = path[i + 1];
        if (u >= u0 && u <= u1) return u1 == u0 ? v0 : v0 + (v1 - v0) * (u - u0) / (u1 - u0);
    }
    throw PreconditionError("path evaluation outside the box");
}

}  // namespace

Itinerary itinerary_of_point(const ExactBase& R, const PLGraph& g, const Point& z, long n, long horizon) {
    if (n < 1) throw PreconditionError("itinerary needs n >= 1");
    Point z0{frac_q(z.theta), z.x};
    if (!on_curve(g, z0)) throw PreconditionError("itinerary point is not on the curve");
    Itinerary it;
    it.times.push_back(0);
    for (int dir : {1, -1}) {
        Point cur = z0;
        long pos = 0;
        for (;;) {
            bool found = false;
            for (long q = 1; q <= n; ++q) {
                cur = step(R, cur, dir);
                if (pos + q > horizon)
                    throw EscapeTimeout("return chain exceeds horizon " + std::to_string(horizon) +
                                        " (possible invariant strip)");
                if (on_curve(g, cur)) {
                    pos += q;
                    it.times.push_back(dir * pos);
                    found = true;
                    break;
                }
            }
            if (!found) break;
        }
    }
    std::sort(it.times.begin(), it.times.end());
    return it;
}

Itinerary itinerary_of_interval(const ExactBase& R, const PLGraph& g, const CircArc& I, long n, long horizon) {
    if (I.len >= Q(1, 2)) throw IntervalTooWide("interval longer than half the circle");
    CurveOrbit orb(R, g);
    auto hit = [&](long k) { return intersection_projection(g, orb.image(-k)).meets(I); };
    Itinerary it;
    it.times.push_back(0);
    for (int dir : {1, -1}) {
        long last = 0;
        for (long k = 1; k <= last + n; ++k) {
            if (k > horizon) throw EscapeTimeout("interval return chain exceeds horizon");
            if (hit(dir * k)) {
                it.times.push_back(dir * k);
                last = k;
            }
        }
    }
    std::sort(it.times.begin(), it.times.end());
    for (const Q& t : std::vector<Q>{I.a, I.a + I.len}) {
        Point z{frac_q(t), g.eval(frac_q(t))};
        if (itinerary_of_point(R, g, z, n, horizon) == it) return it;
    }
    throw IntervalTooWide("no endpoint shares the interval itinerary; bisect and retry");
}

BoxCheck validate_box(const ExactBase& R, const PLGraph& g, const PerturbationBox& box, long horizon) {
    if (box.delta <= 0 || box.eta <= 0 || 2 * box.eta >= 1) return {false, "box sizes out of range"};
    Point z{frac_q(box.theta), box.x};
    if (!on_curve(g, z)) return {false, "box anchor not on the curve"};
    try {
        if (!(itinerary_of_point(R, g, z, box.depth, horizon) == box.itinerary))
            return {false, "anchor itinerary differs from box itinerary"};
    } catch (const EscapeTimeout& e) {
        return {false, e.what()};
    }
    CurveOrbit orb(R, g);
    return check_items_1_3(R, orb, box);
}

PerturbationBox find_perturbation_box(const ExactBase& R, const PLGraph& g, const Point& z, long n,
                                      const Q& delta_max, const Q& eta_max, long horizon) {
    const Q floor = resolution_floor();
    Point z0{frac_q(z.theta), z.x};
    PerturbationBox b;
    b.theta = z0.theta;
    b.x = z0.x;
    b.depth = n;
    b.itinerary = itinerary_of_point(R, g, z0, n, horizon);
    CurveOrbit orb(R, g);
    // eta first: half the fiber distance to every non-itinerary iterate through the anchor fiber
    Q dmin = 1;
    long kmin = 0;
    for (long k = b.window_lo(); k <= b.window_hi(); ++k) {
        if (b.itinerary.contains(k)) continue;
        Q f = frac_q(orb.image(-k).eval(z0.theta) - z0.x);
        f = qmin(f, Q(1) - f);
        if (f < dmin) dmin = f, kmin = k;
    }
    Q eta = Q(1, 2);
    while (eta > eta_max || eta >= dmin / 2) {
        eta /= 2;
        if (eta < floor) throw BoxNotFound("eta fell below the resolution floor at theta=" + to_string(z0.theta) +
                                                 " (iterate " + std::to_string(kmin) + " at fiber distance " +
                                                 std::to_string(to_d(dmin)) + ")");
    }
    b.eta = eta;
    for (Q delta = delta_max; delta >= floor; delta /= 2) {
        b.delta = delta;
        if (check_items_1_3(R, orb, b).ok) return b;
    }
    throw BoxNotFound("delta fell below the resolution floor at theta=" + to_string(z0.theta));
}

PerturbationResult apply_perturbation(const ExactBase& R, const PLGraph& g, const PerturbationBox& box,
                                      const std::vector<Point>& through) {
    CurveOrbit orb(R, g);
    const Q theta = frac_q(box.theta), delta = box.delta, x = box.x;
    const auto& qs = box.itinerary.times;
    std::vector<Q> c(qs.size()), end(qs.size());
    for (std::size_t i = 0; i < qs.size(); ++i) {
        const PLGraph& gi = orb.image(-qs[i]);
        c[i] = gi.eval(theta) - x;
        if (!is_integer(c[i])) throw PreconditionError("box anchor not on R^-q Gamma");
        end[i] = gi.eval(theta + delta) - c[i];
    }
    std::vector<std::pair<Q, Q>> mids;  // (offset, value)
    for (const auto& w : through) {
        Q u = frac_q(w.theta - theta);
        Q wx = w.x - floor_q(w.x - x + Q(1, 2));
        if (u <= 0 || u >= delta) throw PreconditionError("through point outside the box abscissas");
        if (wx <= x - box.eta || wx >= x + box.eta) throw PreconditionError("through point outside the box");
        if (!mids.empty() && u <= mids.back().first) throw PreconditionError("through points must be increasing");
        mids.emplace_back(u, wx);
    }
    Q lambda = 0;
    for (int j = 1; j <= 60; ++j) {
        mpz_class p;
        mpz_ui_pow_ui(p.get_mpz_t(), 2, static_cast<unsigned long>(j));
        Q lam = delta / Q(p);
        if (!mids.empty() && lam >= mids.front().first) continue;
        bool ok = true;
        for (std::size_t i = 0; ok && i < qs.size(); ++i) {
            for (std::size_t k = i + 1; ok && k < qs.size(); ++k) {
                if (end[i] == end[k]) continue;
                const PLGraph& gi = orb.image(-qs[i]);
                const PLGraph& gk = orb.image(-qs[k]);
                auto d = [&](const Q& u) -> Q { return (gi.eval(theta + u) - c[i]) - (gk.eval(theta + u) - c[k]); };
                Q lo = d(lam), hi = lo;
                auto consider = [&](const Q& u) {
                    Q v = d(u);
                    if (v < lo) lo = v;
                    if (v > hi) hi = v;
                };
                consider(delta);
                for (const auto& u : gi.breakpoint_offsets_in(theta, delta))
                    if (u > lam) consider(u);
                for (const auto& u : gk.breakpoint_offsets_in(theta, delta))
                    if (u > lam) consider(u);
                if (!(lo > 0 || hi < 0)) ok = false;
            }
        }
        if (ok) {
            lambda = lam;
            break;
        }
    }
    if (lambda == 0) throw LambdaNotFound("no dyadic lambda separates the graphs above the box");

    PerturbationResult res;
    res.lambda = lambda;
    res.curve = g;
    std::vector<std::vector<std::pair<Q, Q>>> splices(qs.size());
    for (std::size_t i = 0; i < qs.size(); ++i) {
        const PLGraph& gi = orb.image(-qs[i]);
        std::vector<std::pair<Q, Q>> path = {{Q(0), x}, {lambda, x}};
        path.insert(path.end(), mids.begin(), mids.end());
        path.emplace_back(delta, end[i]);
        Q a = frac_q(theta + R.omega * qs[i]);
        std::set<Q> us;
        for (const auto& [u, v] : path) us.insert(u);
        for (const auto& u : gi.breakpoint_offsets_in(theta, delta)) us.insert(u);
        for (const auto& u : g.breakpoint_offsets_in(a, delta)) us.insert(u);
        for (const auto& u : us) {
            Q t = frac_q(a + u);
            Q delta_v = path_value(path, u) - (gi.eval(theta + u) - c[i]);
            splices[i].emplace_back(t, g.eval(t) + delta_v);
        }
        res.modified.push_back(CircArc{a, delta});
    }
    for (std::size_t i = 0; i < qs.size(); ++i) res.curve.splice(res.modified[i].a, delta, splices[i]);
    return res;
}

CrossingResult ensure_crossing(const ExactBase& R, const PLGraph& g, const CircArc& I, const CircArc& J,
                               const Q& eps, long depth, long orbit_bound, long horizon) {
    if (I.len <= 0 || J.len <= 0) throw PreconditionError("crossing arcs must be non-degenerate");
    const Q frac8 = Q(1, 8);
    auto make_box = [&](const CircArc& arc, int slot) -> std::optional<PerturbationBox> {
        Q t = frac_q(arc.a + arc.len * frac8 * slot);
        Q dmax = qmin(eps, arc.len * frac8);
        try {
            return find_perturbation_box(R, g, Point{t, g.eval(t)}, depth, dmax, eps, horizon);
        } catch (const BoxNotFound&) {
            return std::nullopt;
        }
    };
    auto iterate_arcs = [&](const PerturbationBox& b) {
        std::vector<CircArc> v;
        for (long q : b.itinerary.times) v.push_back(CircArc{frac_q(b.theta + R.omega * q), b.delta});
        return v;
    };
    std::vector<PerturbationBox> boxes_i, boxes_j;
    for (int slot = 1; slot <= 7; ++slot) {
        if (auto b = make_box(I, slot)) boxes_i.push_back(*b);
        if (auto b = make_box(J, 8 - slot)) boxes_j.push_back(*b);
    }
    std::vector<std::pair<const PerturbationBox*, const PerturbationBox*>> pairs;
    for (const auto& bi : boxes_i)
        for (const auto& bj : boxes_j) {
            bool disjoint = true;
            for (const auto& x : iterate_arcs(bi))
                for (const auto& y : iterate_arcs(bj))
                    if (!intersect_arcs(x, y).empty()) disjoint = false;
            if (disjoint) pairs.emplace_back(&bi, &bj);
        }
    if (pairs.empty()) throw BoxNotFound("could not place disjoint boxes inside the crossing arcs");
    // The orbit search may look further ahead than the configured image depth.
    ExactBase Rm = R;
    Rm.max_depth = std::max(R.max_depth, orbit_bound);
    // Smallest m first, over every admissible pair of boxes.
    for (long m = 1; m <= orbit_bound; ++m) {
        for (const auto& [pi, pj] : pairs) {
            const PerturbationBox* bi = pi;
            const PerturbationBox* bj = pj;
            if (m < depth - bj->itinerary.first() + 1) continue;
            auto th = intersect_arcs(CircArc{frac_q(bi->theta + R.omega * m), bi->delta},
                                     CircArc{bj->theta, bj->delta});
            if (th.empty() || th.front().len == 0) continue;
            Q tm = th.front().a + th.front().len / 2;  // abscissa of R^m(w)
            Q t = frac_q(tm - R.omega * m);
            Q D = R.displacement(t, m);
            // y in (x_i - eta_i, x_i + eta_i) with y + D in (x_j - eta_j, x_j + eta_j) + Z
            Q lo_i = bi->x - bi->eta, hi_i = bi->x + bi->eta;
            Q target_lo = bj->x - bj->eta - D, target_hi = bj->x + bj->eta - D;
            Q j = ceil_q(lo_i - target_hi);
            Q lo = qmax(lo_i, target_lo + j), hi = qmin(hi_i, target_hi + j);
            if (!(lo < hi)) continue;
            Point w{t, (lo + hi) / 2};
            PerturbationResult first;
            try {
                first = apply_perturbation(R, g, *bi, {w});
            } catch (const Error&) {
                continue;
            }
            PerturbationBox bj2 = *bj;
            if (!validate_box(R, first.curve, bj2, horizon).ok) continue;
            PLGraph rm = image_curve(Rm, first.curve, m);
            Q shift = bj2.x - rm.eval(tm);
            shift = floor_q(shift + Q(1, 2));  // integer aligning R^m(Gamma) with the box
            Q room = qmin(frac_q(tm - bj2.theta), bj2.delta - frac_q(tm - bj2.theta));
            Q iroom = qmin(frac_q(tm - th.front().a), th.front().len - frac_q(tm - th.front().a));
            Q sigma = qmin(room, iroom) / 4;
            Q r1 = rm.eval(tm - sigma) + shift, r2 = rm.eval(tm + sigma) + shift;
            Q slack = qmin(std::vector<Q>{bj2.x + bj2.eta - r1, r1 - (bj2.x - bj2.eta), bj2.x + bj2.eta - r2,
                                r2 - (bj2.x - bj2.eta)});
            if (slack <= 0) continue;
            Q tau = slack / 2;
            std::vector<Point> zs = {{frac_q(tm - sigma), r1 + tau}, {frac_q(tm + sigma), r2 - tau}};
            PerturbationResult second;
            try {
                second = apply_perturbation(R, first.curve, bj2, zs);
            } catch (const Error&) {
                continue;
            }
            PLGraph rm2 = image_curve(Rm, second.curve, m);
            bool crossed = false;
            for (const auto& piece : intersect_arcs(CircArc{frac_q(I.a + R.omega * m), I.len}, J))
                if (piece.len > 0 && crosses_over(second.curve, rm2, piece)) crossed = true;
            if (!crossed) continue;
            return CrossingResult{second.curve, m, *bi, bj2, w};
        }
    }
    throw OrbitSearchTimeout("no return of B_I into B_J within " + std::to_string(orbit_bound) + " iterations");
}

FlattenResult flatten_to_depth(const ExactBase& R, const PLGraph& g0, long N, const FlattenOptions& opt) {
    if (N < 1) throw PreconditionError("flatten depth must be >= 1");
    if (N > opt.max_depth) throw PreconditionError("depth " + std::to_string(N) + " exceeds max depth");
    FlattenResult out;
    out.curve = g0;
    auto emit = [&](json j) { out.certificate.push_back(j.dump()); };
    emit({{"event", "header"},
          {"depth", N},
          {"kind", R.kind == ExactBase::Kind::Translation ? "translation" : "skew-rotation"},
          {"omega", qj(R.omega)},
          {"rho", qj(R.rho)},
          {"eps0", qj(opt.eps.eps0)}});
    auto xsets = [&](const PLGraph& g, long upto) {
        CurveOrbit orb(R, g);
        std::vector<CircIntervalSet> xs;
        for (long k = 1; k <= upto; ++k) xs.push_back(intersection_projection(g, orb.image(k)));
        return xs;
    };
    struct Pending {
        CrossingRequest req;
        long m;
    };
    std::vector<Pending> inserted;
    // Depth 0 only inserts crossings requested before any flattening, using eps0.
    for (long n = 0; n <= N; ++n) {
        auto before_step = xsets(out.curve, n);
        for (const auto& req : opt.crossings) {
            if (req.at_depth != n) continue;
            auto cr = ensure_crossing(R, out.curve, req.I, req.J, opt.eps.at(n), std::max(n, 1L), opt.orbit_bound,
                                      opt.horizon);
            out.curve = cr.curve;
            inserted.push_back({req, cr.m});
            emit({{"event", "crossing_inserted"},
                  {"depth", n},
                  {"I", {qj(req.I.a), qj(req.I.end())}},
                  {"J", {qj(req.J.a), qj(req.J.end())}},
                  {"m", cr.m},
                  {"w", {qj(cr.w.theta), qj(cr.w.x)}}});
        }
        long sweep = 0;
        std::size_t prev_deg = SIZE_MAX;
        while (n > 0) {
            auto xs = xsets(out.curve, n);
            std::size_t deg = xs[static_cast<std::size_t>(n - 1)].degenerate_count();
            if (deg == 0) break;
            if (deg >= prev_deg) {
                json dump = {{"event", "stalled"}, {"depth", n}, {"sweep", sweep}, {"degenerate", deg},
                             {"X", arcs_json(xs[static_cast<std::size_t>(n - 1)])}};
                emit(dump);
                throw SurgeryStalled("degenerate count did not decrease at depth " + std::to_string(n) + ": " +
                                     dump.dump());
            }
            prev_deg = deg;
            const auto& xn = xs[static_cast<std::size_t>(n - 1)];
            Q theta_z;
            for (const auto& arc : xn.arcs())
                if (arc.degenerate()) {
                    theta_z = arc.a;
                    break;
                }
            Q dmax = qmin(opt.eps.at(n), Q(1, 2 * n));
            for (const auto& x : xs) dmax = qmin(dmax, x.min_gap() / 2);
            Point z{theta_z, out.curve.eval(theta_z)};
            auto box = find_perturbation_box(R, out.curve, z, n, dmax, opt.eps.at(n), opt.horizon);
            auto res = apply_perturbation(R, out.curve, box);
            auto after = xsets(res.curve, n);
            for (long k = 1; k <= n; ++k) {
                const auto& xb = xs[static_cast<std::size_t>(k - 1)];
                const auto& xa = after[static_cast<std::size_t>(k - 1)];
                bool grew = xa.unite(xb) == xa;
                bool kept = k == n || xa.count() == xb.count();
                if (!grew || !kept)
                    throw SurgeryStalled("intersection law violated at depth " + std::to_string(n) + ", k=" +
                                         std::to_string(k) + ": " + xb.to_string() + " -> " + xa.to_string());
            }
            emit({{"event", "surgery"},
                  {"depth", n},
                  {"sweep", sweep},
                  {"z", {qj(z.theta), qj(z.x)}},
                  {"box", {{"theta", qj(box.theta)}, {"delta", qj(box.delta)}, {"x", qj(box.x)}, {"eta", qj(box.eta)}}},
                  {"itinerary", box.itinerary.times},
                  {"lambda", qj(res.lambda)},
                  {"degenerate_before", deg},
                  {"degenerate_after", after[static_cast<std::size_t>(n - 1)].degenerate_count()}});
            out.curve = res.curve;
            ++out.surgeries;
            ++sweep;
        }
        auto after_step = xsets(out.curve, n);
        for (long k = 1; k < n; ++k) {
            const auto& xb = before_step[static_cast<std::size_t>(k - 1)];
            const auto& xa = after_step[static_cast<std::size_t>(k - 1)];
            emit({{"event", "induction"},
                  {"step", n},
                  {"k", k},
                  {"grew", xa.unite(xb) == xa},
                  {"count_before", xb.count()},
                  {"count_after", xa.count()}});
        }
    }
    out.components = xsets(out.curve, N);
    bool flat = true;
    for (long k = 1; k <= N; ++k) {
        const auto& x = out.components[static_cast<std::size_t>(k - 1)];
        flat = flat && x.degenerate_count() == 0;
        emit({{"event", "components"}, {"k", k}, {"arcs", arcs_json(x)}});
    }
    ExactBase Rm = R;
    Rm.max_depth = std::max(R.max_depth, opt.orbit_bound);
    CurveOrbit orb(Rm, out.curve);
    for (const auto& p : inserted) {
        CrossingWitness w{p.req.I, p.req.J, p.m, false};
        const PLGraph& rm = orb.image(p.m);
        for (const auto& piece : intersect_arcs(CircArc{frac_q(p.req.I.a + R.omega * p.m), p.req.I.len}, p.req.J))
            if (piece.len > 0 && crosses_over(out.curve, rm, piece)) w.verified = true;
        out.crossings.push_back(w);
        emit({{"event", "crossing"},
              {"I", {qj(w.I.a), qj(w.I.end())}},
              {"J", {qj(w.J.a), qj(w.J.end())}},
              {"m", w.m},
              {"verified", w.verified}});
    }
    emit({{"event", "final"}, {"flat", flat}, {"surgeries", out.surgeries}});
    if (!flat) throw SurgeryStalled("final curve is not flat to depth " + std::to_string(N));
    return out;
}

bool validate_certificate(const ExactBase& R, const PLGraph& g, const std::vector<std::string>& certificate,
                          std::string* why) {
    auto fail = [&](const std::string& m) {
        if (why) *why = m;
        return false;
    };
    long N = -1;
    std::map<long, json> recorded;
    std::vector<json> crossings;
    bool final_flat = false;
    for (const auto& line : certificate) {
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.contains("event")) return fail("unparsable certificate line");
        std::string ev = j["event"];
        if (ev == "header") {
            N = j["depth"];
            if (j["omega"] != qj(R.omega) || j["rho"] != qj(R.rho)) return fail("base map differs from header");
        } else if (ev == "components") {
            recorded[j["k"].get<long>()] = j["arcs"];
        } else if (ev == "crossing") {
            crossings.push_back(j);
        } else if (ev == "induction") {
            if (!j["grew"].get<bool>() || j["count_before"] != j["count_after"])
                return fail("induction record shows shrinkage or count change");
        } else if (ev == "final") {
            final_flat = j["flat"];
        }
    }
    if (N < 1) return fail("missing header");
    if (!final_flat) return fail("certificate does not claim flatness");
    ExactBase Rm = R;
    for (const auto& c : crossings) Rm.max_depth = std::max(Rm.max_depth, c["m"].get<long>());
    CurveOrbit orb(Rm, g);
    for (long k = 1; k <= N; ++k) {
        auto x = intersection_projection(g, orb.image(k));
        if (x.degenerate_count() != 0) return fail("degenerate component at k=" + std::to_string(k));
        if (!recorded.count(k) || recorded[k] != arcs_json(x))
            return fail("recorded components differ at k=" + std::to_string(k));
    }
    for (const auto& c : crossings) {
        if (!c["verified"].get<bool>()) continue;
        long m = c["m"];
        CircArc I = make_arc(parse_q(c["I"][0]), parse_q(c["I"][1]));
        CircArc J = make_arc(parse_q(c["J"][0]), parse_q(c["J"][1]));
        bool ok = false;
        for (const auto& piece : intersect_arcs(CircArc{frac_q(I.a + R.omega * m), I.len}, J))
            if (piece.len > 0 && crosses_over(g, orb.image(m), piece)) ok = true;
        if (!ok) return fail("recorded crossing no longer holds for m=" + std::to_string(m));
    }
    return true;
}

EscapeReport check_escaping(const ExactBase& R, const PLGraph& g, long n, long horizon, int samples) {
    EscapeReport rep;
    if (horizon <= 0) {
        rep.inconclusive = true;
        return rep;
    }
    CurveOrbit orb(R, g);
    std::vector<const PLGraph*> layers;
    for (long j = 0; j <= n; ++j) layers.push_back(&orb.image(j));
    auto in_union = [&](const Point& p) {
        for (auto* c : layers)
            if (on_curve(*c, p)) return true;
        return false;
    };
    rep.escaping = true;
    for (int s = 0; s < samples; ++s) {
        Q theta = make_q(7 * s + 1, 7 * samples);
        for (auto* c : layers) {
            Point p{theta, c->eval(theta)};
            ++rep.samples;
            long t = 1;
            for (; t <= horizon; ++t) {
                p = step(R, p, 1);
                if (!in_union(p)) break;
            }
            if (t > horizon) {
                rep.escaping = false;
                return rep;
            }
            rep.max_escape_time = std::max(rep.max_escape_time, t);
        }
    }
    return rep;
}

}  // namespace qpf::curves
