#include "qpf/blowup/verify.hpp"

#include <algorithm>
#include <cmath>

#include "qpf/common.hpp"
#include "qpf/parallel.hpp"

namespace qpf::blowup {

namespace {

// Per-fiber results merged in index order, so the outcome never depends on the thread count.
template <class R, class F, class M>
R reduce_fibers(std::size_t n, unsigned threads, F&& per_fiber, M&& merge) {
    std::vector<R> parts(n);
    parallel_for(n, threads, [&](std::size_t i) { parts[i] = per_fiber(i); });
    R out{};
    for (std::size_t i = 0; i < n; ++i) merge(out, parts[i], i);
    return out;
}

double spec_mass(const MeasureSpec& s, const AtomGroup& g) {
    double m = 0.0;
    for (int n : g.members) m += s.at(n);
    return m;
}

// Largest gap between the empirical CDF of sorted heights z and the fiber CDF.
double ks_against(const FiberMeasure& mu, std::vector<double>& z) {
    std::sort(z.begin(), z.end());
    double n = static_cast<double>(z.size()), worst = 0.0;
    std::size_t i = 0;
    while (i < z.size()) {
        std::size_t j = i;
        while (j < z.size() && z[j] == z[i]) ++j;
        double v = z[i];
        double F = mu.cdf(v);
        double atom = 0.0;
        if (v == 0.0) {
            atom = mu.bottom + mu.top;
        } else {
            for (std::size_t g = 1; g < mu.groups.size(); ++g)
                if (std::fabs(mu.groups[g].pos - v) < 1e-13) atom += mu.groups[g].mass();
        }
        worst = std::max({worst, std::fabs(static_cast<double>(j) / n - F),
                          std::fabs(static_cast<double>(i) / n - (F - atom))});
        i = j;
    }
    return worst;
}

}  // namespace

AtlasAudit audit_atlas(const Pipeline& p, double leb_tol) {
    MeasureSpec win = window_spec(p.weights(), 0);
    std::size_t M = p.fibers();
    auto out = reduce_fibers<AtlasAudit>(
        M, p.config().threads,
        [&](std::size_t i) {
            AtlasAudit a = audit_fiber_atlas(p.g0(i).atlas, p.g0(i).mu, win, p.weights().eps, leb_tol);
            a.merge(audit_fiber_atlas(p.g1(i).atlas, p.g1(i).mu, win, p.weights().eps, leb_tol));
            return a;
        },
        [](AtlasAudit& acc, const AtlasAudit& a, std::size_t i) {
            if (i == 0) {
                acc = a;
                return;
            }
            acc.merge(a);
        });
    return out;
}

DensityReport density_report(const Pipeline& p) {
    const WeightScheme& w = p.weights();
    std::size_t M = p.fibers();
    int K = p.config().knots;
    auto r = reduce_fibers<DensityReport>(
        M, p.config().threads,
        [&](std::size_t i) {
            DensityReport d;
            d.fibers = 1;
            const GridFiber& g = p.g1(i);
            std::vector<double> hv(static_cast<std::size_t>(K));
            for (int j = 0; j < K; ++j) {
                hv[static_cast<std::size_t>(j)] = g.nu.density(g.mu.lift_domain(static_cast<double>(j) / K));
                d.min_h_grid = std::min(d.min_h_grid, hv[static_cast<std::size_t>(j)]);
            }
            d.min_h_pieces = g.nu.min_density();
            d.max_mass_error = std::fabs(g.nu.total - 1.0);
            auto node = [&](long j) { return hv[static_cast<std::size_t>(((j % K) + K) % K)]; };
            for (int m = -w.N; m <= w.N; ++m) {
                double target = m > -w.N ? w.at(m - 1) : w.at(m);
                double exact = 0.0, grid = 0.0;
                for (const Arc& c : g.atlas.u(m)) {
                    exact += g.nu.mass(c);
                    long j0 = static_cast<long>(std::floor(c.lo * K)), j1 = static_cast<long>(std::ceil(c.hi * K));
                    for (long j = j0; j < j1; ++j) {
                        double a = std::max(c.lo, static_cast<double>(j) / K);
                        double b = std::min(c.hi, static_cast<double>(j + 1) / K);
                        if (b <= a) continue;
                        double ta = a * K - static_cast<double>(j), tb = b * K - static_cast<double>(j);
                        double ha = node(j) + (node(j + 1) - node(j)) * ta;
                        double hb = node(j) + (node(j + 1) - node(j)) * tb;
                        grid += 0.5 * (ha + hb) * (b - a);
                    }
                }
                d.max_layer_error = std::max(d.max_layer_error, std::fabs(exact - target));
                d.max_layer_error_grid = std::max(d.max_layer_error_grid, std::fabs(grid - target));
            }
            return d;
        },
        [](DensityReport& acc, const DensityReport& d, std::size_t) {
            acc.fibers += d.fibers;
            acc.min_h_grid = std::min(acc.min_h_grid, d.min_h_grid);
            acc.min_h_pieces = std::min(acc.min_h_pieces, d.min_h_pieces);
            acc.max_layer_error = std::max(acc.max_layer_error, d.max_layer_error);
            acc.max_layer_error_grid = std::max(acc.max_layer_error_grid, d.max_layer_error_grid);
            acc.max_mass_error = std::max(acc.max_mass_error, d.max_mass_error);
        });
    r.h_floor = w.h_floor();
    return r;
}

ResidualReport verify_semiconjugacy(const Pipeline& p) {
    const WeightScheme& w = p.weights();
    std::size_t M = p.fibers();
    int K = p.config().knots;
    ResidualReport r;
    r.cell = 1.0 / K;
    r.bound = w.at(w.N) / w.beta + 4.0 * r.cell;
    r.per_fiber.assign(M, 0.0);
    r.shifted_per_fiber.assign(M, 0.0);
    std::vector<double> atom_err(M, 0.0);
    parallel_for(M, p.config().threads, [&](std::size_t i) {
        const GridFiber& a = p.g0(i);
        const GridFiber& b = p.g1(i);
        const FiberMeasure& pushed = p.pushed1(i);
        double phi1 = b.mu.lower_of(1);
        double c1 = b.nu.cum_lift(phi1);
        double disp = p.displacement(i);
        auto pi_shift = [&](double y) {
            double c = mod1(b.nu.cum_lift(y) - c1);
            return mod1(pushed.anchor_pos + pushed.quantile(-pushed.top + c));
        };
        double s = 0.0, t = 0.0;
        for (int j = 0; j < K; ++j) {
            double x = static_cast<double>(j) / K;
            double fx = p.f_lift(i, x);
            double target = a.mu.project(x) + disp;
            s = std::max(s, circ_dist(b.mu.project(fx), target));
            t = std::max(t, circ_dist(pi_shift(fx), target));
        }
        r.per_fiber[i] = s;
        r.shifted_per_fiber[i] = t;
        double e = 0.0;
        double phi0 = a.mu.lower_of(0);
        for (const AtomGroup& g : a.mu.groups) {
            const AtomGroup* h = pushed.group_of(g.members.front() + 1);
            if (h->members.size() != g.members.size()) {
                e = std::max(e, 1.0);
                continue;
            }
            // nu[phi1^-, f(x)] = x - phi0^- and the pushed plateau sits at the same nu-offset.
            double flo = b.nu.cum_lift(p.f_lift(i, g.lo)) - c1, fhi = b.nu.cum_lift(p.f_lift(i, g.hi)) - c1;
            e = std::max({e, circ_dist(flo, h->lo + pushed.top), circ_dist(fhi, h->hi + pushed.top),
                          circ_dist(g.lo - phi0, h->lo + pushed.top)});
        }
        atom_err[i] = e;
    });
    for (std::size_t i = 0; i < M; ++i) {
        r.sup = std::max(r.sup, r.per_fiber[i]);
        r.shifted_sup = std::max(r.shifted_sup, r.shifted_per_fiber[i]);
        r.atom_image_error = std::max(r.atom_image_error, atom_err[i]);
    }
    return r;
}

TvReport total_variation_law(const Pipeline& p) {
    const WeightScheme& w = p.weights();
    std::size_t M = p.fibers();
    TvReport r;
    r.expected = w.at(-w.N) + w.at(w.N);
    r.per_fiber.assign(M, 0.0);
    parallel_for(M, p.config().threads, [&](std::size_t i) {
        const GridFiber& g = p.g1(i);
        const FiberMeasure& q = p.pushed1(i);
        std::vector<std::pair<double, double>> atoms;  // position, signed mass
        for (const AtomGroup& a : g.mu.groups)
            atoms.emplace_back(mod1(g.mu.anchor_pos + a.pos), g.nu.mass({a.lo, a.hi}));
        for (const AtomGroup& a : q.groups) atoms.emplace_back(mod1(q.anchor_pos + a.pos), -a.mass());
        for (auto& a : atoms)
            if (a.first > 1.0 - 1e-12) a.first = 0.0;
        std::sort(atoms.begin(), atoms.end());
        double tv = 0.0;
        for (std::size_t k = 0; k < atoms.size();) {
            std::size_t l = k;
            double s = 0.0;
            while (l < atoms.size() && circ_dist(atoms[l].first, atoms[k].first) < 1e-12) s += atoms[l++].second;
            tv += std::fabs(s);
            k = l;
        }
        r.per_fiber[i] = tv;
    });
    long generic = 0;
    for (double tv : r.per_fiber) {
        double dev = std::fabs(tv - r.expected);
        if (dev < 1e-9) {
            ++generic;
            r.max_generic_deviation = std::max(r.max_generic_deviation, dev);
        }
    }
    r.generic_fraction = static_cast<double>(generic) / static_cast<double>(M);
    return r;
}

ProjectionAudit audit_projection(const Pipeline& p, int fibers, long samples, std::uint64_t seed) {
    ProjectionAudit r;
    r.fibers = fibers;
    r.samples = samples;
    MeasureSpec win = window_spec(p.weights(), 0);
    std::size_t M = p.fibers();
    std::vector<double> ks(static_cast<std::size_t>(fibers)), aw(static_cast<std::size_t>(fibers));
    parallel_for(static_cast<std::size_t>(fibers), p.config().threads, [&](std::size_t f) {
        std::size_t i = f * M / static_cast<std::size_t>(fibers);
        const FiberMeasure& mu = p.g0(i).mu;
        Rng rng(seed ^ (0x9E3779B97F4A7C15ull * (i + 1)));
        std::vector<double> z(static_cast<std::size_t>(samples));
        for (long k = 0; k < samples; ++k) {
            double x = (static_cast<double>(k) + rng.uniform()) / static_cast<double>(samples);
            // heights above the anchor, taken before the rotation so atoms stay exact
            double y = mu.quantile(mu.lift_domain(x));
            if (y >= 1.0) y = 0.0;
            z[static_cast<std::size_t>(k)] = y;
        }
        ks[f] = ks_against(mu, z);
        double e = 0.0;
        for (const AtomGroup& g : mu.groups) {
            auto [lo, hi] = mu.preimage(mu.anchor_pos + g.pos);
            e = std::max(e, std::fabs((hi - lo) - spec_mass(win, g)));
        }
        aw[f] = e;
    });
    for (int f = 0; f < fibers; ++f) {
        r.max_ks = std::max(r.max_ks, ks[static_cast<std::size_t>(f)]);
        r.max_atom_width_error = std::max(r.max_atom_width_error, aw[static_cast<std::size_t>(f)]);
    }
    return r;
}

TransportReport transport_check(const Pipeline& p, int fibers, long samples, int pairs, std::uint64_t seed) {
    TransportReport r;
    r.fibers = fibers;
    std::size_t M = p.fibers();
    std::vector<double> ks(static_cast<std::size_t>(fibers)), pe(static_cast<std::size_t>(fibers)),
        ge(static_cast<std::size_t>(fibers));
    parallel_for(static_cast<std::size_t>(fibers), p.config().threads, [&](std::size_t f) {
        std::size_t i = f * M / static_cast<std::size_t>(fibers);
        const GridFiber& b = p.g1(i);
        Rng rng(seed ^ (0xD1B54A32D192ED03ull * (i + 1)));
        std::vector<double> u(static_cast<std::size_t>(samples));
        for (long k = 0; k < samples; ++k) {
            double x = (static_cast<double>(k) + rng.uniform()) / static_cast<double>(samples);
            double y = p.f_lift(i, x);
            u[static_cast<std::size_t>(k)] = y - std::floor(y - b.nu.start);
        }
        std::sort(u.begin(), u.end());
        double n = static_cast<double>(samples), worst = 0.0;
        for (std::size_t k = 0; k < u.size(); ++k) {
            double F = b.nu.cum(u[k]);
            worst = std::max({worst, std::fabs(static_cast<double>(k + 1) / n - F),
                              std::fabs(static_cast<double>(k) / n - F)});
        }
        ks[f] = worst;
        double e = 0.0;
        for (int q = 0; q < pairs; ++q) {
            double x1 = rng.uniform(), x2 = rng.uniform();
            if (x2 < x1) std::swap(x1, x2);
            double m = b.nu.cum_lift(p.f_lift(i, x2)) - b.nu.cum_lift(p.f_lift(i, x1));
            e = std::max(e, std::fabs(m - (x2 - x1)));
        }
        pe[f] = e;
        ge[f] = circ_dist(p.f_lift(i, p.g0(i).mu.lower_of(0)), b.mu.lower_of(1));
    });
    for (int f = 0; f < fibers; ++f) {
        r.max_ks = std::max(r.max_ks, ks[static_cast<std::size_t>(f)]);
        r.max_pair_error = std::max(r.max_pair_error, pe[static_cast<std::size_t>(f)]);
        r.f_graph_error = std::max(r.f_graph_error, ge[static_cast<std::size_t>(f)]);
    }
    return r;
}

NuCompare compare_nu_routes(const Pipeline& p, int stride) {
    NuCompare r;
    const WeightScheme& w = p.weights();
    int K = p.config().knots;
    for (std::size_t i = 0; i < p.fibers(); i += static_cast<std::size_t>(stride)) {
        const GridFiber& g = p.g1(i);
        FiberDensity gen = build_density(g.atlas, g.bumps, w, DensityRoute::General);
        ++r.fibers;
        r.min_general_density = std::min(r.min_general_density, gen.min_density());
        for (int m = -w.N; m <= w.N; ++m) {
            double a = 0.0, b = 0.0;
            for (const Arc& c : g.atlas.u(m)) {
                a += g.nu.mass(c);
                b += gen.mass(c);
            }
            r.max_layer_diff = std::max(r.max_layer_diff, std::fabs(a - b));
        }
        for (int j = 0; j < K; ++j) {
            double u = g.mu.lift_domain(static_cast<double>(j) / K);
            if (g.atlas.owner(u) >= g.atlas.lo) continue;
            r.max_cdf_diff_off_atlas = std::max(r.max_cdf_diff_off_atlas, std::fabs(g.nu.cum(u) - gen.cum(u)));
        }
    }
    return r;
}

long probe_hitting_time(const Pipeline& p, const ProbePair& pr, long n_max, int samples, double cell_frac) {
    double half = cell_frac / static_cast<double>(p.fibers());
    long best = -1;
    for (int a = 0; a < samples; ++a) {
        double th = pr.theta_u + (samples > 1 ? (2.0 * a / (samples - 1) - 1.0) * half : 0.0);
        if (a == samples / 2) th = pr.theta_u;
        for (int b = 0; b < samples; ++b) {
            double x = pr.x_u.lo + (b + 0.5) / samples * pr.x_u.len();
            double t = th;
            for (long n = 1; n <= n_max && (best < 0 || n < best); ++n) {
                x = p.f_at(t, x);
                t = mod1(t + p.omega());
                if (circ_dist(t, pr.theta_v) > half) continue;
                double rel = mod1(x - pr.x_v.lo);
                if (rel > 0.0 && rel < pr.x_v.len()) {
                    best = n;
                    break;
                }
            }
        }
    }
    return best;
}

NonminimalityReport verify_nonminimality(const Pipeline& p, const std::vector<curves::CrossingWitness>& witnesses,
                                         long n_max) {
    NonminimalityReport r;
    const WeightScheme& w = p.weights();
    r.required = w.at(0);
    r.annulus_hi = 1.0;
    for (std::size_t i = 0; i < p.fibers(); ++i)
        r.annulus_hi = std::min({r.annulus_hi, p.g0(i).mu.bottom, p.g1(i).mu.bottom});
    r.witness = r.annulus_hi - r.annulus_lo >= r.required - 1e-9;

    MeasureSpec win = window_spec(w, 0);
    const CurveFamily& fam = p.family();
    curves::ExactBase R = p.base();
    for (const auto& wit : witnesses) {
        if (wit.m > w.N) continue;  // Gamma_m not in the window
        R.max_depth = std::max(R.max_depth, wit.m);
        curves::CircIntervalSet X = curves::intersection_projection(fam.curve(0), fam.curve(static_cast<int>(wit.m)));
        curves::CircArc Im{curves::frac_q(wit.I.a + R.omega * wit.m), wit.I.len};
        curves::CircIntervalSet pieces = X.intersect(Im).intersect(wit.J);
        for (const auto& arc : pieces.arcs()) {
            Q tv = curves::frac_q(arc.a + arc.len / 2);
            Q tu = curves::frac_q(tv - R.omega * wit.m);
            FiberMeasure mu = build_fiber_measure(fam, win, tu);
            FiberMeasure mv = build_fiber_measure(fam, win, tv);
            const AtomGroup* gu = mu.group_of(0);
            const AtomGroup* gv = mv.group_of(0);
            ProbePair pr;
            pr.theta_u = curves::to_d(tu);
            pr.theta_v = curves::to_d(tv);
            double shrink = 0.05 * gu->mass();
            pr.x_u = {gu->lo + shrink, gu->hi - shrink};
            pr.x_v = {gv->lo, gv->hi};
            pr.m = wit.m;
            pr.hit = probe_hitting_time(p, pr, n_max);
            r.pairs.push_back(pr);
        }
    }
    for (const auto& pr : r.pairs) (pr.hit > 0 ? r.found : r.inconclusive)++;
    r.found_fraction = r.pairs.empty() ? 0.0 : static_cast<double>(r.found) / static_cast<double>(r.pairs.size());
    return r;
}

HoelderReport hoelder_report(const Pipeline& p, int fibers) {
    HoelderReport r;
    const WeightScheme& w = p.weights();
    for (int n = -w.N; n <= w.N; ++n) r.max_constant = std::max(r.max_constant, p.g1(0).bumps.holder_constant(n));
    for (int f = 0; f < fibers; ++f) {
        std::size_t i = static_cast<std::size_t>(f) * p.fibers() / static_cast<std::size_t>(fibers);
        const GridFiber& g = p.g1(i);
        double al = g.bumps.alpha;
        for (int n = -w.N; n <= w.N; ++n) {
            double C = g.bumps.holder_constant(n);
            for (const Arc& c : g.atlas.u(n)) {
                for (int k = 1; k <= 16; ++k) {
                    double h = c.len() * std::pow(0.5, k + 1);
                    double x = c.lo + h;
                    double q = g.bumps.value(g.atlas, n, x) / std::pow(h, al);  // g vanishes at the edge
                    double y = c.lo + 0.5 * c.len();
                    double q2 = std::fabs(g.bumps.value(g.atlas, n, y) - g.bumps.value(g.atlas, n, y - h)) / std::pow(h, al);
                    r.max_quotient_ratio = std::max({r.max_quotient_ratio, q / C, q2 / C});
                }
            }
        }
    }
    return r;
}

}  // namespace qpf::blowup
