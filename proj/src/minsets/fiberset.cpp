#include "qpf/minsets/fiberset.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qpf/parallel.hpp"

namespace qpf::minsets {

FiberSet::FiberSet(std::size_t fibers, std::size_t bins)
    : fibers_(fibers), bins_(bins), words_((bins + 63) / 64), bits_(fibers * ((bins + 63) / 64), 0) {
    if (fibers == 0 || bins == 0) throw ConfigError("fiber set needs positive grid sizes");
}

void FiberSet::mark(double theta, double x) {
    auto f = std::min(fibers_ - 1, static_cast<std::size_t>(mod1(theta) * static_cast<double>(fibers_)));
    auto b = std::min(bins_ - 1, static_cast<std::size_t>(mod1(x) * static_cast<double>(bins_)));
    set(f, b);
}

std::size_t FiberSet::occupied(std::size_t f) const {
    std::size_t n = 0;
    for (std::size_t w = 0; w < words_; ++w) n += static_cast<std::size_t>(std::popcount(row(f)[w]));
    return n;
}

std::size_t FiberSet::occupied() const {
    std::size_t n = 0;
    for (auto w : bits_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
}

namespace {

// Runs that do not cross bin 0.
std::vector<std::pair<std::size_t, std::size_t>> linear_runs(const FiberSet& K, std::size_t f) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t b = 0, B = K.bins();
    while (b < B) {
        if (!K.test(f, b)) {
            ++b;
            continue;
        }
        std::size_t s = b;
        while (b < B && K.test(f, b)) ++b;
        out.emplace_back(s, b - s);
    }
    return out;
}

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> FiberSet::runs(std::size_t f) const {
    auto r = linear_runs(*this, f);
    if (r.size() >= 2 && r.front().first == 0 && r.back().first + r.back().second == bins_) {
        r.back().second += r.front().second;
        r.erase(r.begin());
    }
    return r;
}

int FiberSet::clusters(std::size_t f, std::size_t gap) const {
    auto r = runs(f);
    if (r.empty()) return 0;
    if (r.size() == 1) return 1;
    int wide = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        const auto& a = r[i];
        const auto& b = r[(i + 1) % r.size()];
        std::size_t end = (a.first + a.second) % bins_;
        std::size_t g = (b.first + bins_ - end) % bins_;
        if (g > gap) ++wide;
    }
    return std::max(wide, 1);
}

std::string FiberSet::to_rle() const {
    std::ostringstream os;
    os << "fiberset v1 " << fibers_ << ' ' << bins_ << '\n';
    for (std::size_t f = 0; f < fibers_; ++f) {
        os << f;
        for (auto [s, l] : linear_runs(*this, f)) os << ' ' << s << ':' << l;
        os << '\n';
    }
    return os.str();
}

FiberSet FiberSet::from_rle(const std::string& text) {
    std::istringstream is(text);
    std::string tag, ver;
    std::size_t F = 0, B = 0;
    if (!(is >> tag >> ver >> F >> B) || tag != "fiberset" || ver != "v1")
        throw ConfigError("fiber set header must read 'fiberset v1 <fibers> <bins>'");
    FiberSet K(F, B);
    std::string line;
    std::getline(is, line);
    for (std::size_t f = 0; f < F; ++f) {
        if (!std::getline(is, line)) throw ConfigError("fiber set truncated at row " + std::to_string(f));
        std::istringstream ls(line);
        std::size_t idx = 0;
        if (!(ls >> idx) || idx != f) throw ConfigError("fiber set row " + std::to_string(f) + " out of order");
        std::string run;
        while (ls >> run) {
            auto colon = run.find(':');
            if (colon == std::string::npos) throw ConfigError("bad run '" + run + "'");
            std::size_t s = std::stoul(run.substr(0, colon)), l = std::stoul(run.substr(colon + 1));
            if (s + l > B) throw ConfigError("run '" + run + "' exceeds the bin count");
            for (std::size_t b = s; b < s + l; ++b) K.set(f, b);
        }
    }
    return K;
}

FiberSet approximate_minimal_set(const core::QpfSystem& f, const OrbitOptions& opt) {
    if (opt.iters < 10 * static_cast<std::int64_t>(opt.fibers))
        throw PreconditionError("iters " + std::to_string(opt.iters) + " below 10 x fiber grid " +
                                std::to_string(opt.fibers));
    if (opt.burnin < 0) throw PreconditionError("negative burn-in");
    FiberSet K(opt.fibers, opt.bins);
    Rng rng(opt.seed);
    double theta = rng.uniform(), x = rng.uniform();
    for (std::int64_t n = 0; n < opt.burnin; ++n) {
        x = mod1(f.lift(theta, x));
        theta = mod1(theta + f.omega);
    }
    for (std::int64_t n = 0; n < opt.iters; ++n) {
        K.mark(theta, x);
        x = mod1(f.lift(theta, x));
        theta = mod1(theta + f.omega);
    }
    return K;
}

ComponentCounts fiber_component_count(const FiberSet& K, std::size_t gap, unsigned threads) {
    ComponentCounts out;
    out.per_fiber.assign(K.fibers(), -1);
    parallel_for(K.fibers(), threads, [&](std::size_t f) {
        if (K.occupied(f) > 0) out.per_fiber[f] = K.clusters(f, gap);
    });
    std::vector<long> hist;
    long nonempty = 0;
    for (int c : out.per_fiber) {
        if (c < 0) continue;
        ++nonempty;
        if (static_cast<std::size_t>(c) >= hist.size()) hist.resize(static_cast<std::size_t>(c) + 1, 0);
        ++hist[static_cast<std::size_t>(c)];
    }
    if (nonempty == 0) throw PreconditionError("fiber set is empty");
    for (std::size_t c = 0; c < hist.size(); ++c)
        if (hist[c] > 0) {
            out.c_min = static_cast<int>(c);
            out.fraction_at_min = static_cast<double>(hist[c]) / static_cast<double>(nonempty);
            break;
        }
    auto it = std::max_element(hist.begin(), hist.end());
    out.modal = static_cast<int>(it - hist.begin());
    out.modal_fraction = static_cast<double>(*it) / static_cast<double>(nonempty);
    return out;
}

namespace {

struct Dsu {
    std::vector<std::size_t> p;
    explicit Dsu(std::size_t n) : p(n) { std::iota(p.begin(), p.end(), 0); }
    std::size_t find(std::size_t x) {
        while (p[x] != x) x = p[x] = p[p[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a), b = find(b);
        if (a != b) p[std::max(a, b)] = std::min(a, b);
    }
};

// Circular bin intervals [s, s+l) and [t, t+m) share a bin.
bool runs_overlap(std::size_t s, std::size_t l, std::size_t t, std::size_t m, std::size_t B) {
    if (l >= B || m >= B) return true;
    return (t + B - s) % B < l || (s + B - t) % B < m;
}

}  // namespace

StructureReport structure_diagnostics(const FiberSet& K, const StructureOptions& opt, unsigned threads) {
    StructureReport rep;
    const std::size_t F = K.fibers(), B = K.bins();

    // 4-connected components of occupied cells, wrapping in both directions, via runs.
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> runs(F);
    parallel_for(F, threads, [&](std::size_t f) { runs[f] = K.runs(f); });
    std::vector<std::size_t> base(F + 1, 0);
    for (std::size_t f = 0; f < F; ++f) base[f + 1] = base[f] + runs[f].size();
    Dsu dsu(base[F]);
    for (std::size_t f = 0; f < F; ++f) {
        std::size_t g = (f + 1) % F;
        if (g == f) break;
        for (std::size_t i = 0; i < runs[f].size(); ++i)
            for (std::size_t j = 0; j < runs[g].size(); ++j)
                if (runs_overlap(runs[f][i].first, runs[f][i].second, runs[g][j].first, runs[g][j].second, B))
                    dsu.unite(base[f] + i, base[g] + j);
    }
    std::vector<std::size_t> columns(base[F], 0), last(base[F], F);
    for (std::size_t f = 0; f < F; ++f)
        for (std::size_t i = 0; i < runs[f].size(); ++i) {
            std::size_t r = dsu.find(base[f] + i);
            if (last[r] != f) {
                last[r] = f;
                ++columns[r];
            }
        }
    for (std::size_t r = 0; r < base[F]; ++r) {
        if (dsu.find(r) != r) continue;
        ++rep.components;
        rep.max_extent = std::max(rep.max_extent, columns[r] - 1);
        if (columns[r] == F) rep.strip_like = true;
    }
    rep.vertical_segments = rep.components > 0 && rep.max_extent <= 1;

    // Open rectangles: the occupied columns inside a nonempty rectangle should contain
    // two adjacent columns, the grid shadow of a fiber interval.
    Rng rng(opt.seed);
    std::size_t rw = std::min(opt.rect_fibers, F), rh = std::min(opt.rect_bins, B);
    for (int s = 0; s < opt.rect_samples; ++s) {
        std::size_t f0 = static_cast<std::size_t>(rng.below(static_cast<std::int64_t>(F)));
        std::size_t b0 = static_cast<std::size_t>(rng.below(static_cast<std::int64_t>(B)));
        std::vector<bool> col(rw, false);
        bool any = false;
        for (std::size_t df = 0; df < rw; ++df)
            for (std::size_t db = 0; db < rh && !col[df]; ++db)
                if (K.test((f0 + df) % F, (b0 + db) % B)) col[df] = any = true;
        if (!any) {
            ++rep.rect_skipped;
            continue;
        }
        ++rep.rect_used;
        for (std::size_t df = 0; df + 1 < rw; ++df)
            if (col[df] && col[df + 1]) {
                ++rep.rect_with_interval;
                break;
            }
    }

    // Fiber interior emptiness, fiber measure and avoided sets.
    std::vector<char> free_ok(F, 0);
    std::vector<double> measure(F, 0.0);
    std::vector<long> viol(F, 0);
    const std::size_t w = opt.interior_window;
    parallel_for(F, threads, [&](std::size_t f) {
        measure[f] = static_cast<double>(K.occupied(f)) / static_cast<double>(B);
        bool ok = K.occupied(f) > 0;
        for (const auto& [s, l] : runs[f])
            if (l > 2 * w) ok = false;  // a bin in the middle of the run has no free bin within w
        free_ok[f] = ok;
        if (opt.avoid && f < opt.avoid->size()) {
            const double cell = 1.0 / static_cast<double>(B);
            for (const auto& [lo, hi] : (*opt.avoid)[f]) {
                // Bins lying inside (lo + cell, hi - cell), read circularly.
                double a = lo + cell, b = hi - cell;
                if (b <= a) continue;
                auto first = static_cast<long>(std::ceil(a / cell));
                auto end = static_cast<long>(std::floor(b / cell));
                for (long k = first; k < end; ++k) {
                    auto bin = static_cast<std::size_t>(((k % static_cast<long>(B)) + static_cast<long>(B)) %
                                                        static_cast<long>(B));
                    if (K.test(f, bin)) ++viol[f];
                }
            }
        }
    });
    long nonempty = 0, fr = 0;
    for (std::size_t f = 0; f < F; ++f) {
        if (K.occupied(f) == 0) continue;
        ++nonempty;
        fr += free_ok[f];
        rep.max_fiber_measure = std::max(rep.max_fiber_measure, measure[f]);
        rep.avoid_violations += viol[f];
    }
    rep.interior_free_fraction = nonempty ? static_cast<double>(fr) / static_cast<double>(nonempty) : 0.0;
    if (opt.beta) rep.measure_ok = rep.max_fiber_measure <= *opt.beta + 2.0 / static_cast<double>(B);

    // Diagnostics disagree: neither segments nor a strip, or the fiber-interior proxy is split.
    bool mixed_interior = rep.interior_free_fraction > 0.1 && rep.interior_free_fraction < 0.9;
    rep.ambiguous = (!rep.vertical_segments && !rep.strip_like) || mixed_interior;
    if (rep.ambiguous) rep.question = kOpenQuestion;
    return rep;
}

std::pair<std::size_t, double> invariance_defect(const FiberSet& K, const core::QpfSystem& f, unsigned threads) {
    const std::size_t F = K.fibers(), B = K.bins();
    std::vector<std::size_t> miss(F, 0);
    parallel_for(F, threads, [&](std::size_t i) {
        double theta = (static_cast<double>(i) + 0.5) / static_cast<double>(F);
        double t1 = mod1(theta + f.omega);
        auto j = std::min(F - 1, static_cast<std::size_t>(t1 * static_cast<double>(F)));
        for (std::size_t b = 0; b < B; ++b) {
            if (!K.test(i, b)) continue;
            double y = mod1(f.lift(theta, (static_cast<double>(b) + 0.5) / static_cast<double>(B)));
            auto c = std::min(B - 1, static_cast<std::size_t>(y * static_cast<double>(B)));
            if (!K.test(j, c)) ++miss[i];
        }
    });
    std::size_t total = std::accumulate(miss.begin(), miss.end(), std::size_t{0});
    return {total, 2.0 * std::sqrt(static_cast<double>(K.occupied()))};
}

}  // namespace qpf::minsets
