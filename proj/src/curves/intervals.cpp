#include "qpf/curves/intervals.hpp"

#include <algorithm>

namespace qpf::curves {

bool CircArc::contains(const Q& theta) const { return len >= 1 || frac_q(theta - a) <= len; }

CircArc make_arc(const Q& a, const Q& b) {
    Q fa = frac_q(a);
    Q len = b - a;
    if (len < 0 || len > 1) len = frac_q(len);
    return CircArc{fa, len};
}

CircIntervalSet CircIntervalSet::full_circle() {
    CircIntervalSet s;
    s.full_ = true;
    return s;
}

CircIntervalSet CircIntervalSet::from_arcs(std::vector<CircArc> arcs) {
    CircIntervalSet s;
    for (auto& x : arcs) {
        if (x.len >= 1) return full_circle();
        x.a = frac_q(x.a);
    }
    if (arcs.empty()) return s;
    std::sort(arcs.begin(), arcs.end(), [](const CircArc& x, const CircArc& y) {
        return x.a < y.a || (x.a == y.a && x.len > y.len);
    });
    struct Span {
        Q lo, hi;
    };
    std::vector<Span> m;
    for (const auto& x : arcs) {
        Q hi = x.a + x.len;
        if (!m.empty() && x.a <= m.back().hi) {
            if (hi > m.back().hi) m.back().hi = hi;
        } else {
            m.push_back({x.a, hi});
        }
    }
    // the last span may run past 1 and swallow leading spans
    while (m.size() > 1 && m.front().lo + 1 <= m.back().hi) {
        Q hi = m.front().hi + 1;
        if (hi > m.back().hi) m.back().hi = hi;
        m.erase(m.begin());
    }
    for (const auto& sp : m) {
        if (sp.hi - sp.lo >= 1) return full_circle();
        s.arcs_.push_back(CircArc{sp.lo, sp.hi - sp.lo});
    }
    std::sort(s.arcs_.begin(), s.arcs_.end(), [](const CircArc& x, const CircArc& y) { return x.a < y.a; });
    return s;
}

std::size_t CircIntervalSet::degenerate_count() const {
    return static_cast<std::size_t>(
        std::count_if(arcs_.begin(), arcs_.end(), [](const CircArc& x) { return x.degenerate(); }));
}

bool CircIntervalSet::contains(const Q& theta) const {
    if (full_) return true;
    return std::any_of(arcs_.begin(), arcs_.end(), [&](const CircArc& x) { return x.contains(theta); });
}

bool CircIntervalSet::meets(const CircArc& arc) const { return !intersect(arc).empty(); }

Q CircIntervalSet::measure() const {
    if (full_) return Q(1);
    Q m = 0;
    for (const auto& x : arcs_) m += x.len;
    return m;
}

CircIntervalSet CircIntervalSet::unite(const CircIntervalSet& o) const {
    if (full_ || o.full_) return full_circle();
    std::vector<CircArc> all = arcs_;
    all.insert(all.end(), o.arcs_.begin(), o.arcs_.end());
    return from_arcs(std::move(all));
}

std::vector<CircArc> intersect_arcs(const CircArc& x, const CircArc& y) {
    if (x.len >= 1) return {y};
    if (y.len >= 1) return {x};
    std::vector<CircArc> out;
    for (int s = -1; s <= 1; ++s) {
        Q lo = std::max(Q(x.a), Q(y.a + s));
        Q hi = std::min(Q(x.a + x.len), Q(y.a + y.len + s));
        if (lo <= hi) out.push_back(CircArc{frac_q(lo), hi - lo});
    }
    return out;
}

CircIntervalSet CircIntervalSet::intersect(const CircArc& arc) const {
    if (full_) return from_arcs({arc});
    std::vector<CircArc> out;
    for (const auto& x : arcs_)
        for (auto& piece : intersect_arcs(x, arc)) out.push_back(piece);
    return from_arcs(std::move(out));
}

CircIntervalSet CircIntervalSet::translate(const Q& s) const {
    if (full_) return *this;
    std::vector<CircArc> out = arcs_;
    for (auto& x : out) x.a = frac_q(x.a + s);
    return from_arcs(std::move(out));
}

Q CircIntervalSet::min_gap() const {
    if (full_ || arcs_.size() < 2) return Q(1);
    Q best = 1;
    for (std::size_t i = 0; i < arcs_.size(); ++i) {
        const auto& cur = arcs_[i];
        const auto& nxt = arcs_[(i + 1) % arcs_.size()];
        Q gap = frac_q(nxt.a - cur.end());
        if (gap < best) best = gap;
    }
    return best;
}

std::string CircIntervalSet::to_string() const {
    if (full_) return "[full]";
    std::string s = "{";
    for (std::size_t i = 0; i < arcs_.size(); ++i) {
        if (i) s += ", ";
        s += "[" + curves::to_string(arcs_[i].a) + ", " + curves::to_string(arcs_[i].end()) + "]";
    }
    return s + "}";
}

}  // namespace qpf::curves
