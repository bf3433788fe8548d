#include "qpf/curves/plgraph.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qpf/common.hpp"

namespace qpf::curves {

PLGraph::PLGraph(std::vector<std::pair<Q, Q>> points, long degree) : degree_(degree) {
    if (points.empty()) throw PreconditionError("PLGraph needs at least one breakpoint");
    for (auto& [t, v] : points) {
        Q k = floor_q(t);
        t -= k;
        v -= k * degree_;
    }
    std::sort(points.begin(), points.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (i && points[i].first == points[i - 1].first) {
            if (points[i].second != points[i - 1].second)
                throw PreconditionError("PLGraph: two values at theta " + to_string(points[i].first));
            continue;
        }
        t_.push_back(points[i].first);
        v_.push_back(points[i].second);
    }
}

PLGraph PLGraph::constant(const Q& c) { return PLGraph({{Q(0), c}}); }

PLGraph PLGraph::tent(const Q& offset, const Q& amplitude) {
    return PLGraph({{Q(0), offset}, {Q(1, 2), offset + amplitude}});
}

Q PLGraph::eval(const Q& theta) const {
    Q k = floor_q(theta);
    Q s = theta - k;
    Q shift = k * degree_;
    auto it = std::upper_bound(t_.begin(), t_.end(), s);
    std::size_t n = t_.size();
    if (it != t_.begin() && *(it - 1) == s) return v_[static_cast<std::size_t>(it - t_.begin()) - 1] + shift;
    Q t0, v0, t1, v1;
    if (it == t_.begin()) {
        t0 = t_[n - 1] - 1, v0 = v_[n - 1] - degree_, t1 = t_[0], v1 = v_[0];
    } else if (it == t_.end()) {
        t0 = t_[n - 1], v0 = v_[n - 1], t1 = t_[0] + 1, v1 = v_[0] + degree_;
    } else {
        std::size_t j = static_cast<std::size_t>(it - t_.begin());
        t0 = t_[j - 1], v0 = v_[j - 1], t1 = t_[j], v1 = v_[j];
    }
    return v0 + (v1 - v0) * (s - t0) / (t1 - t0) + shift;
}

double PLGraph::eval_d(double theta) const {
    double k = std::floor(theta);
    double s = theta - k;
    std::size_t n = t_.size();
    std::size_t lo = 0, hi = n;
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (t_[mid].get_d() <= s)
            lo = mid + 1;
        else
            hi = mid;
    }
    std::size_t j = lo;
    double t0, v0, t1, v1;
    if (j == 0) {
        t0 = t_[n - 1].get_d() - 1, v0 = v_[n - 1].get_d() - degree_, t1 = t_[0].get_d(), v1 = v_[0].get_d();
    } else if (j == n) {
        t0 = t_[n - 1].get_d(), v0 = v_[n - 1].get_d(), t1 = t_[0].get_d() + 1, v1 = v_[0].get_d() + degree_;
    } else {
        t0 = t_[j - 1].get_d(), v0 = v_[j - 1].get_d(), t1 = t_[j].get_d(), v1 = v_[j].get_d();
    }
    double w = t1 > t0 ? (s - t0) / (t1 - t0) : 0.0;
    return v0 + (v1 - v0) * w + k * static_cast<double>(degree_);
}

PLGraph PLGraph::shifted(const Q& dtheta, const Q& dvalue) const {
    std::vector<std::pair<Q, Q>> pts;
    pts.reserve(t_.size());
    for (std::size_t i = 0; i < t_.size(); ++i) pts.emplace_back(t_[i] + dtheta, v_[i] + dvalue);
    PLGraph g(std::move(pts), degree_);
    g.approximate_ = approximate_;
    return g;
}

std::vector<Q> PLGraph::breakpoint_offsets_in(const Q& a, const Q& len) const {
    std::vector<Q> out;
    for (const auto& t : t_) {
        Q off = frac_q(t - a);
        if (off > 0 && off < len) out.push_back(off);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::pair<Q, Q> PLGraph::range_over(const Q& a, const Q& len) const {
    Q lo = eval(a), hi = lo;
    auto consider = [&](const Q& th) {
        Q v = eval(th);
        if (v < lo) lo = v;
        if (v > hi) hi = v;
    };
    consider(a + len);
    for (const auto& off : breakpoint_offsets_in(a, len)) consider(a + off);
    return {lo, hi};
}

void PLGraph::splice(const Q& a, const Q& len, const std::vector<std::pair<Q, Q>>& points) {
    std::vector<Q> nt, nv;
    for (std::size_t i = 0; i < t_.size(); ++i) {
        Q off = frac_q(t_[i] - a);
        if (off <= len) continue;
        nt.push_back(t_[i]);
        nv.push_back(v_[i]);
    }
    std::vector<std::pair<Q, Q>> all;
    all.reserve(nt.size() + points.size());
    for (std::size_t i = 0; i < nt.size(); ++i) all.emplace_back(nt[i], nv[i]);
    for (const auto& p : points) {
        if (p.first < 0 || p.first >= 1) throw PreconditionError("splice expects canonical thetas");
        all.push_back(p);
    }
    std::sort(all.begin(), all.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    t_.clear();
    v_.clear();
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (i && all[i].first == all[i - 1].first) {
            if (all[i].second != all[i - 1].second) throw PreconditionError("splice: conflicting values");
            continue;
        }
        t_.push_back(all[i].first);
        v_.push_back(all[i].second);
    }
}

std::string PLGraph::to_text() const {
    std::ostringstream os;
    if (degree_ != 0) os << "# degree " << degree_ << "\n";
    for (std::size_t i = 0; i < t_.size(); ++i) os << to_string(t_[i]) << ' ' << to_string(v_[i]) << '\n';
    return os.str();
}

PLGraph PLGraph::from_text(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    long degree = 0;
    std::vector<std::pair<Q, Q>> pts;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ls(line.substr(1));
            std::string key;
            ls >> key;
            if (key == "degree") ls >> degree;
            continue;
        }
        std::istringstream ls(line);
        std::string a, b;
        if (!(ls >> a >> b)) throw ConfigError("bad curve line: " + line);
        pts.emplace_back(parse_q(a), parse_q(b));
    }
    return PLGraph(std::move(pts), degree);
}

}  // namespace qpf::curves
